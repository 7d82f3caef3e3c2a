#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace deduct {

bool is_identifier(const std::string& s);

// First-order terms. Zero-ary symbols are constants; Function always has args.
struct Term {
  enum class Kind { Variable, Constant, Function };

  Kind kind = Kind::Constant;
  std::string name;
  std::vector<Term> args;

  static Term var(std::string name);
  static Term constant(std::string name);
  static Term func(std::string name, std::vector<Term> args);

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable formula tree. Atom uses pred/args; Not and quantifiers use lhs;
// binary connectives use lhs/rhs; quantifiers store the bound variable in var.
struct Formula {
  enum class Kind { Atom, Not, And, Or, Xor, Implies, Iff, Forall, Exists };

  Kind kind = Kind::Atom;
  std::string pred;        // Atom predicate name
  std::vector<Term> args;  // Atom arguments
  std::string var;         // Forall/Exists bound variable
  FormulaPtr lhs;
  FormulaPtr rhs;
};

FormulaPtr atom(std::string pred, std::vector<Term> args = {});
FormulaPtr neg(FormulaPtr f);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr exclusive(FormulaPtr a, FormulaPtr b);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
FormulaPtr iff(FormulaPtr a, FormulaPtr b);
FormulaPtr forall(std::string var, FormulaPtr body);
FormulaPtr exists(std::string var, FormulaPtr body);

bool is_binary(Formula::Kind k);
bool is_quantifier(Formula::Kind k);

bool struct_equal(const FormulaPtr& a, const FormulaPtr& b);

// Variables with at least one unbound occurrence.
std::set<std::string> free_variables(const FormulaPtr& f);

std::set<std::string> term_variables(const Term& t);

// Capture-avoiding substitution of every free occurrence of v by t.
// Binders that would capture a variable of t are renamed with a numeric
// suffix; renaming is deterministic.
FormulaPtr substitute(const FormulaPtr& f, const std::string& v, const Term& t);

// Identity up to consistent renaming of bound variables.
bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b);

struct Premise {
  std::string label;
  FormulaPtr formula;
  std::string gloss;
};

struct PredicateDecl {
  std::string name;
  int arity = 0;
  std::string gloss;
};

// Named premises plus one conclusion.
struct Problem {
  std::vector<Premise> premises;
  FormulaPtr conclusion;
  std::string conclusion_gloss;
  std::vector<PredicateDecl> declared_predicates;
};

// Throws std::invalid_argument on duplicate premise labels or duplicate
// (name, arity) declarations.
void validate_problem(const Problem& p);

bool alpha_equal_problem(const Problem& a, const Problem& b);

// Universal closure over the free variables of f, in sorted name order.
FormulaPtr close_universally(const FormulaPtr& f);

}  // namespace deduct
