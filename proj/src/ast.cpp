#include "deduct/ast.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace deduct {

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

static void require_identifier(const std::string& s, const char* what) {
  if (!is_identifier(s))
    throw std::invalid_argument(std::string(what) + " is not a valid identifier: '" + s + "'");
}

Term Term::var(std::string name) {
  require_identifier(name, "variable");
  return Term{Kind::Variable, std::move(name), {}};
}

Term Term::constant(std::string name) {
  require_identifier(name, "constant");
  return Term{Kind::Constant, std::move(name), {}};
}

Term Term::func(std::string name, std::vector<Term> args) {
  require_identifier(name, "function");
  if (args.empty())
    throw std::invalid_argument("zero-ary function '" + name + "'; use a constant");
  return Term{Kind::Function, std::move(name), std::move(args)};
}

bool Term::operator==(const Term& other) const {
  return kind == other.kind && name == other.name && args == other.args;
}

FormulaPtr atom(std::string pred, std::vector<Term> args) {
  require_identifier(pred, "predicate");
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->pred = std::move(pred);
  f->args = std::move(args);
  return f;
}

FormulaPtr neg(FormulaPtr inner) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Not;
  f->lhs = std::move(inner);
  return f;
}

static FormulaPtr binary(Formula::Kind k, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return binary(Formula::Kind::And, std::move(a), std::move(b)); }
FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return binary(Formula::Kind::Or, std::move(a), std::move(b)); }
FormulaPtr exclusive(FormulaPtr a, FormulaPtr b) { return binary(Formula::Kind::Xor, std::move(a), std::move(b)); }
FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return binary(Formula::Kind::Implies, std::move(a), std::move(b)); }
FormulaPtr iff(FormulaPtr a, FormulaPtr b) { return binary(Formula::Kind::Iff, std::move(a), std::move(b)); }

static FormulaPtr quantified(Formula::Kind k, std::string var, FormulaPtr body) {
  require_identifier(var, "variable");
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->var = std::move(var);
  f->lhs = std::move(body);
  return f;
}

FormulaPtr forall(std::string var, FormulaPtr body) {
  return quantified(Formula::Kind::Forall, std::move(var), std::move(body));
}

FormulaPtr exists(std::string var, FormulaPtr body) {
  return quantified(Formula::Kind::Exists, std::move(var), std::move(body));
}

bool is_binary(Formula::Kind k) {
  return k == Formula::Kind::And || k == Formula::Kind::Or || k == Formula::Kind::Xor ||
         k == Formula::Kind::Implies || k == Formula::Kind::Iff;
}

bool is_quantifier(Formula::Kind k) {
  return k == Formula::Kind::Forall || k == Formula::Kind::Exists;
}

bool struct_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::Atom:
      return a->pred == b->pred && a->args == b->args;
    case Formula::Kind::Not:
      return struct_equal(a->lhs, b->lhs);
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return a->var == b->var && struct_equal(a->lhs, b->lhs);
    default:
      return struct_equal(a->lhs, b->lhs) && struct_equal(a->rhs, b->rhs);
  }
}

std::set<std::string> term_variables(const Term& t) {
  std::set<std::string> out;
  if (t.kind == Term::Kind::Variable) {
    out.insert(t.name);
  } else {
    for (const auto& a : t.args) {
      auto sub = term_variables(a);
      out.insert(sub.begin(), sub.end());
    }
  }
  return out;
}

static void collect_free(const FormulaPtr& f, std::set<std::string>& bound,
                         std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (const auto& t : f->args)
        for (const auto& v : term_variables(t))
          if (!bound.count(v)) out.insert(v);
      break;
    case Formula::Kind::Not:
      collect_free(f->lhs, bound, out);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      bool was_bound = bound.count(f->var) > 0;
      bound.insert(f->var);
      collect_free(f->lhs, bound, out);
      if (!was_bound) bound.erase(f->var);
      break;
    }
    default:
      collect_free(f->lhs, bound, out);
      collect_free(f->rhs, bound, out);
  }
}

std::set<std::string> free_variables(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

static void collect_all_names(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      for (const auto& t : f->args) {
        std::vector<const Term*> stack{&t};
        while (!stack.empty()) {
          const Term* cur = stack.back();
          stack.pop_back();
          out.insert(cur->name);
          for (const auto& a : cur->args) stack.push_back(&a);
        }
      }
      break;
    }
    case Formula::Kind::Not:
      collect_all_names(f->lhs, out);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      out.insert(f->var);
      collect_all_names(f->lhs, out);
      break;
    default:
      collect_all_names(f->lhs, out);
      collect_all_names(f->rhs, out);
  }
}

// Smallest numeric suffix that avoids every name in `taken`.
static std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  for (int i = 1;; ++i) {
    std::string candidate = base + std::to_string(i);
    if (!taken.count(candidate)) return candidate;
  }
}

static Term substitute_term(const Term& t, const std::string& v, const Term& repl) {
  if (t.kind == Term::Kind::Variable) return t.name == v ? repl : t;
  Term out = t;
  for (auto& a : out.args) a = substitute_term(a, v, repl);
  return out;
}

FormulaPtr substitute(const FormulaPtr& f, const std::string& v, const Term& t) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      std::vector<Term> args;
      args.reserve(f->args.size());
      for (const auto& a : f->args) args.push_back(substitute_term(a, v, t));
      return atom(f->pred, std::move(args));
    }
    case Formula::Kind::Not:
      return neg(substitute(f->lhs, v, t));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      if (f->var == v) return f;  // v is bound here, nothing free below
      auto tvars = term_variables(t);
      FormulaPtr body = f->lhs;
      std::string bvar = f->var;
      if (tvars.count(bvar) && free_variables(body).count(v)) {
        // Rename the binder before substituting to avoid capture.
        std::set<std::string> taken;
        collect_all_names(body, taken);
        taken.insert(tvars.begin(), tvars.end());
        taken.insert(v);
        std::string renamed = fresh_name(bvar, taken);
        body = substitute(body, bvar, Term::var(renamed));
        bvar = renamed;
      }
      auto sub = substitute(body, v, t);
      return f->kind == Formula::Kind::Forall ? forall(bvar, sub) : exists(bvar, sub);
    }
    default: {
      auto l = substitute(f->lhs, v, t);
      auto r = substitute(f->rhs, v, t);
      auto out = std::make_shared<Formula>();
      out->kind = f->kind;
      out->lhs = std::move(l);
      out->rhs = std::move(r);
      return out;
    }
  }
}

namespace {

// De Bruijn-style comparison: variables compare by binder depth.
using Env = std::vector<std::string>;  // innermost binder last

int binder_index(const Env& env, const std::string& name) {
  for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
    if (env[static_cast<size_t>(i)] == name) return i;
  return -1;
}

bool alpha_term(const Term& a, const Term& b, const Env& ea, const Env& eb) {
  if (a.kind == Term::Kind::Variable || b.kind == Term::Kind::Variable) {
    if (a.kind != b.kind) return false;
    int ia = binder_index(ea, a.name);
    int ib = binder_index(eb, b.name);
    if (ia != ib) return false;
    if (ia < 0) return a.name == b.name;  // both free
    return true;
  }
  if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!alpha_term(a.args[i], b.args[i], ea, eb)) return false;
  return true;
}

bool alpha_rec(const FormulaPtr& a, const FormulaPtr& b, Env& ea, Env& eb) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::Atom: {
      if (a->pred != b->pred || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_term(a->args[i], b->args[i], ea, eb)) return false;
      return true;
    }
    case Formula::Kind::Not:
      return alpha_rec(a->lhs, b->lhs, ea, eb);
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      ea.push_back(a->var);
      eb.push_back(b->var);
      bool ok = alpha_rec(a->lhs, b->lhs, ea, eb);
      ea.pop_back();
      eb.pop_back();
      return ok;
    }
    default:
      return alpha_rec(a->lhs, b->lhs, ea, eb) && alpha_rec(a->rhs, b->rhs, ea, eb);
  }
}

}  // namespace

bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  Env ea, eb;
  return alpha_rec(a, b, ea, eb);
}

void validate_problem(const Problem& p) {
  std::set<std::string> labels;
  for (const auto& prem : p.premises) {
    require_identifier(prem.label, "premise label");
    if (!labels.insert(prem.label).second)
      throw std::invalid_argument("duplicate premise label '" + prem.label + "'");
    if (!prem.formula) throw std::invalid_argument("premise '" + prem.label + "' has no formula");
  }
  if (!p.conclusion) throw std::invalid_argument("problem has no conclusion");
  std::set<std::pair<std::string, int>> decls;
  for (const auto& d : p.declared_predicates) {
    if (!decls.insert({d.name, d.arity}).second)
      throw std::invalid_argument("duplicate predicate declaration '" + d.name + "/" +
                                  std::to_string(d.arity) + "'");
  }
}

bool alpha_equal_problem(const Problem& a, const Problem& b) {
  if (a.premises.size() != b.premises.size()) return false;
  for (size_t i = 0; i < a.premises.size(); ++i)
    if (!alpha_equal(a.premises[i].formula, b.premises[i].formula)) return false;
  return alpha_equal(a.conclusion, b.conclusion);
}

FormulaPtr close_universally(const FormulaPtr& f) {
  auto fv = free_variables(f);
  FormulaPtr out = f;
  // std::set iterates sorted; wrap innermost-first so the first name binds outermost.
  for (auto it = fv.rbegin(); it != fv.rend(); ++it) out = forall(*it, out);
  return out;
}

}  // namespace deduct
