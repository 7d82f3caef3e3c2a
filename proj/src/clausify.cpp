#include <map>

#include "deduct/prover.hpp"

namespace deduct {

std::string render_literal(const Literal& l) {
  std::string out = l.positive ? "" : "~";
  out += l.pred;
  if (!l.args.empty()) {
    out += "(";
    for (size_t i = 0; i < l.args.size(); ++i) {
      if (i) out += ",";
      std::string t;
      // terms render in TPTP style for provenance notes
      struct R {
        static std::string term(const Term& t) {
          std::string s = t.name;
          if (!t.args.empty()) {
            s += "(";
            for (size_t k = 0; k < t.args.size(); ++k) {
              if (k) s += ",";
              s += term(t.args[k]);
            }
            s += ")";
          }
          return s;
        }
      };
      out += R::term(l.args[i]);
    }
    out += ")";
  }
  return out;
}

std::string render_clause(const Clause& c) {
  if (c.literals.empty()) return "[]";
  std::string out;
  for (size_t i = 0; i < c.literals.size(); ++i) {
    if (i) out += " | ";
    out += render_literal(c.literals[i]);
  }
  return out;
}

namespace {

Term subst_term(const Term& t, const std::map<std::string, Term>& s) {
  if (t.kind == Term::Kind::Variable) {
    auto it = s.find(t.name);
    return it == s.end() ? t : it->second;
  }
  if (t.args.empty()) return t;
  Term out = t;
  for (auto& a : out.args) a = subst_term(a, s);
  return out;
}

// CNF as a list of clauses, each a list of literals.
using Cnf = std::vector<std::vector<Literal>>;

class Clausifier {
 public:
  std::vector<Clause> run(const FormulaPtr& f) {
    Cnf cnf = walk(f, true, {}, {});
    std::vector<Clause> out;
    for (auto& lits : cnf) {
      Clause c;
      bool tautology = false;
      for (auto& l : lits) {
        bool dup = false;
        for (const auto& existing : c.literals) {
          if (existing == l) dup = true;
          if (existing.pred == l.pred && existing.args == l.args &&
              existing.positive != l.positive)
            tautology = true;
        }
        if (!dup) c.literals.push_back(std::move(l));
      }
      if (!tautology) {
        standardize(c);
        out.push_back(std::move(c));
      }
    }
    return out;
  }

 private:
  int skolem_ = 0;
  int var_ = 0;
  int clause_var_ = 0;

  // Gives each clause its own variables, numbered in order of appearance.
  void standardize(Clause& c) {
    std::map<std::string, Term> renames;
    for (auto& l : c.literals)
      for (auto& t : l.args) {
        collect_renames(t, renames);
        t = subst_term(t, renames);
      }
  }

  void collect_renames(const Term& t, std::map<std::string, Term>& renames) {
    if (t.kind == Term::Kind::Variable) {
      if (!renames.count(t.name))
        renames[t.name] = Term::var("X" + std::to_string(clause_var_++));
      return;
    }
    for (const auto& a : t.args) collect_renames(a, renames);
  }

  // positive: current polarity. universals: enclosing universal variables (as
  // renamed terms) for Skolem arguments. renames: binder name -> fresh term.
  Cnf walk(const FormulaPtr& f, bool positive, std::vector<Term> universals,
           std::map<std::string, Term> renames) {
    switch (f->kind) {
      case Formula::Kind::Atom: {
        Literal l;
        l.positive = positive;
        l.pred = f->pred;
        for (const auto& t : f->args) l.args.push_back(subst_term(t, renames));
        return {{std::move(l)}};
      }
      case Formula::Kind::Not:
        return walk(f->lhs, !positive, std::move(universals), std::move(renames));
      case Formula::Kind::And: {
        if (positive) return conjoin(walk(f->lhs, true, universals, renames),
                                     walk(f->rhs, true, universals, renames));
        return distribute(walk(f->lhs, false, universals, renames),
                          walk(f->rhs, false, universals, renames));
      }
      case Formula::Kind::Or: {
        if (positive) return distribute(walk(f->lhs, true, universals, renames),
                                        walk(f->rhs, true, universals, renames));
        return conjoin(walk(f->lhs, false, universals, renames),
                       walk(f->rhs, false, universals, renames));
      }
      case Formula::Kind::Implies:
        return walk(disj(neg(f->lhs), f->rhs), positive, std::move(universals),
                    std::move(renames));
      case Formula::Kind::Iff:
        // a<=>b is (a->b)&(b->a); negated it becomes a xor b
        return walk(conj(implies(f->lhs, f->rhs), implies(f->rhs, f->lhs)), positive,
                    std::move(universals), std::move(renames));
      case Formula::Kind::Xor:
        return walk(neg(iff(f->lhs, f->rhs)), positive, std::move(universals),
                    std::move(renames));
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        bool universal = (f->kind == Formula::Kind::Forall) == positive;
        if (universal) {
          Term fresh = Term::var("V" + std::to_string(var_++));
          renames[f->var] = fresh;
          universals.push_back(fresh);
          return walk(f->lhs, positive, std::move(universals), std::move(renames));
        }
        std::string name = "sk_" + std::to_string(skolem_++);
        renames[f->var] =
            universals.empty() ? Term::constant(name) : Term::func(name, universals);
        return walk(f->lhs, positive, std::move(universals), std::move(renames));
      }
    }
    return {};
  }

  static Cnf conjoin(Cnf a, Cnf b) {
    for (auto& c : b) a.push_back(std::move(c));
    return a;
  }

  static Cnf distribute(const Cnf& a, const Cnf& b) {
    Cnf out;
    for (const auto& ca : a) {
      for (const auto& cb : b) {
        std::vector<Literal> merged = ca;
        merged.insert(merged.end(), cb.begin(), cb.end());
        out.push_back(std::move(merged));
      }
    }
    return out;
  }
};

}  // namespace

std::vector<Clause> clausify(const FormulaPtr& f) { return Clausifier().run(f); }

}  // namespace deduct
