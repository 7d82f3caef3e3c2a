#include <algorithm>
#include <chrono>
#include <map>
#include <queue>
#include <set>

#include "deduct/prover.hpp"

namespace deduct {

namespace {

using Subst = std::map<std::string, Term>;

Term apply_subst(const Term& t, const Subst& s) {
  if (t.kind == Term::Kind::Variable) {
    auto it = s.find(t.name);
    if (it == s.end()) return t;
    return apply_subst(it->second, s);  // chase bindings
  }
  if (t.args.empty()) return t;
  Term out = t;
  for (auto& a : out.args) a = apply_subst(a, s);
  return out;
}

bool occurs(const std::string& v, const Term& t, const Subst& s) {
  if (t.kind == Term::Kind::Variable) {
    if (t.name == v) return true;
    auto it = s.find(t.name);
    return it != s.end() && occurs(v, it->second, s);
  }
  for (const auto& a : t.args)
    if (occurs(v, a, s)) return true;
  return false;
}

bool unify(const Term& a, const Term& b, Subst& s) {
  Term x = a, y = b;
  while (x.kind == Term::Kind::Variable && s.count(x.name)) x = s.at(x.name);
  while (y.kind == Term::Kind::Variable && s.count(y.name)) y = s.at(y.name);
  if (x.kind == Term::Kind::Variable && y.kind == Term::Kind::Variable && x.name == y.name)
    return true;
  if (x.kind == Term::Kind::Variable) {
    if (occurs(x.name, y, s)) return false;
    s[x.name] = y;
    return true;
  }
  if (y.kind == Term::Kind::Variable) {
    if (occurs(y.name, x, s)) return false;
    s[y.name] = x;
    return true;
  }
  if (x.name != y.name || x.args.size() != y.args.size() ||
      (x.kind == Term::Kind::Constant) != (y.kind == Term::Kind::Constant))
    return false;
  for (size_t i = 0; i < x.args.size(); ++i)
    if (!unify(x.args[i], y.args[i], s)) return false;
  return true;
}

bool unify_atoms(const Literal& a, const Literal& b, Subst& s) {
  if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!unify(a.args[i], b.args[i], s)) return false;
  return true;
}

Literal apply_subst(const Literal& l, const Subst& s) {
  Literal out = l;
  for (auto& t : out.args) t = apply_subst(t, s);
  return out;
}

size_t term_size(const Term& t) {
  size_t n = 1;
  for (const auto& a : t.args) n += term_size(a);
  return n;
}

size_t clause_size(const Clause& c) {
  size_t n = 0;
  for (const auto& l : c.literals) {
    n += 1;
    for (const auto& t : l.args) n += term_size(t);
  }
  return n;
}

void rename_term(Term& t, const std::string& suffix) {
  if (t.kind == Term::Kind::Variable) {
    t.name += suffix;
    return;
  }
  for (auto& a : t.args) rename_term(a, suffix);
}

Clause rename_apart(const Clause& c, const std::string& suffix) {
  Clause out = c;
  for (auto& l : out.literals)
    for (auto& t : l.args) rename_term(t, suffix);
  return out;
}

// One-way matching for subsumption: variables of the pattern may bind,
// the target stays fixed.
bool match_term(const Term& pattern, const Term& target, Subst& s) {
  if (pattern.kind == Term::Kind::Variable) {
    auto it = s.find(pattern.name);
    if (it != s.end()) return it->second == target;
    s[pattern.name] = target;
    return true;
  }
  if (target.kind == Term::Kind::Variable) return false;
  if (pattern.name != target.name || pattern.args.size() != target.args.size()) return false;
  for (size_t i = 0; i < pattern.args.size(); ++i)
    if (!match_term(pattern.args[i], target.args[i], s)) return false;
  return true;
}

bool subsumes_from(const Clause& c, const Clause& d, size_t i, const Subst& s) {
  if (i == c.literals.size()) return true;
  const Literal& pat = c.literals[i];
  for (const auto& cand : d.literals) {
    if (cand.positive != pat.positive || cand.pred != pat.pred ||
        cand.args.size() != pat.args.size())
      continue;
    Subst next = s;
    bool ok = true;
    for (size_t k = 0; k < pat.args.size() && ok; ++k)
      ok = match_term(pat.args[k], cand.args[k], next);
    if (ok && subsumes_from(c, d, i + 1, next)) return true;
  }
  return false;
}

// C subsumes D: some substitution maps every literal of C onto a literal of D.
bool subsumes(const Clause& c, const Clause& d) {
  if (c.literals.size() > d.literals.size()) return false;
  return subsumes_from(c, d, 0, {});
}

struct Entry {
  Clause clause;
  size_t id;
  int parent_a = -1;  // indices into the entry list, -1 for input clauses
  int parent_b = -1;
  size_t size;
};

struct Engine {
  std::vector<Entry> entries;
  // (size, id) priority: smallest clause first, ties by insertion order
  std::priority_queue<std::pair<size_t, size_t>, std::vector<std::pair<size_t, size_t>>,
                      std::greater<>>
      passive;
  std::vector<size_t> active;
  ProverBudget budget;
  size_t generated = 0;
  std::chrono::steady_clock::time_point deadline;

  bool redundant(const Clause& c) const {
    for (const auto& e : entries)
      if (subsumes(e.clause, c)) return true;
    return false;
  }

  // returns the entry id of the empty clause if one was added
  int add(Clause c, int pa, int pb) {
    ++generated;
    bool taut = false;
    for (size_t i = 0; i < c.literals.size() && !taut; ++i)
      for (size_t j = i + 1; j < c.literals.size() && !taut; ++j) {
        const auto& a = c.literals[i];
        const auto& b = c.literals[j];
        if (a.pred == b.pred && a.positive != b.positive && a.args == b.args) taut = true;
      }
    if (taut || redundant(c)) return -1;
    size_t id = entries.size();
    entries.push_back({std::move(c), id, pa, pb, 0});
    entries.back().size = clause_size(entries.back().clause);
    passive.push({entries.back().size * 16 + entries.back().clause.literals.size(), id});
    if (entries.back().clause.empty()) return static_cast<int>(id);
    return -1;
  }

  // add() may grow entries, so work on copies, never held references
  int resolve_pair(size_t ai, size_t bi) {
    Clause ca = entries[ai].clause;
    Clause rb = rename_apart(entries[bi].clause, "'");
    for (size_t i = 0; i < ca.literals.size(); ++i) {
      for (size_t j = 0; j < rb.literals.size(); ++j) {
        const Literal& la = ca.literals[i];
        const Literal& lb = rb.literals[j];
        if (la.positive == lb.positive) continue;
        Subst s;
        if (!unify_atoms(la, lb, s)) continue;
        Clause res;
        for (size_t k = 0; k < ca.literals.size(); ++k)
          if (k != i) res.literals.push_back(apply_subst(ca.literals[k], s));
        for (size_t k = 0; k < rb.literals.size(); ++k) {
          if (k == j) continue;
          Literal lit = apply_subst(rb.literals[k], s);
          if (std::find(res.literals.begin(), res.literals.end(), lit) == res.literals.end())
            res.literals.push_back(std::move(lit));
        }
        int empty = add(std::move(res), static_cast<int>(ai), static_cast<int>(bi));
        if (empty >= 0) return empty;
      }
    }
    return -1;
  }

  int factor(size_t ei) {
    Clause ce = entries[ei].clause;
    for (size_t i = 0; i < ce.literals.size(); ++i) {
      for (size_t j = i + 1; j < ce.literals.size(); ++j) {
        const Literal& la = ce.literals[i];
        const Literal& lb = ce.literals[j];
        if (la.positive != lb.positive) continue;
        Subst s;
        if (!unify_atoms(la, lb, s)) continue;
        Clause res;
        for (size_t k = 0; k < ce.literals.size(); ++k) {
          if (k == j) continue;
          Literal lit = apply_subst(ce.literals[k], s);
          if (std::find(res.literals.begin(), res.literals.end(), lit) == res.literals.end())
            res.literals.push_back(std::move(lit));
        }
        int empty = add(std::move(res), static_cast<int>(ei), -1);
        if (empty >= 0) return empty;
      }
    }
    return -1;
  }

  ProofOutcome run(std::vector<Clause> input) {
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(budget.max_seconds));
    for (auto& c : input) {
      int empty = add(std::move(c), -1, -1);
      if (empty >= 0) return finish(ProofStatus::Entailed, empty);
    }
    while (!passive.empty()) {
      if (entries.size() > budget.max_clauses ||
          std::chrono::steady_clock::now() > deadline)
        return finish(ProofStatus::BudgetExhausted, -1);
      size_t given = passive.top().second;
      passive.pop();
      int empty = factor(given);
      if (empty >= 0) return finish(ProofStatus::Entailed, empty);
      for (size_t other : active) {
        empty = resolve_pair(given, other);
        if (empty >= 0) return finish(ProofStatus::Entailed, empty);
        empty = resolve_pair(other, given);
        if (empty >= 0) return finish(ProofStatus::Entailed, empty);
      }
      // self-resolution matters for clauses like p(x) | p(f(x))
      empty = resolve_pair(given, given);
      if (empty >= 0) return finish(ProofStatus::Entailed, empty);
      active.push_back(given);
    }
    return finish(ProofStatus::Saturated, -1);
  }

  ProofOutcome finish(ProofStatus status, int empty_id) {
    ProofOutcome out;
    out.status = status;
    out.clauses_kept = entries.size();
    out.clauses_generated = generated;
    if (empty_id < 0) return out;
    // walk the derivation back from the empty clause
    std::set<size_t> needed;
    std::vector<size_t> stack{static_cast<size_t>(empty_id)};
    while (!stack.empty()) {
      size_t id = stack.back();
      stack.pop_back();
      if (!needed.insert(id).second) continue;
      const Entry& e = entries[id];
      if (e.parent_a >= 0) stack.push_back(static_cast<size_t>(e.parent_a));
      if (e.parent_b >= 0) stack.push_back(static_cast<size_t>(e.parent_b));
    }
    for (size_t id : needed) {
      const Entry& e = entries[id];
      std::string line = std::to_string(e.id) + ": " + render_clause(e.clause);
      if (e.parent_a < 0) {
        line += "  [input]";
      } else if (e.parent_b < 0) {
        line += "  [factor " + std::to_string(e.parent_a) + "]";
      } else {
        line += "  [resolve " + std::to_string(e.parent_a) + "," +
                std::to_string(e.parent_b) + "]";
      }
      out.proof.push_back(std::move(line));
    }
    return out;
  }
};

// Clausifies premises plus the negated conclusion as one unit so Skolem
// numbering is shared across the whole refutation input.
std::vector<Clause> refutation_input(const std::vector<FormulaPtr>& premises,
                                     const FormulaPtr& conclusion) {
  FormulaPtr combined = neg(close_universally(conclusion));
  for (auto it = premises.rbegin(); it != premises.rend(); ++it)
    combined = conj(close_universally(*it), combined);
  return clausify(combined);
}

}  // namespace

ProofOutcome entails(const std::vector<FormulaPtr>& premises, const FormulaPtr& conclusion,
                     const ProverBudget& b) {
  Engine engine;
  engine.budget = b;
  return engine.run(refutation_input(premises, conclusion));
}

Decision decide(const Problem& p, const ProverBudget& b) {
  std::vector<FormulaPtr> premises;
  for (const auto& prem : p.premises) premises.push_back(prem.formula);
  Decision d;
  d.outcome = entails(premises, p.conclusion, b);
  d.negation_outcome = entails(premises, neg(p.conclusion), b);
  d.answer = d.outcome.entailed() ? "yes" : "no";
  return d;
}

}  // namespace deduct
