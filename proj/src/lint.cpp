#include "deduct/lint.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace deduct {

const char* warning_kind_name(Warning::Kind k) {
  switch (k) {
    case Warning::Kind::QueryOnlySymbol: return "QueryOnlySymbol";
    case Warning::Kind::ArityMismatch: return "ArityMismatch";
    case Warning::Kind::SimilarNames: return "SimilarNames";
  }
  return "QueryOnlySymbol";
}

std::string render(const Warning& w) {
  std::ostringstream out;
  out << "WARN " << warning_kind_name(w.kind) << ": ";
  for (size_t i = 0; i < w.subjects.size(); ++i) {
    if (i) out << ", ";
    out << w.subjects[i];
  }
  out << " — " << w.detail;
  return out.str();
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      int sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
    }
  }
  return row[b.size()];
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct Symbols {
  std::set<std::string> predicates;
  std::set<std::string> individuals;  // constants and function symbols
  std::map<std::string, std::set<int>> arities;
};

void collect_term(const Term& t, Symbols& out) {
  if (t.kind != Term::Kind::Variable) out.individuals.insert(t.name);
  for (const auto& a : t.args) collect_term(a, out);
}

void collect(const FormulaPtr& f, Symbols& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      out.predicates.insert(f->pred);
      out.arities[f->pred].insert(static_cast<int>(f->args.size()));
      for (const auto& t : f->args) collect_term(t, out);
      break;
    case Formula::Kind::Not:
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      collect(f->lhs, out);
      break;
    default:
      collect(f->lhs, out);
      collect(f->rhs, out);
  }
}

std::string join_arities(const std::set<int>& arities) {
  std::string out;
  for (int a : arities) {
    if (!out.empty()) out += ", ";
    out += std::to_string(a);
  }
  return out;
}

void similar_within(const std::set<std::string>& names, const LintConfig& cfg,
                    const char* category, std::vector<Warning>& out) {
  std::vector<std::string> sorted(names.begin(), names.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    for (size_t j = i + 1; j < sorted.size(); ++j) {
      const std::string& a = sorted[i];
      const std::string& b = sorted[j];
      if (a.size() < cfg.similar_min_length || b.size() < cfg.similar_min_length) continue;
      std::string la = cfg.case_insensitive ? lower(a) : a;
      std::string lb = cfg.case_insensitive ? lower(b) : b;
      if (la == lb) continue;  // distinct spellings of the same name are fine
      int d = edit_distance(la, lb);
      if (d > cfg.similar_threshold) continue;
      Warning w;
      w.kind = Warning::Kind::SimilarNames;
      w.subjects = {a, b};
      w.detail = "'" + a + "' and '" + b + "' are " + category + " names at edit distance " +
                 std::to_string(d);
      out.push_back(std::move(w));
    }
  }
}

}  // namespace

std::vector<Warning> lint(const Problem& p, const LintConfig& cfg) {
  Symbols context, query;
  for (const auto& prem : p.premises) collect(prem.formula, context);
  Symbols whole = context;
  collect(p.conclusion, query);
  collect(p.conclusion, whole);

  std::vector<Warning> out;

  for (const auto& name : query.predicates) {
    if (context.predicates.count(name)) continue;
    out.push_back({Warning::Kind::QueryOnlySymbol,
                   {name},
                   "predicate '" + name + "' appears in the conclusion but in no premise"});
  }
  for (const auto& name : query.individuals) {
    if (context.individuals.count(name)) continue;
    out.push_back({Warning::Kind::QueryOnlySymbol,
                   {name},
                   "individual '" + name + "' appears in the conclusion but in no premise"});
  }

  for (const auto& [name, arities] : whole.arities) {
    if (arities.size() < 2) continue;
    out.push_back({Warning::Kind::ArityMismatch,
                   {name},
                   "'" + name + "' is used with arities " + join_arities(arities)});
  }

  similar_within(whole.predicates, cfg, "predicate", out);
  similar_within(whole.individuals, cfg, "individual", out);

  // Cross-category shadowing: the same name as predicate and individual.
  for (const auto& name : whole.predicates) {
    auto match = [&](const std::string& other) {
      return cfg.case_insensitive ? lower(other) == lower(name) : other == name;
    };
    for (const auto& ind : whole.individuals) {
      if (!match(ind)) continue;
      out.push_back({Warning::Kind::SimilarNames,
                     {name, ind},
                     "'" + name + "' is used as both a predicate and an individual"});
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Warning& a, const Warning& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    return a.subjects.front() < b.subjects.front();
  });
  return out;
}

}  // namespace deduct
