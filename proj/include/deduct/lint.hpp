#pragma once

#include <string>
#include <vector>

#include "deduct/ast.hpp"

namespace deduct {

struct Warning {
  enum class Kind { QueryOnlySymbol, ArityMismatch, SimilarNames };

  Kind kind = Kind::QueryOnlySymbol;
  std::vector<std::string> subjects;
  std::string detail;
};

const char* warning_kind_name(Warning::Kind k);

// One line: WARN <kind>: <subjects> — <detail>
std::string render(const Warning& w);

// Standard Levenshtein distance (unit insert, delete, substitute).
int edit_distance(const std::string& a, const std::string& b);

struct LintConfig {
  int similar_threshold = 1;
  size_t similar_min_length = 4;
  bool case_insensitive = true;
};

// Advisory heuristics over a parsed problem: symbols mentioned only in the
// conclusion, predicates used at several arities, and near-identical names.
// Never blocks; order is deterministic and independent of premise order.
std::vector<Warning> lint(const Problem& p, const LintConfig& cfg = {});

}  // namespace deduct
