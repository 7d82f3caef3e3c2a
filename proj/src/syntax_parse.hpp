#pragma once

// Internal recursive-descent parser entry points. Not installed.

#include <optional>
#include <string>

#include "deduct/syntax.hpp"

namespace deduct::detail {

struct ParseFail {
  SyntaxError error;
};

struct ParsedLine {
  FormulaPtr formula;
  std::optional<std::string> label;  // from a TPTP fof unit
  std::optional<std::string> role;
};

// Parses one formula line. Under TPTP a complete fof unit is also accepted.
// Throws ParseFail.
ParsedLine parse_line(const std::string& text, SyntaxId syntax);

}  // namespace deduct::detail
