#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deduct/ast.hpp"

namespace deduct {

enum class SyntaxId { FOL, RFOL, TPTP };

const char* syntax_name(SyntaxId s);
std::optional<SyntaxId> syntax_from_name(const std::string& name);

struct SyntaxError {
  int line = 1;
  int column = 1;
  std::string offending;
  std::string expected;
  std::string message;  // rendered diagnostic, fed back verbatim as LLM feedback
};

// Token-mismatch diagnostic in the fixed shape the recovery strategies rely on.
SyntaxError mismatched_input(int line, int column, std::string offending, std::string expected);

template <typename T>
struct Expected {
  std::optional<T> value;
  std::optional<SyntaxError> error;

  bool ok() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  T& operator*() { return *value; }
  const T* operator->() const { return &*value; }
  T* operator->() { return &*value; }

  static Expected success(T v) { return Expected{std::move(v), std::nullopt}; }
  static Expected failure(SyntaxError e) { return Expected{std::nullopt, std::move(e)}; }
};

struct Span {
  size_t begin = 0;
  size_t end = 0;
};

enum class DocShape {
  Template,  // Predicates:/Premises:/Conclusion: blocks
  Bare,      // one formula (or fof unit) per line
};

struct SourceDoc {
  std::string raw;
  SyntaxId syntax = SyntaxId::FOL;
  DocShape shape = DocShape::Bare;
  std::optional<Span> predicates_span;
  std::optional<Span> premises_span;
  std::optional<Span> conclusion_span;
};

// Locates the template sections if present; never fails.
SourceDoc make_source_doc(std::string raw, SyntaxId syntax);

// Single formula. For TPTP the text may be either a bare formula or a
// complete fof unit (the unit's label/role are dropped).
Expected<FormulaPtr> parse_formula(const std::string& text, SyntaxId syntax);

Expected<Problem> parse_problem(const SourceDoc& doc);

std::string print_formula(const FormulaPtr& f, SyntaxId syntax);

// Appendix-style template rendering (fof units per line for TPTP).
std::string print_problem(const Problem& p, SyntaxId syntax);

// Standalone TPTP problem file: axioms plus one conjecture. strict_parens
// wraps every quantifier body for consumption by external provers.
struct TptpFileOptions {
  bool strict_parens = false;
};
std::string print_tptp_file(const Problem& p, const TptpFileOptions& opts = {},
                            std::vector<std::pair<std::string, std::string>>* label_map = nullptr);

// print(parse(doc), to); bare docs are translated line by line.
Expected<std::string> translate(const SourceDoc& doc, SyntaxId to);

}  // namespace deduct
