#include <algorithm>
#include <cctype>
#include <sstream>

#include "deduct/syntax.hpp"
#include "syntax_parse.hpp"

namespace deduct {

namespace detail {
std::string print_tptp_formula(const FormulaPtr& f, bool strict);
}

const char* syntax_name(SyntaxId s) {
  switch (s) {
    case SyntaxId::FOL: return "fol";
    case SyntaxId::RFOL: return "rfol";
    case SyntaxId::TPTP: return "tptp";
  }
  return "fol";
}

std::optional<SyntaxId> syntax_from_name(const std::string& name) {
  std::string low;
  for (char c : name) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (low == "fol") return SyntaxId::FOL;
  if (low == "rfol" || low == "r-fol") return SyntaxId::RFOL;
  if (low == "tptp") return SyntaxId::TPTP;
  return std::nullopt;
}

SyntaxError mismatched_input(int line, int column, std::string offending, std::string expected) {
  SyntaxError e;
  e.line = line;
  e.column = column;
  e.offending = std::move(offending);
  e.expected = std::move(expected);
  e.message = "mismatched input '" + e.offending + "' expecting '" + e.expected + "'";
  return e;
}

namespace {

struct Line {
  std::string text;
  size_t offset = 0;  // byte offset of line start in raw
  int number = 1;     // 1-based
};

std::vector<Line> split_lines(const std::string& raw) {
  std::vector<Line> out;
  size_t pos = 0;
  int number = 1;
  while (pos <= raw.size()) {
    size_t nl = raw.find('\n', pos);
    size_t end = (nl == std::string::npos) ? raw.size() : nl;
    out.push_back(Line{raw.substr(pos, end - pos), pos, number});
    if (nl == std::string::npos) break;
    pos = nl + 1;
    ++number;
  }
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_separator(const std::string& trimmed) {
  return trimmed.size() >= 3 && trimmed.find_first_not_of('-') == std::string::npos;
}

// Splits "formula ::: gloss" into its two halves.
std::pair<std::string, std::string> split_gloss(const std::string& line) {
  size_t pos = line.find(":::");
  if (pos == std::string::npos) return {trim(line), ""};
  return {trim(line.substr(0, pos)), trim(line.substr(pos + 3))};
}

SyntaxError at_line(SyntaxError e, int line_offset) {
  e.line += line_offset;
  return e;
}

SyntaxError missing_section(const std::string& header) {
  SyntaxError e;
  e.expected = header;
  e.message = "missing section '" + header + "'";
  return e;
}

// Lenient declaration parser: Name(x, y) with optional gloss already stripped.
std::optional<PredicateDecl> parse_decl(const std::string& text) {
  size_t paren = text.find('(');
  std::string name = trim(paren == std::string::npos ? text : text.substr(0, paren));
  if (!is_identifier(name)) return std::nullopt;
  PredicateDecl d;
  d.name = name;
  if (paren != std::string::npos) {
    size_t close = text.find(')', paren);
    if (close == std::string::npos) return std::nullopt;
    std::string inside = trim(text.substr(paren + 1, close - paren - 1));
    if (!inside.empty()) d.arity = 1 + static_cast<int>(std::count(inside.begin(), inside.end(), ','));
  }
  return d;
}

}  // namespace

SourceDoc make_source_doc(std::string raw, SyntaxId syntax) {
  SourceDoc doc;
  doc.raw = std::move(raw);
  doc.syntax = syntax;

  auto lines = split_lines(doc.raw);
  struct Section {
    const char* header;
    std::optional<Span>* span;
  };
  Section sections[] = {
      {"Predicates:", &doc.predicates_span},
      {"Premises:", &doc.premises_span},
      {"Conclusion:", &doc.conclusion_span},
  };

  std::optional<Span>* open = nullptr;
  for (const auto& line : lines) {
    std::string t = trim(line.text);
    bool matched = false;
    for (auto& s : sections) {
      if (t == s.header) {
        if (open && (*open)->end == 0) (*open)->end = line.offset;
        *s.span = Span{line.offset + line.text.size() + 1, 0};
        open = s.span;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (open && is_separator(t)) {
      (*open)->end = line.offset;
      open = nullptr;
    }
  }
  if (open && (*open)->end == 0) (*open)->end = doc.raw.size();
  for (auto& s : sections)
    if (*s.span && (*s.span)->begin > doc.raw.size()) (*s.span)->begin = doc.raw.size();

  doc.shape = (doc.premises_span || doc.conclusion_span) ? DocShape::Template : DocShape::Bare;
  return doc;
}

Expected<FormulaPtr> parse_formula(const std::string& text, SyntaxId syntax) {
  try {
    return Expected<FormulaPtr>::success(detail::parse_line(text, syntax).formula);
  } catch (const detail::ParseFail& f) {
    return Expected<FormulaPtr>::failure(f.error);
  }
}

namespace {

Expected<Problem> parse_template(const SourceDoc& doc) {
  if (!doc.premises_span) return Expected<Problem>::failure(missing_section("Premises:"));
  if (!doc.conclusion_span) return Expected<Problem>::failure(missing_section("Conclusion:"));

  Problem p;
  auto lines = split_lines(doc.raw);
  auto lines_in = [&](const Span& span) {
    std::vector<Line> out;
    for (const auto& l : lines)
      if (l.offset >= span.begin && l.offset < span.end && !trim(l.text).empty())
        out.push_back(l);
    return out;
  };

  if (doc.predicates_span) {
    for (const auto& l : lines_in(*doc.predicates_span)) {
      auto [head, gloss] = split_gloss(l.text);
      if (auto d = parse_decl(head)) {
        d->gloss = gloss;
        p.declared_predicates.push_back(*d);
      }
    }
  }

  int auto_label = 0;
  for (const auto& l : lines_in(*doc.premises_span)) {
    auto [head, gloss] = split_gloss(l.text);
    try {
      auto parsed = detail::parse_line(head, doc.syntax);
      Premise prem;
      prem.label = parsed.label.value_or("p" + std::to_string(auto_label));
      prem.formula = parsed.formula;
      prem.gloss = gloss;
      p.premises.push_back(std::move(prem));
      ++auto_label;
    } catch (const detail::ParseFail& f) {
      return Expected<Problem>::failure(at_line(f.error, l.number - 1));
    }
  }

  auto conclusion_lines = lines_in(*doc.conclusion_span);
  if (conclusion_lines.empty()) return Expected<Problem>::failure(missing_section("Conclusion:"));
  {
    const auto& l = conclusion_lines.front();
    auto [head, gloss] = split_gloss(l.text);
    try {
      auto parsed = detail::parse_line(head, doc.syntax);
      p.conclusion = parsed.formula;
      p.conclusion_gloss = gloss;
    } catch (const detail::ParseFail& f) {
      return Expected<Problem>::failure(at_line(f.error, l.number - 1));
    }
  }

  try {
    validate_problem(p);
  } catch (const std::invalid_argument& e) {
    SyntaxError err;
    err.message = e.what();
    return Expected<Problem>::failure(err);
  }
  return Expected<Problem>::success(std::move(p));
}

Expected<Problem> parse_bare_tptp(const SourceDoc& doc) {
  Problem p;
  int auto_label = 0;
  for (const auto& l : split_lines(doc.raw)) {
    std::string t = trim(l.text);
    if (t.empty() || is_separator(t) || t[0] == '%') continue;
    try {
      auto parsed = detail::parse_line(t, SyntaxId::TPTP);
      if (parsed.role && *parsed.role == "conjecture") {
        if (p.conclusion) {
          SyntaxError e;
          e.line = l.number;
          e.message = "multiple conjectures";
          return Expected<Problem>::failure(e);
        }
        p.conclusion = parsed.formula;
      } else {
        Premise prem;
        prem.label = parsed.label.value_or("a" + std::to_string(auto_label));
        prem.formula = parsed.formula;
        p.premises.push_back(std::move(prem));
        ++auto_label;
      }
    } catch (const detail::ParseFail& f) {
      return Expected<Problem>::failure(at_line(f.error, l.number - 1));
    }
  }
  if (!p.conclusion) {
    SyntaxError e;
    e.message = "missing conjecture";
    return Expected<Problem>::failure(e);
  }
  try {
    validate_problem(p);
  } catch (const std::invalid_argument& e) {
    SyntaxError err;
    err.message = e.what();
    return Expected<Problem>::failure(err);
  }
  return Expected<Problem>::success(std::move(p));
}

}  // namespace

Expected<Problem> parse_problem(const SourceDoc& doc) {
  if (doc.shape == DocShape::Template) return parse_template(doc);
  if (doc.syntax == SyntaxId::TPTP) return parse_bare_tptp(doc);
  return Expected<Problem>::failure(missing_section("Premises:"));
}

namespace {

// TPTP unit names must be lower words; anything else is mangled.
std::string mangle_label(const std::string& label, std::vector<std::string>& used) {
  std::string out = label;
  if (!out.empty() && std::isupper(static_cast<unsigned char>(out[0])))
    out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  std::string candidate = out;
  for (int i = 2; std::find(used.begin(), used.end(), candidate) != used.end(); ++i)
    candidate = out + "_" + std::to_string(i);
  used.push_back(candidate);
  return candidate;
}

std::string decl_line(const PredicateDecl& d, SyntaxId syntax) {
  static const char* kVars[] = {"x", "y", "z", "u", "v", "w"};
  std::string out = d.name;
  if (d.arity > 0) {
    out += "(";
    for (int i = 0; i < d.arity; ++i) {
      if (i) out += ", ";
      if (syntax == SyntaxId::RFOL) out += "?";
      out += (i < 6) ? kVars[i] : "x" + std::to_string(i);
    }
    out += ")";
  }
  if (!d.gloss.empty()) out += " ::: " + d.gloss;
  return out;
}

}  // namespace

std::string print_problem(const Problem& p, SyntaxId syntax) {
  std::ostringstream out;
  if (!p.declared_predicates.empty()) {
    out << "Predicates:\n";
    for (const auto& d : p.declared_predicates) out << decl_line(d, syntax) << "\n";
  }
  out << "Premises:\n";
  std::vector<std::string> used;
  for (const auto& prem : p.premises) {
    std::string line;
    if (syntax == SyntaxId::TPTP) {
      line = "fof(" + mangle_label(prem.label, used) + ",axiom," +
             detail::print_tptp_formula(prem.formula, false) + ").";
    } else {
      line = print_formula(prem.formula, syntax);
    }
    if (!prem.gloss.empty()) line += " ::: " + prem.gloss;
    out << line << "\n";
  }
  out << "Conclusion:\n";
  std::string line;
  if (syntax == SyntaxId::TPTP) {
    line = "fof(" + mangle_label("goal", used) + ",conjecture," +
           detail::print_tptp_formula(p.conclusion, false) + ").";
  } else {
    line = print_formula(p.conclusion, syntax);
  }
  if (!p.conclusion_gloss.empty()) line += " ::: " + p.conclusion_gloss;
  out << line << "\n";
  return out.str();
}

std::string print_tptp_file(const Problem& p, const TptpFileOptions& opts,
                            std::vector<std::pair<std::string, std::string>>* label_map) {
  std::ostringstream out;
  std::vector<std::string> used{"goal"};
  for (const auto& prem : p.premises) {
    std::string mangled = mangle_label(prem.label, used);
    if (label_map && mangled != prem.label) label_map->emplace_back(prem.label, mangled);
    out << "fof(" << mangled << ",axiom," << detail::print_tptp_formula(prem.formula, opts.strict_parens)
        << ").\n";
  }
  out << "fof(goal,conjecture," << detail::print_tptp_formula(p.conclusion, opts.strict_parens)
      << ").\n";
  return out.str();
}

Expected<std::string> translate(const SourceDoc& doc, SyntaxId to) {
  if (doc.shape == DocShape::Template) {
    auto parsed = parse_problem(doc);
    if (!parsed.ok()) return Expected<std::string>::failure(*parsed.error);
    return Expected<std::string>::success(print_problem(*parsed, to));
  }

  std::ostringstream out;
  int auto_label = 0;
  for (const auto& l : split_lines(doc.raw)) {
    std::string t = trim(l.text);
    if (t.empty() || is_separator(t)) continue;
    if (doc.syntax == SyntaxId::TPTP && t[0] == '%') continue;
    auto [head, gloss] = split_gloss(t);
    try {
      auto parsed = detail::parse_line(head, doc.syntax);
      std::string rendered;
      if (to == SyntaxId::TPTP) {
        std::vector<std::string> used;
        std::string label = parsed.label.value_or("a" + std::to_string(auto_label));
        rendered = "fof(" + mangle_label(label, used) + "," + parsed.role.value_or("axiom") + "," +
                   detail::print_tptp_formula(parsed.formula, false) + ").";
      } else {
        rendered = print_formula(parsed.formula, to);
      }
      if (!gloss.empty()) rendered += " ::: " + gloss;
      out << rendered << "\n";
      ++auto_label;
    } catch (const detail::ParseFail& f) {
      return Expected<std::string>::failure(at_line(f.error, l.number - 1));
    }
  }
  return Expected<std::string>::success(out.str());
}

}  // namespace deduct
