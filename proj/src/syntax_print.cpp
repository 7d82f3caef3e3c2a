#include <algorithm>
#include <cctype>
#include <set>

#include "deduct/syntax.hpp"

namespace deduct {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Constant and function names occurring in f, lowercased. Used by the FOL
// printer to detect identifiers that a binder would capture on re-parse.
void term_symbols_ci(const Term& t, std::set<std::string>& out) {
  if (t.kind != Term::Kind::Variable) out.insert(lower(t.name));
  for (const auto& a : t.args) term_symbols_ci(a, out);
}

void formula_term_symbols_ci(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (const auto& t : f->args) term_symbols_ci(t, out);
      break;
    case Formula::Kind::Not:
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      formula_term_symbols_ci(f->lhs, out);
      break;
    default:
      formula_term_symbols_ci(f->lhs, out);
      formula_term_symbols_ci(f->rhs, out);
  }
}

const char* classic_op(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::And: return "∧";
    case Formula::Kind::Or: return "∨";
    case Formula::Kind::Xor: return "⊕";
    case Formula::Kind::Implies: return "→";
    case Formula::Kind::Iff: return "↔";
    default: return "";
  }
}

const char* tptp_op(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::And: return "&";
    case Formula::Kind::Or: return "|";
    case Formula::Kind::Xor: return "<~>";
    case Formula::Kind::Implies: return "=>";
    case Formula::Kind::Iff: return "<=>";
    default: return "";
  }
}

// ---- FOL / R-FOL -----------------------------------------------------------

struct ClassicPrinter {
  bool rfol = false;
  // binder name -> printed name (FOL may rename to avoid capture)
  std::vector<std::pair<std::string, std::string>> scope;

  std::string var_ref(const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == name) return rfol ? "?" + it->second : it->second;
    return rfol ? "?" + name : name;  // free variable
  }

  std::string term(const Term& t) const {
    switch (t.kind) {
      case Term::Kind::Variable:
        return var_ref(t.name);
      case Term::Kind::Constant:
        return t.name;
      case Term::Kind::Function: {
        std::string out = t.name + "(";
        for (size_t i = 0; i < t.args.size(); ++i) {
          if (i) out += ", ";
          out += term(t.args[i]);
        }
        return out + ")";
      }
    }
    return t.name;
  }

  std::string sub(const FormulaPtr& f) {
    std::string s = print(f);
    if (is_binary(f->kind) || is_quantifier(f->kind)) return "(" + s + ")";
    return s;
  }

  std::string print(const FormulaPtr& f) {
    switch (f->kind) {
      case Formula::Kind::Atom: {
        std::string out = f->pred + "(";
        for (size_t i = 0; i < f->args.size(); ++i) {
          if (i) out += ", ";
          out += term(f->args[i]);
        }
        return out + ")";
      }
      case Formula::Kind::Not:
        return "¬" + sub(f->lhs);
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        std::string printed = f->var;
        if (!rfol) {
          // FOL identifiers resolve to binders case-insensitively, so a
          // constant or function spelled like the binder must not appear in
          // the body under the original name.
          std::set<std::string> symbols;
          formula_term_symbols_ci(f->lhs, symbols);
          if (symbols.count(lower(printed))) {
            for (int i = 1;; ++i) {
              std::string candidate = f->var + std::to_string(i);
              if (!symbols.count(lower(candidate))) {
                printed = candidate;
                break;
              }
            }
          }
        }
        scope.emplace_back(f->var, printed);
        std::string body = print(f->lhs);
        bool wrap = is_binary(f->lhs->kind);
        scope.pop_back();
        std::string head = (f->kind == Formula::Kind::Forall ? "∀" : "∃");
        head += rfol ? "?" + printed : printed;
        return head + " " + (wrap ? "(" + body + ")" : body);
      }
      default:
        return sub(f->lhs) + " " + classic_op(f->kind) + " " + sub(f->rhs);
    }
  }
};

// ---- TPTP ------------------------------------------------------------------

bool tptp_lower_word(const std::string& s) {
  return !s.empty() && std::islower(static_cast<unsigned char>(s[0])) && is_identifier(s);
}

std::string tptp_name(const std::string& s) {
  return tptp_lower_word(s) ? s : "'" + s + "'";
}

struct TptpPrinter {
  bool strict = false;
  std::vector<std::pair<std::string, std::string>> scope;  // binder -> printed

  std::string bind(const std::string& name) {
    std::string printed = name;
    if (std::islower(static_cast<unsigned char>(printed[0])))
      printed[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(printed[0])));
    auto taken = [&](const std::string& c) {
      return std::any_of(scope.begin(), scope.end(),
                         [&](const auto& e) { return e.second == c; });
    };
    if (taken(printed)) {
      for (int i = 1;; ++i) {
        std::string candidate = printed + std::to_string(i);
        if (!taken(candidate)) {
          printed = candidate;
          break;
        }
      }
    }
    return printed;
  }

  std::string var_ref(const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == name) return it->second;
    std::string out = name;  // free variable
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
  }

  std::string term(const Term& t) const {
    switch (t.kind) {
      case Term::Kind::Variable:
        return var_ref(t.name);
      case Term::Kind::Constant:
        return tptp_name(t.name);
      case Term::Kind::Function: {
        std::string out = tptp_name(t.name) + "(";
        for (size_t i = 0; i < t.args.size(); ++i) {
          if (i) out += ",";
          out += term(t.args[i]);
        }
        return out + ")";
      }
    }
    return t.name;
  }

  std::string sub(const FormulaPtr& f) { return print(f, false); }

  // at_tail: everything to the right of this position belongs to the current
  // formula, so a binary operator or quantifier body needs no parentheses.
  std::string print(const FormulaPtr& f, bool at_tail) {
    switch (f->kind) {
      case Formula::Kind::Atom: {
        std::string out = tptp_name(f->pred);
        if (f->args.empty()) return out;
        out += "(";
        for (size_t i = 0; i < f->args.size(); ++i) {
          if (i) out += ",";
          out += term(f->args[i]);
        }
        return out + ")";
      }
      case Formula::Kind::Not:
        return "~" + sub(f->lhs);
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        std::string printed = bind(f->var);
        scope.emplace_back(f->var, printed);
        std::string body = print(f->lhs, true);
        scope.pop_back();
        std::string s = (f->kind == Formula::Kind::Forall ? "![" : "?[") + printed + "]:" + body;
        if (strict || !at_tail) return "(" + s + ")";
        return s;
      }
      default: {
        std::string s = sub(f->lhs) + " " + tptp_op(f->kind) + " " + sub(f->rhs);
        if (strict || !at_tail) return "(" + s + ")";
        return s;
      }
    }
  }
};

}  // namespace

std::string print_formula(const FormulaPtr& f, SyntaxId syntax) {
  if (syntax == SyntaxId::TPTP) {
    TptpPrinter p;
    return p.print(f, true);
  }
  ClassicPrinter p;
  p.rfol = (syntax == SyntaxId::RFOL);
  return p.print(f);
}

namespace detail {

std::string print_tptp_formula(const FormulaPtr& f, bool strict) {
  TptpPrinter p;
  p.strict = strict;
  return p.print(f, true);
}

}  // namespace detail

}  // namespace deduct
