#include "syntax_parse.hpp"

#include <algorithm>
#include <cctype>

#include "syntax_lex.hpp"

namespace deduct::detail {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, SyntaxId syntax)
      : tokens_(std::move(tokens)), syntax_(syntax) {}

  ParsedLine parse_line() {
    ParsedLine out;
    if (syntax_ == SyntaxId::TPTP && peek().kind == Tok::Ident && peek().name == "fof" &&
        peek(1).kind == Tok::LParen) {
      out = parse_fof_unit();
    } else {
      out.formula = parse_formula();
    }
    if (peek().kind != Tok::End) fail(peek(), "end of input");
    return out;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }

  Token advance() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  [[noreturn]] void fail(const Token& at, const std::string& expected) {
    throw ParseFail{mismatched_input(at.line, at.column, at.text, expected)};
  }

  [[noreturn]] void fail_custom(const Token& at, const std::string& message) {
    SyntaxError e;
    e.line = at.line;
    e.column = at.column;
    e.offending = at.text;
    e.message = message;
    throw ParseFail{e};
  }

  Token expect(Tok kind, const std::string& expected) {
    if (peek().kind != kind) fail(peek(), expected);
    return advance();
  }

  ParsedLine parse_fof_unit() {
    advance();  // fof
    expect(Tok::LParen, "(");
    Token name = peek();
    if (name.kind != Tok::Ident && name.kind != Tok::Quoted) fail(name, "a unit name");
    advance();
    expect(Tok::Comma, ",");
    Token role = expect(Tok::Ident, "a role");
    if (role.name != "axiom" && role.name != "conjecture")
      fail_custom(role, "unsupported fof role '" + role.name + "'");
    expect(Tok::Comma, ",");
    FormulaPtr f = parse_formula();
    expect(Tok::RParen, ")");
    expect(Tok::Dot, ".");
    ParsedLine out;
    out.formula = std::move(f);
    out.label = name.name;
    out.role = role.name;
    return out;
  }

  // Lowest tier: → and ↔, right-associative.
  FormulaPtr parse_formula() {
    FormulaPtr lhs = parse_or_tier();
    if (peek().kind == Tok::Implies) {
      advance();
      return implies(std::move(lhs), parse_formula());
    }
    if (peek().kind == Tok::Iff) {
      advance();
      return iff(std::move(lhs), parse_formula());
    }
    return lhs;
  }

  FormulaPtr parse_or_tier() {
    FormulaPtr lhs = parse_and_tier();
    while (peek().kind == Tok::Or || peek().kind == Tok::Xor) {
      bool is_xor = advance().kind == Tok::Xor;
      FormulaPtr rhs = parse_and_tier();
      lhs = is_xor ? exclusive(std::move(lhs), std::move(rhs)) : disj(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  FormulaPtr parse_and_tier() {
    FormulaPtr lhs = parse_unary();
    while (peek().kind == Tok::And) {
      advance();
      lhs = conj(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  FormulaPtr parse_unary() {
    switch (peek().kind) {
      case Tok::Not:
        advance();
        return neg(parse_unary());
      case Tok::Forall:
      case Tok::Exists:
        return parse_quantified();
      default:
        return parse_primary();
    }
  }

  FormulaPtr parse_quantified() {
    bool universal = advance().kind == Tok::Forall;
    std::vector<std::string> vars;
    if (syntax_ == SyntaxId::TPTP) {
      expect(Tok::LBracket, "[");
      while (true) {
        Token v = expect(Tok::Ident, "a variable");
        if (!std::isupper(static_cast<unsigned char>(v.name[0])))
          fail(v, "an uppercase variable");
        vars.push_back(v.name);
        if (peek().kind != Tok::Comma) break;
        advance();
      }
      expect(Tok::RBracket, "]");
      expect(Tok::Colon, ":");
    } else if (syntax_ == SyntaxId::RFOL) {
      Token v = peek();
      if (v.kind != Tok::Var) fail(v, "a ?-prefixed variable");
      advance();
      vars.push_back(v.name);
      if (peek().kind == Tok::Dot) advance();
    } else {
      Token v = expect(Tok::Ident, "a variable");
      vars.push_back(v.name);
      if (peek().kind == Tok::Dot) advance();
    }

    for (const auto& v : vars) scope_.push_back(v);
    // Quantifier scope extends as far right as possible.
    FormulaPtr body = parse_formula();
    scope_.resize(scope_.size() - vars.size());

    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      body = universal ? forall(*it, std::move(body)) : exists(*it, std::move(body));
    return body;
  }

  FormulaPtr parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      advance();
      FormulaPtr f = parse_formula();
      expect(Tok::RParen, ")");
      return f;
    }
    if (t.kind == Tok::Var) fail(t, "a predicate");
    if (t.kind == Tok::Quoted) {
      Token name = advance();
      return atom(name.name, parse_optional_args());
    }
    if (t.kind == Tok::Ident) {
      if (syntax_ == SyntaxId::TPTP) {
        if (std::isupper(static_cast<unsigned char>(t.name[0]))) fail(t, "a predicate");
        Token name = advance();
        return atom(name.name, parse_optional_args());
      }
      // FOL/R-FOL atoms always carry an argument list (possibly empty).
      Token name = advance();
      if (peek().kind != Tok::LParen) fail(peek(), "(");
      return atom(name.name, parse_optional_args());
    }
    fail(t, "a formula");
  }

  std::vector<Term> parse_optional_args() {
    std::vector<Term> args;
    if (peek().kind != Tok::LParen) return args;
    advance();
    if (peek().kind == Tok::RParen) {
      advance();
      return args;
    }
    while (true) {
      args.push_back(parse_term());
      if (peek().kind != Tok::Comma) break;
      advance();
    }
    expect(Tok::RParen, ")");
    return args;
  }

  Term parse_term() {
    const Token& t = peek();
    if (t.kind == Tok::Var) {
      advance();
      return Term::var(t.name);
    }
    if (t.kind == Tok::Quoted) {
      Token name = advance();
      if (peek().kind == Tok::LParen) return parse_function(name);
      return Term::constant(name.name);
    }
    if (t.kind != Tok::Ident) fail(t, "a term");
    Token name = advance();
    if (peek().kind == Tok::LParen) return parse_function(name);

    switch (syntax_) {
      case SyntaxId::TPTP:
        if (std::isupper(static_cast<unsigned char>(name.name[0]))) return Term::var(name.name);
        return Term::constant(name.name);
      case SyntaxId::RFOL:
        return Term::constant(name.name);
      case SyntaxId::FOL: {
        // An identifier is a variable iff bound by an enclosing quantifier;
        // binding resolves case-insensitively, nearest binder first.
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
          if (*it == name.name) return Term::var(*it);
        std::string low = lower(name.name);
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
          if (lower(*it) == low) return Term::var(*it);
        return Term::constant(name.name);
      }
    }
    return Term::constant(name.name);  // unreachable
  }

  Term parse_function(const Token& name) {
    auto args = parse_optional_args();
    if (args.empty())
      fail_custom(name, "function '" + name.name + "' requires at least one argument");
    return Term::func(name.name, std::move(args));
  }

  std::vector<Token> tokens_;
  SyntaxId syntax_;
  size_t pos_ = 0;
  std::vector<std::string> scope_;
};

}  // namespace

ParsedLine parse_line(const std::string& text, SyntaxId syntax) {
  try {
    return Parser(lex(text, syntax), syntax).parse_line();
  } catch (const LexError& e) {
    throw ParseFail{e.error};
  }
}

}  // namespace deduct::detail
