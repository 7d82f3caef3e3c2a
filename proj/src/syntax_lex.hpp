#pragma once

// Internal lexer shared by the three parsers. Not installed.

#include <string>
#include <vector>

#include "deduct/syntax.hpp"

namespace deduct::detail {

enum class Tok {
  Ident,
  Var,     // RFOL ?name
  Quoted,  // TPTP 'name'
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Dot,
  Colon,
  Not,
  And,
  Or,
  Xor,
  Implies,
  Iff,
  Forall,
  Exists,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // original lexeme, shown in diagnostics
  std::string name;  // identifier payload (Var without '?', Quoted without quotes)
  int line = 1;
  int column = 1;
};

struct LexError {
  SyntaxError error;
};

// Throws LexError on characters outside the grammar.
std::vector<Token> lex(const std::string& text, SyntaxId syntax);

}  // namespace deduct::detail
