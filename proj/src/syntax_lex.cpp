#include "syntax_lex.hpp"

#include <cctype>

namespace deduct::detail {

namespace {

struct GlyphOp {
  const char* utf8;
  Tok tok;
};

// Canonical glyphs first, then the accepted aliases.
constexpr GlyphOp kGlyphs[] = {
    {"∀", Tok::Forall},   // ∀
    {"∃", Tok::Exists},   // ∃
    {"¬", Tok::Not},      // ¬
    {"∧", Tok::And},      // ∧
    {"∨", Tok::Or},       // ∨
    {"⊕", Tok::Xor},      // ⊕
    {"→", Tok::Implies},  // →
    {"⟹", Tok::Implies},  // ⟹
    {"⇒", Tok::Implies},  // ⇒
    {"↔", Tok::Iff},      // ↔
    {"⟺", Tok::Iff},      // ⟺
    {"⇔", Tok::Iff},      // ⇔
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  Lexer(const std::string& text, SyntaxId syntax) : text_(text), syntax_(syntax) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) break;
      out.push_back(next());
    }
    out.push_back(Token{Tok::End, "<EOF>", "", line_, col_});
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& offending) {
    SyntaxError e;
    e.line = line_;
    e.column = col_;
    e.offending = offending;
    e.message = "unexpected character '" + offending + "'";
    throw LexError{e};
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  // One UTF-8 code point starting at pos_.
  std::string peek_char() const {
    unsigned char c = static_cast<unsigned char>(text_[pos_]);
    size_t len = 1;
    if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    return text_.substr(pos_, len);
  }

  Token make(Tok kind, const std::string& lexeme, int line, int col, std::string name = "") {
    return Token{kind, lexeme, std::move(name), line, col};
  }

  void advance(size_t bytes, int cols) {
    pos_ += bytes;
    col_ += cols;
  }

  bool try_ascii_op(const char* s, Tok kind, Token& out) {
    size_t n = std::char_traits<char>::length(s);
    if (text_.compare(pos_, n, s) != 0) return false;
    out = make(kind, s, line_, col_);
    advance(n, static_cast<int>(n));
    return true;
  }

  Token next() {
    int line = line_, col = col_;
    char c = text_[pos_];

    if (is_ident_start(c)) {
      size_t start = pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance(1, 1);
      std::string word = text_.substr(start, pos_ - start);
      if (word == "forall") return make(Tok::Forall, word, line, col);
      if (word == "exists") return make(Tok::Exists, word, line, col);
      if (word == "xor") return make(Tok::Xor, word, line, col);
      return make(Tok::Ident, word, line, col, word);
    }

    switch (c) {
      case '(': advance(1, 1); return make(Tok::LParen, "(", line, col);
      case ')': advance(1, 1); return make(Tok::RParen, ")", line, col);
      case '[': advance(1, 1); return make(Tok::LBracket, "[", line, col);
      case ']': advance(1, 1); return make(Tok::RBracket, "]", line, col);
      case ',': advance(1, 1); return make(Tok::Comma, ",", line, col);
      case '.': advance(1, 1); return make(Tok::Dot, ".", line, col);
      case ':': advance(1, 1); return make(Tok::Colon, ":", line, col);
      case '~': advance(1, 1); return make(Tok::Not, "~", line, col);
      case '&': advance(1, 1); return make(Tok::And, "&", line, col);
      case '|': advance(1, 1); return make(Tok::Or, "|", line, col);
      default: break;
    }

    Token t;
    if (try_ascii_op("<~>", Tok::Xor, t)) return t;
    if (try_ascii_op("<->", Tok::Iff, t)) return t;
    if (try_ascii_op("<=>", Tok::Iff, t)) return t;
    if (try_ascii_op("->", Tok::Implies, t)) return t;
    if (try_ascii_op("=>", Tok::Implies, t)) return t;

    if (c == '!' && syntax_ == SyntaxId::TPTP) {
      advance(1, 1);
      return make(Tok::Forall, "!", line, col);
    }
    if (c == '?') {
      if (syntax_ == SyntaxId::TPTP) {
        advance(1, 1);
        return make(Tok::Exists, "?", line, col);
      }
      if (syntax_ == SyntaxId::RFOL && pos_ + 1 < text_.size() && is_ident_start(text_[pos_ + 1])) {
        advance(1, 1);
        size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance(1, 1);
        std::string name = text_.substr(start, pos_ - start);
        return make(Tok::Var, "?" + name, line, col, name);
      }
      fail("?");
    }
    if (c == '\'' && syntax_ == SyntaxId::TPTP) {
      size_t end = text_.find('\'', pos_ + 1);
      if (end == std::string::npos) fail("'");
      std::string name = text_.substr(pos_ + 1, end - pos_ - 1);
      std::string lexeme = text_.substr(pos_, end - pos_ + 1);
      advance(end - pos_ + 1, static_cast<int>(end - pos_ + 1));
      if (!is_identifier(name)) fail(lexeme);
      return make(Tok::Quoted, lexeme, line, col, name);
    }

    // Multi-byte operator glyphs.
    std::string glyph = peek_char();
    for (const auto& g : kGlyphs) {
      if (glyph == g.utf8) {
        advance(glyph.size(), 1);
        return make(g.tok, glyph, line, col);
      }
    }
    fail(glyph);
  }

  const std::string& text_;
  SyntaxId syntax_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> lex(const std::string& text, SyntaxId syntax) {
  return Lexer(text, syntax).run();
}

}  // namespace deduct::detail
