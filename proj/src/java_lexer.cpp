#include "java_lexer.hpp"

#include <cctype>

namespace evocity::detail {

namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {
    std::size_t lines = 1;
    for (char c : src) lines += c == '\n';
    if (!src.empty() && src.back() == '\n') --lines;
    out_.code_lines.assign(src.empty() ? 0 : lines, false);
  }

  LexedSource run() {
    while (pos_ < src_.size()) {
      unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && peek(1) == '*') {
        block_comment();
      } else if (c == '"') {
        mark_code();
        if (peek(1) == '"' && peek(2) == '"') {
          text_block();
        } else {
          string_literal();
        }
      } else if (c == '\'') {
        mark_code();
        char_literal();
      } else if (ident_start(c)) {
        mark_code();
        auto start = pos_;
        while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        push(TokenKind::Identifier, std::string(src_.substr(start, pos_ - start)));
      } else if (std::isdigit(c)) {
        mark_code();
        auto start = pos_;
        while (pos_ < src_.size() &&
               (ident_part(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
          ++pos_;
        }
        push(TokenKind::Number, std::string(src_.substr(start, pos_ - start)));
      } else {
        mark_code();
        push(TokenKind::Punct, std::string(1, static_cast<char>(c)));
        ++pos_;
      }
    }
    return std::move(out_);
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void mark_code() {
    if (line_ - 1 < out_.code_lines.size()) out_.code_lines[line_ - 1] = true;
  }

  // Literals report the line they start on.
  void push(TokenKind kind, std::string text) {
    out_.tokens.push_back({kind, std::move(text), token_line_ != 0 ? token_line_ : line_});
    token_line_ = 0;
  }

  void block_comment() {
    pos_ += 2;
    while (pos_ < src_.size()) {
      if (src_[pos_] == '*' && peek(1) == '/') {
        pos_ += 2;
        return;
      }
      if (src_[pos_] == '\n') ++line_;
      ++pos_;
    }
    out_.unterminated = true;
  }

  char escape(char e) {
    switch (e) {
      case 'n': return '\n';
      case 't': return '\t';
      case 'r': return '\r';
      case 'b': return '\b';
      case 'f': return '\f';
      case '0': return '\0';
      case 's': return ' ';
      default: return e;
    }
  }

  void string_literal() {
    token_line_ = line_;
    ++pos_;
    std::string value;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size()) {
        value.push_back(escape(src_[pos_ + 1]));
        pos_ += 2;
        continue;
      }
      if (c == '"') {
        ++pos_;
        push(TokenKind::String, std::move(value));
        return;
      }
      if (c == '\n') break;  // Java forbids raw newlines in plain strings
      value.push_back(c);
      ++pos_;
    }
    out_.unterminated = true;
    push(TokenKind::String, std::move(value));
  }

  void text_block() {
    token_line_ = line_;
    pos_ += 3;
    std::string value;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '"' && peek(1) == '"' && peek(2) == '"') {
        pos_ += 3;
        push(TokenKind::String, std::move(value));
        return;
      }
      if (c == '\\' && pos_ + 1 < src_.size()) {
        value.push_back(escape(src_[pos_ + 1]));
        pos_ += 2;
        continue;
      }
      if (c == '\n') {
        ++line_;
        mark_code();
      }
      value.push_back(c);
      ++pos_;
    }
    out_.unterminated = true;
    push(TokenKind::String, std::move(value));
  }

  void char_literal() {
    token_line_ = line_;
    ++pos_;
    std::string value;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size()) {
        value.push_back(escape(src_[pos_ + 1]));
        pos_ += 2;
        continue;
      }
      if (c == '\'') {
        ++pos_;
        push(TokenKind::Char, std::move(value));
        return;
      }
      if (c == '\n') break;
      value.push_back(c);
      ++pos_;
    }
    out_.unterminated = true;
    push(TokenKind::Char, std::move(value));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t token_line_ = 0;
  LexedSource out_;
};

}  // namespace

LexedSource lex_java(std::string_view content) { return Lexer(content).run(); }

}  // namespace evocity::detail
