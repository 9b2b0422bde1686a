#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace evocity::detail {

enum class TokenKind { Identifier, String, Char, Number, Punct };

struct Token {
  TokenKind kind;
  std::string text;  // decoded contents for String, raw text otherwise
  std::size_t line;  // 1-based
};

struct LexedSource {
  std::vector<Token> tokens;
  /// code_lines[i] is true when physical line i+1 holds anything besides
  /// whitespace and comments.
  std::vector<bool> code_lines;
  /// Set when a comment, string or char literal ran to end of input.
  bool unterminated = false;
};

/// Comment- and literal-aware tokenizer for Java-family syntax.
LexedSource lex_java(std::string_view content);

}  // namespace evocity::detail
