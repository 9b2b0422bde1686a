#include "evocity/srcmetrics.hpp"

#include <algorithm>
#include <optional>
#include <utility>

#include "java_lexer.hpp"

namespace evocity::srcmetrics {

namespace {

using detail::Token;
using detail::TokenKind;

bool is_punct(const Token& t, char c) {
  return t.kind == TokenKind::Punct && t.text.size() == 1 && t.text[0] == c;
}

bool is_ident(const Token& t, std::string_view text) {
  return t.kind == TokenKind::Identifier && t.text == text;
}

struct ClassRecord {
  std::string name;
  ClassMetrics metrics;
  std::size_t first_line = 0;
  std::size_t last_line = 0;
  std::vector<std::pair<std::size_t, std::size_t>> nested_spans;
};

bool balanced(const std::vector<Token>& tokens) {
  long braces = 0;
  long parens = 0;
  for (const auto& t : tokens) {
    if (t.kind != TokenKind::Punct) continue;
    switch (t.text[0]) {
      case '{': ++braces; break;
      case '}': --braces; break;
      case '(': ++parens; break;
      case ')': --parens; break;
      default: break;
    }
    if (braces < 0 || parens < 0) return false;
  }
  return braces == 0 && parens == 0;
}

class ClassScanner {
 public:
  explicit ClassScanner(const std::vector<Token>& tokens) : t_(tokens) {}

  std::vector<ClassRecord> run() {
    scan_scope(std::nullopt);
    return std::move(classes_);
  }

 private:
  // Drops annotations (`@Name`, `@a.b.Name(...)`) but keeps `@interface`.
  std::vector<std::size_t> strip_annotations(const std::vector<std::size_t>& stmt) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < stmt.size(); ++k) {
      const auto& tok = t_[stmt[k]];
      if (is_punct(tok, '@') && k + 1 < stmt.size() && !is_ident(t_[stmt[k + 1]], "interface")) {
        ++k;  // name
        while (k + 2 < stmt.size() && is_punct(t_[stmt[k + 1]], '.')) k += 2;
        if (k + 1 < stmt.size() && is_punct(t_[stmt[k + 1]], '(')) {
          int depth = 0;
          for (++k; k < stmt.size(); ++k) {
            if (is_punct(t_[stmt[k]], '(')) ++depth;
            if (is_punct(t_[stmt[k]], ')') && --depth == 0) break;
          }
        }
        continue;
      }
      out.push_back(stmt[k]);
    }
    return out;
  }

  // Name of the type declared by `stmt`, if it declares one.
  std::optional<std::string> declared_type(const std::vector<std::size_t>& stmt) const {
    for (std::size_t k = 0; k + 1 < stmt.size(); ++k) {
      const auto& tok = t_[stmt[k]];
      if (tok.kind != TokenKind::Identifier) continue;
      if (k > 0 && is_punct(t_[stmt[k - 1]], '.')) continue;
      const auto& next = t_[stmt[k + 1]];
      if (next.kind != TokenKind::Identifier) continue;
      if (tok.text == "class" || tok.text == "interface" || tok.text == "enum") return next.text;
      if (tok.text == "record" && k + 2 < stmt.size() &&
          (is_punct(t_[stmt[k + 2]], '(') || is_punct(t_[stmt[k + 2]], '<'))) {
        return next.text;
      }
    }
    return std::nullopt;
  }

  bool has_top_level(const std::vector<std::size_t>& stmt, char c) const {
    int depth = 0;
    for (auto idx : stmt) {
      const auto& tok = t_[idx];
      if (is_punct(tok, '(')) {
        if (c == '(' && depth == 0) return true;
        ++depth;
      } else if (is_punct(tok, ')')) {
        --depth;
      } else if (depth == 0 && is_punct(tok, c)) {
        return true;
      }
    }
    return false;
  }

  // End of a generic argument list starting at stmt[k] == '<', or nullopt
  // when the '<' is a comparison.
  std::optional<std::size_t> generic_end(const std::vector<std::size_t>& stmt, std::size_t k) const {
    int depth = 0;
    for (; k < stmt.size(); ++k) {
      const auto& tok = t_[stmt[k]];
      if (is_punct(tok, '<')) {
        ++depth;
      } else if (is_punct(tok, '>')) {
        if (--depth == 0) return k;
      } else if (!(tok.kind == TokenKind::Identifier || is_punct(tok, '.') || is_punct(tok, ',') ||
                   is_punct(tok, '?') || is_punct(tok, '&') || is_punct(tok, '[') ||
                   is_punct(tok, ']'))) {
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  std::size_t count_field_declarators(const std::vector<std::size_t>& raw) const {
    auto stmt = strip_annotations(raw);
    if (stmt.empty()) return 0;
    // A '(' before the initializer means a method declaration without body
    // or an enum constant with arguments.
    for (auto idx : stmt) {
      if (is_punct(t_[idx], '=')) break;
      if (is_punct(t_[idx], '(')) return 0;
    }
    std::size_t declarators = 1;
    std::size_t first_segment_names = 0;
    bool in_first = true;
    bool seen_assign = false;
    int depth = 0;
    for (std::size_t k = 0; k < stmt.size(); ++k) {
      const auto& tok = t_[stmt[k]];
      if (is_punct(tok, '<') && k > 0 && t_[stmt[k - 1]].kind == TokenKind::Identifier) {
        if (auto end = generic_end(stmt, k)) {
          k = *end;
          continue;
        }
      }
      if (is_punct(tok, '(') || is_punct(tok, '[')) {
        ++depth;
      } else if (is_punct(tok, ')') || is_punct(tok, ']')) {
        --depth;
      } else if (depth == 0 && is_punct(tok, ',')) {
        ++declarators;
        in_first = false;
      } else if (depth == 0 && is_punct(tok, '=')) {
        if (in_first) seen_assign = true;
      } else if (in_first && !seen_assign && depth == 0 && tok.kind == TokenKind::Identifier) {
        ++first_segment_names;
      }
    }
    // A declaration needs a type and a name; `A, B, C;` enum constants have one.
    return first_segment_names >= 2 ? declarators : 0;
  }

  // Consumes a balanced {...} starting at t_[i_] == '{', crediting `for`
  // keywords to the owner.
  void skip_block(ClassRecord* owner) {
    int depth = 0;
    for (; i_ < t_.size(); ++i_) {
      const auto& tok = t_[i_];
      if (is_punct(tok, '{')) {
        ++depth;
      } else if (is_punct(tok, '}')) {
        if (--depth == 0) {
          ++i_;
          return;
        }
      } else if (owner != nullptr && is_ident(tok, "for")) {
        ++owner->metrics.num_for_loops;
      }
    }
  }

  // Scans declarations until the closing brace of the current class body
  // (or end of input for the file scope).
  void scan_scope(std::optional<std::size_t> owner_index) {
    std::vector<std::size_t> stmt;
    int paren = 0;
    auto owner = [&]() -> ClassRecord* {
      return owner_index ? &classes_[*owner_index] : nullptr;
    };
    while (i_ < t_.size()) {
      const auto& tok = t_[i_];
      if (is_punct(tok, '(')) {
        ++paren;
      } else if (is_punct(tok, ')')) {
        --paren;
      } else if (paren == 0 && is_punct(tok, ';')) {
        if (owner() != nullptr) owner()->metrics.num_instance_variables += count_field_declarators(stmt);
        stmt.clear();
        ++i_;
        continue;
      } else if (is_punct(tok, '}')) {
        if (owner_index) {
          classes_[*owner_index].last_line = tok.line;
          ++i_;
        }
        return;
      } else if (is_punct(tok, '{')) {
        if (paren > 0) {
          skip_block(owner());
          continue;
        }
        auto filtered = strip_annotations(stmt);
        if (auto name = declared_type(filtered)) {
          ClassRecord record;
          record.name = *name;
          record.first_line = t_[stmt.front()].line;
          classes_.push_back(std::move(record));
          auto index = classes_.size() - 1;
          ++i_;
          scan_scope(index);
          if (owner_index) {
            classes_[*owner_index].nested_spans.emplace_back(classes_[index].first_line,
                                                             classes_[index].last_line);
          }
          stmt.clear();
          continue;
        }
        if (owner() != nullptr && has_top_level(filtered, '=')) {
          skip_block(owner());  // array initializer, lambda or anonymous class
          continue;
        }
        if (owner() != nullptr && has_top_level(filtered, '(')) {
          ++owner()->metrics.num_methods;
        }
        skip_block(owner());
        stmt.clear();
        continue;
      } else if (owner() != nullptr && is_ident(tok, "for")) {
        ++owner()->metrics.num_for_loops;
      }
      stmt.push_back(i_);
      ++i_;
    }
  }

  const std::vector<Token>& t_;
  std::size_t i_ = 0;
  std::vector<ClassRecord> classes_;
};

std::size_t count_code_lines(const std::vector<bool>& code_lines, std::size_t first,
                             std::size_t last) {
  std::size_t n = 0;
  for (std::size_t line = first; line <= last && line - 1 < code_lines.size(); ++line) {
    n += code_lines[line - 1] ? 1 : 0;
  }
  return n;
}

}  // namespace

FileSourceMetrics analyze_source(std::string_view content) {
  auto lexed = detail::lex_java(content);
  FileSourceMetrics result;
  std::size_t file_loc = std::count(lexed.code_lines.begin(), lexed.code_lines.end(), true);

  if (lexed.unterminated || !balanced(lexed.tokens)) {
    result.degraded = true;
    result.aggregate.lines_of_code = file_loc;
    return result;
  }

  for (auto& record : ClassScanner(lexed.tokens).run()) {
    auto loc = count_code_lines(lexed.code_lines, record.first_line, record.last_line);
    for (auto [first, last] : record.nested_spans) {
      loc -= count_code_lines(lexed.code_lines, first, last);
    }
    record.metrics.lines_of_code = loc;
    result.aggregate.num_instance_variables += record.metrics.num_instance_variables;
    result.aggregate.num_for_loops += record.metrics.num_for_loops;
    result.aggregate.num_methods += record.metrics.num_methods;
    result.classes.push_back({std::move(record.name), record.metrics});
  }
  result.aggregate.lines_of_code = file_loc;
  return result;
}

}  // namespace evocity::srcmetrics
