#include "evocity/sqlinfer.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "java_lexer.hpp"

namespace evocity::sqlinfer {

std::string_view to_string(StatementKind kind) {
  switch (kind) {
    case StatementKind::CreateTable: return "CreateTable";
    case StatementKind::Select: return "Select";
    case StatementKind::Insert: return "Insert";
    case StatementKind::Update: return "Update";
    case StatementKind::Delete: return "Delete";
    case StatementKind::AlterTable: return "AlterTable";
    case StatementKind::DropTable: return "DropTable";
    case StatementKind::Other: return "Other";
  }
  return "Other";
}

std::optional<Dialect> dialect_from_string(std::string_view name) {
  for (auto d : {Dialect::Generic, Dialect::Sqlite, Dialect::Mysql, Dialect::Postgres}) {
    if (to_string(d) == name) return d;
  }
  return std::nullopt;
}

std::string_view to_string(Dialect dialect) {
  switch (dialect) {
    case Dialect::Generic: return "generic";
    case Dialect::Sqlite: return "sqlite";
    case Dialect::Mysql: return "mysql";
    case Dialect::Postgres: return "postgres";
  }
  return "generic";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

// ---------------------------------------------------------------------------
// Extraction from Java source

using detail::Token;
using detail::TokenKind;

bool punct(const Token& t, char c) {
  return t.kind == TokenKind::Punct && t.text.size() == 1 && t.text[0] == c;
}

class ChainEvaluator {
 public:
  explicit ChainEvaluator(const std::vector<Token>& tokens) : t_(tokens) {}

  struct Result {
    std::string text;
    bool has_fragment = false;
    std::size_t end = 0;  // one past the last consumed token
    std::vector<std::size_t> literals;
  };

  std::map<std::string, std::string> constants;

  // Index of the first operand of the `+` chain that contains t_[i].
  std::size_t chain_start(std::size_t i) const {
    std::size_t j = i;
    while (j >= 2 && punct(t_[j - 1], '+')) {
      std::size_t k = j - 2;
      const auto& tok = t_[k];
      if (tok.kind == TokenKind::String || tok.kind == TokenKind::Number ||
          tok.kind == TokenKind::Char) {
        j = k;
      } else if (tok.kind == TokenKind::Identifier) {
        j = identifier_chain_start(k);
      } else if (punct(tok, ')')) {
        auto open = matching_open(k);
        if (!open) break;
        j = *open;
        if (j > 0 && t_[j - 1].kind == TokenKind::Identifier) j = identifier_chain_start(j - 1);
      } else {
        break;
      }
      // `x += "..."` or `a - b + "..."` are not plain concatenations.
      if (j > 0 && (punct(t_[j - 1], '-') || punct(t_[j - 1], '*'))) break;
    }
    return j;
  }

  Result evaluate(std::size_t start) const {
    Result r;
    std::size_t pos = start;
    for (;;) {
      if (pos >= t_.size()) break;
      const auto& tok = t_[pos];
      bool fragment = false;
      if (tok.kind == TokenKind::String) {
        r.text += tok.text;
        r.literals.push_back(pos);
        ++pos;
      } else if (tok.kind == TokenKind::Number || tok.kind == TokenKind::Char) {
        r.text += tok.text;
        ++pos;
      } else if (tok.kind == TokenKind::Identifier) {
        std::string name = tok.text;
        ++pos;
        while (pos + 1 < t_.size() && punct(t_[pos], '.') &&
               t_[pos + 1].kind == TokenKind::Identifier) {
          name = t_[pos + 1].text;
          pos += 2;
        }
        if (pos < t_.size() && punct(t_[pos], '(')) {
          fragment = true;
          pos = skip_parens(pos);
        } else if (auto it = constants.find(name); it != constants.end()) {
          r.text += it->second;
        } else {
          fragment = true;
        }
      } else if (punct(tok, '(')) {
        fragment = true;
        pos = skip_parens(pos);
      } else {
        break;
      }
      if (fragment) {
        r.text += kFragment;
        r.has_fragment = true;
      }
      if (pos + 1 < t_.size() && punct(t_[pos], '+') && !punct(t_[pos + 1], '+') &&
          !punct(t_[pos + 1], '=')) {
        ++pos;
        continue;
      }
      break;
    }
    r.end = pos;
    return r;
  }

 private:
  std::size_t identifier_chain_start(std::size_t k) const {
    while (k >= 2 && punct(t_[k - 1], '.') && t_[k - 2].kind == TokenKind::Identifier) k -= 2;
    return k;
  }

  std::optional<std::size_t> matching_open(std::size_t close) const {
    int depth = 0;
    for (std::size_t k = close + 1; k-- > 0;) {
      if (punct(t_[k], ')')) ++depth;
      if (punct(t_[k], '(') && --depth == 0) return k;
    }
    return std::nullopt;
  }

  std::size_t skip_parens(std::size_t open) const {
    int depth = 0;
    for (std::size_t k = open; k < t_.size(); ++k) {
      if (punct(t_[k], '(')) ++depth;
      if (punct(t_[k], ')') && --depth == 0) return k + 1;
    }
    return t_.size();
  }

  const std::vector<Token>& t_;
};

bool looks_like_sql(const std::string& text) {
  static const std::regex prefix(
      R"(^\s*(select|insert|update|delete|create\s+table|alter\s+table|drop\s+table)\b)",
      std::regex::icase);
  return std::regex_search(text, prefix);
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// ---------------------------------------------------------------------------
// SQL parsing

enum class SqlTok { Word, Quoted, String, Number, Punct, Fragment };

struct SqlToken {
  SqlTok kind;
  std::string text;  // unquoted for Quoted/String
  std::string upper;
};

std::vector<SqlToken> lex_sql(std::string_view s, Dialect dialect) {
  std::vector<SqlToken> out;
  const bool backticks = dialect != Dialect::Postgres;
  const bool brackets = dialect == Dialect::Generic || dialect == Dialect::Sqlite;
  std::size_t i = 0;
  auto quoted = [&](char close, SqlTok kind) {
    std::string value;
    ++i;
    while (i < s.size()) {
      if (s[i] == close) {
        if (close != ']' && i + 1 < s.size() && s[i + 1] == close) {
          value.push_back(close);
          i += 2;
          continue;
        }
        ++i;
        break;
      }
      value.push_back(s[i++]);
    }
    out.push_back({kind, value, upper(value)});
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (s.substr(i, kFragment.size()) == kFragment) {
      out.push_back({SqlTok::Fragment, std::string(kFragment), std::string(kFragment)});
      i += kFragment.size();
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      auto end = s.find("*/", i + 2);
      i = end == std::string_view::npos ? s.size() : end + 2;
    } else if (c == '"') {
      quoted('"', SqlTok::Quoted);
    } else if (c == '`' && backticks) {
      quoted('`', SqlTok::Quoted);
    } else if (c == '[' && brackets) {
      quoted(']', SqlTok::Quoted);
    } else if (c == '\'') {
      quoted('\'', SqlTok::String);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      auto start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '$')) ++i;
      auto word = std::string(s.substr(start, i - start));
      out.push_back({SqlTok::Word, word, upper(word)});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      auto start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
      auto num = std::string(s.substr(start, i - start));
      out.push_back({SqlTok::Number, num, num});
    } else {
      out.push_back({SqlTok::Punct, std::string(1, c), std::string(1, c)});
      ++i;
    }
  }
  return out;
}

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "SELECT", "FROM", "WHERE", "GROUP", "ORDER", "BY", "HAVING", "LIMIT", "OFFSET", "JOIN",
      "INNER", "LEFT", "RIGHT", "FULL", "OUTER", "CROSS", "NATURAL", "ON", "USING", "UNION",
      "INTERSECT", "EXCEPT", "AS", "SET", "VALUES", "INTO", "AND", "OR", "NOT", "WINDOW",
      "RETURNING", "FOR", "LATERAL", "WITH"};
  return words;
}

const std::set<std::string>& column_constraint_words() {
  static const std::set<std::string> words = {
      "CONSTRAINT", "PRIMARY", "NOT", "NULL", "UNIQUE", "DEFAULT", "REFERENCES", "CHECK",
      "COLLATE", "AUTOINCREMENT", "AUTO_INCREMENT", "GENERATED", "AS", "ON", "COMMENT"};
  return words;
}

class SqlParser {
 public:
  SqlParser(std::vector<SqlToken> tokens, Dialect dialect)
      : t_(std::move(tokens)), dialect_(dialect) {}

  SqlStatement parse() {
    SqlStatement st;
    if (t_.empty()) return st;
    const auto& head = t_[0].upper;
    if (head == "CREATE") {
      parse_create(st);
    } else if (head == "SELECT") {
      st.kind = StatementKind::Select;
      collect_from_tables(0, st.tables);
    } else if (head == "INSERT") {
      parse_insert(st);
    } else if (head == "UPDATE") {
      parse_update(st);
    } else if (head == "DELETE") {
      parse_delete(st);
    } else if (head == "ALTER") {
      parse_alter(st);
    } else if (head == "DROP") {
      parse_drop(st);
    }
    if (st.kind != StatementKind::Other && st.tables.empty()) {
      st = SqlStatement{};
    }
    return st;
  }

 private:
  bool word(std::size_t i, std::string_view w) const {
    return i < t_.size() && t_[i].kind == SqlTok::Word && t_[i].upper == w;
  }
  bool punct(std::size_t i, char c) const {
    return i < t_.size() && t_[i].kind == SqlTok::Punct && t_[i].text[0] == c;
  }

  bool name_token(std::size_t i) const {
    if (i >= t_.size()) return false;
    switch (t_[i].kind) {
      case SqlTok::Word: return !reserved_words().contains(t_[i].upper);
      case SqlTok::Quoted: return true;
      case SqlTok::String: return dialect_ == Dialect::Generic || dialect_ == Dialect::Sqlite;
      case SqlTok::Fragment: return true;
      default: return false;
    }
  }

  // Reads `name` or `schema.name`; returns the normalized last part, or
  // nullopt when the name is unresolved. `i` moves past the name.
  std::optional<std::string> qualified_name(std::size_t& i, bool* present = nullptr) const {
    if (!name_token(i)) {
      if (present) *present = false;
      return std::nullopt;
    }
    if (present) *present = true;
    bool unresolved = t_[i].kind == SqlTok::Fragment;
    std::string name = t_[i].text;
    ++i;
    while (punct(i, '.') && name_token(i + 1)) {
      unresolved = t_[i + 1].kind == SqlTok::Fragment;
      name = t_[i + 1].text;
      i += 2;
    }
    if (unresolved || name.find(kFragment) != std::string::npos) return std::nullopt;
    return lower(name);
  }

  void add_table(std::vector<std::string>& tables, const std::optional<std::string>& name) const {
    if (name && std::find(tables.begin(), tables.end(), *name) == tables.end()) {
      tables.push_back(*name);
    }
  }

  // Every table reference after FROM or JOIN, at any nesting depth.
  void collect_from_tables(std::size_t from, std::vector<std::string>& tables) const {
    static const std::set<std::string> from_functions = {"EXTRACT", "SUBSTRING", "TRIM",
                                                         "OVERLAY", "POSITION"};
    std::vector<bool> in_function;  // per open paren
    for (std::size_t i = from; i < t_.size(); ++i) {
      if (punct(i, '(')) {
        in_function.push_back(i > 0 && t_[i - 1].kind == SqlTok::Word &&
                              from_functions.contains(t_[i - 1].upper));
        continue;
      }
      if (punct(i, ')')) {
        if (!in_function.empty()) in_function.pop_back();
        continue;
      }
      bool inside_function = !in_function.empty() && in_function.back();
      if (word(i, "FROM") && !inside_function) {
        std::size_t j = i + 1;
        for (;;) {
          if (punct(j, '(')) break;  // subquery: its own FROM is found later
          std::size_t before = j;
          add_table(tables, qualified_name(j));
          if (j == before) break;
          if (word(j, "AS")) ++j;
          if (t_.size() > j && (t_[j].kind == SqlTok::Word && !reserved_words().contains(t_[j].upper))) {
            ++j;  // alias
          } else if (t_.size() > j && t_[j].kind == SqlTok::Quoted) {
            ++j;
          }
          if (!punct(j, ',')) break;
          ++j;
        }
      } else if (word(i, "JOIN")) {
        std::size_t j = i + 1;
        add_table(tables, qualified_name(j));
      }
    }
  }

  void skip_if_not_exists(std::size_t& i) const {
    if (word(i, "IF") && word(i + 1, "NOT") && word(i + 2, "EXISTS")) i += 3;
  }

  void parse_create(SqlStatement& st) {
    std::size_t i = 1;
    if (word(i, "TEMP") || word(i, "TEMPORARY")) ++i;
    if (dialect_ == Dialect::Postgres || dialect_ == Dialect::Generic) {
      if (word(i, "UNLOGGED")) ++i;
    }
    if (!word(i, "TABLE")) return;
    ++i;
    skip_if_not_exists(i);
    auto name = qualified_name(i);
    if (!name) return;
    st.kind = StatementKind::CreateTable;
    st.tables.push_back(*name);
    if (!punct(i, '(')) return;  // CREATE TABLE ... AS SELECT
    ++i;
    // Split the definition list at depth-0 commas.
    std::vector<std::vector<std::size_t>> items(1);
    int depth = 0;
    for (; i < t_.size(); ++i) {
      if (punct(i, '(')) ++depth;
      if (punct(i, ')')) {
        if (depth == 0) break;
        --depth;
      }
      if (depth == 0 && punct(i, ',')) {
        items.emplace_back();
        continue;
      }
      items.back().push_back(i);
    }
    static const std::set<std::string> table_constraints = {
        "CONSTRAINT", "PRIMARY", "FOREIGN", "UNIQUE", "CHECK", "KEY", "INDEX", "FULLTEXT", "EXCLUDE"};
    for (const auto& item : items) {
      if (item.empty()) continue;
      const auto& first = t_[item.front()];
      if (first.kind == SqlTok::Word && table_constraints.contains(first.upper)) continue;
      if (!(first.kind == SqlTok::Word || first.kind == SqlTok::Quoted ||
            first.kind == SqlTok::String)) {
        continue;
      }
      ColumnDef col;
      col.name = lower(first.text);
      std::string type;
      for (std::size_t k = 1; k < item.size(); ++k) {
        const auto& tok = t_[item[k]];
        if (tok.kind == SqlTok::Word && column_constraint_words().contains(tok.upper)) break;
        bool glue = tok.kind == SqlTok::Punct || (!type.empty() && type.back() == '(');
        if (!type.empty() && !glue) type.push_back(' ');
        type += tok.text;
      }
      col.type = type;
      bool duplicate = std::any_of(st.columns.begin(), st.columns.end(),
                                   [&](const ColumnDef& c) { return c.name == col.name; });
      if (!duplicate) st.columns.push_back(std::move(col));
    }
  }

  void parse_insert(SqlStatement& st) {
    std::size_t i = 1;
    if (word(i, "OR") && dialect_ != Dialect::Mysql && dialect_ != Dialect::Postgres) i += 2;
    if ((word(i, "IGNORE") || word(i, "LOW_PRIORITY") || word(i, "DELAYED") ||
         word(i, "HIGH_PRIORITY")) &&
        (dialect_ == Dialect::Mysql || dialect_ == Dialect::Generic)) {
      ++i;
    }
    if (word(i, "INTO")) {
      ++i;
    } else if (dialect_ != Dialect::Mysql) {
      return;
    }
    auto name = qualified_name(i);
    if (!name) return;
    st.kind = StatementKind::Insert;
    st.tables.push_back(*name);
    collect_from_tables(i, st.tables);
  }

  void parse_update(SqlStatement& st) {
    std::size_t i = 1;
    if (word(i, "OR") && dialect_ != Dialect::Mysql && dialect_ != Dialect::Postgres) i += 2;
    while ((word(i, "LOW_PRIORITY") || word(i, "IGNORE")) &&
           (dialect_ == Dialect::Mysql || dialect_ == Dialect::Generic)) {
      ++i;
    }
    if (word(i, "ONLY") && (dialect_ == Dialect::Postgres || dialect_ == Dialect::Generic)) ++i;
    auto name = qualified_name(i);
    if (!name || !std::any_of(t_.begin() + static_cast<long>(std::min(i, t_.size())), t_.end(),
                              [](const SqlToken& t) { return t.kind == SqlTok::Word && t.upper == "SET"; })) {
      return;
    }
    st.kind = StatementKind::Update;
    st.tables.push_back(*name);
    collect_from_tables(i, st.tables);
  }

  void parse_delete(SqlStatement& st) {
    std::size_t i = 1;
    while ((word(i, "LOW_PRIORITY") || word(i, "QUICK") || word(i, "IGNORE")) &&
           (dialect_ == Dialect::Mysql || dialect_ == Dialect::Generic)) {
      ++i;
    }
    if (!word(i, "FROM")) return;
    ++i;
    if (word(i, "ONLY") && (dialect_ == Dialect::Postgres || dialect_ == Dialect::Generic)) ++i;
    auto name = qualified_name(i);
    if (!name) return;
    st.kind = StatementKind::Delete;
    st.tables.push_back(*name);
    collect_from_tables(i, st.tables);
  }

  void parse_alter(SqlStatement& st) {
    std::size_t i = 1;
    if (!word(i, "TABLE")) return;
    ++i;
    if (word(i, "IF") && word(i + 1, "EXISTS")) i += 2;
    if (word(i, "ONLY")) ++i;
    auto name = qualified_name(i);
    if (!name) return;
    st.kind = StatementKind::AlterTable;
    st.tables.push_back(*name);
    if (!word(i, "ADD")) return;
    ++i;
    if (word(i, "COLUMN")) ++i;
    skip_if_not_exists(i);
    if (i >= t_.size() || !(t_[i].kind == SqlTok::Word || t_[i].kind == SqlTok::Quoted)) return;
    if (word(i, "CONSTRAINT") || word(i, "PRIMARY") || word(i, "FOREIGN") || word(i, "UNIQUE") ||
        word(i, "INDEX") || word(i, "KEY")) {
      return;
    }
    ColumnDef col;
    col.name = lower(t_[i].text);
    std::string type;
    for (std::size_t k = i + 1; k < t_.size(); ++k) {
      if (t_[k].kind == SqlTok::Word && column_constraint_words().contains(t_[k].upper)) break;
      if (punct(k, ';') || punct(k, ',')) break;
      bool glue = t_[k].kind == SqlTok::Punct || (!type.empty() && type.back() == '(');
      if (!type.empty() && !glue) type.push_back(' ');
      type += t_[k].text;
    }
    col.type = type;
    st.columns.push_back(std::move(col));
  }

  void parse_drop(SqlStatement& st) {
    std::size_t i = 1;
    if (!word(i, "TABLE")) return;
    ++i;
    if (word(i, "IF") && word(i + 1, "EXISTS")) i += 2;
    auto name = qualified_name(i);
    if (!name) return;
    st.kind = StatementKind::DropTable;
    st.tables.push_back(*name);
  }

  std::vector<SqlToken> t_;
  Dialect dialect_;
};

bool is_dml(StatementKind k) {
  return k == StatementKind::Select || k == StatementKind::Insert || k == StatementKind::Update ||
         k == StatementKind::Delete;
}

}  // namespace

std::vector<SqlCandidate> extract_sql_strings(std::string_view content) {
  auto lexed = detail::lex_java(content);
  const auto& t = lexed.tokens;
  ChainEvaluator eval(t);

  // `String NAME = <chain>;` constants; two passes resolve forward references.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i + 3 < t.size(); ++i) {
      if (!(t[i].kind == TokenKind::Identifier && t[i].text == "String" &&
            t[i + 1].kind == TokenKind::Identifier && punct(t[i + 2], '='))) {
        continue;
      }
      auto r = eval.evaluate(i + 3);
      if (r.literals.empty() && r.text.empty()) continue;
      if (r.end < t.size() && !punct(t[r.end], ';') && !punct(t[r.end], ',')) continue;
      if (!r.has_fragment) eval.constants[t[i + 1].text] = r.text;
    }
  }

  std::vector<SqlCandidate> out;
  std::vector<bool> consumed(t.size(), false);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].kind != TokenKind::String || consumed[i]) continue;
    auto start = eval.chain_start(i);
    auto r = eval.evaluate(start);
    for (auto lit : r.literals) consumed[lit] = true;
    consumed[i] = true;
    auto text = trim(r.text);
    if (!looks_like_sql(text)) continue;
    out.push_back({text, t[start].line, r.has_fragment});
  }
  return out;
}

SqlStatement parse_sql(std::string_view text, Dialect dialect) {
  auto st = SqlParser(lex_sql(text, dialect), dialect).parse();
  st.has_fragment = text.find(kFragment) != std::string_view::npos;
  return st;
}

bool TableSchema::alive_at(std::size_t ordinal) const {
  return std::any_of(alive.begin(), alive.end(),
                     [&](const evomodel::AliveInterval& i) { return i.contains(ordinal); });
}

SchemaState infer_schema(const std::vector<SqlStatement>& statements, const SchemaState& previous,
                         std::size_t ordinal) {
  SchemaState state = previous;
  auto materialize = [&](const std::string& name, bool by_use) -> TableSchema& {
    auto [it, inserted] = state.try_emplace(name);
    if (inserted) {
      it->second.name = name;
      it->second.created_at = ordinal;
      it->second.alive.push_back({ordinal, std::nullopt});
      it->second.inferred_by_use = by_use;
    }
    return it->second;
  };

  std::set<std::string> created_now;
  std::vector<const SqlStatement*> usable;
  for (const auto& st : statements) {
    // A fragment may hide anything, so only the table names it resolved
    // are trusted, and only as evidence of use.
    if (st.kind == StatementKind::Other || (st.has_fragment && !is_dml(st.kind))) continue;
    usable.push_back(&st);
    if (st.kind == StatementKind::CreateTable) created_now.insert(st.tables.front());
  }

  // Order-independent: creations, then alterations, then drops, then uses.
  for (const auto* st : usable) {
    if (st->kind != StatementKind::CreateTable) continue;
    auto& table = materialize(st->tables.front(), false);
    if (table.dropped_at) {
      table.dropped_at.reset();
      table.alive.push_back({ordinal, std::nullopt});
    }
    table.inferred_by_use = false;
    table.columns = st->columns;
  }
  for (const auto* st : usable) {
    if (st->kind != StatementKind::AlterTable) continue;
    auto& table = materialize(st->tables.front(), true);
    for (const auto& col : st->columns) {
      bool known = std::any_of(table.columns.begin(), table.columns.end(),
                               [&](const ColumnDef& c) { return c.name == col.name; });
      if (!known) table.columns.push_back(col);
    }
  }
  for (const auto* st : usable) {
    if (st->kind != StatementKind::DropTable) continue;
    const auto& name = st->tables.front();
    if (created_now.contains(name)) continue;
    auto it = state.find(name);
    if (it == state.end() || it->second.dropped_at) continue;
    it->second.dropped_at = ordinal;
    it->second.alive.back().end = ordinal;
  }
  for (const auto* st : usable) {
    if (!is_dml(st->kind)) continue;
    for (const auto& name : st->tables) materialize(name, true);
  }
  return state;
}

AccessReport count_accesses(const std::vector<SqlStatement>& statements,
                            const evomodel::EvolutionModel& model, std::size_t ordinal) {
  AccessReport report;
  for (const auto& st : statements) {
    if (!is_dml(st.kind)) continue;
    const auto* history = model.file_at(st.path, ordinal);
    if (history == nullptr || !evomodel::alive_at(*history, ordinal)) continue;
    for (const auto& table : st.tables) {
      report.accesses.push_back({table, history->id.value, st.kind, ordinal, st.path, st.line});
      ++report.per_table[table];
    }
  }
  return report;
}

Json schema_to_json(const TableSchema& table) {
  Json columns = Json::array();
  for (const auto& c : table.columns) columns.push_back({{"name", c.name}, {"type", c.type}});
  Json alive = Json::array();
  for (const auto& i : table.alive) {
    alive.push_back({{"begin", i.begin}, {"end", i.end ? Json(*i.end) : Json(nullptr)}});
  }
  return {{"name", table.name},
          {"columns", columns},
          {"created_at", table.created_at},
          {"dropped_at", table.dropped_at ? Json(*table.dropped_at) : Json(nullptr)},
          {"alive", alive},
          {"inferred_by_use", table.inferred_by_use}};
}

TableSchema schema_from_json(const Json& j) {
  TableSchema t;
  t.name = j.at("name").get<std::string>();
  for (const auto& c : j.at("columns")) {
    t.columns.push_back({c.at("name").get<std::string>(), c.at("type").get<std::string>()});
  }
  t.created_at = j.at("created_at").get<std::size_t>();
  if (!j.at("dropped_at").is_null()) t.dropped_at = j.at("dropped_at").get<std::size_t>();
  for (const auto& ji : j.at("alive")) {
    evomodel::AliveInterval i;
    i.begin = ji.at("begin").get<std::size_t>();
    if (!ji.at("end").is_null()) i.end = ji.at("end").get<std::size_t>();
    t.alive.push_back(i);
  }
  t.inferred_by_use = j.at("inferred_by_use").get<bool>();
  return t;
}

}  // namespace evocity::sqlinfer
