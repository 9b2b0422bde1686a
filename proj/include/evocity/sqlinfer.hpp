#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evocity/canonical_json.hpp"
#include "evocity/evomodel.hpp"

namespace evocity::sqlinfer {

enum class StatementKind { CreateTable, Select, Insert, Update, Delete, AlterTable, DropTable, Other };

std::string_view to_string(StatementKind kind);

/// Selects identifier quoting and statement modifiers accepted by the parser.
enum class Dialect { Generic, Sqlite, Mysql, Postgres };

std::optional<Dialect> dialect_from_string(std::string_view name);
std::string_view to_string(Dialect dialect);

/// Stands in for a concatenation operand that could not be resolved.
inline constexpr std::string_view kFragment = "?fragment?";

struct SqlCandidate {
  std::string text;
  std::size_t line = 0;
  bool has_fragment = false;

  bool operator==(const SqlCandidate&) const = default;
};

struct ColumnDef {
  std::string name;
  std::string type;

  bool operator==(const ColumnDef&) const = default;
};

struct SqlStatement {
  StatementKind kind = StatementKind::Other;
  std::vector<std::string> tables;  // lower case, unquoted, unqualified
  std::vector<ColumnDef> columns;   // CreateTable / AlterTable only
  std::string path;
  std::size_t line = 0;
  bool has_fragment = false;
};

/// Collects SQL-looking string literals from Java-family source. Adjacent
/// literals joined by `+` are concatenated, and identifiers naming a
/// `String NAME = ...;` constant of the same file are substituted.
/// Unresolvable operands become `?fragment?`. A candidate is kept when its
/// trimmed text starts with select, insert, update, delete, create table,
/// alter table or drop table (case-insensitive).
std::vector<SqlCandidate> extract_sql_strings(std::string_view content);

/// Recognizes the statement subset needed for schema recovery. Anything
/// else, including malformed text, is `Other` with no tables.
SqlStatement parse_sql(std::string_view text, Dialect dialect = Dialect::Generic);

struct TableSchema {
  std::string name;
  std::vector<ColumnDef> columns;
  std::size_t created_at = 0;
  std::optional<std::size_t> dropped_at;
  std::vector<evomodel::AliveInterval> alive;
  bool inferred_by_use = false;

  bool alive_at(std::size_t ordinal) const;
  bool operator==(const TableSchema&) const = default;
};

using SchemaState = std::map<std::string, TableSchema>;

/// Folds one commit's full-snapshot statements into the schema state.
///
/// CREATE TABLE introduces a table (or redefines its columns), ALTER TABLE
/// ADD appends a column, DROP TABLE drops the table unless the same snapshot
/// also creates it (the drop-and-recreate migration idiom). Tables only used
/// by DML are materialized with no columns and flagged `inferred_by_use`.
/// Tables are never removed from the state. DDL containing fragments is
/// ignored; DML containing fragments still marks the tables it did resolve.
SchemaState infer_schema(const std::vector<SqlStatement>& statements, const SchemaState& previous,
                         std::size_t ordinal);

struct TableAccess {
  std::string table;
  std::string artifact;  // ArtifactId value of the accessing file
  StatementKind kind = StatementKind::Select;
  std::size_t ordinal = 0;
  std::string path;
  std::size_t line = 0;
};

struct AccessReport {
  std::vector<TableAccess> accesses;
  std::map<std::string, std::size_t> per_table;
};

/// One access per (DML statement, table) pair, attributed to the file
/// history holding the statement's path at `ordinal`.
AccessReport count_accesses(const std::vector<SqlStatement>& statements,
                            const evomodel::EvolutionModel& model, std::size_t ordinal);

Json schema_to_json(const TableSchema& table);
TableSchema schema_from_json(const Json& j);

}  // namespace evocity::sqlinfer
