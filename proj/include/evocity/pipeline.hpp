#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evocity/canonical_json.hpp"
#include "evocity/evomodel.hpp"
#include "evocity/ingest.hpp"
#include "evocity/layout.hpp"
#include "evocity/scene.hpp"
#include "evocity/sqlinfer.hpp"
#include "evocity/store.hpp"
#include "evocity/visual.hpp"

namespace evocity::pipeline {

struct AnalyzeOptions {
  std::string source;  // URL or local path
  std::optional<std::string> branch;
  sqlinfer::Dialect dialect = sqlinfer::Dialect::Generic;
  std::optional<std::size_t> max_commits;  // analyze only the first N mainline commits
  std::filesystem::path cache_dir = ingest::default_cache_dir();
  unsigned workers = 0;  // 0 = hardware concurrency
  ingest::ClassifierConfig classifier{};
  layout::SizingRule sizing{};
  std::function<void(const std::string&)> progress;
};

struct Analysis {
  std::string source;
  std::optional<std::string> branch;
  std::string resolved_branch;
  sqlinfer::Dialect dialect = sqlinfer::Dialect::Generic;
  std::vector<ingest::CommitMeta> commits;
  std::vector<ingest::SnapshotDelta> deltas;
  evomodel::EvolutionModel model;
  std::vector<sqlinfer::SchemaState> schemas;     // per ordinal, after folding it
  std::vector<sqlinfer::AccessReport> accesses;   // per ordinal
  std::vector<std::size_t> fragment_statements;   // per ordinal, statements skipped for fragments
  scene::Normalizers norms;
  layout::CityLayout layout;
  layout::SizingRule sizing;

  std::string head() const { return commits.empty() ? std::string() : commits.back().id; }
  scene::Scene scene_at(std::size_t ordinal) const;
};

/// Canonical form of a source: remote URLs verbatim, local paths absolute
/// and lexically normalized.
std::string normalize_source(const std::string& source);

Analysis analyze_repository(const AnalyzeOptions& options);

Json timeline_json(const Analysis& analysis);
Json histories_json(const Analysis& analysis);
Json schemas_json(const Analysis& analysis);

/// The borrowing overload renders scenes from `analysis`, which must outlive
/// the returned documents; the other one takes ownership.
store::ProjectDocuments project_documents(const Analysis& analysis);
store::ProjectDocuments project_documents(Analysis&& analysis);

/// Runs the analysis and publishes it. Shared by the CLI and the service so
/// both produce identical stored bytes.
store::ProjectRecord analyze_and_publish(store::Store& store, const AnalyzeOptions& options);

struct KindCounts {
  std::size_t classes = 0;       // source files holding at least one class
  std::size_t source_files = 0;
  std::size_t data_files = 0;
  std::size_t binaries = 0;
  std::size_t other_files = 0;
  std::size_t folders = 0;
  std::size_t tables = 0;

  bool operator==(const KindCounts&) const = default;
};

KindCounts count_kinds(const std::vector<evomodel::ArtifactHistory>& histories,
                       const std::vector<sqlinfer::TableSchema>& tables, std::size_t ordinal);
Json kind_counts_json(const KindCounts& counts);

/// Loads histories and tables back from a published project.
std::vector<evomodel::ArtifactHistory> load_histories(const store::Store& store, const std::string& id);
std::vector<sqlinfer::TableSchema> load_tables(const store::Store& store, const std::string& id);

}  // namespace evocity::pipeline
