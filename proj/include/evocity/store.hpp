#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evocity/canonical_json.hpp"

namespace evocity::store {

inline constexpr int kSchemaVersion = 1;

enum class Status { Queued, Running, Done, Failed };

std::string_view to_string(Status status);
std::optional<Status> status_from_string(std::string_view name);

struct ProjectRecord {
  std::string id;
  std::string repo_url;
  std::optional<std::string> branch;  // as requested; nullopt = default branch
  std::string db_type = "generic";
  std::string head;                   // commit id of the analyzed tip
  std::int64_t analyzed_at = 0;       // UTC seconds of the last completed analysis
  int schema_version = kSchemaVersion;
  Status status = Status::Queued;
  std::string reason;                 // set for Failed
  std::size_t commit_count = 0;

  bool operator==(const ProjectRecord&) const = default;
};

Json record_to_json(const ProjectRecord& record);
ProjectRecord record_from_json(const Json& j);

/// sha256(url)[:16], or sha256(url + "#" + branch)[:16] for an explicit branch.
std::string project_id(std::string_view repo_url, const std::optional<std::string>& branch);

/// Everything persisted for one analyzed project. Scenes are produced on
/// demand so a long history never has to sit in memory at once.
struct ProjectDocuments {
  std::map<std::string, std::string> documents;  // name -> canonical JSON bytes
  std::size_t scene_count = 0;
  std::function<std::string(std::size_t)> scene;
};

/// File-backed project store.
///
///   <root>/projects/<id>/record.json      status, mutable
///   <root>/projects/<id>/manifest.json    published generation, checksums
///   <root>/projects/<id>/gen-<hash>/      histories.json, layout.json, ...,
///                                         scenes/000000.json ...
///
/// A generation directory is complete before the manifest names it, and the
/// manifest is replaced by rename, so readers see either the old or the new
/// project, never a mix.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  std::vector<ProjectRecord> list_projects() const;  // sorted by id
  std::optional<ProjectRecord> get(const std::string& id) const;
  ProjectRecord require(const std::string& id) const;  // UnknownProject

  void put_record(const ProjectRecord& record);

  /// Writes a new generation, switches the manifest to it, drops older
  /// generations and marks the record Done. On failure the previously
  /// published generation stays in place.
  void publish(ProjectRecord record, const ProjectDocuments& docs);

  bool has_manifest(const std::string& id) const;
  Json manifest(const std::string& id) const;  // ProjectNotReady without one
  std::string load_document(const std::string& id, const std::string& name) const;
  std::string load_scene(const std::string& id, std::size_t ordinal) const;

  /// Run once at startup: removes unfinished temporary directories and
  /// generations the manifest no longer names, then settles records left
  /// Queued/Running by a previous process (Done when a manifest exists, else
  /// Failed). Returns the number of records changed.
  std::size_t recover();

  /// Test hook invoked before each publish step ("generation", "scene",
  /// "generation-rename", "manifest", "manifest-rename", "cleanup"); throwing
  /// from it simulates a crash at that point.
  std::function<void(std::string_view stage)> fault_hook;

 private:
  std::filesystem::path project_dir(const std::string& id) const;
  void fault(std::string_view stage) const;
  std::string read_published(const std::string& id, const std::string& relative) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

/// $EVOCITY_DATA_DIR, else $XDG_DATA_HOME/evocity, else ~/.local/share/evocity.
std::filesystem::path default_data_dir();

/// Writes `bytes` to a sibling temporary file, flushes it to disk and renames
/// it over `target`.
void write_file_atomic(const std::filesystem::path& target, std::string_view bytes);
std::string read_file(const std::filesystem::path& file);

}  // namespace evocity::store
