#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evocity/canonical_json.hpp"
#include "evocity/ingest.hpp"
#include "evocity/metrics.hpp"

namespace evocity::evomodel {

enum class EntityType { File, Folder };
enum class ChangeKind { Added, Modified, Moved, Deleted };

std::string_view to_string(ChangeKind change);
std::string_view to_string(EntityType type);

/// Stable identity of one history. The opaque `value` is URL-safe and is
/// derived from the origin (entity type, first ordinal, first path), so it
/// survives renames and is identical across runs and history prefixes.
struct ArtifactId {
  std::string value;
  EntityType type = EntityType::File;
  std::size_t origin_ordinal = 0;
  std::string origin_path;

  static ArtifactId make(EntityType type, std::size_t ordinal, const std::string& path);

  bool operator==(const ArtifactId& o) const { return value == o.value; }
  bool operator<(const ArtifactId& o) const { return value < o.value; }
};

struct Version {
  std::size_t ordinal = 0;
  std::string path;
  std::optional<std::string> old_path;       // set for Moved
  std::optional<ingest::FileKind> kind;      // nullopt for folders
  MetricRecord metrics;
  ChangeKind change = ChangeKind::Added;
};

/// [begin, end); `end` is nullopt while the artifact is still alive at the
/// last analyzed commit.
struct AliveInterval {
  std::size_t begin = 0;
  std::optional<std::size_t> end;

  bool contains(std::size_t ordinal) const {
    return ordinal >= begin && (!end || ordinal < *end);
  }
  bool operator==(const AliveInterval&) const = default;
};

struct ArtifactHistory {
  ArtifactId id;
  std::vector<Version> versions;  // strictly increasing ordinals
  std::vector<AliveInterval> alive;

  EntityType type() const { return id.type; }
  /// Latest version at or before `ordinal`, if any.
  const Version* version_at(std::size_t ordinal) const;
};

struct MoveEvent {
  ArtifactId artifact;
  std::size_t ordinal = 0;
  std::string from;
  std::string to;
};

/// Per-(commit, path) analysis result fed into linking.
struct FileAnalysis {
  ingest::FileKind kind = ingest::FileKind::OtherText;
  MetricRecord metrics;
};

using MetricsProvider = std::function<FileAnalysis(std::size_t ordinal, const std::string& path)>;

/// The linked evolution model of one repository.
class EvolutionModel {
 public:
  EvolutionModel() = default;
  EvolutionModel(std::vector<ArtifactHistory> histories, std::vector<MoveEvent> moves,
                 std::size_t commit_count);

  const std::vector<ArtifactHistory>& histories() const { return histories_; }
  const std::vector<MoveEvent>& moves() const { return moves_; }
  std::size_t commit_count() const { return commit_count_; }

  const ArtifactHistory* find(const std::string& id_value) const;
  /// The file history occupying `path` at `ordinal` (alive, or dying there).
  const ArtifactHistory* file_at(const std::string& path, std::size_t ordinal) const;
  /// The folder history for `path` alive at `ordinal`.
  const ArtifactHistory* folder_at(const std::string& path, std::size_t ordinal) const;

  std::vector<const MoveEvent*> moves_at(std::size_t ordinal) const;

 private:
  std::vector<ArtifactHistory> histories_;
  std::vector<MoveEvent> moves_;
  std::size_t commit_count_ = 0;
  std::map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>> by_path_;  // every path a history used
};

/// "a/b/c.java" -> "a/b"; "c.java" -> "" (the repository root).
std::string parent_path(std::string_view path);
std::string base_name(std::string_view path);

/// Links per-commit deltas (delta i belongs to ordinal i) into histories.
/// Renames continue a history and emit a MoveEvent; a deleted path that is
/// re-added starts a new history; folders get derived histories living from
/// their first to their last descendant file. Throws InconsistentDelta when
/// a delta touches a path that is not alive (or adds one that is).
EvolutionModel link_versions(const std::vector<ingest::SnapshotDelta>& deltas,
                             const MetricsProvider& metrics_provider);

/// Ordinals at which the history has a version.
std::set<std::size_t> entity_commits(const ArtifactHistory& history);

bool alive_at(const ArtifactHistory& history, std::size_t ordinal);

Json history_to_json(const ArtifactHistory& history);
ArtifactHistory history_from_json(const Json& j);

}  // namespace evocity::evomodel
