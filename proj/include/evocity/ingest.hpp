#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace evocity::detail {
class PipeProcess;
}

namespace evocity::ingest {

struct CommitMeta {
  std::string id;
  std::string author;
  std::int64_t timestamp = 0;  // author time, UTC seconds
  std::string message;
  std::size_t ordinal = 0;

  bool operator==(const CommitMeta&) const = default;
};

struct RenamedPath {
  std::string from;
  std::string to;
  double similarity = 0.0;

  bool operator==(const RenamedPath&) const = default;
};

struct SnapshotDelta {
  std::string commit;
  std::vector<std::string> added;
  std::vector<std::string> modified;
  std::vector<std::string> deleted;
  std::vector<RenamedPath> renamed;

  bool operator==(const SnapshotDelta&) const = default;
};

enum class FileKind { SourceClassContainer, DataFile, BinaryFile, OtherText };

std::string_view to_string(FileKind kind);
std::optional<FileKind> file_kind_from_string(std::string_view name);

/// Extension tables for classify_file. Extensions are lower case and carry
/// the leading dot.
struct ClassifierConfig {
  std::set<std::string> source_extensions{".java"};
  std::set<std::string> data_extensions{".json", ".xml"};
  std::set<std::string> binary_extensions{
      ".png", ".jpg", ".jpeg", ".gif", ".bmp", ".ico", ".webp", ".jar", ".so", ".zip",
      ".ttf", ".otf", ".woff", ".woff2", ".class", ".dex", ".apk", ".aar", ".keystore", ".jks",
      ".gz", ".tar", ".7z", ".pdf", ".mp3", ".ogg", ".wav", ".mp4", ".9.png", ".db"};
  std::size_t sniff_bytes = 8000;

  /// Reads a JSON file of the form
  /// {"source": [".java"], "data": [...], "binary": [...], "sniff_bytes": 8000};
  /// absent keys keep their defaults.
  static ClassifierConfig from_file(const std::filesystem::path& file);
};

FileKind classify_file(std::string_view path, std::string_view content,
                       const ClassifierConfig& config = {});

inline constexpr double kRenameThreshold = 0.5;

/// An opened repository. Remote URLs are cloned into `cache_dir/<sha256(url)[:24]>`
/// and the clone is reused by later opens.
class RepositoryHandle {
 public:
  ~RepositoryHandle();
  RepositoryHandle(RepositoryHandle&&) noexcept;
  RepositoryHandle& operator=(RepositoryHandle&&) noexcept;

  const std::filesystem::path& git_dir() const { return git_dir_; }
  const std::string& branch() const { return branch_; }
  /// Revision expression naming the selected branch tip.
  const std::string& revision() const { return revision_; }
  const std::string& source() const { return source_; }

  /// Commit id of the branch tip, or empty for an unborn branch.
  std::string head() const;

  /// Full file listing of a commit, sorted. Submodule entries are skipped.
  std::vector<std::string> list_tree(const CommitMeta& commit) const;

 private:
  friend RepositoryHandle open_repository(const std::string&, const std::optional<std::string>&,
                                          const std::filesystem::path&);
  friend std::string read_blob(const RepositoryHandle&, const CommitMeta&, const std::string&);

  RepositoryHandle() = default;

  std::filesystem::path git_dir_;
  std::string branch_;
  std::string revision_;
  std::string source_;
  std::unique_ptr<std::mutex> blob_mutex_ = std::make_unique<std::mutex>();
  mutable std::unique_ptr<detail::PipeProcess> cat_file_;
};

/// True for strings that look like a remote URL (scheme:// or scp-style).
bool is_remote_url(std::string_view url_or_path);

/// Default clone cache: $EVOCITY_CACHE_DIR, else $XDG_CACHE_HOME/evocity,
/// else ~/.cache/evocity.
std::filesystem::path default_cache_dir();

RepositoryHandle open_repository(const std::string& url_or_local_path,
                                 const std::optional<std::string>& branch = std::nullopt,
                                 const std::filesystem::path& cache_dir = default_cache_dir());

/// First-parent walk of the selected branch, oldest first.
std::vector<CommitMeta> enumerate_commits(const RepositoryHandle& handle);

/// Diff of `commit` against its first parent (the empty tree for a root
/// commit) with content-based rename detection at similarity >= 0.5.
/// Each list is sorted.
SnapshotDelta snapshot_delta(const RepositoryHandle& handle, const CommitMeta& commit);

/// Exact blob bytes of `path` at `commit`. Safe to call from several threads.
std::string read_blob(const RepositoryHandle& handle, const CommitMeta& commit,
                      const std::string& path);

}  // namespace evocity::ingest
