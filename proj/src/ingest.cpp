#include "evocity/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <system_error>

#include "evocity/error.hpp"
#include "evocity/hashing.hpp"
#include "json.hpp"
#include "process.hpp"

namespace evocity::ingest {

namespace fs = std::filesystem;

namespace {

detail::ProcessOptions git_options() {
  detail::ProcessOptions options;
  options.env = {{"LC_ALL", "C"}, {"GIT_TERMINAL_PROMPT", "0"}};
  return options;
}

std::vector<std::string> git_argv(const fs::path& git_dir, std::initializer_list<std::string> args) {
  std::vector<std::string> argv{"git", "--git-dir=" + git_dir.string(), "-c", "core.quotepath=off"};
  argv.insert(argv.end(), args.begin(), args.end());
  return argv;
}

detail::ProcessResult git(const fs::path& git_dir, std::initializer_list<std::string> args) {
  return detail::run_process(git_argv(git_dir, args), git_options());
}

std::string trim_right(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

std::vector<std::string_view> split_nul(std::string_view data) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start < data.size()) {
    auto end = data.find('\0', start);
    if (end == std::string_view::npos) end = data.size();
    parts.push_back(data.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string extension_of(std::string_view path) {
  auto slash = path.rfind('/');
  auto base = slash == std::string_view::npos ? path : path.substr(slash + 1);
  auto dot = base.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return {};
  return lower(base.substr(dot));
}

bool is_gitlink(std::string_view mode) { return mode == "160000"; }

}  // namespace

std::string_view to_string(FileKind kind) {
  switch (kind) {
    case FileKind::SourceClassContainer: return "SourceClassContainer";
    case FileKind::DataFile: return "DataFile";
    case FileKind::BinaryFile: return "BinaryFile";
    case FileKind::OtherText: return "OtherText";
  }
  return "OtherText";
}

std::optional<FileKind> file_kind_from_string(std::string_view name) {
  for (auto k : {FileKind::SourceClassContainer, FileKind::DataFile, FileKind::BinaryFile,
                 FileKind::OtherText}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

ClassifierConfig ClassifierConfig::from_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::Io, "cannot read classifier config " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "bad classifier config: " + std::string(e.what()));
  }
  ClassifierConfig config;
  auto load = [&](const char* key, std::set<std::string>& target) {
    if (!j.contains(key)) return;
    target.clear();
    for (const auto& ext : j.at(key)) target.insert(lower(ext.get<std::string>()));
  };
  load("source", config.source_extensions);
  load("data", config.data_extensions);
  load("binary", config.binary_extensions);
  if (j.contains("sniff_bytes")) config.sniff_bytes = j.at("sniff_bytes").get<std::size_t>();
  return config;
}

FileKind classify_file(std::string_view path, std::string_view content,
                       const ClassifierConfig& config) {
  auto ext = extension_of(path);
  if (config.source_extensions.contains(ext)) return FileKind::SourceClassContainer;
  if (config.data_extensions.contains(ext)) return FileKind::DataFile;
  if (config.binary_extensions.contains(ext)) return FileKind::BinaryFile;
  auto head = content.substr(0, std::min(content.size(), config.sniff_bytes));
  if (head.find('\0') != std::string_view::npos) return FileKind::BinaryFile;
  return FileKind::OtherText;
}

bool is_remote_url(std::string_view s) {
  static const std::regex scheme(R"(^[A-Za-z][A-Za-z0-9+.-]*://\S+$)");
  static const std::regex scp(R"(^[A-Za-z0-9._-]+@[A-Za-z0-9._-]+:\S+$)");
  std::string str(s);
  return std::regex_match(str, scheme) || std::regex_match(str, scp);
}

fs::path default_cache_dir() {
  if (const char* d = std::getenv("EVOCITY_CACHE_DIR"); d != nullptr && *d != '\0') return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x != nullptr && *x != '\0') {
    return fs::path(x) / "evocity";
  }
  if (const char* h = std::getenv("HOME"); h != nullptr && *h != '\0') {
    return fs::path(h) / ".cache" / "evocity";
  }
  return fs::temp_directory_path() / "evocity-cache";
}

RepositoryHandle::~RepositoryHandle() = default;
RepositoryHandle::RepositoryHandle(RepositoryHandle&&) noexcept = default;
RepositoryHandle& RepositoryHandle::operator=(RepositoryHandle&&) noexcept = default;

std::string RepositoryHandle::head() const {
  auto r = git(git_dir_, {"rev-parse", "--verify", "-q", revision_ + "^{commit}"});
  if (r.exit_code != 0) return {};
  return trim_right(r.out);
}

std::vector<std::string> RepositoryHandle::list_tree(const CommitMeta& commit) const {
  auto r = git(git_dir_, {"ls-tree", "-r", "-z", "--full-tree", commit.id});
  if (r.exit_code != 0) throw Error(ErrorCode::Io, "git ls-tree failed: " + r.err);
  std::vector<std::string> paths;
  for (auto entry : split_nul(r.out)) {
    auto tab = entry.find('\t');
    if (tab == std::string_view::npos) continue;
    auto header = entry.substr(0, tab);
    if (header.find(" blob ") == std::string_view::npos) continue;
    paths.emplace_back(entry.substr(tab + 1));
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

namespace {

fs::path clone_or_fetch(const std::string& url, const fs::path& cache_dir) {
  auto target = cache_dir / sha256_hex(url).substr(0, 24);
  std::error_code ec;
  if (fs::exists(target / "HEAD", ec)) {
    // A stale cache is still usable when the remote is unreachable.
    git(target, {"fetch", "--quiet", "--prune", "origin", "+refs/heads/*:refs/heads/*"});
    return target;
  }
  fs::create_directories(cache_dir, ec);
  auto staging = target;
  staging += ".partial";
  fs::remove_all(staging, ec);
  auto r = detail::run_process({"git", "clone", "--bare", "--quiet", url, staging.string()},
                               git_options());
  if (r.exit_code != 0) {
    fs::remove_all(staging, ec);
    throw Error(ErrorCode::UnreachableRemote, "cannot clone " + url + ": " + trim_right(r.err));
  }
  fs::rename(staging, target, ec);
  if (ec && !fs::exists(target / "HEAD")) {
    throw Error(ErrorCode::Io, "cannot publish clone cache: " + ec.message());
  }
  fs::remove_all(staging, ec);
  return target;
}

}  // namespace

RepositoryHandle open_repository(const std::string& url_or_local_path,
                                 const std::optional<std::string>& branch,
                                 const fs::path& cache_dir) {
  RepositoryHandle handle;
  handle.source_ = url_or_local_path;
  if (is_remote_url(url_or_local_path)) {
    handle.git_dir_ = clone_or_fetch(url_or_local_path, cache_dir);
  } else {
    std::error_code ec;
    if (url_or_local_path.empty() || !fs::is_directory(url_or_local_path, ec)) {
      throw Error(ErrorCode::NotARepository, "not a git repository: " + url_or_local_path);
    }
    auto options = git_options();
    options.cwd = fs::path(url_or_local_path);
    auto r = detail::run_process({"git", "rev-parse", "--absolute-git-dir"}, options);
    if (r.exit_code != 0) {
      throw Error(ErrorCode::NotARepository, "not a git repository: " + url_or_local_path);
    }
    handle.git_dir_ = trim_right(r.out);
  }

  if (branch && !branch->empty()) {
    auto r = git(handle.git_dir_, {"rev-parse", "--verify", "-q", "refs/heads/" + *branch + "^{commit}"});
    if (r.exit_code != 0) throw Error(ErrorCode::BranchNotFound, "branch not found: " + *branch);
    handle.branch_ = *branch;
    handle.revision_ = "refs/heads/" + *branch;
  } else {
    auto r = git(handle.git_dir_, {"symbolic-ref", "--short", "-q", "HEAD"});
    if (r.exit_code == 0) {
      handle.branch_ = trim_right(r.out);
      handle.revision_ = "refs/heads/" + handle.branch_;
    } else {
      handle.branch_ = "HEAD";
      handle.revision_ = "HEAD";
    }
  }
  return handle;
}

std::vector<CommitMeta> enumerate_commits(const RepositoryHandle& handle) {
  auto head = handle.head();
  if (head.empty()) throw Error(ErrorCode::EmptyRepository, "repository has no commits");
  auto r = git(handle.git_dir(), {"log", "--first-parent", "--reverse", "-z",
                                  "--format=%H%x1f%an%x1f%at%x1f%B", head});
  if (r.exit_code != 0) throw Error(ErrorCode::Io, "git log failed: " + r.err);
  std::vector<CommitMeta> commits;
  for (auto record : split_nul(r.out)) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      auto sep = record.find('\x1f', start);
      if (sep == std::string_view::npos) break;
      fields.push_back(record.substr(start, sep - start));
      start = sep + 1;
    }
    if (fields.size() != 3) continue;
    CommitMeta meta;
    meta.id = std::string(fields[0]);
    meta.author = std::string(fields[1]);
    meta.timestamp = std::stoll(std::string(fields[2]));
    meta.message = trim_right(std::string(record.substr(start)));
    meta.ordinal = commits.size();
    commits.push_back(std::move(meta));
  }
  if (commits.empty()) throw Error(ErrorCode::EmptyRepository, "repository has no commits");
  return commits;
}

SnapshotDelta snapshot_delta(const RepositoryHandle& handle, const CommitMeta& commit) {
  auto parent = git(handle.git_dir(), {"rev-parse", "--verify", "-q", commit.id + "^1^{commit}"});
  const std::string similarity = "-M" + std::to_string(static_cast<int>(kRenameThreshold * 100)) + "%";
  detail::ProcessResult r;
  if (parent.exit_code == 0) {
    r = git(handle.git_dir(), {"-c", "diff.renameLimit=100000", "diff-tree", "-r", "-z", "--raw",
                               "--no-commit-id", similarity, trim_right(parent.out), commit.id});
  } else {
    r = git(handle.git_dir(), {"-c", "diff.renameLimit=100000", "diff-tree", "-r", "-z", "--raw",
                               "--no-commit-id", "--root", similarity, commit.id});
  }
  if (r.exit_code != 0) throw Error(ErrorCode::Io, "git diff-tree failed: " + r.err);

  SnapshotDelta delta;
  delta.commit = commit.id;
  auto parts = split_nul(r.out);
  for (std::size_t i = 0; i < parts.size();) {
    auto header = parts[i++];
    if (header.empty() || header.front() != ':') continue;
    // ":old_mode new_mode old_sha new_sha status"
    std::vector<std::string_view> fields;
    std::size_t start = 1;
    while (start <= header.size()) {
      auto sp = header.find(' ', start);
      if (sp == std::string_view::npos) sp = header.size();
      fields.push_back(header.substr(start, sp - start));
      start = sp + 1;
    }
    if (fields.size() < 5 || i >= parts.size()) break;
    auto status = fields[4];
    bool link_old = is_gitlink(fields[0]);
    bool link_new = is_gitlink(fields[1]);
    std::string path(parts[i++]);
    switch (status.front()) {
      case 'A':
        if (!link_new) delta.added.push_back(path);
        break;
      case 'D':
        if (!link_old) delta.deleted.push_back(path);
        break;
      case 'R': {
        if (i >= parts.size()) break;
        std::string to(parts[i++]);
        double score = status.size() > 1 ? std::stod(std::string(status.substr(1))) / 100.0 : 1.0;
        delta.renamed.push_back({path, to, score});
        break;
      }
      case 'C': {
        // Copy detection is off; treat defensively as an add of the target.
        if (i >= parts.size()) break;
        delta.added.emplace_back(parts[i++]);
        break;
      }
      default:  // M, T, U, X
        if (link_old && link_new) break;
        if (link_old) {
          delta.added.push_back(path);
        } else if (link_new) {
          delta.deleted.push_back(path);
        } else {
          delta.modified.push_back(path);
        }
        break;
    }
  }
  std::sort(delta.added.begin(), delta.added.end());
  std::sort(delta.modified.begin(), delta.modified.end());
  std::sort(delta.deleted.begin(), delta.deleted.end());
  std::sort(delta.renamed.begin(), delta.renamed.end(),
            [](const RenamedPath& a, const RenamedPath& b) { return a.to < b.to; });
  return delta;
}

std::string read_blob(const RepositoryHandle& handle, const CommitMeta& commit,
                      const std::string& path) {
  std::lock_guard lock(*handle.blob_mutex_);
  if (!handle.cat_file_) {
    handle.cat_file_ = std::make_unique<detail::PipeProcess>(
        git_argv(handle.git_dir_, {"cat-file", "--batch"}), git_options());
  }
  auto& proc = *handle.cat_file_;
  if (path.find('\n') != std::string::npos) {
    throw Error(ErrorCode::PathAbsent, "path absent: " + path);
  }
  proc.write(commit.id + ":" + path + "\n");
  auto header = proc.read_line();
  // "<sha> <type> <size>" or "<spec> missing"
  auto ends_with = [&](std::string_view suffix) {
    return header.size() >= suffix.size() &&
           header.compare(header.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(" missing") || ends_with(" ambiguous")) {
    throw Error(ErrorCode::PathAbsent, "path absent at " + commit.id + ": " + path);
  }
  auto last = header.rfind(' ');
  auto middle = last == std::string::npos || last == 0 ? std::string::npos : header.rfind(' ', last - 1);
  if (middle == std::string::npos) throw Error(ErrorCode::Io, "unexpected cat-file reply: " + header);
  auto type = header.substr(middle + 1, last - middle - 1);
  auto size = static_cast<std::size_t>(std::stoull(header.substr(last + 1)));
  auto data = proc.read_exact(size);
  proc.read_exact(1);  // trailing LF
  if (type != "blob") throw Error(ErrorCode::PathAbsent, "not a file at " + commit.id + ": " + path);
  return data;
}

}  // namespace evocity::ingest
