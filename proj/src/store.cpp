#include "evocity/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "evocity/error.hpp"
#include "evocity/hashing.hpp"

namespace fs = std::filesystem;

namespace evocity::store {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Queued: return "Queued";
    case Status::Running: return "Running";
    case Status::Done: return "Done";
    case Status::Failed: return "Failed";
  }
  return "Failed";
}

std::optional<Status> status_from_string(std::string_view name) {
  for (auto s : {Status::Queued, Status::Running, Status::Done, Status::Failed}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

Json record_to_json(const ProjectRecord& r) {
  return {{"id", r.id},
          {"repo_url", r.repo_url},
          {"branch", r.branch ? Json(*r.branch) : Json(nullptr)},
          {"db_type", r.db_type},
          {"head", r.head},
          {"analyzed_at", r.analyzed_at},
          {"schema_version", r.schema_version},
          {"status", to_string(r.status)},
          {"reason", r.reason},
          {"commit_count", r.commit_count}};
}

ProjectRecord record_from_json(const Json& j) {
  ProjectRecord r;
  r.id = j.at("id").get<std::string>();
  r.repo_url = j.at("repo_url").get<std::string>();
  if (!j.at("branch").is_null()) r.branch = j.at("branch").get<std::string>();
  r.db_type = j.at("db_type").get<std::string>();
  r.head = j.at("head").get<std::string>();
  r.analyzed_at = j.at("analyzed_at").get<std::int64_t>();
  r.schema_version = j.at("schema_version").get<int>();
  r.status = status_from_string(j.at("status").get<std::string>()).value_or(Status::Failed);
  r.reason = j.at("reason").get<std::string>();
  r.commit_count = j.at("commit_count").get<std::size_t>();
  return r;
}

std::string project_id(std::string_view repo_url, const std::optional<std::string>& branch) {
  std::string key(repo_url);
  if (branch) key += "#" + *branch;
  return sha256_hex(key).substr(0, 16);
}

namespace {

std::atomic<unsigned long> temp_counter{0};

std::string temp_suffix() {
  return ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(temp_counter++);
}

[[noreturn]] void io_error(const std::string& what, const fs::path& p) {
  throw Error(ErrorCode::Io, what + " " + p.string() + ": " + std::strerror(errno));
}

void fsync_path(const fs::path& p, bool directory) {
  int fd = ::open(p.c_str(), directory ? O_RDONLY | O_DIRECTORY : O_RDONLY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

void write_file(const fs::path& target, std::string_view bytes) {
  int fd = ::open(target.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_error("cannot create", target);
  std::size_t done = 0;
  while (done < bytes.size()) {
    auto n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      io_error("cannot write", target);
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) io_error("cannot flush", target);
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
  }
  return true;
}

std::string scene_file(std::size_t ordinal) {
  char name[32];
  std::snprintf(name, sizeof name, "scenes/%06zu.json", ordinal);
  return name;
}

}  // namespace

void write_file_atomic(const fs::path& target, std::string_view bytes) {
  auto temp = target;
  temp += temp_suffix();
  write_file(temp, bytes);
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp);
    throw Error(ErrorCode::Io, "cannot publish " + target.string() + ": " + ec.message());
  }
  fsync_path(target.parent_path(), true);
}

fs::path default_data_dir() {
  if (const char* d = std::getenv("EVOCITY_DATA_DIR"); d != nullptr && *d != '\0') return d;
  if (const char* x = std::getenv("XDG_DATA_HOME"); x != nullptr && *x != '\0') return fs::path(x) / "evocity";
  if (const char* h = std::getenv("HOME"); h != nullptr && *h != '\0') {
    return fs::path(h) / ".local" / "share" / "evocity";
  }
  return fs::current_path() / "evocity-data";
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Store::Store(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "projects", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create store at " + root_.string() + ": " + ec.message());
}

fs::path Store::project_dir(const std::string& id) const { return root_ / "projects" / id; }

void Store::fault(std::string_view stage) const {
  if (fault_hook) fault_hook(stage);
}

std::vector<ProjectRecord> Store::list_projects() const {
  std::vector<ProjectRecord> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root_ / "projects", ec)) {
    if (!entry.is_directory()) continue;
    if (auto r = get(entry.path().filename().string())) out.push_back(std::move(*r));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::optional<ProjectRecord> Store::get(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  auto file = project_dir(id) / "record.json";
  std::error_code ec;
  if (!fs::exists(file, ec)) return std::nullopt;
  try {
    return record_from_json(Json::parse(read_file(file)));
  } catch (const Json::exception&) {
    return std::nullopt;
  }
}

ProjectRecord Store::require(const std::string& id) const {
  auto r = get(id);
  if (!r) throw Error(ErrorCode::UnknownProject, "unknown project " + id);
  return *r;
}

void Store::put_record(const ProjectRecord& record) {
  if (!valid_id(record.id)) throw Error(ErrorCode::InvalidArgument, "invalid project id " + record.id);
  std::lock_guard lock(mutex_);
  fs::create_directories(project_dir(record.id));
  write_file_atomic(project_dir(record.id) / "record.json", canonical_dump(record_to_json(record)));
}

void Store::publish(ProjectRecord record, const ProjectDocuments& docs) {
  if (!valid_id(record.id)) throw Error(ErrorCode::InvalidArgument, "invalid project id " + record.id);
  const auto dir = project_dir(record.id);
  fs::create_directories(dir);

  // Everything is written into a temporary directory first; the content
  // checksums then name the generation.
  fault("generation");
  std::error_code ec;
  auto temp = dir / ("gen" + temp_suffix());
  Json documents = Json::object();
  Json scenes = Json::array();
  std::string generation;
  try {
    fs::create_directories(temp / "scenes");
    std::string digest_input;
    for (const auto& [name, bytes] : docs.documents) {
      auto sum = sha256_hex(bytes);
      write_file(temp / (name + ".json"), bytes);
      documents[name] = {{"file", name + ".json"}, {"sha256", sum}, {"bytes", bytes.size()}};
      digest_input += name + ":" + sum + "\n";
    }
    for (std::size_t i = 0; i < docs.scene_count; ++i) {
      if (i == docs.scene_count / 2) fault("scene");
      auto bytes = docs.scene(i);
      auto sum = sha256_hex(bytes);
      write_file(temp / scene_file(i), bytes);
      scenes.push_back(sum);
      digest_input += scene_file(i) + ":" + sum + "\n";
    }
    generation = "gen-" + sha256_hex(digest_input).substr(0, 24);
    const auto gen_dir = dir / generation;
    if (fs::exists(gen_dir / "complete", ec)) {
      fs::remove_all(temp, ec);
    } else {
      write_file(temp / "complete", "");
      fsync_path(temp / "scenes", true);
      fsync_path(temp, true);
      fault("generation-rename");
      fs::remove_all(gen_dir, ec);
      fs::rename(temp, gen_dir);
    }
  } catch (...) {
    fs::remove_all(temp, ec);
    throw;
  }

  Json manifest = {{"schema_version", kSchemaVersion},
                   {"project",
                    {{"id", record.id},
                     {"repo_url", record.repo_url},
                     {"branch", record.branch ? Json(*record.branch) : Json(nullptr)},
                     {"db_type", record.db_type},
                     {"head", record.head},
                     {"commit_count", record.commit_count}}},
                   {"generation", generation},
                   {"documents", documents},
                   {"scenes", {{"count", docs.scene_count}, {"sha256", scenes}}}};
  fault("manifest");
  {
    std::lock_guard lock(mutex_);
    auto temp = dir / ("manifest.json" + temp_suffix());
    write_file(temp, canonical_dump(manifest));
    fault("manifest-rename");
    fs::rename(temp, dir / "manifest.json");
    fsync_path(dir, true);
  }

  fault("cleanup");
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    auto name = entry.path().filename().string();
    if (entry.is_directory() && name.rfind("gen-", 0) == 0 && name != generation &&
        name.find(".tmp-") == std::string::npos) {
      fs::remove_all(entry.path(), ec);
    }
  }

  record.status = Status::Done;
  record.reason.clear();
  record.schema_version = kSchemaVersion;
  put_record(record);
}

bool Store::has_manifest(const std::string& id) const {
  std::error_code ec;
  return valid_id(id) && fs::exists(project_dir(id) / "manifest.json", ec);
}

Json Store::manifest(const std::string& id) const {
  require(id);
  if (!has_manifest(id)) throw Error(ErrorCode::ProjectNotReady, "project " + id + " has no published analysis");
  return Json::parse(read_file(project_dir(id) / "manifest.json"));
}

std::string Store::read_published(const std::string& id, const std::string& relative) const {
  // A concurrent publish may delete the generation between reading the
  // manifest and opening the file, and back-to-back publishes can bring the
  // same generation name back, so every attempt resolves the manifest anew.
  constexpr int kAttempts = 16;
  for (int attempt = 1;; ++attempt) {
    auto generation = manifest(id).at("generation").get<std::string>();
    try {
      return read_file(project_dir(id) / generation / relative);
    } catch (const Error&) {
      if (attempt == kAttempts) throw;
    }
  }
}

std::string Store::load_document(const std::string& id, const std::string& name) const {
  auto m = manifest(id);
  if (!m.at("documents").contains(name)) throw Error(ErrorCode::InvalidArgument, "unknown document " + name);
  return read_published(id, name + ".json");
}

std::string Store::load_scene(const std::string& id, std::size_t ordinal) const {
  auto m = manifest(id);
  auto count = m.at("scenes").at("count").get<std::size_t>();
  if (ordinal >= count) {
    throw Error(ErrorCode::OrdinalOutOfRange,
                "ordinal " + std::to_string(ordinal) + " out of range [0, " + std::to_string(count) + ")");
  }
  return read_published(id, scene_file(ordinal));
}

std::size_t Store::recover() {
  std::size_t changed = 0;
  std::error_code ec;
  for (const auto& project : fs::directory_iterator(root_ / "projects", ec)) {
    if (!project.is_directory()) continue;
    std::string published;
    try {
      if (fs::exists(project.path() / "manifest.json", ec)) {
        published = Json::parse(read_file(project.path() / "manifest.json")).at("generation").get<std::string>();
      }
    } catch (const std::exception&) {
      published.clear();
    }
    for (const auto& entry : fs::directory_iterator(project.path(), ec)) {
      auto name = entry.path().filename().string();
      bool stale_generation = !published.empty() && name.rfind("gen-", 0) == 0 && name != published;
      if (name.find(".tmp-") != std::string::npos || stale_generation) fs::remove_all(entry.path(), ec);
    }
    auto record = get(project.path().filename().string());
    if (!record || (record->status != Status::Queued && record->status != Status::Running)) continue;
    if (has_manifest(record->id)) {
      auto m = manifest(record->id);
      record->status = Status::Done;
      record->head = m.at("project").at("head").get<std::string>();
      record->commit_count = m.at("project").at("commit_count").get<std::size_t>();
      record->reason.clear();
    } else {
      record->status = Status::Failed;
      record->reason = "interrupted before completion";
    }
    put_record(*record);
    ++changed;
  }
  return changed;
}

}  // namespace evocity::store
