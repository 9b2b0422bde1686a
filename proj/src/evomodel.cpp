#include "evocity/evomodel.hpp"

#include <algorithm>
#include <utility>

#include "evocity/error.hpp"
#include "evocity/hashing.hpp"

namespace evocity::evomodel {

std::string_view to_string(ChangeKind change) {
  switch (change) {
    case ChangeKind::Added: return "Added";
    case ChangeKind::Modified: return "Modified";
    case ChangeKind::Moved: return "Moved";
    case ChangeKind::Deleted: return "Deleted";
  }
  return "Modified";
}

std::string_view to_string(EntityType type) {
  return type == EntityType::File ? "file" : "folder";
}

ArtifactId ArtifactId::make(EntityType type, std::size_t ordinal, const std::string& path) {
  ArtifactId id;
  id.type = type;
  id.origin_ordinal = ordinal;
  id.origin_path = path;
  std::string key = std::string(to_string(type)) + '\0' + std::to_string(ordinal) + '\0' + path;
  id.value = (type == EntityType::File ? "f-" : "d-") + sha256_hex(key).substr(0, 16);
  return id;
}

const Version* ArtifactHistory::version_at(std::size_t ordinal) const {
  auto it = std::upper_bound(versions.begin(), versions.end(), ordinal,
                             [](std::size_t o, const Version& v) { return o < v.ordinal; });
  if (it == versions.begin()) return nullptr;
  return &*std::prev(it);
}

std::string parent_path(std::string_view path) {
  auto slash = path.rfind('/');
  return slash == std::string_view::npos ? std::string() : std::string(path.substr(0, slash));
}

std::string base_name(std::string_view path) {
  auto slash = path.rfind('/');
  return std::string(slash == std::string_view::npos ? path : path.substr(slash + 1));
}

EvolutionModel::EvolutionModel(std::vector<ArtifactHistory> histories, std::vector<MoveEvent> moves,
                               std::size_t commit_count)
    : histories_(std::move(histories)), moves_(std::move(moves)), commit_count_(commit_count) {
  for (std::size_t i = 0; i < histories_.size(); ++i) {
    by_id_.emplace(histories_[i].id.value, i);
    std::set<std::string> paths;
    for (const auto& v : histories_[i].versions) paths.insert(v.path);
    for (const auto& p : paths) by_path_[p].push_back(i);
  }
}

const ArtifactHistory* EvolutionModel::find(const std::string& id_value) const {
  auto it = by_id_.find(id_value);
  return it == by_id_.end() ? nullptr : &histories_[it->second];
}

namespace {

const ArtifactHistory* lookup(const std::vector<ArtifactHistory>& histories,
                              const std::map<std::string, std::vector<std::size_t>>& by_path,
                              const std::string& path, std::size_t ordinal, EntityType type,
                              bool allow_dying) {
  auto it = by_path.find(path);
  if (it == by_path.end()) return nullptr;
  const ArtifactHistory* dying = nullptr;
  for (auto index : it->second) {
    const auto& h = histories[index];
    if (h.type() != type) continue;
    const auto* v = h.version_at(ordinal);
    if (v == nullptr || v->path != path) continue;
    if (alive_at(h, ordinal)) return &h;
    if (allow_dying && v->ordinal == ordinal && v->change == ChangeKind::Deleted) dying = &h;
  }
  return dying;
}

}  // namespace

const ArtifactHistory* EvolutionModel::file_at(const std::string& path, std::size_t ordinal) const {
  return lookup(histories_, by_path_, path, ordinal, EntityType::File, true);
}

const ArtifactHistory* EvolutionModel::folder_at(const std::string& path,
                                                 std::size_t ordinal) const {
  return lookup(histories_, by_path_, path, ordinal, EntityType::Folder, false);
}

std::vector<const MoveEvent*> EvolutionModel::moves_at(std::size_t ordinal) const {
  std::vector<const MoveEvent*> out;
  auto it = std::lower_bound(moves_.begin(), moves_.end(), ordinal,
                             [](const MoveEvent& m, std::size_t o) { return m.ordinal < o; });
  for (; it != moves_.end() && it->ordinal == ordinal; ++it) out.push_back(&*it);
  return out;
}

namespace {

class Linker {
 public:
  explicit Linker(const MetricsProvider& provider) : provider_(provider) {}

  EvolutionModel run(const std::vector<ingest::SnapshotDelta>& deltas) {
    for (std::size_t ordinal = 0; ordinal < deltas.size(); ++ordinal) {
      apply(ordinal, deltas[ordinal]);
    }
    return EvolutionModel(std::move(histories_), std::move(moves_), deltas.size());
  }

 private:
  [[noreturn]] static void inconsistent(std::string_view what, const std::string& path,
                                        std::size_t ordinal) {
    throw Error(ErrorCode::InconsistentDelta, std::string(what) + " '" + path + "' at ordinal " +
                                                  std::to_string(ordinal));
  }

  std::size_t take_alive(const std::string& path, std::size_t ordinal, std::string_view what) {
    auto it = alive_files_.find(path);
    if (it == alive_files_.end()) inconsistent(what, path, ordinal);
    auto index = it->second;
    alive_files_.erase(it);
    return index;
  }

  Version file_version(std::size_t ordinal, const std::string& path, ChangeKind change) {
    auto analysis = provider_(ordinal, path);
    Version v;
    v.ordinal = ordinal;
    v.path = path;
    v.kind = analysis.kind;
    v.metrics = std::move(analysis.metrics);
    v.change = change;
    return v;
  }

  void touch_ancestors(const std::string& path) {
    auto p = path;
    do {
      p = parent_path(p);
      touched_folders_.insert(p);
    } while (!p.empty());
  }

  void adjust_counts(const std::string& path, int delta) {
    auto p = path;
    do {
      p = parent_path(p);
      folder_counts_[p] += delta;
    } while (!p.empty());
  }

  void apply(std::size_t ordinal, const ingest::SnapshotDelta& delta) {
    touched_folders_.clear();

    std::vector<std::pair<std::size_t, const ingest::RenamedPath*>> detached;
    for (const auto& r : delta.renamed) {
      if (r.from == r.to) inconsistent("rename onto itself", r.from, ordinal);
      detached.emplace_back(take_alive(r.from, ordinal, "rename of non-alive path"), &r);
    }
    for (const auto& path : delta.deleted) {
      auto index = take_alive(path, ordinal, "delete of non-alive path");
      auto& h = histories_[index];
      Version v = h.versions.back();
      v.ordinal = ordinal;
      v.old_path.reset();
      v.change = ChangeKind::Deleted;
      h.versions.push_back(std::move(v));
      h.alive.back().end = ordinal;
    }
    for (const auto& path : delta.modified) {
      auto it = alive_files_.find(path);
      if (it == alive_files_.end()) inconsistent("modify of never-added path", path, ordinal);
      histories_[it->second].versions.push_back(file_version(ordinal, path, ChangeKind::Modified));
    }
    for (auto [index, rename] : detached) {
      if (alive_files_.contains(rename->to)) inconsistent("rename onto alive path", rename->to, ordinal);
      alive_files_.emplace(rename->to, index);
      auto v = file_version(ordinal, rename->to, ChangeKind::Moved);
      v.old_path = rename->from;
      auto& h = histories_[index];
      h.versions.push_back(std::move(v));
      moves_.push_back({h.id, ordinal, rename->from, rename->to});
    }
    for (const auto& path : delta.added) {
      if (alive_files_.contains(path)) inconsistent("add of alive path", path, ordinal);
      ArtifactHistory h;
      h.id = ArtifactId::make(EntityType::File, ordinal, path);
      h.versions.push_back(file_version(ordinal, path, ChangeKind::Added));
      h.alive.push_back({ordinal, std::nullopt});
      alive_files_.emplace(path, histories_.size());
      histories_.push_back(std::move(h));
    }

    for (const auto& r : delta.renamed) {
      touch_ancestors(r.from);
      touch_ancestors(r.to);
      adjust_counts(r.from, -1);
      adjust_counts(r.to, +1);
    }
    for (const auto& p : delta.deleted) {
      touch_ancestors(p);
      adjust_counts(p, -1);
    }
    for (const auto& p : delta.modified) touch_ancestors(p);
    for (const auto& p : delta.added) {
      touch_ancestors(p);
      adjust_counts(p, +1);
    }
    update_folders(ordinal);
  }

  void update_folders(std::size_t ordinal) {
    for (const auto& folder : touched_folders_) {
      auto count = folder_counts_[folder];
      auto alive = alive_folders_.find(folder);
      Version v;
      v.ordinal = ordinal;
      v.path = folder;
      if (alive == alive_folders_.end()) {
        if (count <= 0) continue;
        ArtifactHistory h;
        h.id = ArtifactId::make(EntityType::Folder, ordinal, folder);
        v.change = ChangeKind::Added;
        h.versions.push_back(std::move(v));
        h.alive.push_back({ordinal, std::nullopt});
        alive_folders_.emplace(folder, histories_.size());
        histories_.push_back(std::move(h));
      } else if (count <= 0) {
        auto& h = histories_[alive->second];
        v.change = ChangeKind::Deleted;
        h.versions.push_back(std::move(v));
        h.alive.back().end = ordinal;
        alive_folders_.erase(alive);
        folder_counts_.erase(folder);
      } else {
        v.change = ChangeKind::Modified;
        histories_[alive->second].versions.push_back(std::move(v));
      }
    }
  }

  const MetricsProvider& provider_;
  std::vector<ArtifactHistory> histories_;
  std::vector<MoveEvent> moves_;
  std::map<std::string, std::size_t> alive_files_;
  std::map<std::string, std::size_t> alive_folders_;
  std::map<std::string, long> folder_counts_;
  std::set<std::string> touched_folders_;
};

}  // namespace

EvolutionModel link_versions(const std::vector<ingest::SnapshotDelta>& deltas,
                             const MetricsProvider& metrics_provider) {
  return Linker(metrics_provider).run(deltas);
}

std::set<std::size_t> entity_commits(const ArtifactHistory& history) {
  std::set<std::size_t> out;
  for (const auto& v : history.versions) out.insert(v.ordinal);
  return out;
}

bool alive_at(const ArtifactHistory& history, std::size_t ordinal) {
  return std::any_of(history.alive.begin(), history.alive.end(),
                     [&](const AliveInterval& i) { return i.contains(ordinal); });
}

Json history_to_json(const ArtifactHistory& history) {
  Json versions = Json::array();
  for (const auto& v : history.versions) {
    Json jv = {{"ordinal", v.ordinal},
               {"path", v.path},
               {"change", to_string(v.change)},
               {"metrics", metrics_to_json(v.metrics)}};
    if (v.old_path) jv["old_path"] = *v.old_path;
    if (v.kind) jv["kind"] = ingest::to_string(*v.kind);
    versions.push_back(std::move(jv));
  }
  Json alive = Json::array();
  for (const auto& i : history.alive) {
    alive.push_back({{"begin", i.begin}, {"end", i.end ? Json(*i.end) : Json(nullptr)}});
  }
  return {{"id", history.id.value},
          {"type", to_string(history.type())},
          {"origin_ordinal", history.id.origin_ordinal},
          {"origin_path", history.id.origin_path},
          {"versions", versions},
          {"alive", alive},
          {"touched", entity_commits(history)}};
}

ArtifactHistory history_from_json(const Json& j) {
  ArtifactHistory h;
  h.id.value = j.at("id").get<std::string>();
  h.id.type = j.at("type").get<std::string>() == "folder" ? EntityType::Folder : EntityType::File;
  h.id.origin_ordinal = j.at("origin_ordinal").get<std::size_t>();
  h.id.origin_path = j.at("origin_path").get<std::string>();
  for (const auto& jv : j.at("versions")) {
    Version v;
    v.ordinal = jv.at("ordinal").get<std::size_t>();
    v.path = jv.at("path").get<std::string>();
    auto change = jv.at("change").get<std::string>();
    for (auto c : {ChangeKind::Added, ChangeKind::Modified, ChangeKind::Moved, ChangeKind::Deleted}) {
      if (to_string(c) == change) v.change = c;
    }
    if (jv.contains("old_path")) v.old_path = jv.at("old_path").get<std::string>();
    if (jv.contains("kind")) v.kind = ingest::file_kind_from_string(jv.at("kind").get<std::string>());
    v.metrics = metrics_from_json(jv.at("metrics"));
    h.versions.push_back(std::move(v));
  }
  for (const auto& ji : j.at("alive")) {
    AliveInterval i;
    i.begin = ji.at("begin").get<std::size_t>();
    if (!ji.at("end").is_null()) i.end = ji.at("end").get<std::size_t>();
    h.alive.push_back(i);
  }
  return h;
}

}  // namespace evocity::evomodel
