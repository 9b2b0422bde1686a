#include "evocity/layout.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "evocity/error.hpp"
#include "evocity/visual.hpp"

namespace evocity::layout {

using evomodel::ArtifactHistory;
using evomodel::ChangeKind;
using evomodel::EntityType;

CityLayout::CityLayout(std::vector<Lot> lots, std::vector<SkySlot> sky, Rect bounds)
    : lots_(std::move(lots)), sky_(std::move(sky)), bounds_(bounds) {
  std::sort(lots_.begin(), lots_.end(), [](const Lot& a, const Lot& b) { return a.key < b.key; });
  std::sort(sky_.begin(), sky_.end(),
            [](const SkySlot& a, const SkySlot& b) { return a.table < b.table; });
  for (std::size_t i = 0; i < lots_.size(); ++i) {
    by_key_.emplace(lots_[i].key, i);
    by_artifact_[lots_[i].artifact].push_back(i);
  }
  for (auto& [artifact, indices] : by_artifact_) {
    std::sort(indices.begin(), indices.end(),
              [&](std::size_t a, std::size_t b) { return lots_[a].episode < lots_[b].episode; });
  }
}

const Lot* CityLayout::find(const std::string& key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : &lots_[it->second];
}

const Lot* CityLayout::lot_at(const std::string& artifact, std::size_t ordinal) const {
  auto it = by_artifact_.find(artifact);
  if (it == by_artifact_.end()) return nullptr;
  for (auto i : it->second) {
    if (lots_[i].reserved.contains(ordinal)) return &lots_[i];
  }
  for (auto i : it->second) {
    if (lots_[i].reserved.end == ordinal) return &lots_[i];
  }
  return nullptr;
}

std::vector<const Lot*> CityLayout::lots_of(const std::string& artifact) const {
  std::vector<const Lot*> out;
  if (auto it = by_artifact_.find(artifact); it != by_artifact_.end()) {
    for (auto i : it->second) out.push_back(&lots_[i]);
  }
  return out;
}

const SkySlot* CityLayout::slot(const std::string& table) const {
  auto it = std::lower_bound(sky_.begin(), sky_.end(), table,
                             [](const SkySlot& s, const std::string& t) { return s.table < t; });
  return it != sky_.end() && it->table == table ? &*it : nullptr;
}

namespace {

std::string episode_key(const std::string& artifact, std::size_t episode) {
  return episode == 0 ? artifact : artifact + "~" + std::to_string(episode);
}

struct Episode {
  evomodel::AliveInterval interval;
  std::string path;
};

// [birth, first move), [move, next move), ..., [last move, death)
std::vector<Episode> file_episodes(const ArtifactHistory& h) {
  std::vector<Episode> out;
  for (const auto& interval : h.alive) {
    for (const auto& v : h.versions) {
      if (!interval.contains(v.ordinal)) continue;
      if (v.ordinal == interval.begin || v.change == ChangeKind::Moved) {
        if (!out.empty() && !out.back().interval.end) out.back().interval.end = v.ordinal;
        out.push_back({{v.ordinal, std::nullopt}, v.path});
      }
    }
    if (!out.empty()) out.back().interval.end = interval.end;
  }
  return out;
}

double lifetime_footprint(const ArtifactHistory& h) {
  double side = scene::kMinSide;
  for (const auto& v : h.versions) {
    if (v.kind) side = std::max(side, scene::base_side(*v.kind, v.metrics));
  }
  return side;
}

// Packing runs on integer thousandths of a unit so that every coordinate
// is an exact three-decimal value and the margin arithmetic is exact.
using Milli = long long;

Milli to_milli(double v) { return std::llround(v * 1000.0); }
double from_milli(Milli v) { return static_cast<double>(v) / 1000.0; }

struct Packed {
  Milli width = 0;
  Milli depth = 0;
  std::vector<std::pair<Milli, Milli>> offsets;  // per child, relative to the district corner
};

Packed shelf_pack(const std::vector<std::pair<Milli, Milli>>& boxes, Milli margin) {
  Packed out;
  if (boxes.empty()) {
    out.width = out.depth = 2 * margin;
    return out;
  }
  double area = 0.0;
  Milli widest = 0;
  for (auto [w, d] : boxes) {
    area += static_cast<double>(w + margin) * static_cast<double>(d + margin);
    widest = std::max(widest, w);
  }
  const Milli limit = std::max(widest, static_cast<Milli>(std::ceil(std::sqrt(area))));
  Milli x = margin;
  Milli z = margin;
  Milli row_depth = 0;
  Milli max_x = 0;
  for (auto [w, d] : boxes) {
    if (x > margin && x + w > margin + limit) {
      z += row_depth + margin;
      x = margin;
      row_depth = 0;
    }
    out.offsets.emplace_back(x, z);
    x += w + margin;
    row_depth = std::max(row_depth, d);
    max_x = std::max(max_x, x);
  }
  out.width = max_x;
  out.depth = z + row_depth + margin;
  return out;
}

class Packer {
 public:
  Packer(const UnionTree& tree, const SizingRule& sizing)
      : tree_(tree), margin_(to_milli(sizing.margin)) {}

  std::vector<Lot> run(Rect& bounds) {
    const auto& roots = tree_.roots;
    std::vector<std::pair<Milli, Milli>> boxes;
    for (auto r : roots) boxes.push_back(measure(r));
    auto packed = shelf_pack(boxes, margin_);
    Milli x0 = -packed.width / 2;
    Milli z0 = -packed.depth / 2;
    bounds = {from_milli(x0), from_milli(z0), from_milli(packed.width), from_milli(packed.depth)};
    for (std::size_t i = 0; i < roots.size(); ++i) {
      place(roots[i], x0 + packed.offsets[i].first, z0 + packed.offsets[i].second, "", 0);
    }
    return std::move(lots_);
  }

 private:
  std::pair<Milli, Milli> measure(std::size_t index) {
    const auto& node = tree_.nodes[index];
    if (node.type == EntityType::File) {
      auto side = to_milli(node.footprint);
      return {side, side};
    }
    std::vector<std::pair<Milli, Milli>> boxes;
    for (auto c : node.children) boxes.push_back(measure(c));
    auto packed = shelf_pack(boxes, margin_);
    auto size = std::make_pair(packed.width, packed.depth);
    packed_.emplace(index, std::move(packed));
    return size;
  }

  void place(std::size_t index, Milli x, Milli z, const std::string& parent, std::size_t depth) {
    const auto& node = tree_.nodes[index];
    Lot lot;
    lot.key = node.key;
    lot.artifact = node.artifact;
    lot.episode = node.episode;
    lot.type = node.type;
    lot.path = node.path;
    lot.parent = parent;
    lot.depth = depth;
    lot.reserved = node.lifetime;
    if (node.type == EntityType::File) {
      auto side = from_milli(to_milli(node.footprint));
      lot.rect = {from_milli(x), from_milli(z), side, side};
      lots_.push_back(std::move(lot));
      return;
    }
    const auto& packed = packed_.at(index);
    lot.rect = {from_milli(x), from_milli(z), from_milli(packed.width), from_milli(packed.depth)};
    lots_.push_back(std::move(lot));
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      place(node.children[i], x + packed.offsets[i].first, z + packed.offsets[i].second, node.key,
            depth + 1);
    }
  }

  const UnionTree& tree_;
  Milli margin_;
  std::map<std::size_t, Packed> packed_;
  std::vector<Lot> lots_;
};

}  // namespace

UnionTree build_global_hierarchy(const evomodel::EvolutionModel& model) {
  UnionTree tree;
  std::map<std::string, std::size_t> folder_node;  // artifact -> node
  for (const auto& h : model.histories()) {
    if (h.type() != EntityType::Folder) continue;
    UnionNode node;
    node.key = h.id.value;
    node.artifact = h.id.value;
    node.type = EntityType::Folder;
    node.path = h.id.origin_path;
    node.lifetime = h.alive.front();
    folder_node.emplace(h.id.value, tree.nodes.size());
    tree.nodes.push_back(std::move(node));
  }
  for (const auto& h : model.histories()) {
    if (h.type() != EntityType::File) continue;
    auto footprint = lifetime_footprint(h);
    auto episodes = file_episodes(h);
    for (std::size_t e = 0; e < episodes.size(); ++e) {
      UnionNode node;
      node.key = episode_key(h.id.value, e);
      node.artifact = h.id.value;
      node.episode = e;
      node.type = EntityType::File;
      node.path = episodes[e].path;
      node.lifetime = episodes[e].interval;
      // rounded up, so the building never overhangs its lot
      node.footprint = std::ceil(footprint * 1000.0 - 1e-6) / 1000.0;
      tree.nodes.push_back(std::move(node));
    }
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    if (node.type == EntityType::Folder && node.path.empty()) {
      tree.roots.push_back(i);
      continue;
    }
    auto parent = model.folder_at(evomodel::parent_path(node.path), node.lifetime.begin);
    if (parent == nullptr) {
      throw Error(ErrorCode::Internal, "no enclosing folder for " + node.path + " at ordinal " +
                                           std::to_string(node.lifetime.begin));
    }
    tree.nodes[folder_node.at(parent->id.value)].children.push_back(i);
  }

  auto order = [&](std::size_t a, std::size_t b) {
    const auto& na = tree.nodes[a];
    const auto& nb = tree.nodes[b];
    return std::make_tuple(na.lifetime.begin, evomodel::base_name(na.path), std::cref(na.key)) <
           std::make_tuple(nb.lifetime.begin, evomodel::base_name(nb.path), std::cref(nb.key));
  };
  for (auto& node : tree.nodes) std::sort(node.children.begin(), node.children.end(), order);
  std::sort(tree.roots.begin(), tree.roots.end(), order);
  return tree;
}

CityLayout layout_city(const UnionTree& tree, const SizingRule& sizing, std::vector<SkySlot> sky) {
  Rect bounds;
  auto lots = Packer(tree, sizing).run(bounds);
  return CityLayout(std::move(lots), std::move(sky), bounds);
}

std::vector<SkySlot> layout_sky(const sqlinfer::SchemaState& tables, const SizingRule& sizing) {
  std::vector<const sqlinfer::TableSchema*> ordered;
  for (const auto& [name, t] : tables) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return std::tie(a->created_at, a->name) < std::tie(b->created_at, b->name);
  });
  std::vector<SkySlot> out;
  if (ordered.empty()) return out;
  auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(ordered.size()))));
  auto rows = (ordered.size() + cols - 1) / cols;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    auto row = static_cast<double>(i / cols);
    auto col = static_cast<double>(i % cols);
    SkySlot slot;
    slot.table = ordered[i]->name;
    slot.x = round3((col - (static_cast<double>(cols) - 1.0) / 2.0) * sizing.sky_cell);
    slot.z = round3((row - (static_cast<double>(rows) - 1.0) / 2.0) * sizing.sky_cell);
    slot.y = sizing.sky_height;
    out.push_back(std::move(slot));
  }
  return out;
}

CityLayout compute_layout(const evomodel::EvolutionModel& model, const sqlinfer::SchemaState& tables,
                          const SizingRule& sizing) {
  return layout_city(build_global_hierarchy(model), sizing, layout_sky(tables, sizing));
}

ScenePositions scene_positions(const CityLayout& layout, std::size_t ordinal,
                               const evomodel::EvolutionModel& model) {
  ScenePositions out;
  for (const auto& h : model.histories()) {
    bool alive = evomodel::alive_at(h, ordinal);
    bool dying = !alive && std::any_of(h.alive.begin(), h.alive.end(),
                                       [&](const auto& i) { return i.end == ordinal; });
    if (!alive && !dying) continue;
    Placement p;
    p.lot = layout.lot_at(h.id.value, ordinal);
    p.history = &h;
    p.version = h.version_at(ordinal);
    p.removed = dying;
    if (p.lot == nullptr) throw Error(ErrorCode::Internal, "no lot for " + h.id.value);
    out.placements.push_back(p);
  }
  std::sort(out.placements.begin(), out.placements.end(), [](const Placement& a, const Placement& b) {
    return a.history->id.value < b.history->id.value;
  });
  for (const auto* move : model.moves_at(ordinal)) {
    ArcPlacement arc;
    arc.artifact = move->artifact.value;
    arc.to = layout.lot_at(arc.artifact, ordinal);
    arc.from = ordinal == 0 ? nullptr : layout.lot_at(arc.artifact, ordinal - 1);
    arc.from_path = move->from;
    arc.to_path = move->to;
    if (arc.from == nullptr || arc.to == nullptr) {
      throw Error(ErrorCode::Internal, "move without lots for " + arc.artifact);
    }
    out.arcs.push_back(std::move(arc));
  }
  std::sort(out.arcs.begin(), out.arcs.end(),
            [](const ArcPlacement& a, const ArcPlacement& b) { return a.artifact < b.artifact; });
  return out;
}

namespace {

Json interval_json(const evomodel::AliveInterval& i) {
  return {{"begin", i.begin}, {"end", i.end ? Json(*i.end) : Json(nullptr)}};
}

Json rect_json(const Rect& r) { return Json::array({r.x, r.z, r.width, r.depth}); }

Rect rect_from(const Json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

}  // namespace

Json layout_to_json(const CityLayout& layout) {
  Json lots = Json::array();
  for (const auto& lot : layout.lots()) {
    lots.push_back({{"key", lot.key},
                    {"artifact", lot.artifact},
                    {"episode", lot.episode},
                    {"type", evomodel::to_string(lot.type)},
                    {"path", lot.path},
                    {"parent", lot.parent},
                    {"rect", rect_json(lot.rect)},
                    {"depth", lot.depth},
                    {"reserved", interval_json(lot.reserved)}});
  }
  Json sky = Json::array();
  for (const auto& s : layout.sky()) {
    sky.push_back({{"table", s.table}, {"position", Json::array({s.x, s.y, s.z})}});
  }
  return {{"lots", lots}, {"sky", sky}, {"bounds", rect_json(layout.bounds())}};
}

CityLayout layout_from_json(const Json& j) {
  std::vector<Lot> lots;
  for (const auto& jl : j.at("lots")) {
    Lot lot;
    lot.key = jl.at("key").get<std::string>();
    lot.artifact = jl.at("artifact").get<std::string>();
    lot.episode = jl.at("episode").get<std::size_t>();
    lot.type = jl.at("type").get<std::string>() == "folder" ? EntityType::Folder : EntityType::File;
    lot.path = jl.at("path").get<std::string>();
    lot.parent = jl.at("parent").get<std::string>();
    lot.rect = rect_from(jl.at("rect"));
    lot.depth = jl.at("depth").get<std::size_t>();
    const auto& r = jl.at("reserved");
    lot.reserved.begin = r.at("begin").get<std::size_t>();
    if (!r.at("end").is_null()) lot.reserved.end = r.at("end").get<std::size_t>();
    lots.push_back(std::move(lot));
  }
  std::vector<SkySlot> sky;
  for (const auto& js : j.at("sky")) {
    const auto& p = js.at("position");
    sky.push_back({js.at("table").get<std::string>(), p.at(0).get<double>(), p.at(1).get<double>(),
                   p.at(2).get<double>()});
  }
  return CityLayout(std::move(lots), std::move(sky), rect_from(j.at("bounds")));
}

}  // namespace evocity::layout
