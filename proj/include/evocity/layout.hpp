#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evocity/canonical_json.hpp"
#include "evocity/evomodel.hpp"
#include "evocity/sqlinfer.hpp"

namespace evocity::layout {

/// Axis-aligned ground rectangle; (x, z) is the minimum corner.
struct Rect {
  double x = 0.0;
  double z = 0.0;
  double width = 0.0;
  double depth = 0.0;

  double center_x() const { return x + width / 2.0; }
  double center_z() const { return z + depth / 2.0; }
  bool operator==(const Rect&) const = default;
};

struct SizingRule {
  double margin = 1.0;
  double slab_thickness = 0.5;  // a district at depth d is (d + 1) slabs tall
  double sky_height = 60.0;
  double sky_cell = 12.0;
};

/// One containment episode of one artifact. Folders and never-moved files
/// have a single episode; every move opens the next one.
struct Lot {
  std::string key;  // artifact id, suffixed with "~<episode>" for episodes after the first
  std::string artifact;
  std::size_t episode = 0;
  evomodel::EntityType type = evomodel::EntityType::File;
  std::string path;
  std::string parent;  // key of the enclosing district, empty at the top level
  Rect rect;
  std::size_t depth = 0;  // number of enclosing districts; the repository root is 0
  evomodel::AliveInterval reserved;

  bool operator==(const Lot&) const = default;
};

struct SkySlot {
  std::string table;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const SkySlot&) const = default;
};

class CityLayout {
 public:
  CityLayout() = default;
  CityLayout(std::vector<Lot> lots, std::vector<SkySlot> sky, Rect bounds);

  const std::vector<Lot>& lots() const { return lots_; }  // sorted by key
  const std::vector<SkySlot>& sky() const { return sky_; }  // sorted by table
  const Rect& bounds() const { return bounds_; }

  const Lot* find(const std::string& key) const;
  /// The episode lot holding `artifact` at `ordinal`; for an artifact dying
  /// at `ordinal`, its last lot.
  const Lot* lot_at(const std::string& artifact, std::size_t ordinal) const;
  std::vector<const Lot*> lots_of(const std::string& artifact) const;
  const SkySlot* slot(const std::string& table) const;

  bool operator==(const CityLayout& o) const {
    return lots_ == o.lots_ && sky_ == o.sky_ && bounds_ == o.bounds_;
  }

 private:
  std::vector<Lot> lots_;
  std::vector<SkySlot> sky_;
  Rect bounds_;
  std::map<std::string, std::size_t> by_key_;
  std::map<std::string, std::vector<std::size_t>> by_artifact_;
};

/// Node of the union tree: every folder history and every file episode that
/// ever existed.
struct UnionNode {
  std::string key;
  std::string artifact;
  std::size_t episode = 0;
  evomodel::EntityType type = evomodel::EntityType::File;
  std::string path;
  evomodel::AliveInterval lifetime;
  double footprint = 0.0;            // lifetime-max base side; files only
  std::vector<std::size_t> children;  // sorted by (birth, base name, key)
};

struct UnionTree {
  std::vector<UnionNode> nodes;
  std::vector<std::size_t> roots;  // histories of the repository root folder
};

UnionTree build_global_hierarchy(const evomodel::EvolutionModel& model);

/// Shelf-packs every district bottom-up and centers the top level at the
/// origin. `sky` is copied into the result unchanged.
CityLayout layout_city(const UnionTree& tree, const SizingRule& sizing = {},
                       std::vector<SkySlot> sky = {});

/// Grid at fixed height above the origin, ceil(sqrt(n)) columns, tables
/// ordered by creation ordinal then name.
std::vector<SkySlot> layout_sky(const sqlinfer::SchemaState& tables, const SizingRule& sizing = {});

CityLayout compute_layout(const evomodel::EvolutionModel& model, const sqlinfer::SchemaState& tables,
                          const SizingRule& sizing = {});

struct Placement {
  const Lot* lot = nullptr;
  const evomodel::ArtifactHistory* history = nullptr;
  const evomodel::Version* version = nullptr;
  bool removed = false;  // dies at this ordinal
};

struct ArcPlacement {
  std::string artifact;
  const Lot* from = nullptr;
  const Lot* to = nullptr;
  std::string from_path;
  std::string to_path;
};

struct ScenePositions {
  std::vector<Placement> placements;  // sorted by artifact id
  std::vector<ArcPlacement> arcs;
};

/// Artifacts alive at `ordinal` plus those dying there (flagged removed),
/// each at its current episode lot, and one arc per move at `ordinal`.
ScenePositions scene_positions(const CityLayout& layout, std::size_t ordinal,
                               const evomodel::EvolutionModel& model);

Json layout_to_json(const CityLayout& layout);
CityLayout layout_from_json(const Json& j);

}  // namespace evocity::layout
