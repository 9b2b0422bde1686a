#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evocity/canonical_json.hpp"
#include "evocity/evomodel.hpp"
#include "evocity/ingest.hpp"
#include "evocity/layout.hpp"
#include "evocity/sqlinfer.hpp"
#include "evocity/visual.hpp"

namespace evocity::scene {

inline constexpr int kSchemaVersion = 1;

enum class GlyphKind { ClassBuilding, DataFileGlyph, BinaryGlyph, DistrictSlab, TableSlab, AccessLine, MoveArc };

std::string_view to_string(GlyphKind glyph);
std::optional<GlyphKind> glyph_from_string(std::string_view name);
GlyphKind glyph_for(ingest::FileKind kind);

using Vec3 = std::array<double, 3>;

/// Position is the center of the base; dimensions are (w, h, d).
struct Mesh {
  std::string id;
  GlyphKind glyph = GlyphKind::ClassBuilding;
  Vec3 position{};
  Vec3 dimensions{};
  double color = 0.0;
  std::string palette;
  Json metadata = Json::object();

  bool operator==(const Mesh&) const = default;
};

struct MoveArc {
  std::string id;
  std::string artifact;
  Vec3 from{};
  Vec3 to{};
  std::string from_path;
  std::string to_path;

  bool operator==(const MoveArc&) const = default;
};

struct AccessLine {
  std::string id;
  std::string table;
  std::string artifact;
  std::string path;
  Vec3 from{};  // table slab
  Vec3 to{};    // building roof
  std::size_t accesses = 0;

  bool operator==(const AccessLine&) const = default;
};

struct Scene {
  ingest::CommitMeta commit;
  std::vector<Mesh> meshes;  // sorted by id
  std::vector<MoveArc> arcs;
  std::vector<AccessLine> access_lines;
  Json summary = Json::object();

  bool operator==(const Scene&) const = default;
};

struct SceneInputs {
  const layout::CityLayout& layout;
  const evomodel::EvolutionModel& model;
  const sqlinfer::SchemaState& schema;      // state after folding this commit
  const sqlinfer::AccessReport& accesses;   // this commit's snapshot
  const Normalizers& norms;
  const ingest::CommitMeta& commit;
  layout::SizingRule sizing{};
};

Scene build_scene(const SceneInputs& inputs);

/// A scene with no entities; summary counts are all zero.
Scene empty_scene(const ingest::CommitMeta& commit);

Json scene_to_json(const Scene& scene);
Scene scene_from_json(const Json& j);

/// Canonical bytes: sorted keys, three-decimal floats.
std::string serialize_scene(const Scene& scene);
Scene parse_scene(std::string_view document);

Json commit_to_json(const ingest::CommitMeta& commit);
ingest::CommitMeta commit_from_json(const Json& j);

}  // namespace evocity::scene
