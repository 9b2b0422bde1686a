#include "evocity/scene.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "evocity/error.hpp"

namespace evocity::scene {

namespace {

constexpr GlyphKind kAllGlyphs[] = {GlyphKind::ClassBuilding, GlyphKind::DataFileGlyph,
                                    GlyphKind::BinaryGlyph,   GlyphKind::DistrictSlab,
                                    GlyphKind::TableSlab,     GlyphKind::AccessLine,
                                    GlyphKind::MoveArc};

Vec3 rounded(Vec3 v) { return {round3(v[0]), round3(v[1]), round3(v[2])}; }

Vec3 midpoint(const Vec3& a, const Vec3& b) {
  return {(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0};
}

Vec3 extent(const Vec3& a, const Vec3& b) {
  return {std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])};
}

std::string_view palette_for(ingest::FileKind kind) {
  switch (kind) {
    case ingest::FileKind::SourceClassContainer: return "source";
    case ingest::FileKind::DataFile: return "data";
    case ingest::FileKind::BinaryFile: return "binary";
    case ingest::FileKind::OtherText: return "neutral";
  }
  return "neutral";
}

std::string change_flag(const evomodel::Version* version, std::size_t ordinal, bool removed) {
  if (removed) return "deleted";
  if (version == nullptr || version->ordinal != ordinal) return "none";
  switch (version->change) {
    case evomodel::ChangeKind::Added: return "added";
    case evomodel::ChangeKind::Modified: return "modified";
    case evomodel::ChangeKind::Moved: return "moved";
    case evomodel::ChangeKind::Deleted: return "deleted";
  }
  return "none";
}

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Vec3 vec_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

std::string_view to_string(GlyphKind glyph) {
  switch (glyph) {
    case GlyphKind::ClassBuilding: return "ClassBuilding";
    case GlyphKind::DataFileGlyph: return "DataFileGlyph";
    case GlyphKind::BinaryGlyph: return "BinaryGlyph";
    case GlyphKind::DistrictSlab: return "DistrictSlab";
    case GlyphKind::TableSlab: return "TableSlab";
    case GlyphKind::AccessLine: return "AccessLine";
    case GlyphKind::MoveArc: return "MoveArc";
  }
  return "ClassBuilding";
}

std::optional<GlyphKind> glyph_from_string(std::string_view name) {
  for (auto g : kAllGlyphs) {
    if (to_string(g) == name) return g;
  }
  return std::nullopt;
}

GlyphKind glyph_for(ingest::FileKind kind) {
  switch (kind) {
    case ingest::FileKind::SourceClassContainer: return GlyphKind::ClassBuilding;
    case ingest::FileKind::BinaryFile: return GlyphKind::BinaryGlyph;
    case ingest::FileKind::DataFile:
    case ingest::FileKind::OtherText: return GlyphKind::DataFileGlyph;
  }
  return GlyphKind::DataFileGlyph;
}

Scene build_scene(const SceneInputs& in) {
  const auto ordinal = in.commit.ordinal;
  const auto t = in.sizing.slab_thickness;
  Scene scene;
  scene.commit = in.commit;
  Json warnings = Json::array();

  std::map<std::string, Vec3> roofs;  // artifact -> roof center of its building
  std::map<std::string, std::string> paths;
  std::size_t alive_files = 0, alive_folders = 0, removed = 0;

  auto positions = layout::scene_positions(in.layout, ordinal, in.model);
  for (const auto& p : positions.placements) {
    const auto& rect = p.lot->rect;
    const auto& id = p.history->id.value;
    Mesh mesh;
    mesh.id = id;
    mesh.metadata = {{"path", p.lot->path},
                     {"lot", p.lot->key},
                     {"depth", p.lot->depth},
                     {"change", change_flag(p.version, ordinal, p.removed)},
                     {"removed", p.removed}};
    if (p.version != nullptr) mesh.metadata["path"] = p.version->path;
    if (p.removed) ++removed;
    if (p.history->type() == evomodel::EntityType::Folder) {
      ++alive_folders;
      mesh.glyph = GlyphKind::DistrictSlab;
      mesh.palette = "district";
      mesh.position = {rect.center_x(), 0.0, rect.center_z()};
      mesh.dimensions = {rect.width, t * static_cast<double>(p.lot->depth + 1), rect.depth};
      mesh.metadata["type"] = "folder";
    } else {
      ++alive_files;
      auto kind = p.version->kind.value_or(ingest::FileKind::OtherText);
      auto dims = visual_mapping(kind, p.version->metrics, in.norms);
      mesh.glyph = glyph_for(kind);
      mesh.palette = palette_for(kind);
      mesh.position = {rect.center_x(), t * static_cast<double>(p.lot->depth), rect.center_z()};
      mesh.dimensions = {dims.width, dims.height, dims.depth};
      mesh.color = dims.color;
      mesh.metadata["type"] = "file";
      mesh.metadata["kind"] = ingest::to_string(kind);
      mesh.metadata["metrics"] = metrics_to_json(p.version->metrics);
      if (!p.removed) {
        roofs[id] = {mesh.position[0], mesh.position[1] + mesh.dimensions[1], mesh.position[2]};
        paths[id] = p.version->path;
      }
    }
    mesh.position = rounded(mesh.position);
    mesh.dimensions = rounded(mesh.dimensions);
    mesh.color = round3(mesh.color);
    scene.meshes.push_back(std::move(mesh));
  }

  for (const auto& a : positions.arcs) {
    MoveArc arc;
    arc.id = "arc:" + a.artifact + ":" + std::to_string(ordinal);
    arc.artifact = a.artifact;
    arc.from = rounded({a.from->rect.center_x(), t * static_cast<double>(a.from->depth),
                        a.from->rect.center_z()});
    arc.to = rounded({a.to->rect.center_x(), t * static_cast<double>(a.to->depth), a.to->rect.center_z()});
    arc.from_path = a.from_path;
    arc.to_path = a.to_path;
    Mesh mesh;
    mesh.id = arc.id;
    mesh.glyph = GlyphKind::MoveArc;
    mesh.palette = "move";
    mesh.position = rounded(midpoint(arc.from, arc.to));
    mesh.dimensions = rounded(extent(arc.from, arc.to));
    mesh.metadata = {{"artifact", arc.artifact}, {"from_path", arc.from_path}, {"to_path", arc.to_path}};
    scene.meshes.push_back(std::move(mesh));
    scene.arcs.push_back(std::move(arc));
  }

  std::size_t alive_tables = 0;
  std::map<std::string, Vec3> slab_points;
  for (const auto& [name, table] : in.schema) {
    if (!table.alive_at(ordinal)) continue;
    const auto* slot = in.layout.slot(name);
    if (slot == nullptr) {
      warnings.push_back({{"kind", "table-without-slot"}, {"table", name}});
      continue;
    }
    ++alive_tables;
    std::size_t accesses = 0;
    if (auto it = in.accesses.per_table.find(name); it != in.accesses.per_table.end()) accesses = it->second;
    auto dims = table_mapping(table.columns.size(), accesses, in.norms);
    Json columns = Json::array();
    for (const auto& c : table.columns) columns.push_back({{"name", c.name}, {"type", c.type}});
    Mesh mesh;
    mesh.id = "table:" + name;
    mesh.glyph = GlyphKind::TableSlab;
    mesh.palette = "table";
    mesh.position = rounded({slot->x, slot->y, slot->z});
    mesh.dimensions = rounded({dims.width, dims.height, dims.depth});
    mesh.color = round3(dims.color);
    mesh.metadata = {{"name", name},
                     {"columns", columns},
                     {"num_columns", table.columns.size()},
                     {"accesses", accesses},
                     {"created_at", table.created_at},
                     {"inferred_by_use", table.inferred_by_use}};
    slab_points[name] = mesh.position;
    scene.meshes.push_back(std::move(mesh));
  }

  std::map<std::pair<std::string, std::string>, std::size_t> pairs;
  for (const auto& access : in.accesses.accesses) {
    ++pairs[{access.table, access.artifact}];
  }
  for (const auto& [key, count] : pairs) {
    const auto& [table, artifact] = key;
    auto slab = slab_points.find(table);
    auto roof = roofs.find(artifact);
    if (slab == slab_points.end() || roof == roofs.end()) {
      warnings.push_back({{"kind", "dangling-access"},
                          {"table", table},
                          {"artifact", artifact},
                          {"reason", slab == slab_points.end() ? "table not alive" : "artifact not alive"}});
      continue;
    }
    AccessLine line;
    line.id = "access:" + table + ":" + artifact;
    line.table = table;
    line.artifact = artifact;
    line.path = paths[artifact];
    line.from = slab->second;
    line.to = rounded(roof->second);
    line.accesses = count;
    Mesh mesh;
    mesh.id = line.id;
    mesh.glyph = GlyphKind::AccessLine;
    mesh.palette = "access";
    mesh.position = rounded(midpoint(line.from, line.to));
    mesh.dimensions = rounded(extent(line.from, line.to));
    mesh.metadata = {{"table", table}, {"artifact", artifact}, {"path", line.path}, {"accesses", count}};
    scene.meshes.push_back(std::move(mesh));
    scene.access_lines.push_back(std::move(line));
  }

  std::sort(scene.meshes.begin(), scene.meshes.end(),
            [](const Mesh& a, const Mesh& b) { return a.id < b.id; });
  std::sort(scene.arcs.begin(), scene.arcs.end(),
            [](const MoveArc& a, const MoveArc& b) { return a.id < b.id; });
  std::sort(scene.access_lines.begin(), scene.access_lines.end(),
            [](const AccessLine& a, const AccessLine& b) { return a.id < b.id; });

  Json counts = Json::object();
  for (auto g : kAllGlyphs) counts[std::string(to_string(g))] = 0;
  for (const auto& m : scene.meshes) {
    auto& c = counts[std::string(to_string(m.glyph))];
    c = c.get<std::size_t>() + 1;
  }
  scene.summary = {{"counts", counts},
                   {"meshes", scene.meshes.size()},
                   {"files", alive_files},
                   {"folders", alive_folders},
                   {"tables", alive_tables},
                   {"removed", removed},
                   {"warnings", warnings},
                   {"mapping", mapping_description()}};
  return scene;
}

Scene empty_scene(const ingest::CommitMeta& commit) {
  Scene scene;
  scene.commit = commit;
  Json counts = Json::object();
  for (auto g : kAllGlyphs) counts[std::string(to_string(g))] = 0;
  scene.summary = {{"counts", counts},
                   {"meshes", 0},
                   {"files", 0},
                   {"folders", 0},
                   {"tables", 0},
                   {"removed", 0},
                   {"warnings", Json::array()},
                   {"mapping", mapping_description()}};
  return scene;
}

Json commit_to_json(const ingest::CommitMeta& c) {
  return {{"id", c.id},
          {"author", c.author},
          {"timestamp", c.timestamp},
          {"message", c.message},
          {"ordinal", c.ordinal}};
}

ingest::CommitMeta commit_from_json(const Json& j) {
  ingest::CommitMeta c;
  c.id = j.at("id").get<std::string>();
  c.author = j.at("author").get<std::string>();
  c.timestamp = j.at("timestamp").get<std::int64_t>();
  c.message = j.at("message").get<std::string>();
  c.ordinal = j.at("ordinal").get<std::size_t>();
  return c;
}

Json scene_to_json(const Scene& scene) {
  Json meshes = Json::array();
  for (const auto& m : scene.meshes) {
    meshes.push_back({{"id", m.id},
                      {"glyph", to_string(m.glyph)},
                      {"position", vec_json(m.position)},
                      {"dimensions", vec_json(m.dimensions)},
                      {"color", m.color},
                      {"palette", m.palette},
                      {"metadata", m.metadata}});
  }
  Json arcs = Json::array();
  for (const auto& a : scene.arcs) {
    arcs.push_back({{"id", a.id},
                    {"artifact", a.artifact},
                    {"from", vec_json(a.from)},
                    {"to", vec_json(a.to)},
                    {"from_path", a.from_path},
                    {"to_path", a.to_path}});
  }
  Json lines = Json::array();
  for (const auto& l : scene.access_lines) {
    lines.push_back({{"id", l.id},
                     {"table", l.table},
                     {"artifact", l.artifact},
                     {"path", l.path},
                     {"from", vec_json(l.from)},
                     {"to", vec_json(l.to)},
                     {"accesses", l.accesses}});
  }
  return {{"schema_version", kSchemaVersion},
          {"commit", commit_to_json(scene.commit)},
          {"meshes", meshes},
          {"arcs", arcs},
          {"access_lines", lines},
          {"summary", scene.summary}};
}

Scene scene_from_json(const Json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw Error(ErrorCode::InvalidArgument, "unsupported scene schema_version");
  }
  Scene scene;
  scene.commit = commit_from_json(j.at("commit"));
  for (const auto& jm : j.at("meshes")) {
    Mesh m;
    m.id = jm.at("id").get<std::string>();
    auto glyph = glyph_from_string(jm.at("glyph").get<std::string>());
    if (!glyph) throw Error(ErrorCode::InvalidArgument, "unknown glyph in scene");
    m.glyph = *glyph;
    m.position = vec_from(jm.at("position"));
    m.dimensions = vec_from(jm.at("dimensions"));
    m.color = jm.at("color").get<double>();
    m.palette = jm.at("palette").get<std::string>();
    m.metadata = jm.at("metadata");
    scene.meshes.push_back(std::move(m));
  }
  for (const auto& ja : j.at("arcs")) {
    MoveArc a;
    a.id = ja.at("id").get<std::string>();
    a.artifact = ja.at("artifact").get<std::string>();
    a.from = vec_from(ja.at("from"));
    a.to = vec_from(ja.at("to"));
    a.from_path = ja.at("from_path").get<std::string>();
    a.to_path = ja.at("to_path").get<std::string>();
    scene.arcs.push_back(std::move(a));
  }
  for (const auto& jl : j.at("access_lines")) {
    AccessLine l;
    l.id = jl.at("id").get<std::string>();
    l.table = jl.at("table").get<std::string>();
    l.artifact = jl.at("artifact").get<std::string>();
    l.path = jl.at("path").get<std::string>();
    l.from = vec_from(jl.at("from"));
    l.to = vec_from(jl.at("to"));
    l.accesses = jl.at("accesses").get<std::size_t>();
    scene.access_lines.push_back(std::move(l));
  }
  scene.summary = j.at("summary");
  return scene;
}

std::string serialize_scene(const Scene& scene) { return canonical_dump(scene_to_json(scene)); }

Scene parse_scene(std::string_view document) {
  Json j;
  try {
    j = Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed scene document: ") + e.what());
  }
  return scene_from_json(j);
}

}  // namespace evocity::scene
