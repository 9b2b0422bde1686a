#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "evocity/canonical_json.hpp"
#include "evocity/datametrics.hpp"
#include "evocity/error.hpp"
#include "evocity/ingest.hpp"
#include "evocity/metrics.hpp"
#include "evocity/pipeline.hpp"
#include "evocity/sqlinfer.hpp"
#include "evocity/srcmetrics.hpp"
#include "evocity/store.hpp"
#include "evocity/visual.hpp"

namespace py = pybind11;
using namespace evocity;

// Structured results cross the boundary as canonical JSON text; the Python
// package decodes them.
namespace {

ingest::FileKind kind_arg(const std::string& name) {
  auto k = ingest::file_kind_from_string(name);
  if (!k) throw Error(ErrorCode::InvalidArgument, "unknown file kind " + name);
  return *k;
}

sqlinfer::Dialect dialect_arg(const std::string& name) {
  auto d = sqlinfer::dialect_from_string(name);
  if (!d) throw Error(ErrorCode::InvalidArgument, "unknown dialect " + name);
  return *d;
}

std::string statement_json(const sqlinfer::SqlStatement& s) {
  Json columns = Json::array();
  for (const auto& c : s.columns) columns.push_back({{"name", c.name}, {"type", c.type}});
  return canonical_dump({{"kind", sqlinfer::to_string(s.kind)},
                         {"tables", s.tables},
                         {"columns", columns},
                         {"has_fragment", s.has_fragment}});
}

}  // namespace

PYBIND11_MODULE(_evocity, m) {
  static py::exception<Error> error_type(m, "EvocityError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::tuple args = py::make_tuple(std::string(to_string(e.code())), std::string(e.what()));
      PyErr_SetObject(error_type.ptr(), args.ptr());
    }
  });

  m.attr("SCHEMA_VERSION") = store::kSchemaVersion;

  m.def("classify", [](const std::string& path, const py::bytes& content) {
    return std::string(ingest::to_string(ingest::classify_file(path, std::string(content))));
  });
  m.def("compute_metrics", [](const std::string& kind, const std::string& path, const py::bytes& content) {
    return canonical_dump(metrics_to_json(compute_metrics(kind_arg(kind), path, std::string(content))));
  });
  m.def("analyze_source", [](const std::string& text) {
    return canonical_dump(metrics_to_json(srcmetrics::analyze_source(text)));
  });
  m.def("analyze_json", [](const std::string& text) {
    return canonical_dump(metrics_to_json(datametrics::analyze_json(text)));
  });
  m.def("analyze_xml", [](const std::string& text) {
    return canonical_dump(metrics_to_json(datametrics::analyze_xml(text)));
  });
  m.def("extract_sql", [](const std::string& text) {
    Json out = Json::array();
    for (const auto& c : sqlinfer::extract_sql_strings(text)) {
      out.push_back({{"text", c.text}, {"line", c.line}, {"has_fragment", c.has_fragment}});
    }
    return canonical_dump(out);
  });
  m.def(
      "parse_sql",
      [](const std::string& text, const std::string& dialect) {
        return statement_json(sqlinfer::parse_sql(text, dialect_arg(dialect)));
      },
      py::arg("text"), py::arg("dialect") = "generic");
  m.def("visual_mapping", [](const std::string& kind, const std::string& metrics_json) {
    auto d = scene::visual_mapping(kind_arg(kind), metrics_from_json(Json::parse(metrics_json)));
    return canonical_dump({{"width", d.width}, {"height", d.height}, {"depth", d.depth}, {"color", d.color}});
  });
  m.def(
      "analyze",
      [](const std::string& source, const std::string& data_dir, std::optional<std::string> branch,
         const std::string& db_type, std::optional<std::string> cache_dir, std::optional<std::size_t> limit) {
        pipeline::AnalyzeOptions options;
        options.source = source;
        options.branch = std::move(branch);
        options.dialect = dialect_arg(db_type);
        options.max_commits = limit;
        if (cache_dir) options.cache_dir = *cache_dir;
        py::gil_scoped_release release;
        store::Store s(data_dir);
        return canonical_dump(store::record_to_json(pipeline::analyze_and_publish(s, options)));
      },
      py::arg("source"), py::arg("data_dir"), py::arg("branch") = py::none(), py::arg("db_type") = "generic",
      py::arg("cache_dir") = py::none(), py::arg("limit") = py::none());
  m.def("list_projects", [](const std::string& data_dir) {
    Json out = Json::array();
    for (const auto& r : store::Store(data_dir).list_projects()) out.push_back(store::record_to_json(r));
    return canonical_dump(out);
  });
  m.def("load_scene", [](const std::string& data_dir, const std::string& project, std::size_t ordinal) {
    return store::Store(data_dir).load_scene(project, ordinal);
  });
  m.def("load_document", [](const std::string& data_dir, const std::string& project, const std::string& name) {
    return store::Store(data_dir).load_document(project, name);
  });
}
