#include "evocity/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace evocity {

namespace {

bool ends_with_ci(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  return std::equal(suffix.begin(), suffix.end(), s.end() - static_cast<long>(suffix.size()),
                    [](char a, char b) {
                      return std::tolower(static_cast<unsigned char>(a)) ==
                             std::tolower(static_cast<unsigned char>(b));
                    });
}

}  // namespace

MetricRecord compute_metrics(ingest::FileKind kind, std::string_view path,
                             std::string_view content) {
  switch (kind) {
    case ingest::FileKind::SourceClassContainer:
      return srcmetrics::analyze_source(content);
    case ingest::FileKind::DataFile: {
      if (ends_with_ci(path, ".xml")) return datametrics::analyze_xml(content);
      if (ends_with_ci(path, ".json")) return datametrics::analyze_json(content);
      auto as_json = datametrics::analyze_json(content);
      return as_json.degraded ? datametrics::analyze_xml(content) : as_json;
    }
    case ingest::FileKind::BinaryFile:
      return BinaryMetrics{content.size()};
    case ingest::FileKind::OtherText: {
      TextMetrics m{content.size(), 0};
      m.lines = static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n'));
      if (!content.empty() && content.back() != '\n') ++m.lines;
      return m;
    }
  }
  return std::monostate{};
}

Json metrics_to_json(const MetricRecord& record) {
  struct Visitor {
    Json operator()(std::monostate) const { return Json::object(); }
    Json operator()(const srcmetrics::FileSourceMetrics& m) const {
      Json classes = Json::array();
      for (const auto& c : m.classes) {
        classes.push_back({{"name", c.name},
                           {"num_instance_variables", c.metrics.num_instance_variables},
                           {"num_for_loops", c.metrics.num_for_loops},
                           {"num_methods", c.metrics.num_methods},
                           {"lines_of_code", c.metrics.lines_of_code}});
      }
      return {{"type", "source"},
              {"num_classes", m.classes.size()},
              {"num_instance_variables", m.aggregate.num_instance_variables},
              {"num_for_loops", m.aggregate.num_for_loops},
              {"num_methods", m.aggregate.num_methods},
              {"lines_of_code", m.aggregate.lines_of_code},
              {"degraded", m.degraded},
              {"classes", classes}};
    }
    Json operator()(const datametrics::DataFileMetrics& m) const {
      return {{"type", "data"},
              {"num_entities", m.num_entities},
              {"num_entity_types", m.num_entity_types},
              {"max_properties_per_entity", m.max_properties_per_entity},
              {"max_nesting_level", m.max_nesting_level},
              {"degraded", m.degraded}};
    }
    Json operator()(const BinaryMetrics& m) const {
      return {{"type", "binary"}, {"size", m.size_bytes}};
    }
    Json operator()(const TextMetrics& m) const {
      return {{"type", "text"}, {"size", m.size_bytes}, {"lines", m.lines}};
    }
  };
  return std::visit(Visitor{}, record);
}

MetricRecord metrics_from_json(const Json& j) {
  auto type = j.value("type", std::string());
  if (type == "source") {
    srcmetrics::FileSourceMetrics m;
    for (const auto& c : j.at("classes")) {
      srcmetrics::NamedClass nc;
      nc.name = c.at("name").get<std::string>();
      nc.metrics = {c.at("num_instance_variables").get<std::size_t>(),
                    c.at("num_for_loops").get<std::size_t>(),
                    c.at("num_methods").get<std::size_t>(),
                    c.at("lines_of_code").get<std::size_t>()};
      m.classes.push_back(std::move(nc));
    }
    m.aggregate = {j.at("num_instance_variables").get<std::size_t>(),
                   j.at("num_for_loops").get<std::size_t>(), j.at("num_methods").get<std::size_t>(),
                   j.at("lines_of_code").get<std::size_t>()};
    m.degraded = j.at("degraded").get<bool>();
    return m;
  }
  if (type == "data") {
    datametrics::DataFileMetrics m;
    m.num_entities = j.at("num_entities").get<std::size_t>();
    m.num_entity_types = j.at("num_entity_types").get<std::size_t>();
    m.max_properties_per_entity = j.at("max_properties_per_entity").get<std::size_t>();
    m.max_nesting_level = j.at("max_nesting_level").get<std::size_t>();
    m.degraded = j.at("degraded").get<bool>();
    return m;
  }
  if (type == "binary") return BinaryMetrics{j.at("size").get<std::uint64_t>()};
  if (type == "text") {
    return TextMetrics{j.at("size").get<std::uint64_t>(), j.at("lines").get<std::size_t>()};
  }
  return std::monostate{};
}

}  // namespace evocity
