#include "evocity/visual.hpp"

#include <algorithm>
#include <cmath>

#include "evocity/evomodel.hpp"

namespace evocity::scene {

double scale(double value) {
  return std::clamp(1.0 + std::sqrt(std::max(value, 0.0)), kMinSide, kMaxSide);
}

double percentile95(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

double normalize(double value, double p95) {
  if (value <= 0.0) return 0.0;
  if (p95 <= 0.0) return 1.0;
  return std::min(value / p95, 1.0);
}

namespace {

double binary_side(std::uint64_t size) { return scale(std::log2(1.0 + static_cast<double>(size))); }

}  // namespace

Normalizers compute_normalizers(const evomodel::EvolutionModel& model,
                                const std::vector<double>& table_access_counts) {
  std::vector<double> loc, entities, sizes;
  for (const auto& h : model.histories()) {
    for (const auto& v : h.versions) {
      if (v.change == evomodel::ChangeKind::Deleted || !v.kind) continue;
      if (auto* s = std::get_if<srcmetrics::FileSourceMetrics>(&v.metrics)) {
        loc.push_back(static_cast<double>(s->aggregate.lines_of_code));
      } else if (auto* d = std::get_if<datametrics::DataFileMetrics>(&v.metrics)) {
        entities.push_back(static_cast<double>(d->num_entities));
      } else if (auto* b = std::get_if<BinaryMetrics>(&v.metrics)) {
        sizes.push_back(static_cast<double>(b->size_bytes));
      }
    }
  }
  Normalizers n;
  n.source_loc_p95 = percentile95(std::move(loc));
  n.data_entities_p95 = percentile95(std::move(entities));
  n.binary_size_p95 = percentile95(std::move(sizes));
  n.table_accesses_p95 = percentile95(table_access_counts);
  return n;
}

Dimensions visual_mapping(ingest::FileKind kind, const MetricRecord& metrics,
                          const Normalizers& norms) {
  Dimensions out;
  switch (kind) {
    case ingest::FileKind::SourceClassContainer: {
      srcmetrics::ClassMetrics m;
      if (auto* s = std::get_if<srcmetrics::FileSourceMetrics>(&metrics)) m = s->aggregate;
      out.width = out.depth = scale(static_cast<double>(m.num_instance_variables));
      out.height = scale(static_cast<double>(m.num_methods));
      out.color = normalize(static_cast<double>(m.lines_of_code), norms.source_loc_p95);
      break;
    }
    case ingest::FileKind::DataFile: {
      datametrics::DataFileMetrics m;
      if (auto* d = std::get_if<datametrics::DataFileMetrics>(&metrics)) m = *d;
      out.width = out.depth = scale(static_cast<double>(m.num_entity_types));
      out.height = scale(static_cast<double>(m.max_nesting_level));
      out.color = normalize(static_cast<double>(m.num_entities), norms.data_entities_p95);
      break;
    }
    case ingest::FileKind::BinaryFile: {
      std::uint64_t size = 0;
      if (auto* b = std::get_if<BinaryMetrics>(&metrics)) size = b->size_bytes;
      out.width = out.height = out.depth = binary_side(size);
      out.color = normalize(static_cast<double>(size), norms.binary_size_p95);
      break;
    }
    case ingest::FileKind::OtherText:
      break;
  }
  return out;
}

Dimensions table_mapping(std::size_t num_columns, std::size_t accesses, const Normalizers& norms) {
  Dimensions out;
  out.width = out.depth = scale(static_cast<double>(num_columns));
  out.height = kTableSlabHeight;
  out.color = normalize(static_cast<double>(accesses), norms.table_accesses_p95);
  return out;
}

double base_side(ingest::FileKind kind, const MetricRecord& metrics) {
  return visual_mapping(kind, metrics).width;
}

Json mapping_description() {
  return {
      {"scale", "clamp(1+sqrt(v),1,40)"},
      {"color", "min(v/p95,1), p95 over the whole history"},
      {"ClassBuilding",
       {{"base", "num_instance_variables"}, {"height", "num_methods"}, {"color", "lines_of_code"}}},
      {"DataFileGlyph",
       {{"base", "num_entity_types"}, {"height", "max_nesting_level"}, {"color", "num_entities"}}},
      {"BinaryGlyph", {{"side", "log2(1+size_bytes)"}, {"color", "size_bytes"}}},
      {"TableSlab", {{"base", "num_columns"}, {"color", "table_accesses"}}},
      {"OtherText", {{"palette", "neutral"}}},
  };
}

}  // namespace evocity::scene
