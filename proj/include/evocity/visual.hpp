#pragma once

#include <cstddef>
#include <vector>

#include "evocity/canonical_json.hpp"
#include "evocity/ingest.hpp"
#include "evocity/metrics.hpp"

namespace evocity::evomodel {
class EvolutionModel;
}

namespace evocity::scene {

inline constexpr double kMinSide = 1.0;
inline constexpr double kMaxSide = 40.0;
inline constexpr double kTableSlabHeight = 0.5;

struct Dimensions {
  double width = kMinSide;
  double height = kMinSide;
  double depth = kMinSide;
  double color = 0.0;  // [0, 1]

  bool operator==(const Dimensions&) const = default;
};

/// clamp(1 + sqrt(v), 1, 40); negative inputs count as 0.
double scale(double value);

/// Nearest-rank 95th percentile; 0 for an empty sample.
double percentile95(std::vector<double> values);

/// min(v / p95, 1). With p95 == 0 every positive value saturates.
double normalize(double value, double p95);

/// Project-wide color references, one per normalized quantity.
struct Normalizers {
  double source_loc_p95 = 0.0;
  double data_entities_p95 = 0.0;
  double binary_size_p95 = 0.0;
  double table_accesses_p95 = 0.0;

  bool operator==(const Normalizers&) const = default;
};

/// p95 over every non-deleted version of the whole history, and over the
/// per-commit access totals of every table.
Normalizers compute_normalizers(const evomodel::EvolutionModel& model,
                                const std::vector<double>& table_access_counts);

/// Building dimensions and color for one file version. Metrics of the wrong
/// shape (degraded or missing) map like all-zero metrics.
Dimensions visual_mapping(ingest::FileKind kind, const MetricRecord& metrics,
                          const Normalizers& norms = {});

Dimensions table_mapping(std::size_t num_columns, std::size_t accesses, const Normalizers& norms = {});

/// Square base side used to size lots; equals visual_mapping(...).width.
double base_side(ingest::FileKind kind, const MetricRecord& metrics);

/// Machine-readable description of the mapping, served with scenes so a
/// client can label its settings.
Json mapping_description();

}  // namespace evocity::scene
