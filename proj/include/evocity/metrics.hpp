#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

#include "evocity/canonical_json.hpp"
#include "evocity/datametrics.hpp"
#include "evocity/ingest.hpp"
#include "evocity/srcmetrics.hpp"

namespace evocity {

struct BinaryMetrics {
  std::uint64_t size_bytes = 0;

  bool operator==(const BinaryMetrics&) const = default;
};

/// Files that are neither source, data nor binary.
struct TextMetrics {
  std::uint64_t size_bytes = 0;
  std::size_t lines = 0;

  bool operator==(const TextMetrics&) const = default;
};

/// The metric vector of one version of one artifact. Folders carry
/// `std::monostate`.
using MetricRecord = std::variant<std::monostate, srcmetrics::FileSourceMetrics,
                                  datametrics::DataFileMetrics, BinaryMetrics, TextMetrics>;

/// Dispatches to the analyzer matching `kind`. XML and JSON are told apart
/// by extension; other data extensions are tried as JSON, then XML.
MetricRecord compute_metrics(ingest::FileKind kind, std::string_view path,
                             std::string_view content);

Json metrics_to_json(const MetricRecord& record);
MetricRecord metrics_from_json(const Json& j);

}  // namespace evocity
