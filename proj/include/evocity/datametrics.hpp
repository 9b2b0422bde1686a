#pragma once

#include <cstddef>
#include <string_view>

namespace evocity::datametrics {

struct DataFileMetrics {
  std::size_t num_entities = 0;
  std::size_t num_entity_types = 0;
  std::size_t max_properties_per_entity = 0;
  std::size_t max_nesting_level = 0;
  bool degraded = false;

  bool operator==(const DataFileMetrics&) const = default;
};

/// JSON documents: every object is an entity, its type is its sorted key
/// set, its properties are its keys. Arrays are not entities but count
/// towards nesting; the root sits at level 1. Malformed input gives an
/// all-zero, degraded result.
DataFileMetrics analyze_json(std::string_view content);

/// XML documents: every element is an entity typed by its tag name, with
/// attributes plus child elements as properties. The root element sits at
/// level 1. Malformed input gives an all-zero, degraded result.
DataFileMetrics analyze_xml(std::string_view content);

}  // namespace evocity::datametrics
