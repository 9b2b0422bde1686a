#include "evocity/datametrics.hpp"

#include <expat.h>

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace evocity::datametrics {

namespace {

DataFileMetrics degraded() {
  DataFileMetrics m;
  m.degraded = true;
  return m;
}

class JsonMetricsSax : public nlohmann::json_sax<nlohmann::json> {
 public:
  bool null() override { return true; }
  bool boolean(bool) override { return true; }
  bool number_integer(number_integer_t) override { return true; }
  bool number_unsigned(number_unsigned_t) override { return true; }
  bool number_float(number_float_t, const string_t&) override { return true; }
  bool string(string_t&) override { return true; }
  bool binary(binary_t&) override { return true; }

  bool start_object(std::size_t) override {
    open_container(true);
    return true;
  }
  bool key(string_t& k) override {
    if (!frames_.empty() && frames_.back().is_object) frames_.back().keys.insert(k);
    return true;
  }
  bool end_object() override {
    auto& frame = frames_.back();
    ++metrics_.num_entities;
    metrics_.max_properties_per_entity =
        std::max(metrics_.max_properties_per_entity, frame.keys.size());
    std::string signature;
    for (const auto& k : frame.keys) {
      signature += k;
      signature.push_back('\0');
    }
    types_.insert(std::move(signature));
    frames_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override {
    open_container(false);
    return true;
  }
  bool end_array() override {
    frames_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

  DataFileMetrics result() const {
    DataFileMetrics m = metrics_;
    m.num_entity_types = types_.size();
    m.max_nesting_level = std::max<std::size_t>(1, m.max_nesting_level);
    return m;
  }

 private:
  struct Frame {
    bool is_object;
    std::set<std::string> keys;
  };

  void open_container(bool is_object) {
    frames_.push_back({is_object, {}});
    metrics_.max_nesting_level = std::max(metrics_.max_nesting_level, frames_.size());
  }

  std::vector<Frame> frames_;
  std::set<std::string> types_;
  DataFileMetrics metrics_;
};

struct XmlState {
  std::vector<std::size_t> properties;  // per open element
  std::set<std::string> tags;
  DataFileMetrics metrics;
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto& s = *static_cast<XmlState*>(user);
  if (!s.properties.empty()) ++s.properties.back();
  std::size_t attr_count = 0;
  for (auto a = attrs; *a != nullptr; a += 2) ++attr_count;
  s.properties.push_back(attr_count);
  s.tags.insert(name);
  ++s.metrics.num_entities;
  s.metrics.max_nesting_level = std::max(s.metrics.max_nesting_level, s.properties.size());
}

void XMLCALL on_end(void* user, const XML_Char*) {
  auto& s = *static_cast<XmlState*>(user);
  s.metrics.max_properties_per_entity =
      std::max(s.metrics.max_properties_per_entity, s.properties.back());
  s.properties.pop_back();
}

}  // namespace

DataFileMetrics analyze_json(std::string_view content) {
  JsonMetricsSax sax;
  bool ok = false;
  try {
    ok = nlohmann::json::sax_parse(content.begin(), content.end(), &sax);
  } catch (const nlohmann::json::exception&) {
    ok = false;
  }
  if (!ok) return degraded();
  return sax.result();
}

DataFileMetrics analyze_xml(std::string_view content) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) return degraded();
  XmlState state;
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  bool ok = XML_Parse(parser.get(), content.data(), static_cast<int>(content.size()),
                      XML_TRUE) == XML_STATUS_OK;
  if (!ok || state.metrics.num_entities == 0) return degraded();
  state.metrics.num_entity_types = state.tags.size();
  return state.metrics;
}

}  // namespace evocity::datametrics
