#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "evocity/canonical_json.hpp"

#include "evocity/datametrics.hpp"
#include "evocity/metrics.hpp"

using namespace evocity;
using datametrics::DataFileMetrics;
using datametrics::analyze_json;
using datametrics::analyze_xml;

namespace {

DataFileMetrics m(std::size_t e, std::size_t t, std::size_t p, std::size_t n) {
  DataFileMetrics out;
  out.num_entities = e;
  out.num_entity_types = t;
  out.max_properties_per_entity = p;
  out.max_nesting_level = n;
  return out;
}

TEST(JsonMetrics, EmptyObject) { EXPECT_EQ(analyze_json("{}"), m(1, 1, 0, 1)); }

TEST(JsonMetrics, ArrayOfObjects) {
  EXPECT_EQ(analyze_json(R"([{"a":1,"b":2},{"a":3,"b":4},{"c":{}}])"), m(4, 3, 2, 3));
}

TEST(JsonMetrics, KeyOrderDoesNotChangeType) {
  EXPECT_EQ(analyze_json(R"([{"a":1,"b":2},{"b":3,"a":4}])"), m(2, 1, 2, 2));
}

TEST(JsonMetrics, ScalarsAndEmptyArrays) {
  EXPECT_EQ(analyze_json("42"), m(0, 0, 0, 1));
  EXPECT_EQ(analyze_json("[]"), m(0, 0, 0, 1));
  EXPECT_EQ(analyze_json("[[[]]]"), m(0, 0, 0, 3));
  EXPECT_EQ(analyze_json("[42]"), m(0, 0, 0, 1));
}

TEST(JsonMetrics, TruncatedIsDegraded) {
  auto r = analyze_json(R"({"a":)");
  EXPECT_TRUE(r.degraded);
  EXPECT_EQ(r.num_entities, 0u);
  EXPECT_EQ(r.num_entity_types, 0u);
  EXPECT_EQ(r.max_properties_per_entity, 0u);
  EXPECT_EQ(r.max_nesting_level, 0u);
  EXPECT_TRUE(analyze_json("").degraded);
  EXPECT_TRUE(analyze_json("{} {}").degraded);
}

TEST(XmlMetrics, SingleEmptyElement) { EXPECT_EQ(analyze_xml("<r/>"), m(1, 1, 0, 1)); }

TEST(XmlMetrics, AttributesAndChildrenAreProperties) {
  const char* doc =
      "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
      "<resources lang=\"en\">\n"
      "  <!-- labels -->\n"
      "  <string name=\"a\">A</string>\n"
      "  <string name=\"b\" translatable=\"false\">B</string>\n"
      "  <plurals name=\"n\"><item quantity=\"one\">x</item><item quantity=\"other\">y</item></plurals>\n"
      "</resources>\n";
  // resources: 1 attribute + 3 children; plurals: 1 attribute + 2 children
  EXPECT_EQ(analyze_xml(doc), m(6, 4, 4, 3));
}

TEST(XmlMetrics, InvalidIsDegraded) {
  auto r = analyze_xml("<a><b></a>");
  EXPECT_TRUE(r.degraded);
  EXPECT_EQ(r.num_entities, 0u);
  EXPECT_TRUE(analyze_xml("").degraded);
  EXPECT_TRUE(analyze_xml("<a/><b/>").degraded);
}

TEST(Metrics, DispatchByKindAndExtension) {
  auto xml = compute_metrics(ingest::FileKind::DataFile, "res/values/strings.xml", "<r/>");
  ASSERT_TRUE(std::holds_alternative<DataFileMetrics>(xml));
  EXPECT_EQ(std::get<DataFileMetrics>(xml), m(1, 1, 0, 1));

  auto json = compute_metrics(ingest::FileKind::DataFile, "a/b.json", "{}");
  EXPECT_EQ(std::get<DataFileMetrics>(json), m(1, 1, 0, 1));

  auto bin = compute_metrics(ingest::FileKind::BinaryFile, "x.png", std::string(10, '\0'));
  EXPECT_EQ(std::get<BinaryMetrics>(bin).size_bytes, 10u);

  auto text = compute_metrics(ingest::FileKind::OtherText, "NOTES", "a\nb");
  EXPECT_EQ(std::get<TextMetrics>(text), (TextMetrics{3, 2}));

  for (const auto& r : std::vector<MetricRecord>{xml, json, bin, text}) EXPECT_EQ(metrics_from_json(metrics_to_json(r)), r);
}

// Random documents built with insertion-ordered objects so the same value
// can be serialized with different key orders.
using Ordered = nlohmann::ordered_json;

Ordered random_value(std::mt19937& rng, int depth) {
  int pick = static_cast<int>(rng() % (depth > 3 ? 2 : 5));
  switch (pick) {
    case 0: return static_cast<int>(rng() % 100);
    case 1: return std::string(1, static_cast<char>('a' + rng() % 26));
    case 2: {
      Ordered arr = Ordered::array();
      for (std::size_t i = 0, n = rng() % 4; i < n; ++i) arr.push_back(random_value(rng, depth + 1));
      return arr;
    }
    default: {
      Ordered obj = Ordered::object();
      for (std::size_t i = 0, n = rng() % 4; i < n; ++i) {
        obj[std::string(1, static_cast<char>('k' + rng() % 6))] = random_value(rng, depth + 1);
      }
      return obj;
    }
  }
}

Ordered shuffled(const Ordered& v, std::mt19937& rng) {
  if (v.is_object()) {
    std::vector<std::string> keys;
    for (auto it = v.begin(); it != v.end(); ++it) keys.push_back(it.key());
    std::shuffle(keys.begin(), keys.end(), rng);
    Ordered out = Ordered::object();
    for (const auto& k : keys) out[k] = shuffled(v.at(k), rng);
    return out;
  }
  if (v.is_array()) {
    Ordered out = Ordered::array();
    for (const auto& e : v) out.push_back(shuffled(e, rng));
    std::vector<Ordered> items(out.begin(), out.end());
    std::shuffle(items.begin(), items.end(), rng);
    return Ordered(items);
  }
  return v;
}

std::string to_xml(const Ordered& v, const std::string& tag) {
  std::string out = "<" + tag;
  std::string body;
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (it->is_primitive()) {
        out += " " + it.key() + "=\"v\"";
      } else {
        body += to_xml(*it, it.key());
      }
    }
  } else if (v.is_array()) {
    for (const auto& e : v) body += to_xml(e, "item");
  }
  return body.empty() ? out + "/>" : out + ">" + body + "</" + tag + ">";
}

TEST(DataMetricsProperties, JsonPermutationInvariance) {
  std::mt19937 rng(7);
  for (int round = 0; round < 300; ++round) {
    auto doc = random_value(rng, 0);
    auto base = analyze_json(doc.dump());
    ASSERT_FALSE(base.degraded);
    EXPECT_EQ(analyze_json(shuffled(doc, rng).dump(2)), base) << doc.dump();
  }
}

TEST(DataMetricsProperties, JsonWrappingAddsOneLevel) {
  std::mt19937 rng(8);
  for (int round = 0; round < 300; ++round) {
    auto doc = random_value(rng, 0);
    // a bare scalar already reports level 1 and has no container to deepen
    if (doc.is_primitive()) continue;
    auto base = analyze_json(doc.dump());
    auto wrapped = analyze_json("[" + doc.dump() + "]");
    EXPECT_EQ(wrapped.max_nesting_level, base.max_nesting_level + 1) << doc.dump();
    EXPECT_EQ(wrapped.num_entities, base.num_entities);
    auto boxed = analyze_json(R"({"w":)" + doc.dump() + "}");
    EXPECT_EQ(boxed.max_nesting_level, base.max_nesting_level + 1) << doc.dump();
    EXPECT_EQ(boxed.num_entities, base.num_entities + 1);
  }
}

TEST(DataMetricsProperties, TypesNeverExceedEntities) {
  std::mt19937 rng(9);
  for (int round = 0; round < 300; ++round) {
    auto doc = random_value(rng, 0);
    auto r = analyze_json(doc.dump());
    EXPECT_LE(r.num_entity_types, r.num_entities);
    auto x = analyze_xml(to_xml(doc, "root"));
    ASSERT_FALSE(x.degraded) << to_xml(doc, "root");
    EXPECT_LE(x.num_entity_types, x.num_entities);
    EXPECT_GE(x.num_entities, 1u);
  }
}

TEST(DataMetricsProperties, XmlSiblingPermutationAndWrapping) {
  std::mt19937 rng(10);
  for (int round = 0; round < 300; ++round) {
    auto doc = random_value(rng, 0);
    auto xml = to_xml(doc, "root");
    auto base = analyze_xml(xml);
    EXPECT_EQ(analyze_xml(to_xml(shuffled(doc, rng), "root")), base) << xml;
    auto wrapped = analyze_xml("<w>" + xml + "</w>");
    EXPECT_EQ(wrapped.max_nesting_level, base.max_nesting_level + 1);
    EXPECT_EQ(wrapped.num_entities, base.num_entities + 1);
  }
}

}  // namespace
