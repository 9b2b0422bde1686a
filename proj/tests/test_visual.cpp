#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "evocity/pipeline.hpp"
#include "evocity/visual.hpp"
#include "fixture_repo.hpp"

using namespace evocity;
using namespace evocity::scene;

namespace {

MetricRecord source(std::size_t vars, std::size_t methods, std::size_t loops, std::size_t loc) {
  srcmetrics::FileSourceMetrics m;
  m.aggregate = {vars, loops, methods, loc};
  m.classes.push_back({"A", m.aggregate});
  return m;
}

MetricRecord data(std::size_t entities, std::size_t types, std::size_t props, std::size_t nesting) {
  datametrics::DataFileMetrics m;
  m.num_entities = entities;
  m.num_entity_types = types;
  m.max_properties_per_entity = props;
  m.max_nesting_level = nesting;
  return m;
}

TEST(VisualMapping, EmptyClassSitsOnTheFloor) {
  Normalizers norms;
  norms.source_loc_p95 = 200;
  auto d = visual_mapping(ingest::FileKind::SourceClassContainer, source(0, 0, 0, 1), norms);
  EXPECT_DOUBLE_EQ(d.width, 1.0);
  EXPECT_DOUBLE_EQ(d.height, 1.0);
  EXPECT_DOUBLE_EQ(d.depth, 1.0);
  EXPECT_NEAR(d.color, 0.0, 0.01);
}

TEST(VisualMapping, SquareRootArithmetic) {
  auto d = visual_mapping(ingest::FileKind::SourceClassContainer, source(4, 9, 0, 10));
  EXPECT_DOUBLE_EQ(d.width, 3.0);
  EXPECT_DOUBLE_EQ(d.depth, 3.0);
  EXPECT_DOUBLE_EQ(d.height, 4.0);
}

TEST(VisualMapping, LargestFileSaturatesColor) {
  Normalizers norms;
  norms.source_loc_p95 = 120;
  EXPECT_DOUBLE_EQ(visual_mapping(ingest::FileKind::SourceClassContainer, source(1, 1, 0, 120), norms).color, 1.0);
  EXPECT_DOUBLE_EQ(visual_mapping(ingest::FileKind::SourceClassContainer, source(1, 1, 0, 900), norms).color, 1.0);
  EXPECT_DOUBLE_EQ(visual_mapping(ingest::FileKind::SourceClassContainer, source(1, 1, 0, 60), norms).color, 0.5);
}

TEST(VisualMapping, DataBinaryAndText) {
  Normalizers norms;
  norms.data_entities_p95 = 8;
  auto d = visual_mapping(ingest::FileKind::DataFile, data(4, 9, 2, 16), norms);
  EXPECT_DOUBLE_EQ(d.width, 4.0);
  EXPECT_DOUBLE_EQ(d.height, 5.0);
  EXPECT_DOUBLE_EQ(d.color, 0.5);

  auto b = visual_mapping(ingest::FileKind::BinaryFile, BinaryMetrics{1023});
  EXPECT_DOUBLE_EQ(b.width, 1.0 + std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(b.width, b.height);
  EXPECT_DOUBLE_EQ(b.width, b.depth);

  auto t = visual_mapping(ingest::FileKind::OtherText, TextMetrics{5000, 100});
  EXPECT_EQ(t, Dimensions{});
}

TEST(VisualMapping, WrongShapeMapsLikeZero) {
  auto d = visual_mapping(ingest::FileKind::SourceClassContainer, data(100, 100, 100, 100));
  EXPECT_EQ(d, visual_mapping(ingest::FileKind::SourceClassContainer, source(0, 0, 0, 0)));
  EXPECT_EQ(visual_mapping(ingest::FileKind::DataFile, std::monostate{}).height, 1.0);
}

TEST(VisualMapping, TableSlab) {
  Normalizers norms;
  norms.table_accesses_p95 = 4;
  auto t = table_mapping(9, 2, norms);
  EXPECT_DOUBLE_EQ(t.width, 4.0);
  EXPECT_DOUBLE_EQ(t.height, kTableSlabHeight);
  EXPECT_DOUBLE_EQ(t.color, 0.5);
  EXPECT_DOUBLE_EQ(table_mapping(0, 0, norms).width, 1.0);
}

TEST(Scale, ClampsBothEnds) {
  EXPECT_DOUBLE_EQ(scale(-5), 1.0);
  EXPECT_DOUBLE_EQ(scale(0), 1.0);
  EXPECT_DOUBLE_EQ(scale(1521), 40.0);
  EXPECT_DOUBLE_EQ(scale(1e9), 40.0);
}

TEST(Percentile, NearestRank) {
  EXPECT_EQ(percentile95({}), 0.0);
  EXPECT_EQ(percentile95({7}), 7.0);
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  EXPECT_EQ(percentile95(hundred), 95.0);
  std::vector<double> twenty;
  for (int i = 20; i >= 1; --i) twenty.push_back(i);
  EXPECT_EQ(percentile95(twenty), 19.0);
  EXPECT_EQ(percentile95({1, 2, 3}), 3.0);
}

TEST(Normalize, EdgeCases) {
  EXPECT_EQ(normalize(0, 0), 0.0);
  EXPECT_EQ(normalize(3, 0), 1.0);
  EXPECT_EQ(normalize(-1, 10), 0.0);
  EXPECT_EQ(normalize(5, 10), 0.5);
  EXPECT_EQ(normalize(50, 10), 1.0);
}

TEST(VisualMapping, DescriptionCoversEveryGlyph) {
  auto j = mapping_description();
  auto text = j.dump();
  for (const char* key : {"ClassBuilding", "DataFileGlyph", "BinaryGlyph", "TableSlab", "OtherText"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}

TEST(VisualMapping, FixtureNormalizersSaturateTheLargestFile) {
  pipeline::AnalyzeOptions options;
  options.source = fixture::city_repo().string();
  auto analysis = pipeline::analyze_repository(options);
  const auto& norms = analysis.norms;
  EXPECT_GT(norms.source_loc_p95, 0.0);
  std::size_t max_loc = 0;
  const evomodel::Version* largest = nullptr;
  for (const auto& h : analysis.model.histories()) {
    for (const auto& v : h.versions) {
      auto* s = std::get_if<srcmetrics::FileSourceMetrics>(&v.metrics);
      if (s && v.change != evomodel::ChangeKind::Deleted && s->aggregate.lines_of_code >= max_loc) {
        max_loc = s->aggregate.lines_of_code;
        largest = &v;
      }
    }
  }
  ASSERT_NE(largest, nullptr);
  EXPECT_DOUBLE_EQ(visual_mapping(*largest->kind, largest->metrics, norms).color, 1.0);
}

TEST(VisualProperties, MonotoneInEveryMappedMetric) {
  std::mt19937 rng(17);
  Normalizers norms{50, 20, 4096, 6};
  auto r = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  for (int round = 0; round < 2000; ++round) {
    std::size_t v = r(2000), m = r(2000), l = r(5000);
    auto base = visual_mapping(ingest::FileKind::SourceClassContainer, source(v, m, 0, l), norms);
    auto more_v = visual_mapping(ingest::FileKind::SourceClassContainer, source(v + 1 + r(50), m, 0, l), norms);
    auto more_m = visual_mapping(ingest::FileKind::SourceClassContainer, source(v, m + 1 + r(50), 0, l), norms);
    auto more_l = visual_mapping(ingest::FileKind::SourceClassContainer, source(v, m, 0, l + 1 + r(50)), norms);
    EXPECT_GE(more_v.width, base.width);
    EXPECT_EQ(more_v.height, base.height);
    EXPECT_GE(more_m.height, base.height);
    EXPECT_EQ(more_m.width, base.width);
    EXPECT_GE(more_l.color, base.color);

    std::size_t e = r(500), t = r(500), n = r(60);
    auto dbase = visual_mapping(ingest::FileKind::DataFile, data(e, t, 1, n), norms);
    EXPECT_GE(visual_mapping(ingest::FileKind::DataFile, data(e, t + 1, 1, n), norms).width, dbase.width);
    EXPECT_GE(visual_mapping(ingest::FileKind::DataFile, data(e, t, 1, n + 1), norms).height, dbase.height);
    EXPECT_GE(visual_mapping(ingest::FileKind::DataFile, data(e + 1, t, 1, n), norms).color, dbase.color);

    std::uint64_t size = rng() % 10'000'000;
    auto bbase = visual_mapping(ingest::FileKind::BinaryFile, BinaryMetrics{size}, norms);
    auto bmore = visual_mapping(ingest::FileKind::BinaryFile, BinaryMetrics{size + 1 + rng() % 1000}, norms);
    EXPECT_GE(bmore.width, bbase.width);
    EXPECT_GE(bmore.color, bbase.color);

    std::size_t cols = r(100), acc = r(100);
    EXPECT_GE(table_mapping(cols + 1, acc, norms).width, table_mapping(cols, acc, norms).width);
    EXPECT_GE(table_mapping(cols, acc + 1, norms).color, table_mapping(cols, acc, norms).color);

    for (const auto& d : {base, dbase, bbase}) {
      EXPECT_GE(d.width, kMinSide);
      EXPECT_LE(d.width, kMaxSide);
      EXPECT_GT(d.height, 0.0);
      EXPECT_GE(d.color, 0.0);
      EXPECT_LE(d.color, 1.0);
    }
  }
}

}  // namespace
