#include <gtest/gtest.h>

#include <chrono>
#include <map>
#include <string>

#include "evocity/metrics.hpp"
#include "evocity/pipeline.hpp"
#include "fixture_repo.hpp"

using namespace evocity;

namespace {

// (ordinal, path) -> blob name, replayed from the commit script.
std::map<std::pair<std::size_t, std::string>, std::string> blob_at() {
  auto script = fixture::load_json(fixture::fixtures_root() / "city" / "commits.json");
  std::map<std::string, std::string> tree;
  std::map<std::pair<std::size_t, std::string>, std::string> out;
  std::size_t ordinal = 0;
  for (const auto& commit : script.at("commits")) {
    for (const auto& op : commit.at("ops")) {
      auto kind = op.at("op").get<std::string>();
      if (kind == "write") {
        tree[op.at("path").get<std::string>()] = op.at("blob").get<std::string>();
      } else if (kind == "delete") {
        tree.erase(op.at("path").get<std::string>());
      } else {
        auto from = op.at("from").get<std::string>();
        tree[op.at("to").get<std::string>()] = tree.at(from);
        tree.erase(from);
      }
    }
    for (const auto& [path, blob] : tree) out[{ordinal, path}] = blob;
    ++ordinal;
  }
  return out;
}

class FixtureOracle : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    oracle_ = new Json(fixture::load_oracle());
    pipeline::AnalyzeOptions options;
    options.source = fixture::city_repo().string();
    auto start = std::chrono::steady_clock::now();
    analysis_ = new pipeline::Analysis(pipeline::analyze_repository(options));
    seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  static void TearDownTestSuite() {
    delete analysis_;
    delete oracle_;
  }

  static inline pipeline::Analysis* analysis_ = nullptr;
  static inline Json* oracle_ = nullptr;
  static inline double seconds_ = 0;
};

TEST_F(FixtureOracle, CommitCount) {
  EXPECT_EQ(analysis_->commits.size(), oracle_->at("commit_count").get<std::size_t>());
  EXPECT_EQ(analysis_->model.commit_count(), analysis_->commits.size());
}

TEST_F(FixtureOracle, DeltaSizes) {
  const auto& expected = oracle_->at("deltas");
  ASSERT_EQ(analysis_->deltas.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& d = analysis_->deltas[i];
    SCOPED_TRACE("ordinal " + std::to_string(i));
    EXPECT_EQ(d.added.size(), expected[i].at("added").get<std::size_t>());
    EXPECT_EQ(d.modified.size(), expected[i].at("modified").get<std::size_t>());
    EXPECT_EQ(d.deleted.size(), expected[i].at("deleted").get<std::size_t>());
    EXPECT_EQ(d.renamed.size(), expected[i].at("moved").get<std::size_t>());
  }
}

TEST_F(FixtureOracle, EveryFileVersionMatchesHandCount) {
  auto blobs = blob_at();
  const auto& expected = oracle_->at("blobs");
  std::size_t checked = 0;
  for (const auto& h : analysis_->model.histories()) {
    if (h.type() != evomodel::EntityType::File) continue;
    for (const auto& v : h.versions) {
      if (v.change == evomodel::ChangeKind::Deleted) continue;
      SCOPED_TRACE(v.path + " @" + std::to_string(v.ordinal));
      auto it = blobs.find({v.ordinal, v.path});
      ASSERT_NE(it, blobs.end());
      const auto& want = expected.at(it->second);
      ASSERT_TRUE(v.kind.has_value());
      EXPECT_EQ(ingest::to_string(*v.kind), want.at("kind").get<std::string>());
      EXPECT_EQ(metrics_to_json(v.metrics), want.at("metrics"));
      EXPECT_EQ(v.metrics, metrics_from_json(want.at("metrics")));
      ++checked;
    }
  }
  // 13 adds, 9 modifications, 1 move.
  EXPECT_EQ(checked, 23u);
}

TEST_F(FixtureOracle, HistoriesAndMoves) {
  std::size_t files = 0, folders = 0;
  for (const auto& h : analysis_->model.histories()) {
    (h.type() == evomodel::EntityType::File ? files : folders)++;
  }
  EXPECT_EQ(files, oracle_->at("histories").at("files").get<std::size_t>());
  EXPECT_EQ(folders, oracle_->at("histories").at("folders").get<std::size_t>());

  const auto& moves = analysis_->model.moves();
  const auto& want = oracle_->at("moves");
  ASSERT_EQ(moves.size(), want.size());
  for (std::size_t i = 0; i < moves.size(); ++i) {
    EXPECT_EQ(moves[i].ordinal, want[i].at("ordinal").get<std::size_t>());
    EXPECT_EQ(moves[i].from, want[i].at("from").get<std::string>());
    EXPECT_EQ(moves[i].to, want[i].at("to").get<std::string>());
  }
}

TEST_F(FixtureOracle, ReaddedPathStartsNewHistory) {
  std::vector<const evomodel::ArtifactHistory*> sample;
  for (const auto& h : analysis_->model.histories()) {
    if (h.type() == evomodel::EntityType::File && h.id.origin_path == "data/sample.json") sample.push_back(&h);
  }
  ASSERT_EQ(sample.size(), 2u);
  EXPECT_NE(sample[0]->id.value, sample[1]->id.value);
  EXPECT_EQ(sample[0]->alive, (std::vector<evomodel::AliveInterval>{{1, 7}}));
  EXPECT_EQ(sample[1]->alive, (std::vector<evomodel::AliveInterval>{{9, std::nullopt}}));
}

TEST_F(FixtureOracle, KindCountsAtHead) {
  std::vector<sqlinfer::TableSchema> tables;
  for (const auto& [name, t] : analysis_->schemas.back()) tables.push_back(t);
  auto counts = pipeline::count_kinds(analysis_->model.histories(), tables, analysis_->commits.size() - 1);
  EXPECT_EQ(pipeline::kind_counts_json(counts), oracle_->at("kind_counts_at_head"));
}

TEST_F(FixtureOracle, AnalysisRunsUnderFiveSeconds) { EXPECT_LT(seconds_, 5.0); }

}  // namespace
