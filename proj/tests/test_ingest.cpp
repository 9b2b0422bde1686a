#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <string>
#include <thread>

#include "evocity/error.hpp"
#include "evocity/hashing.hpp"
#include "evocity/ingest.hpp"
#include "fixture_repo.hpp"

using namespace evocity;
using namespace evocity::ingest;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& file, const std::string& bytes) {
  fs::create_directories(file.parent_path());
  std::ofstream(file, std::ios::binary) << bytes;
}

void commit_all(const fs::path& repo, const std::string& message) {
  fixture::git(repo, {"add", "-A"});
  fixture::git(repo, {"commit", "-q", "-m", message});
}

fs::path init_repo(const fs::path& repo) {
  fs::create_directories(repo);
  fixture::git(repo, {"init", "-q"});
  return repo;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

TEST(Classify, ExtensionAndSniffRules) {
  EXPECT_EQ(classify_file("src/Account.java", "class Account {}"), FileKind::SourceClassContainer);
  EXPECT_EQ(classify_file("res/values/strings.xml", "<resources/>"), FileKind::DataFile);
  EXPECT_EQ(classify_file("data/x.JSON", "{}"), FileKind::DataFile);
  EXPECT_EQ(classify_file("res/logo.png", std::string("\x89PNG\r\n\x1a\n\0\0", 10)), FileKind::BinaryFile);
  EXPECT_EQ(classify_file("blob.bin", std::string("ab\0cd", 5)), FileKind::BinaryFile);
  EXPECT_EQ(classify_file("app.jar", "text"), FileKind::BinaryFile);
  EXPECT_EQ(classify_file("README.md", "# hi\n"), FileKind::OtherText);
  EXPECT_EQ(classify_file("Makefile", ""), FileKind::OtherText);
}

TEST(Classify, SniffWindowIsConfigurable) {
  std::string late_nul = std::string(100, 'a') + '\0';
  ClassifierConfig config;
  config.sniff_bytes = 50;
  EXPECT_EQ(classify_file("x.dat", late_nul, config), FileKind::OtherText);
  EXPECT_EQ(classify_file("x.dat", late_nul), FileKind::BinaryFile);
}

TEST(Classify, ConfigFromFile) {
  fixture::TempDir dir;
  write(dir / "kinds.json", R"({"source": [".kt", ".java"], "data": [".yaml"]})");
  auto config = ClassifierConfig::from_file(dir / "kinds.json");
  EXPECT_EQ(classify_file("A.kt", "class A"), FileKind::OtherText);
  EXPECT_EQ(classify_file("A.kt", "class A", config), FileKind::SourceClassContainer);
  EXPECT_EQ(classify_file("a.yaml", "a: 1", config), FileKind::DataFile);
  EXPECT_EQ(classify_file("a.json", "{}", config), FileKind::OtherText);
  EXPECT_EQ(classify_file("a.png", "x", config), FileKind::BinaryFile);
}

TEST(Classify, KindNamesRoundTrip) {
  for (auto k : {FileKind::SourceClassContainer, FileKind::DataFile, FileKind::BinaryFile, FileKind::OtherText}) {
    EXPECT_EQ(file_kind_from_string(to_string(k)), k);
  }
  EXPECT_FALSE(file_kind_from_string("Nope").has_value());
}

TEST(RemoteUrls, Recognized) {
  EXPECT_TRUE(is_remote_url("https://github.com/codinguser/gnucash-android"));
  EXPECT_TRUE(is_remote_url("file:///tmp/repo"));
  EXPECT_TRUE(is_remote_url("git@github.com:a/b.git"));
  EXPECT_TRUE(is_remote_url("ssh://host/x"));
  EXPECT_FALSE(is_remote_url("/tmp/repo"));
  EXPECT_FALSE(is_remote_url("relative/dir"));
  EXPECT_FALSE(is_remote_url("C:/x"));
}

TEST(OpenRepository, Errors) {
  fixture::TempDir dir;
  EXPECT_EQ(code_of([&] { open_repository((dir / "missing").string()); }), ErrorCode::NotARepository);
  fs::create_directories(dir / "plain");
  EXPECT_EQ(code_of([&] { open_repository((dir / "plain").string()); }), ErrorCode::NotARepository);
  EXPECT_EQ(code_of([&] { open_repository(fixture::city_repo().string(), std::string("no-such-branch")); }),
            ErrorCode::BranchNotFound);
  EXPECT_EQ(code_of([&] { open_repository("file:///nonexistent/evocity/repo.git", std::nullopt, dir / "cache"); }),
            ErrorCode::UnreachableRemote);
}

TEST(OpenRepository, EmptyRepository) {
  fixture::TempDir dir;
  init_repo(dir / "empty");
  EXPECT_EQ(code_of([&] {
              auto h = open_repository((dir / "empty").string());
              enumerate_commits(h);
            }),
            ErrorCode::EmptyRepository);
}

TEST(OpenRepository, ResolvesDefaultBranch) {
  auto h = open_repository(fixture::city_repo().string());
  EXPECT_EQ(h.branch(), "main");
  EXPECT_EQ(h.head().size(), 40u);
  auto explicit_branch = open_repository(fixture::city_repo().string(), std::string("main"));
  EXPECT_EQ(explicit_branch.head(), h.head());
}

TEST(EnumerateCommits, LinearHistory) {
  fixture::TempDir dir;
  auto repo = init_repo(dir / "abc");
  for (const char* name : {"A", "B", "C"}) {
    write(repo / "f.txt", name);
    commit_all(repo, name);
  }
  auto commits = enumerate_commits(open_repository(repo.string()));
  ASSERT_EQ(commits.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(commits[i].ordinal, i);
    EXPECT_EQ(commits[i].message, std::string(1, static_cast<char>('A' + i)));
    EXPECT_EQ(commits[i].author, "Fixture");
  }
}

TEST(EnumerateCommits, FirstParentOnly) {
  fixture::TempDir dir;
  fixture::build_merge_repo(dir / "merge");
  auto h = open_repository((dir / "merge").string());
  std::vector<std::string> messages;
  for (const auto& c : enumerate_commits(h)) messages.push_back(c.message);
  EXPECT_EQ(messages, (std::vector<std::string>{"A", "B", "B2", "M", "C"}));
}

TEST(EnumerateCommits, OtherBranchIsSelectable) {
  fixture::TempDir dir;
  fixture::build_merge_repo(dir / "merge");
  auto h = open_repository((dir / "merge").string(), std::string("topic"));
  std::vector<std::string> messages;
  for (const auto& c : enumerate_commits(h)) messages.push_back(c.message);
  EXPECT_EQ(messages, (std::vector<std::string>{"A", "B", "T1", "T2"}));
}

TEST(SnapshotDelta, RootCommitAddsEverything) {
  fixture::TempDir dir;
  auto repo = init_repo(dir / "root");
  write(repo / "a.java", "class A {}\n");
  write(repo / "b.json", "{}\n");
  commit_all(repo, "root");
  auto h = open_repository(repo.string());
  auto commits = enumerate_commits(h);
  auto d = snapshot_delta(h, commits[0]);
  EXPECT_EQ(d.added, (std::vector<std::string>{"a.java", "b.json"}));
  EXPECT_TRUE(d.modified.empty());
  EXPECT_TRUE(d.deleted.empty());
  EXPECT_TRUE(d.renamed.empty());
  EXPECT_EQ(d.commit, commits[0].id);
}

TEST(SnapshotDelta, UnchangedMoveIsAFullSimilarityRename) {
  fixture::TempDir dir;
  auto repo = init_repo(dir / "mv");
  std::string body;
  for (int i = 0; i < 40; ++i) body += "// line " + std::to_string(i) + "\n";
  write(repo / "src/X.java", body + "class X {}\n");
  commit_all(repo, "add");
  fixture::git(repo, {"mv", "src", "app"});
  commit_all(repo, "move");
  auto h = open_repository(repo.string());
  auto commits = enumerate_commits(h);
  auto d = snapshot_delta(h, commits[1]);
  ASSERT_EQ(d.renamed.size(), 1u);
  EXPECT_EQ(d.renamed[0], (RenamedPath{"src/X.java", "app/X.java", 1.0}));
  EXPECT_TRUE(d.added.empty());
  EXPECT_TRUE(d.deleted.empty());
}

TEST(SnapshotDelta, DissimilarMoveIsDeletePlusAdd) {
  fixture::TempDir dir;
  auto repo = init_repo(dir / "mv2");
  write(repo / "a.txt", "alpha\nbeta\ngamma\ndelta\n");
  commit_all(repo, "add");
  fs::remove(repo / "a.txt");
  write(repo / "b.txt", "one\ntwo\nthree\nfour\nfive\n");
  commit_all(repo, "replace");
  auto h = open_repository(repo.string());
  auto d = snapshot_delta(h, enumerate_commits(h)[1]);
  EXPECT_TRUE(d.renamed.empty());
  EXPECT_EQ(d.added, (std::vector<std::string>{"b.txt"}));
  EXPECT_EQ(d.deleted, (std::vector<std::string>{"a.txt"}));
}

TEST(SnapshotDelta, FixtureMoveCommit) {
  auto h = open_repository(fixture::city_repo().string());
  auto commits = enumerate_commits(h);
  auto d = snapshot_delta(h, commits[6]);
  ASSERT_EQ(d.renamed.size(), 1u);
  EXPECT_EQ(d.renamed[0].from, "src/main/res/drawable/logo.png");
  EXPECT_EQ(d.renamed[0].to, "src/main/res/mipmap/logo.png");
  EXPECT_DOUBLE_EQ(d.renamed[0].similarity, 1.0);
}

TEST(ReadBlob, ExactBytesAndPathAbsent) {
  auto h = open_repository(fixture::city_repo().string());
  auto commits = enumerate_commits(h);
  auto png = read_blob(h, commits[0], "src/main/res/drawable/logo.png");
  std::ifstream in(fixture::fixtures_root() / "city" / "blobs" / "logo.v1.png", std::ios::binary);
  std::string expected((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(png, expected);
  EXPECT_EQ(png.size(), 723u);
  EXPECT_EQ(read_blob(h, commits[1], "data/sample.json").empty(), false);
  // sample.json is deleted at 7
  EXPECT_EQ(code_of([&] { read_blob(h, commits[7], "data/sample.json"); }), ErrorCode::PathAbsent);
  EXPECT_EQ(code_of([&] { read_blob(h, commits[0], "nope/none.txt"); }), ErrorCode::PathAbsent);
}

TEST(ReadBlob, ConcurrentReadersSeeTheSameBytes) {
  auto h = open_repository(fixture::city_repo().string());
  auto commits = enumerate_commits(h);
  auto tree = h.list_tree(commits.back());
  std::map<std::string, std::string> serial;
  for (const auto& p : tree) serial[p] = read_blob(h, commits.back(), p);
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int round = 0; round < 5; ++round) {
        for (const auto& p : tree) mismatches += read_blob(h, commits.back(), p) != serial[p];
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches.load(), 0);
}

TEST(DeltaConsistency, ReplayReconstructsEveryTree) {
  for (int which = 0; which < 2; ++which) {
    fixture::TempDir dir;
    fs::path repo = fixture::city_repo();
    if (which == 1) {
      fixture::build_merge_repo(dir / "merge");
      repo = dir / "merge";
    }
    auto h = open_repository(repo.string());
    std::set<std::string> tree;
    for (const auto& c : enumerate_commits(h)) {
      auto d = snapshot_delta(h, c);
      for (const auto& p : d.deleted) EXPECT_EQ(tree.erase(p), 1u) << p;
      for (const auto& r : d.renamed) {
        EXPECT_EQ(tree.erase(r.from), 1u) << r.from;
        EXPECT_TRUE(tree.insert(r.to).second) << r.to;
      }
      for (const auto& p : d.added) EXPECT_TRUE(tree.insert(p).second) << p;
      for (const auto& p : d.modified) EXPECT_TRUE(tree.contains(p)) << p;
      auto listing = h.list_tree(c);
      EXPECT_EQ(std::vector<std::string>(tree.begin(), tree.end()), listing) << c.message;
      for (const auto& p : listing) {
        auto k = classify_file(p, read_blob(h, c, p));
        EXPECT_TRUE(to_string(k).size() > 0);
      }
    }
  }
}

TEST(Determinism, TwoWalksAreIdentical) {
  auto walk = [] {
    auto h = open_repository(fixture::city_repo().string());
    std::vector<SnapshotDelta> ds;
    auto commits = enumerate_commits(h);
    for (const auto& c : commits) ds.push_back(snapshot_delta(h, c));
    return std::make_pair(commits, ds);
  };
  EXPECT_EQ(walk(), walk());
}

TEST(RemoteClone, CachedByUrlHash) {
  fixture::TempDir dir;
  auto url = "file://" + fixture::city_repo().string();
  auto cache = dir / "cache";
  auto first = open_repository(url, std::nullopt, cache);
  auto clone = cache / sha256_hex(url).substr(0, 24);
  ASSERT_TRUE(fs::exists(clone)) << clone;
  EXPECT_EQ(first.head(), open_repository(fixture::city_repo().string()).head());
  write(clone / "evocity-sentinel", "x");
  auto second = open_repository(url, std::nullopt, cache);
  EXPECT_TRUE(fs::exists(clone / "evocity-sentinel"));
  EXPECT_EQ(second.head(), first.head());
  EXPECT_EQ(enumerate_commits(second).size(), 12u);
  EXPECT_EQ(std::distance(fs::directory_iterator(cache), fs::directory_iterator()), 1);
}

}  // namespace
