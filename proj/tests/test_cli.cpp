#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <fcntl.h>
#include <regex>
#include <thread>

#include "evocity/api.hpp"
#include "evocity/canonical_json.hpp"
#include "evocity/store.hpp"
#include "fixture_repo.hpp"
#include "httplib.h"

extern char** environ;

using namespace evocity;
namespace fs = std::filesystem;

namespace {

struct Child {
  pid_t pid = -1;
  fs::path out, err;
};

Child spawn_cli(const std::vector<std::string>& args, const fs::path& logs) {
  static int counter = 0;
  Child c;
  c.out = logs / ("out-" + std::to_string(counter) + ".txt");
  c.err = logs / ("err-" + std::to_string(counter++) + ".txt");
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 1, c.out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addopen(&actions, 2, c.err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  std::vector<std::string> full{EVOCITY_CLI};
  full.insert(full.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : full) argv.push_back(a.data());
  argv.push_back(nullptr);
  int rc = posix_spawn(&c.pid, EVOCITY_CLI, &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  EXPECT_EQ(rc, 0);
  return c;
}

int wait_exit(const Child& c) {
  int status = 0;
  waitpid(c.pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fixture::TempDir("evocity-cli");
    auto r = run({"analyze", "-q", fixture::city_repo().string(), "--data-dir", data()});
    ASSERT_EQ(r.code, 0) << r.err;
    id_ = r.out.substr(0, r.out.find('\n'));
  }
  static void TearDownTestSuite() { delete dir_; }

  static std::string data() { return (dir_->path() / "data").string(); }

  static RunResult run(const std::vector<std::string>& args) {
    auto c = spawn_cli(args, dir_->path());
    int code = wait_exit(c);
    return {code, store::read_file(c.out), store::read_file(c.err)};
  }

  static inline fixture::TempDir* dir_ = nullptr;
  static inline std::string id_;
};

TEST_F(Cli, AnalyzePrintsProjectId) {
  EXPECT_TRUE(std::regex_match(id_, std::regex("[0-9a-f]{16}"))) << id_;
  store::Store s(data());
  EXPECT_EQ(s.require(id_).status, store::Status::Done);
  EXPECT_EQ(s.require(id_).commit_count, 12u);
}

TEST_F(Cli, UsageAndInputErrorsExitTwo) {
  auto missing = run({"analyze", "-q", (dir_->path() / "absent").string(), "--data-dir", data()});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("error"), std::string::npos);
  EXPECT_EQ(run({"analyze", "-q", fixture::city_repo().string(), "--branch", "nope", "--data-dir", data()}).code, 2);
  EXPECT_EQ(run({"analyze", "-q", fixture::city_repo().string(), "--db-type", "oracle", "--data-dir", data()}).code,
            2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"export-scene", id_, "12", "--data-dir", data()}).code, 2);
  EXPECT_EQ(run({"export-scene", "ffffffffffffffff", "0", "--data-dir", data()}).code, 2);
  EXPECT_EQ(run({"stats", id_, "--ordinal", "40", "--data-dir", data()}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, ExportSceneMatchesGoldens) {
  for (int o : {6, 10}) {
    auto golden = store::read_file(fs::path(EVOCITY_GOLDEN_DIR) / ("city_scene_" + std::to_string(o) + ".json"));
    auto to_stdout = run({"export-scene", id_, std::to_string(o), "-o", "-", "--data-dir", data()});
    ASSERT_EQ(to_stdout.code, 0) << to_stdout.err;
    EXPECT_EQ(to_stdout.out, golden) << o;
    auto file = dir_->path() / ("scene-" + std::to_string(o) + ".json");
    ASSERT_EQ(run({"export-scene", id_, std::to_string(o), "-o", file.string(), "--data-dir", data()}).code, 0);
    EXPECT_EQ(store::read_file(file), golden);
  }
}

TEST_F(Cli, StatsAgreeWithOracle) {
  auto r = run({"stats", id_, "--json", "--data-dir", data()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_EQ(j.at("ordinal").get<std::size_t>(), 11u);
  for (const auto& [k, v] : fixture::load_oracle().at("kind_counts_at_head").items()) {
    EXPECT_EQ(j.at(k), v) << k;
  }
  auto text = run({"stats", id_, "--data-dir", data()});
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("tables       4"), std::string::npos) << text.out;
}

TEST_F(Cli, CliAndServiceStoreIdenticalDocuments) {
  fixture::TempDir other;
  api::ServiceConfig config;
  config.data_dir = other.path();
  config.cache_dir = other / "cache";
  api::Service service(config);
  auto r = service.handle("POST", "/api/v1/analyze", Json{{"repo_url", fixture::city_repo().string()}}.dump());
  ASSERT_EQ(r.status, 202);
  service.wait_idle();
  store::Store cli_store(data());
  ASSERT_EQ(Json::parse(r.body).at("project_id").get<std::string>(), id_);
  for (const char* doc : {"timeline", "histories"}) {
    EXPECT_EQ(service.store().load_document(id_, doc), cli_store.load_document(id_, doc)) << doc;
  }
  for (std::size_t o = 0; o < 12; ++o) {
    EXPECT_EQ(service.store().load_scene(id_, o), cli_store.load_scene(id_, o)) << o;
  }
}

int occupied_port(int& fd) {
  fd = socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || listen(fd, 1) != 0) return -1;
  socklen_t len = sizeof addr;
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

TEST_F(Cli, ServeRefusesBusyPort) {
  int fd = -1;
  int port = occupied_port(fd);
  ASSERT_GT(port, 0);
  auto r = run({"serve", "--bind", "127.0.0.1:" + std::to_string(port), "--data-dir", data()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cannot bind"), std::string::npos) << r.err;
  close(fd);
}

TEST_F(Cli, ServeAnswersAndStopsOnSigint) {
  auto child = spawn_cli({"serve", "--bind", "127.0.0.1:0", "--data-dir", data()}, dir_->path());
  std::smatch m;
  int port = 0;
  for (int i = 0; i < 200 && port == 0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
    auto err = store::read_file(child.err);
    if (std::regex_search(err, m, std::regex(R"(listening on [^:]+:(\d+))"))) port = std::stoi(m[1]);
  }
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/v1/projects");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  auto projects = Json::parse(res->body).at("projects");
  bool listed = false;
  for (const auto& p : projects) {
    if (p.at("id") == id_) listed = p.at("status") == "Done";
  }
  EXPECT_TRUE(listed) << res->body;
  auto scene = client.Get("/api/v1/projects/" + id_ + "/scenes/6");
  ASSERT_TRUE(scene);
  EXPECT_EQ(scene->body, store::read_file(fs::path(EVOCITY_GOLDEN_DIR) / "city_scene_6.json"));

  kill(child.pid, SIGINT);
  EXPECT_EQ(wait_exit(child), 0);
}

}  // namespace
