#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evocity/canonical_json.hpp"

namespace evocity::fixture {

class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "evocity-test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path fixtures_root();
Json load_json(const std::filesystem::path& file);
Json load_oracle(const std::string& fixture = "city");

/// Environment for deterministic commits: no user or system config, fixed
/// identity, main as the default branch.
std::map<std::string, std::string> git_env();

/// Runs git in `dir`; throws on a non-zero exit. Returns stdout.
std::string git(const std::filesystem::path& dir, const std::vector<std::string>& args,
                std::map<std::string, std::string> extra_env = {});

/// Replays tests/fixtures/<fixture>/commits.json into a fresh repository at
/// `target`. With `limit`, only the first `limit` commits are made.
void build_fixture_repo(const std::string& fixture, const std::filesystem::path& target,
                        std::optional<std::size_t> limit = std::nullopt);

/// The "city" fixture built once per process.
const std::filesystem::path& city_repo();

/// main: A, B, B2, M (merges topic), C; topic branches after B with T1, T2.
/// The first-parent walk is A, B, B2, M, C.
void build_merge_repo(const std::filesystem::path& target);

}  // namespace evocity::fixture
