#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "evocity/api.hpp"
#include "evocity/error.hpp"
#include "evocity/pipeline.hpp"
#include "evocity/store.hpp"

namespace {

using namespace evocity;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotARepository:
    case ErrorCode::UnreachableRemote:
    case ErrorCode::BranchNotFound:
    case ErrorCode::EmptyRepository:
    case ErrorCode::UnknownProject:
    case ErrorCode::UnknownArtifact:
    case ErrorCode::OrdinalOutOfRange:
    case ErrorCode::ProjectNotReady:
    case ErrorCode::InvalidArgument: return kExitUsage;
    default: return kExitInternal;
  }
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : std::move(fallback);
}

int cmd_analyze(const std::string& source, const std::optional<std::string>& branch, const std::string& db_type,
                const std::string& data_dir, const std::string& cache_dir, std::optional<std::size_t> limit,
                unsigned workers, bool quiet) {
  auto dialect = sqlinfer::dialect_from_string(db_type);
  if (!dialect) {
    std::cerr << "error: --db-type must be generic, sqlite, mysql or postgres\n";
    return kExitUsage;
  }
  pipeline::AnalyzeOptions options;
  options.source = source;
  options.branch = branch;
  options.dialect = *dialect;
  options.max_commits = limit;
  options.workers = workers;
  if (!cache_dir.empty()) options.cache_dir = cache_dir;
  if (!quiet) options.progress = [](const std::string& m) { std::cerr << m << "\n"; };
  store::Store store(data_dir);
  auto record = pipeline::analyze_and_publish(store, options);
  std::cout << record.id << "\n";
  return kExitOk;
}

int cmd_export(const std::string& project, std::size_t ordinal, const std::string& output,
               const std::string& data_dir) {
  store::Store store(data_dir);
  auto record = store.require(project);
  if (record.status != store::Status::Done) {
    throw Error(ErrorCode::ProjectNotReady, "project " + project + " is " + std::string(store::to_string(record.status)));
  }
  auto bytes = store.load_scene(project, ordinal);
  if (output.empty() || output == "-") {
    std::fwrite(bytes.data(), 1, bytes.size(), stdout);
    std::fflush(stdout);
  } else {
    store::write_file_atomic(output, bytes);
  }
  return kExitOk;
}

int cmd_stats(const std::string& project, std::optional<std::size_t> ordinal, bool json,
              const std::string& data_dir) {
  store::Store store(data_dir);
  auto record = store.require(project);
  if (!store.has_manifest(project)) throw Error(ErrorCode::ProjectNotReady, "project " + project + " has no analysis");
  auto count = store.manifest(project).at("scenes").at("count").get<std::size_t>();
  std::size_t at = ordinal.value_or(count == 0 ? 0 : count - 1);
  if (count > 0 && at >= count) {
    throw Error(ErrorCode::OrdinalOutOfRange,
                "ordinal " + std::to_string(at) + " out of range [0, " + std::to_string(count) + ")");
  }
  pipeline::KindCounts k;
  if (count > 0) k = pipeline::count_kinds(pipeline::load_histories(store, project), pipeline::load_tables(store, project), at);
  if (json) {
    auto j = pipeline::kind_counts_json(k);
    j["project"] = project;
    j["ordinal"] = at;
    std::cout << canonical_dump(j) << "\n";
    return kExitOk;
  }
  std::printf("project      %s\n", project.c_str());
  std::printf("ordinal      %zu of %zu\n", at, count);
  std::printf("classes      %zu\n", k.classes);
  std::printf("source files %zu\n", k.source_files);
  std::printf("data files   %zu\n", k.data_files);
  std::printf("binaries     %zu\n", k.binaries);
  std::printf("other files  %zu\n", k.other_files);
  std::printf("folders      %zu\n", k.folders);
  std::printf("tables       %zu\n", k.tables);
  return kExitOk;
}

int cmd_serve(const std::string& bind, const std::string& data_dir, const std::string& cache_dir,
              const std::string& cors_origin) {
  auto [host, port] = api::parse_bind(bind);

  // Block the shutdown signals before any thread starts so only the waiter
  // below receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  api::ServiceConfig config;
  config.data_dir = data_dir;
  if (!cache_dir.empty()) config.cache_dir = cache_dir;
  config.cors_origin = cors_origin;
  api::Service service(config);
  if (!service.bind(host, port)) {
    std::cerr << "error: cannot bind " << host << ":" << port << "\n";
    return kExitUsage;
  }
  std::cerr << "listening on " << host << ":" << service.port() << "\n";

  std::thread waiter([&service, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  waiter.detach();
  service.run();
  service.stop();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine a git history into per-commit software city scenes"};
  app.require_subcommand(1);
  std::string data_dir = store::default_data_dir().string();
  std::string cache_dir;
  app.add_option("--data-dir", data_dir, "Project store directory")->capture_default_str();
  app.add_option("--cache-dir", cache_dir, "Clone cache directory");

  auto* analyze = app.add_subcommand("analyze", "Analyze a repository and store the result");
  std::string source;
  std::optional<std::string> branch;
  std::string db_type = "generic";
  std::optional<std::size_t> limit;
  unsigned workers = 0;
  bool quiet = false;
  analyze->add_option("source", source, "Repository URL or local path")->required();
  analyze->add_option("--branch", branch, "Branch to follow (default: the repository's default branch)");
  analyze->add_option("--db-type", db_type, "SQL dialect: generic, sqlite, mysql, postgres")->capture_default_str();
  analyze->add_option("--limit", limit, "Only analyze the first N mainline commits")->check(CLI::PositiveNumber);
  analyze->add_option("--workers", workers, "Parallel file analyzers (0 = all cores)");
  analyze->add_flag("-q,--quiet", quiet, "No progress output");
  analyze->add_option("--data-dir", data_dir, "Project store directory");
  analyze->add_option("--cache-dir", cache_dir, "Clone cache directory");

  auto* export_scene = app.add_subcommand("export-scene", "Write one stored scene document");
  std::string project;
  std::size_t ordinal = 0;
  std::string output = "-";
  export_scene->add_option("project", project, "Project id")->required();
  export_scene->add_option("ordinal", ordinal, "Commit ordinal")->required();
  export_scene->add_option("-o,--output", output, "Output file, '-' for stdout")->capture_default_str();
  export_scene->add_option("--data-dir", data_dir, "Project store directory");

  auto* stats = app.add_subcommand("stats", "Per-kind counts of a stored project");
  std::optional<std::size_t> stats_ordinal;
  bool json = false;
  stats->add_option("project", project, "Project id")->required();
  stats->add_option("--ordinal", stats_ordinal, "Commit ordinal (default: head)");
  stats->add_flag("--json", json, "Machine-readable output");
  stats->add_option("--data-dir", data_dir, "Project store directory");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string bind = env_or("EVOCITY_BIND", "127.0.0.1:8080");
  std::string cors_origin = "*";
  serve->add_option("--bind", bind, "host:port to listen on")->capture_default_str();
  serve->add_option("--cors-origin", cors_origin, "Access-Control-Allow-Origin value")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Project store directory");
  serve->add_option("--cache-dir", cache_dir, "Clone cache directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(source, branch, db_type, data_dir, cache_dir, limit, workers, quiet);
    if (*export_scene) return cmd_export(project, ordinal, output, data_dir);
    if (*stats) return cmd_stats(project, stats_ordinal, json, data_dir);
    if (*serve) return cmd_serve(bind, data_dir, cache_dir, cors_origin);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
