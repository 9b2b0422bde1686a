#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "evocity/pipeline.hpp"
#include "evocity/store.hpp"

namespace evocity::api {

inline constexpr const char* kPrefix = "/api/v1";

/// Runs one analysis job to completion, publishing into the store (or
/// recording the failure). Replaceable so tests can hold jobs open.
using AnalyzeFn = std::function<void(store::Store&, const pipeline::AnalyzeOptions&)>;

struct ServiceConfig {
  std::filesystem::path data_dir;
  std::filesystem::path cache_dir = ingest::default_cache_dir();
  std::string cors_origin = "*";
  unsigned analysis_workers = 0;  // per-file parallelism inside one job
  AnalyzeFn analyze;              // defaults to pipeline::analyze_and_publish
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// host:port, ":port" or "port"; the host defaults to 127.0.0.1.
std::pair<std::string, int> parse_bind(const std::string& bind);

/// The HTTP service. `handle` is transport independent; `bind`/`run` serve
/// it over HTTP. Analyses run on one background worker, at most one job per
/// project at a time.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const std::string& method, const std::string& path, const std::string& body = "");

  /// False when the address cannot be bound (e.g. port in use).
  bool bind(const std::string& host, int port);
  int port() const;
  void run();   // blocks until stop()
  void stop();  // stops the listener and the worker; queued jobs stay Queued

  /// Blocks until no job is queued or running.
  void wait_idle();

  store::Store& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evocity::api
