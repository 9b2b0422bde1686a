#include "evocity/api.hpp"

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "evocity/error.hpp"
#include "httplib.h"

namespace fs = std::filesystem;

namespace evocity::api {

namespace {

Response json_response(int status, const Json& body) { return {status, canonical_dump(body), "application/json"}; }

Response error_response(int status, std::string_view code, const std::string& message) {
  return json_response(status, {{"error", code}, {"message", message}, {"schema_version", store::kSchemaVersion}});
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return 400;
    case ErrorCode::UnknownProject:
    case ErrorCode::UnknownArtifact:
    case ErrorCode::OrdinalOutOfRange: return 404;
    case ErrorCode::ProjectNotReady: return 409;
    case ErrorCode::UnreachableRemote: return 502;
    default: return 500;
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto slash = path.find('/', start);
    if (slash == std::string::npos) slash = path.size();
    if (slash > start) parts.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return parts;
}

bool has_space_or_control(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return c <= 0x20 || c == 0x7f; });
}

bool plausible_source(const std::string& s) {
  if (s.empty() || has_space_or_control(s)) return false;
  if (ingest::is_remote_url(s)) return true;
  if (s.find("://") != std::string::npos) return false;
  return s.front() == '/' || s.rfind("./", 0) == 0 || s.rfind("../", 0) == 0;
}

std::optional<std::size_t> parse_ordinal(const std::string& s) {
  if (s.empty() || s.size() > 18 || !std::all_of(s.begin(), s.end(), ::isdigit)) return std::nullopt;
  return std::stoull(s);
}

}  // namespace

std::pair<std::string, int> parse_bind(const std::string& bind) {
  std::string host = "127.0.0.1";
  std::string port = bind;
  if (auto colon = bind.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = bind.substr(0, colon);
    port = bind.substr(colon + 1);
  }
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  if (port.empty() || !std::all_of(port.begin(), port.end(), ::isdigit) || port.size() > 5) {
    throw Error(ErrorCode::InvalidArgument, "invalid bind address: " + bind);
  }
  int p = std::stoi(port);
  if (p > 65535) throw Error(ErrorCode::InvalidArgument, "invalid port: " + port);
  return {host, p};
}

struct Service::Impl {
  ServiceConfig config;
  store::Store store;
  httplib::Server server;
  int port = -1;

  std::mutex mutex;
  std::condition_variable cv;
  std::condition_variable idle_cv;
  std::deque<pipeline::AnalyzeOptions> queue;
  std::set<std::string> pending;  // queued or running project ids
  bool stopping = false;
  std::thread worker;

  // Parsed entity documents of the last generation seen per project.
  std::mutex cache_mutex;
  std::map<std::string, std::pair<std::string, std::shared_ptr<const std::map<std::string, Json>>>> histories;

  explicit Impl(ServiceConfig c) : config(std::move(c)), store(config.data_dir) {
    if (!config.analyze) {
      config.analyze = [](store::Store& s, const pipeline::AnalyzeOptions& o) { pipeline::analyze_and_publish(s, o); };
    }
    store.recover();
    worker = std::thread([this] { work(); });
  }

  void work() {
    for (;;) {
      pipeline::AnalyzeOptions job;
      {
        std::unique_lock lock(mutex);
        cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        job = std::move(queue.front());
        queue.pop_front();
      }
      auto id = store::project_id(job.source, job.branch);
      try {
        config.analyze(store, job);
      } catch (const std::exception& e) {
        // A failure is already recorded unless the analyzer never got to it.
        auto r = store.get(id);
        if (r && (r->status == store::Status::Queued || r->status == store::Status::Running)) {
          r->status = store::Status::Failed;
          r->reason = e.what();
          store.put_record(*r);
        }
      }
      {
        std::lock_guard lock(mutex);
        pending.erase(id);
      }
      idle_cv.notify_all();
    }
  }

  void shutdown() {
    {
      std::lock_guard lock(mutex);
      if (stopping) return;
      stopping = true;
    }
    cv.notify_all();
    server.stop();
    if (worker.joinable()) worker.join();
    idle_cv.notify_all();
  }

  Response analyze(const std::string& body) {
    Json request;
    try {
      request = Json::parse(body);
    } catch (const Json::parse_error&) {
      return error_response(400, "InvalidArgument", "request body is not JSON");
    }
    if (!request.is_object() || !request.contains("repo_url") || !request["repo_url"].is_string()) {
      return error_response(400, "InvalidArgument", "repo_url (string) is required");
    }
    auto url = request["repo_url"].get<std::string>();
    if (!plausible_source(url)) return error_response(400, "InvalidArgument", "repo_url is neither a URL nor a path");

    pipeline::AnalyzeOptions options;
    options.cache_dir = config.cache_dir;
    options.workers = config.analysis_workers;
    if (request.contains("db_type") && !request["db_type"].is_null()) {
      if (!request["db_type"].is_string()) return error_response(400, "InvalidArgument", "db_type must be a string");
      auto dialect = sqlinfer::dialect_from_string(request["db_type"].get<std::string>());
      if (!dialect) return error_response(400, "InvalidArgument", "db_type must be generic, sqlite, mysql or postgres");
      options.dialect = *dialect;
    }
    if (request.contains("branch") && !request["branch"].is_null()) {
      if (!request["branch"].is_string()) return error_response(400, "InvalidArgument", "branch must be a string");
      auto branch = request["branch"].get<std::string>();
      if (branch.empty() || has_space_or_control(branch) || branch.front() == '-') {
        return error_response(400, "InvalidArgument", "invalid branch name");
      }
      options.branch = branch;
    }
    options.source = pipeline::normalize_source(url);
    const auto id = store::project_id(options.source, options.branch);

    std::unique_lock lock(mutex);
    if (stopping) return error_response(503, "Unavailable", "service is shutting down");
    auto existing = store.get(id);
    if (pending.contains(id) && existing) {
      return json_response(202, {{"project_id", id}, {"status", store::to_string(existing->status)},
                                 {"schema_version", store::kSchemaVersion}});
    }
    if (existing && existing->status == store::Status::Done && store.has_manifest(id) &&
        existing->db_type == sqlinfer::to_string(options.dialect) && head_unchanged(*existing, options)) {
      return json_response(200, {{"project_id", id}, {"status", "Done"}, {"schema_version", store::kSchemaVersion}});
    }
    store::ProjectRecord record = existing.value_or(store::ProjectRecord{});
    record.id = id;
    record.repo_url = options.source;
    record.branch = options.branch;
    record.db_type = std::string(sqlinfer::to_string(options.dialect));
    record.status = store::Status::Queued;
    record.reason.clear();
    store.put_record(record);
    pending.insert(id);
    queue.push_back(std::move(options));
    lock.unlock();
    cv.notify_one();
    return json_response(202, {{"project_id", id}, {"status", "Queued"}, {"schema_version", store::kSchemaVersion}});
  }

  // Local repositories are cheap to check; remote ones would need the
  // network, so a Done remote project is returned as is.
  bool head_unchanged(const store::ProjectRecord& record, const pipeline::AnalyzeOptions& options) {
    if (ingest::is_remote_url(options.source)) return true;
    try {
      auto handle = ingest::open_repository(options.source, options.branch, options.cache_dir);
      return handle.head() == record.head;
    } catch (const Error&) {
      return false;
    }
  }

  store::ProjectRecord require_done(const std::string& id) {
    auto record = store.require(id);
    if (record.status != store::Status::Done) {
      throw Error(ErrorCode::ProjectNotReady, "project " + id + " is " + std::string(store::to_string(record.status)));
    }
    return record;
  }

  std::shared_ptr<const std::map<std::string, Json>> history_index(const std::string& id) {
    auto generation = store.manifest(id).at("generation").get<std::string>();
    {
      std::lock_guard lock(cache_mutex);
      if (auto it = histories.find(id); it != histories.end() && it->second.first == generation) return it->second.second;
    }
    auto doc = Json::parse(store.load_document(id, "histories"));
    auto index = std::make_shared<std::map<std::string, Json>>();
    for (auto& h : doc.at("histories")) {
      auto key = h.at("id").get<std::string>();
      (*index)[key] = std::move(h);
    }
    std::lock_guard lock(cache_mutex);
    histories[id] = {generation, index};
    return index;
  }

  Response route(const std::string& method, const std::string& path, const std::string& body) {
    auto parts = split_path(path);
    if (parts.size() < 3 || parts[0] != "api" || parts[1] != "v1") {
      return error_response(404, "NotFound", "no route for " + path);
    }
    parts.erase(parts.begin(), parts.begin() + 2);
    const auto n = parts.size();

    if (n == 1 && parts[0] == "analyze") {
      if (method != "POST") return error_response(405, "MethodNotAllowed", "use POST");
      return analyze(body);
    }
    if (parts[0] != "projects") return error_response(404, "NotFound", "no route for " + path);
    if (method != "GET") return error_response(405, "MethodNotAllowed", "use GET");

    if (n == 1) {
      Json projects = Json::array();
      for (const auto& r : store.list_projects()) projects.push_back(store::record_to_json(r));
      return json_response(200, {{"projects", projects}, {"schema_version", store::kSchemaVersion}});
    }
    const auto& id = parts[1];
    if (n == 2) return json_response(200, store::record_to_json(store.require(id)));
    if (n == 4 && parts[2] == "scenes") {
      require_done(id);
      auto ordinal = parse_ordinal(parts[3]);
      if (!ordinal) return error_response(400, "InvalidArgument", "ordinal must be a non-negative integer");
      return {200, store.load_scene(id, *ordinal), "application/json"};
    }
    if (n == 3 && parts[2] == "timeline") {
      require_done(id);
      return {200, store.load_document(id, "timeline"), "application/json"};
    }
    if (n == 5 && parts[2] == "entities" && parts[4] == "history") {
      require_done(id);
      auto index = history_index(id);
      auto it = index->find(parts[3]);
      if (it == index->end()) throw Error(ErrorCode::UnknownArtifact, "unknown artifact " + parts[3]);
      auto out = it->second;
      out["schema_version"] = store::kSchemaVersion;
      return json_response(200, out);
    }
    return error_response(404, "NotFound", "no route for " + path);
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    auto r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  auto& server = impl_->server;
  server.Get(R"(/api/v1/.*)", handler);
  server.Post(R"(/api/v1/.*)", handler);
  server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", impl_->config.cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

Service::~Service() { impl_->shutdown(); }

Response Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  try {
    return impl_->route(method, path, body);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

bool Service::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  return impl_->port > 0;
}

int Service::port() const { return impl_->port; }

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->shutdown(); }

void Service::wait_idle() {
  std::unique_lock lock(impl_->mutex);
  impl_->idle_cv.wait(lock, [&] { return impl_->pending.empty() || impl_->stopping; });
}

store::Store& Service::store() { return impl_->store; }

}  // namespace evocity::api
