#include "evocity/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "evocity/error.hpp"

namespace fs = std::filesystem;

namespace evocity::pipeline {

namespace {

struct FileResult {
  evomodel::FileAnalysis analysis;
  std::vector<sqlinfer::SqlStatement> statements;
};

using FileKey = std::pair<std::size_t, std::string>;

void report(const AnalyzeOptions& options, const std::string& message) {
  if (options.progress) options.progress(message);
}

FileResult analyze_file(const ingest::RepositoryHandle& handle, const ingest::CommitMeta& commit,
                        const std::string& path, const AnalyzeOptions& options) {
  auto content = ingest::read_blob(handle, commit, path);
  FileResult r;
  r.analysis.kind = ingest::classify_file(path, content, options.classifier);
  r.analysis.metrics = compute_metrics(r.analysis.kind, path, content);
  if (r.analysis.kind == ingest::FileKind::SourceClassContainer) {
    for (auto& candidate : sqlinfer::extract_sql_strings(content)) {
      auto st = sqlinfer::parse_sql(candidate.text, options.dialect);
      // Unparseable text is noise, unless a fragment made it so.
      if (st.kind == sqlinfer::StatementKind::Other && !candidate.has_fragment) continue;
      st.path = path;
      st.line = candidate.line;
      st.has_fragment = st.has_fragment || candidate.has_fragment;
      r.statements.push_back(std::move(st));
    }
  }
  return r;
}

std::map<FileKey, FileResult> analyze_changed_files(const ingest::RepositoryHandle& handle,
                                                    const std::vector<ingest::CommitMeta>& commits,
                                                    const std::vector<ingest::SnapshotDelta>& deltas,
                                                    const AnalyzeOptions& options) {
  std::vector<FileKey> jobs;
  for (std::size_t o = 0; o < deltas.size(); ++o) {
    for (const auto& p : deltas[o].added) jobs.emplace_back(o, p);
    for (const auto& p : deltas[o].modified) jobs.emplace_back(o, p);
    for (const auto& r : deltas[o].renamed) jobs.emplace_back(o, r.to);
  }
  std::vector<FileResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      auto i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i] = analyze_file(handle, commits[jobs[i].first], jobs[i].second, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
        return;
      }
    }
  };
  unsigned n = options.workers != 0 ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);

  std::map<FileKey, FileResult> out;
  for (std::size_t i = 0; i < jobs.size(); ++i) out.emplace(std::move(jobs[i]), std::move(results[i]));
  return out;
}

}  // namespace

std::string normalize_source(const std::string& source) {
  if (ingest::is_remote_url(source)) return source;
  if (source.empty()) throw Error(ErrorCode::InvalidArgument, "empty repository path");
  auto p = fs::absolute(fs::path(source)).lexically_normal().string();
  while (p.size() > 1 && p.back() == '/') p.pop_back();
  return p;
}

scene::Scene Analysis::scene_at(std::size_t ordinal) const {
  if (ordinal >= commits.size()) {
    throw Error(ErrorCode::OrdinalOutOfRange, "ordinal " + std::to_string(ordinal) + " out of range");
  }
  return scene::build_scene({layout, model, schemas[ordinal], accesses[ordinal], norms, commits[ordinal], sizing});
}

Analysis analyze_repository(const AnalyzeOptions& options) {
  Analysis a;
  a.source = normalize_source(options.source);
  a.branch = options.branch;
  a.dialect = options.dialect;
  a.sizing = options.sizing;

  report(options, "opening " + a.source);
  auto handle = ingest::open_repository(a.source, options.branch, options.cache_dir);
  a.resolved_branch = handle.branch();
  a.commits = ingest::enumerate_commits(handle);
  if (options.max_commits && *options.max_commits < a.commits.size()) {
    if (*options.max_commits == 0) throw Error(ErrorCode::InvalidArgument, "commit limit must be positive");
    a.commits.resize(*options.max_commits);
  }
  report(options, std::to_string(a.commits.size()) + " commits");
  a.deltas.reserve(a.commits.size());
  for (const auto& c : a.commits) a.deltas.push_back(ingest::snapshot_delta(handle, c));

  auto files = analyze_changed_files(handle, a.commits, a.deltas, options);
  report(options, std::to_string(files.size()) + " file versions analyzed");

  a.model = evomodel::link_versions(a.deltas, [&](std::size_t ordinal, const std::string& path) {
    return files.at({ordinal, path}).analysis;
  });

  std::map<std::string, std::vector<sqlinfer::SqlStatement>> current;
  sqlinfer::SchemaState state;
  std::vector<double> table_counts;
  for (std::size_t o = 0; o < a.deltas.size(); ++o) {
    const auto& d = a.deltas[o];
    for (const auto& p : d.deleted) current.erase(p);
    for (const auto& r : d.renamed) current.erase(r.from);
    auto take = [&](const std::string& path) {
      auto& statements = files.at({o, path}).statements;
      if (statements.empty()) {
        current.erase(path);
      } else {
        current[path] = statements;
      }
    };
    for (const auto& p : d.added) take(p);
    for (const auto& p : d.modified) take(p);
    for (const auto& r : d.renamed) take(r.to);

    std::vector<sqlinfer::SqlStatement> snapshot;
    std::size_t fragments = 0;
    for (const auto& [path, statements] : current) {
      for (const auto& st : statements) {
        snapshot.push_back(st);
        if (st.has_fragment) ++fragments;
      }
    }
    state = sqlinfer::infer_schema(snapshot, state, o);
    a.schemas.push_back(state);
    a.accesses.push_back(sqlinfer::count_accesses(snapshot, a.model, o));
    a.fragment_statements.push_back(fragments);
    for (const auto& [table, count] : a.accesses.back().per_table) {
      table_counts.push_back(static_cast<double>(count));
    }
  }

  a.norms = scene::compute_normalizers(a.model, table_counts);
  a.layout = layout::compute_layout(a.model, state, a.sizing);
  report(options, std::to_string(a.layout.lots().size()) + " lots laid out");
  return a;
}

Json timeline_json(const Analysis& a) {
  Json commits = Json::array();
  for (std::size_t o = 0; o < a.commits.size(); ++o) {
    const auto& c = a.commits[o];
    const auto& d = a.deltas[o];
    commits.push_back({{"ordinal", c.ordinal},
                       {"id", c.id},
                       {"timestamp", c.timestamp},
                       {"author", c.author},
                       {"message", c.message},
                       {"added", d.added.size()},
                       {"modified", d.modified.size()},
                       {"deleted", d.deleted.size()},
                       {"moved", d.renamed.size()}});
  }
  return {{"schema_version", store::kSchemaVersion}, {"commits", commits}};
}

Json histories_json(const Analysis& a) {
  std::vector<const evomodel::ArtifactHistory*> sorted;
  for (const auto& h : a.model.histories()) sorted.push_back(&h);
  std::sort(sorted.begin(), sorted.end(), [](const auto* x, const auto* y) { return x->id < y->id; });
  Json histories = Json::array();
  for (const auto* h : sorted) histories.push_back(evomodel::history_to_json(*h));
  Json moves = Json::array();
  for (const auto& m : a.model.moves()) {
    moves.push_back({{"artifact", m.artifact.value}, {"ordinal", m.ordinal}, {"from", m.from}, {"to", m.to}});
  }
  return {{"schema_version", store::kSchemaVersion},
          {"commit_count", a.commits.size()},
          {"histories", histories},
          {"moves", moves}};
}

Json schemas_json(const Analysis& a) {
  Json tables = Json::array();
  if (!a.schemas.empty()) {
    for (const auto& [name, t] : a.schemas.back()) tables.push_back(sqlinfer::schema_to_json(t));
  }
  Json timeline = Json::array();
  const sqlinfer::SchemaState empty;
  for (std::size_t o = 0; o < a.schemas.size(); ++o) {
    const auto& prev = o == 0 ? empty : a.schemas[o - 1];
    if (o > 0 && prev == a.schemas[o]) continue;
    Json state = Json::object();
    for (const auto& [name, t] : a.schemas[o]) {
      Json columns = Json::array();
      for (const auto& c : t.columns) columns.push_back(c.name);
      state[name] = {{"columns", columns}, {"alive", t.alive_at(o)}, {"inferred_by_use", t.inferred_by_use}};
    }
    timeline.push_back({{"ordinal", o}, {"tables", state}});
  }
  Json accesses = Json::array();
  for (std::size_t o = 0; o < a.accesses.size(); ++o) {
    const auto& r = a.accesses[o];
    if (r.accesses.empty() && a.fragment_statements[o] == 0) continue;
    Json per_table = Json::object();
    for (const auto& [table, n] : r.per_table) per_table[table] = n;
    Json records = Json::array();
    for (const auto& acc : r.accesses) {
      records.push_back({{"table", acc.table},
                         {"artifact", acc.artifact},
                         {"kind", sqlinfer::to_string(acc.kind)},
                         {"path", acc.path},
                         {"line", acc.line}});
    }
    accesses.push_back({{"ordinal", o},
                        {"per_table", per_table},
                        {"accesses", records},
                        {"fragment_statements", a.fragment_statements[o]}});
  }
  return {{"schema_version", store::kSchemaVersion},
          {"dialect", sqlinfer::to_string(a.dialect)},
          {"tables", tables},
          {"timeline", timeline},
          {"accesses", accesses}};
}

store::ProjectDocuments project_documents(Analysis&& analysis) {
  auto owned = std::make_shared<const Analysis>(std::move(analysis));
  auto docs = project_documents(*owned);
  docs.scene = [owned](std::size_t ordinal) { return scene::serialize_scene(owned->scene_at(ordinal)); };
  return docs;
}

store::ProjectDocuments project_documents(const Analysis& a) {
  store::ProjectDocuments docs;
  auto layout = layout::layout_to_json(a.layout);
  layout["schema_version"] = store::kSchemaVersion;
  layout["normalizers"] = {{"source_loc_p95", a.norms.source_loc_p95},
                           {"data_entities_p95", a.norms.data_entities_p95},
                           {"binary_size_p95", a.norms.binary_size_p95},
                           {"table_accesses_p95", a.norms.table_accesses_p95}};
  docs.documents["histories"] = canonical_dump(histories_json(a));
  docs.documents["layout"] = canonical_dump(layout);
  docs.documents["schemas"] = canonical_dump(schemas_json(a));
  docs.documents["timeline"] = canonical_dump(timeline_json(a));
  docs.scene_count = a.commits.size();
  docs.scene = [&a](std::size_t ordinal) { return scene::serialize_scene(a.scene_at(ordinal)); };
  return docs;
}

store::ProjectRecord analyze_and_publish(store::Store& store, const AnalyzeOptions& options) {
  auto normalized = options;
  normalized.source = normalize_source(options.source);
  const auto id = store::project_id(normalized.source, options.branch);

  auto previous = store.get(id);
  store::ProjectRecord record = previous.value_or(store::ProjectRecord{});
  record.id = id;
  record.repo_url = normalized.source;
  record.branch = options.branch;
  record.db_type = std::string(sqlinfer::to_string(options.dialect));
  record.status = store::Status::Running;
  record.reason.clear();
  store.put_record(record);

  try {
    auto analysis = analyze_repository(normalized);
    record.head = analysis.head();
    record.commit_count = analysis.commits.size();
    record.analyzed_at = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
    store.publish(record, project_documents(analysis));
  } catch (const std::exception& e) {
    if (previous && previous->status == store::Status::Done && store.has_manifest(id)) {
      auto restored = *previous;
      restored.reason = std::string("re-analysis failed: ") + e.what();
      store.put_record(restored);
    } else {
      record.status = store::Status::Failed;
      record.reason = e.what();
      store.put_record(record);
    }
    throw;
  }
  return store.require(id);
}

KindCounts count_kinds(const std::vector<evomodel::ArtifactHistory>& histories,
                       const std::vector<sqlinfer::TableSchema>& tables, std::size_t ordinal) {
  KindCounts k;
  for (const auto& h : histories) {
    if (!evomodel::alive_at(h, ordinal)) continue;
    if (h.type() == evomodel::EntityType::Folder) {
      ++k.folders;
      continue;
    }
    const auto* v = h.version_at(ordinal);
    if (v == nullptr || !v->kind) continue;
    switch (*v->kind) {
      case ingest::FileKind::SourceClassContainer: {
        ++k.source_files;
        auto* m = std::get_if<srcmetrics::FileSourceMetrics>(&v->metrics);
        if (m != nullptr && !m->classes.empty()) ++k.classes;
        break;
      }
      case ingest::FileKind::DataFile: ++k.data_files; break;
      case ingest::FileKind::BinaryFile: ++k.binaries; break;
      case ingest::FileKind::OtherText: ++k.other_files; break;
    }
  }
  for (const auto& t : tables) {
    if (t.alive_at(ordinal)) ++k.tables;
  }
  return k;
}

Json kind_counts_json(const KindCounts& k) {
  return {{"classes", k.classes},   {"source_files", k.source_files}, {"data_files", k.data_files},
          {"binaries", k.binaries}, {"other_files", k.other_files},   {"folders", k.folders},
          {"tables", k.tables}};
}

std::vector<evomodel::ArtifactHistory> load_histories(const store::Store& store, const std::string& id) {
  auto j = Json::parse(store.load_document(id, "histories"));
  std::vector<evomodel::ArtifactHistory> out;
  for (const auto& jh : j.at("histories")) out.push_back(evomodel::history_from_json(jh));
  return out;
}

std::vector<sqlinfer::TableSchema> load_tables(const store::Store& store, const std::string& id) {
  auto j = Json::parse(store.load_document(id, "schemas"));
  std::vector<sqlinfer::TableSchema> out;
  for (const auto& jt : j.at("tables")) out.push_back(sqlinfer::schema_from_json(jt));
  return out;
}

}  // namespace evocity::pipeline
