#include "prefsel/service/service.hpp"

#include <charconv>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "json.hpp"
#include "prefsel/error.hpp"
#include "prefsel/io.hpp"
#include "prefsel/report.hpp"

namespace prefsel::service {

namespace {

using nlohmann::json;

/// Raised by request handlers; carries the HTTP status and a stable code.
struct ApiError {
  int status;
  std::string code;
  std::string message;
};

ApiResponse json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

ApiResponse error_response(const ApiError& e) {
  return json_response(e.status, json{{"error", {{"code", e.code}, {"message", e.message}}}});
}

/// Maps engine errors to API errors.
ApiError classify(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const ApiError& e) {
    return e;
  } catch (const InputError& e) {
    return {422, "invalid_input", e.what()};
  } catch (const InfeasibleError& e) {
    return {409, "inconsistent", e.what()};
  } catch (const ResourceError& e) {
    return {422, "resource_limit", e.what()};
  } catch (const NumericalError& e) {
    return {500, "numerical", e.what()};
  } catch (const std::exception& e) {
    return {500, "internal", e.what()};
  }
}

std::vector<std::string_view> segments(std::string_view path) {
  if (const auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < path.size()) {
    const auto pos = path.find('/', start);
    const auto end = pos == std::string_view::npos ? path.size() : pos;
    if (end > start) out.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

json table_echo(const PerformanceTable& t) {
  json criteria = json::array();
  for (const auto& c : t.criteria())
    criteria.push_back({{"id", c.id.str()},
                        {"direction", c.direction == Direction::cost ? "cost" : "benefit"},
                        {"scale", {c.scale_low, c.scale_high}}});
  json alternatives = json::array();
  json scores = json::array();
  for (std::size_t i = 0; i < t.num_alternatives(); ++i) {
    alternatives.push_back(t.alternative(i).str());
    scores.push_back(std::vector<double>(t.row(i).begin(), t.row(i).end()));
  }
  return {{"alternatives", alternatives}, {"criteria", criteria}, {"scores", scores}};
}

json statements_json(const std::vector<PreferenceStatement>& statements) {
  json out = json::array();
  for (const auto& st : statements) out.push_back(to_string(st));
  return out;
}

/// Reads the solve request into a config. The returned key identifies
/// requests that must produce the same report.
std::pair<ProjectConfig, std::string> read_request(const json& req, const PerformanceTable& table) {
  if (!req.is_object() || !req.contains("mode") || !req["mode"].is_string())
    throw ApiError{422, "invalid_params", "request needs a string 'mode'"};
  ProjectConfig config;
  config.mode = parse_mode(req["mode"].get<std::string>());
  const json params = req.value("params", json::object());
  if (!params.is_object()) throw ApiError{422, "invalid_params", "'params' must be an object"};
  try {
    for (const auto& [key, value] : params.items()) {
      if (key == "gamma") {
        if (value.is_object()) {
          for (const auto& [id, n] : value.items()) config.params.gamma_by_criterion[CriterionId(id)] = n.get<int>();
        } else {
          config.params.gamma = value.get<int>();
        }
      } else if (key == "p") {
        config.params.p = value.get<double>();
      } else if (key == "C") {
        config.params.C = value.get<double>();
      } else if (key == "epsilon") {
        config.params.epsilon = value.get<double>();
      } else if (key == "max_selected") {
        config.params.max_selected = value.get<std::size_t>();
      } else if (key == "epsilon_as_variable") {
        config.epsilon_as_variable = value.get<bool>();
      } else {
        throw ApiError{422, "invalid_params", fmt::format("unknown parameter '{}'", key)};
      }
    }
  } catch (const json::exception& e) {
    throw ApiError{422, "invalid_params", fmt::format("malformed parameter: {}", e.what())};
  }
  if (req.contains("vfm")) config.vfm = parse_value_function(req["vfm"].dump(), table);
  try {
    config.validate();
  } catch (const InputError& e) {
    throw ApiError{422, "invalid_params", e.what()};
  }
  json key{{"mode", to_string(config.mode)}, {"params", params}};
  if (req.contains("vfm")) key["vfm"] = req["vfm"];
  return {std::move(config), key.dump()};
}

enum class JobState { queued, running, done, failed };

std::string to_string(JobState s) {
  switch (s) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
  }
  return "unknown";
}

struct Job {
  std::string id;
  long revision = 0;
  ProjectConfig config;
  PerformanceTable table;
  std::vector<PreferenceStatement> statements;

  // Guarded by the owning session's mutex.
  JobState state = JobState::queued;
  std::vector<json> partial_sets;
  std::string result;  // rendered response body once done
  ApiError error{};
};

struct Session {
  std::string id;
  long revision = 0;
  std::string table_csv;
  std::optional<PerformanceTable> table;
  std::vector<PreferenceStatement> statements;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::map<std::string, std::string> cache;  // request key -> job id, current revision only
  std::deque<std::shared_ptr<Job>> queue;

  std::mutex mutex;
  std::condition_variable changed;
  bool stopping = false;
  std::jthread worker;
};

}  // namespace

struct SessionService::Impl {
  ServiceOptions options;
  mutable std::mutex mutex;  // guards `sessions` itself
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::mt19937_64 rng{std::random_device{}()};

  std::string fresh_id() {
    return fmt::format("{:016x}{:016x}", rng(), rng());
  }

  std::shared_ptr<Session> find(std::string_view id) const {
    std::lock_guard lock(mutex);
    const auto it = sessions.find(std::string(id));
    if (it == sessions.end()) throw ApiError{404, "not_found", fmt::format("no session {}", id)};
    return it->second;
  }

  std::shared_ptr<Session> add_session(std::string id) {
    auto s = std::make_shared<Session>();
    s->id = std::move(id);
    Session* raw = s.get();
    s->worker = std::jthread([this, raw] { work(*raw); });
    sessions.emplace(s->id, s);
    return s;
  }

  ~Impl() {
    for (auto& [id, s] : sessions) {
      {
        std::lock_guard lock(s->mutex);
        s->stopping = true;
      }
      s->changed.notify_all();
      if (s->worker.joinable()) s->worker.join();
    }
  }

  void work(Session& s) {
    while (true) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(s.mutex);
        s.changed.wait(lock, [&] { return s.stopping || !s.queue.empty(); });
        if (s.stopping) return;
        job = s.queue.front();
        s.queue.pop_front();
        job->state = JobState::running;
      }
      execute(s, *job);
      s.changed.notify_all();
    }
  }

  void execute(Session& s, Job& job) {
    SupportProgress progress = [&](const CriteriaSet& set, std::size_t) {
      json ids = json::array();
      for (const auto& id : criterion_ids(job.table, set)) ids.push_back(id.str());
      std::lock_guard lock(s.mutex);
      job.partial_sets.push_back(std::move(ids));
    };
    std::string body;
    std::optional<ApiError> failure;
    try {
      const bool consistent =
          job.statements.empty() ||
          check_consistency(apply_breakpoints(job.table, job.config.params), job.statements, job.config.params.epsilon,
                            job.config.solver)
              .consistent;
      if (!consistent && requires_consistency(job.config.mode))
        throw ApiError{409, "inconsistent", "preference statements are inconsistent; use an inconsistency-tolerant mode"};
      const Report report = run(job.config, job.table, job.statements, progress);
      json out{{"job", job.id},
               {"revision", job.revision},
               {"consistent", consistent},
               {"report", json::parse(render_json(report))}};
      body = out.dump();
    } catch (...) {
      failure = classify(std::current_exception());
    }
    std::lock_guard lock(s.mutex);
    if (failure) {
      job.state = JobState::failed;
      job.error = *failure;
    } else {
      job.state = JobState::done;
      job.result = std::move(body);
    }
  }

  // Handlers below run with the session mutex held.

  json edit_response(Session& s) {
    json out{{"revision", s.revision}, {"statements", statements_json(s.statements)}};
    out["consistent"] = nullptr;
    if (s.table) {
      try {
        out["consistent"] = s.statements.empty() || check_consistency(apply_breakpoints(*s.table, default_params()), s.statements,
                                                                  default_params().epsilon, options.solver)
                                                    .consistent;
      } catch (const InputError&) {
        // Statements naming alternatives the table lacks; reported at solve time.
      }
    }
    return out;
  }

  static SolveParams default_params() { return ProjectConfig::default_params(); }

  void bump(Session& s) {
    ++s.revision;
    s.cache.clear();
  }

  ApiResponse put_table(Session& s, std::string_view body) {
    PerformanceTable t = parse_performance_csv(body, "table");
    s.table = std::move(t);
    s.table_csv = std::string(body);
    bump(s);
    json out{{"revision", s.revision},
             {"alternatives", s.table->num_alternatives()},
             {"criteria", s.table->num_criteria()},
             {"table", table_echo(*s.table)}};
    return json_response(200, out);
  }

  ApiResponse put_statements(Session& s, std::string_view body) {
    s.statements = parse_preferences(body, s.table ? &*s.table : nullptr, "statements");
    bump(s);
    return json_response(200, edit_response(s));
  }

  ApiResponse add_statement(Session& s, std::string_view body) {
    auto st = parse_preferences(body, s.table ? &*s.table : nullptr, "statement");
    if (st.size() != 1) throw ApiError{422, "invalid_input", "statement:1: expected exactly one statement"};
    s.statements.push_back(std::move(st.front()));
    bump(s);
    return json_response(201, edit_response(s));
  }

  ApiResponse remove_statement(Session& s, std::string_view index) {
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(index.data(), index.data() + index.size(), k);
    if (ec != std::errc() || ptr != index.data() + index.size() || k >= s.statements.size())
      throw ApiError{404, "not_found", fmt::format("no statement {}", index)};
    s.statements.erase(s.statements.begin() + static_cast<std::ptrdiff_t>(k));
    bump(s);
    return json_response(200, edit_response(s));
  }

  ApiResponse job_view(const Job& job, int status_if_pending) {
    if (job.state == JobState::done) return {200, job.result, "application/json"};
    if (job.state == JobState::failed) return error_response(job.error);
    return json_response(status_if_pending, json{{"job", job.id}, {"state", to_string(job.state)}, {"revision", job.revision}});
  }

  ApiResponse solve(Session& s, std::unique_lock<std::mutex>& lock, std::string_view body) {
    if (!s.table) throw ApiError{409, "empty_session", "session has no performance table"};
    json req;
    try {
      req = body.empty() ? json::object() : json::parse(body);
    } catch (const json::exception& e) {
      throw ApiError{422, "invalid_params", fmt::format("request is not valid JSON: {}", e.what())};
    }
    auto [config, key] = read_request(req, *s.table);
    const bool wait = req.value("wait", false);

    std::shared_ptr<Job> job;
    if (const auto it = s.cache.find(key); it != s.cache.end()) {
      job = s.jobs.at(it->second);
    } else {
      job = std::make_shared<Job>();
      job->id = fresh_id();
      job->revision = s.revision;
      job->config = std::move(config);
      job->config.solver = options.solver;
      job->table = *s.table;
      job->statements = s.statements;
      s.jobs.emplace(job->id, job);
      s.cache.emplace(key, job->id);
      s.queue.push_back(job);
      s.changed.notify_all();
    }
    if (wait)
      s.changed.wait(lock, [&] { return s.stopping || job->state == JobState::done || job->state == JobState::failed; });
    return job_view(*job, 202);
  }

  ApiResponse status(Session& s, std::string_view job_id) {
    const auto it = s.jobs.find(std::string(job_id));
    if (it == s.jobs.end()) throw ApiError{404, "not_found", fmt::format("no job {}", job_id)};
    const Job& job = *it->second;
    json out{{"job", job.id},
             {"state", to_string(job.state)},
             {"revision", job.revision},
             {"stale", job.revision != s.revision},
             {"partial_sets", job.partial_sets}};
    if (job.state == JobState::failed) out["error"] = {{"code", job.error.code}, {"message", job.error.message}};
    return json_response(200, out);
  }

  ApiResponse report(Session& s, std::string_view job_id) {
    const auto it = s.jobs.find(std::string(job_id));
    if (it == s.jobs.end()) throw ApiError{404, "not_found", fmt::format("no job {}", job_id)};
    const Job& job = *it->second;
    if (job.revision != s.revision)
      throw ApiError{409, "stale_revision",
                     fmt::format("job {} solved revision {}; the session is at revision {}", job.id, job.revision,
                                 s.revision)};
    return job_view(job, 202);
  }

  ApiResponse get_session(Session& s) {
    json out{{"id", s.id}, {"revision", s.revision}, {"statements", statements_json(s.statements)}};
    out["table"] = s.table ? table_echo(*s.table) : json(nullptr);
    return json_response(200, out);
  }

  ApiResponse dispatch(std::string_view method, std::string_view path, std::string_view body) {
    const auto seg = segments(path);
    if (seg.empty() || seg[0] != "sessions") throw ApiError{404, "no_route", fmt::format("no route {}", path)};
    if (seg.size() == 1) {
      if (method != "POST") throw ApiError{405, "method_not_allowed", "use POST /sessions"};
      std::lock_guard lock(mutex);
      auto s = add_session(fresh_id());
      return json_response(201, json{{"id", s->id}, {"revision", 0}});
    }
    auto session = find(seg[1]);
    std::unique_lock lock(session->mutex);
    Session& s = *session;
    const auto route = [&](std::initializer_list<std::string_view> names, std::string_view verb) {
      if (seg.size() != names.size() + 2) return false;
      std::size_t k = 2;
      for (auto n : names) {
        if (!n.empty() && seg[k] != n) return false;
        ++k;
      }
      if (method != verb) throw ApiError{405, "method_not_allowed", fmt::format("{} not allowed on {}", method, path)};
      return true;
    };
    if (seg.size() == 2 && method == "GET") return get_session(s);
    if (seg.size() == 3 && seg[2] == "table" && route({"table"}, "PUT")) return put_table(s, body);
    if (seg.size() == 3 && seg[2] == "statements") {
      if (method == "PUT") return put_statements(s, body);
      if (method == "POST") return add_statement(s, body);
      throw ApiError{405, "method_not_allowed", fmt::format("{} not allowed on {}", method, path)};
    }
    if (seg.size() == 4 && seg[2] == "statements" && route({"statements", ""}, "DELETE"))
      return remove_statement(s, seg[3]);
    if (seg.size() == 3 && seg[2] == "solve" && route({"solve"}, "POST")) return solve(s, lock, body);
    if (seg.size() == 5 && seg[2] == "solve" && seg[4] == "status" && route({"solve", "", "status"}, "GET"))
      return status(s, seg[3]);
    if (seg.size() == 4 && seg[2] == "report" && route({"report", ""}, "GET")) return report(s, seg[3]);
    throw ApiError{404, "no_route", fmt::format("no route {}", path)};
  }
};

SessionService::SessionService(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  if (impl_->options.snapshot && std::filesystem::exists(*impl_->options.snapshot))
    load_snapshot(*impl_->options.snapshot);
}

SessionService::~SessionService() {
  if (impl_->options.snapshot) {
    try {
      save_snapshot(*impl_->options.snapshot);
    } catch (const std::exception&) {
      // Destructors must not throw; the previous snapshot stays in place.
    }
  }
}

ApiResponse SessionService::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    return impl_->dispatch(method, path, body);
  } catch (...) {
    return error_response(classify(std::current_exception()));
  }
}

void SessionService::save_snapshot(const std::filesystem::path& path) const {
  json doc{{"sessions", json::array()}};
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(impl_->mutex);
    for (const auto& [id, s] : impl_->sessions) all.push_back(s);
  }
  for (const auto& s : all) {
    std::lock_guard lock(s->mutex);
    doc["sessions"].push_back({{"id", s->id},
                               {"revision", s->revision},
                               {"table", s->table ? json(s->table_csv) : json(nullptr)},
                               {"statements", write_preferences(s->statements)}});
  }
  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write {}", tmp.string()));
    out << doc.dump(2);
  }
  std::filesystem::rename(tmp, path);
}

void SessionService::load_snapshot(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw InputError(fmt::format("{}: snapshot is not valid JSON: {}", path.string(), e.what()));
  }
  std::lock_guard lock(impl_->mutex);
  try {
    for (const auto& entry : doc.at("sessions")) {
      const auto id = entry.at("id").get<std::string>();
      if (impl_->sessions.contains(id)) continue;
      auto s = impl_->add_session(id);
      std::lock_guard session_lock(s->mutex);
      s->revision = entry.at("revision").get<long>();
      if (!entry.at("table").is_null()) {
        s->table_csv = entry["table"].get<std::string>();
        s->table = parse_performance_csv(s->table_csv, "snapshot");
      }
      s->statements = parse_preferences(entry.at("statements").get<std::string>(), s->table ? &*s->table : nullptr,
                                        "snapshot");
    }
  } catch (const json::exception& e) {
    throw InputError(fmt::format("{}: malformed snapshot: {}", path.string(), e.what()));
  }
}

std::size_t SessionService::session_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->sessions.size();
}

}  // namespace prefsel::service
