// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#include "evqa/server.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace evqa {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string now_iso() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(ms.count()));
  return buf;
}

// Write-then-rename so readers only ever see complete files.
void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw EvalError("storage", "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw EvalError("storage", "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EvalError("storage", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

json report_json(const TaskReport& r) {
  return json::parse(render_report(r, ReportFormat::Json));
}

TaskReport report_from_json(const json& j) {
  TaskReport r;
  r.task = parse_task(j.value("task", "tc")).value_or(Task::TC);
  r.model = j.value("model", "");
  if (j.contains("parameters")) {
    const json& p = j["parameters"];
    r.params.tau = p.value("tau", 0.75);
    r.params.theta = p.value("theta", 0.5);
    if (p.contains("policy")) {
      const json& pol = p["policy"];
      r.params.policy.casefold = pol.value("casefold", true);
      r.params.policy.collapse_whitespace = pol.value("collapse_whitespace", true);
      r.params.policy.strip_edges = pol.value("strip_edges", true);
    }
    if (p.contains("seed")) r.seed = p["seed"].get<std::uint64_t>();
  }
  if (j.contains("mono")) {
    const json& m = j["mono"];
    if (m.contains("en")) r.mono_en = m["en"].get<double>();
    if (m.contains("zh")) r.mono_zh = m["zh"].get<double>();
  }
  auto num = [](const json& v) { return v.is_null() ? 0.0 : v.get<double>(); };
  if (j.contains("bi")) {
    const json& b = j["bi"];
    r.bi.en = num(b.value("en", json()));
    r.bi.ch = num(b.value("ch", json()));
    r.bi.s = num(b.value("short", json()));
    r.bi.l = num(b.value("long", json()));
    r.bi.acc = num(b.value("acc", json()));
  }
  if (j.contains("counts")) {
    const json& c = j["counts"];
    r.bi.n_en = c.value("en", 0);
    r.bi.n_ch = c.value("ch", 0);
    r.bi.n_s = c.value("short", 0);
    r.bi.n_l = c.value("long", 0);
    r.bi.n = c.value("total", 0);
  }
  if (j.contains("delta_r") && !j["delta_r"].is_null()) {
    r.delta_r = j["delta_r"].get<double>();
  }
  r.unanswered = j.value("unanswered", 0);
  return r;
}

ValidationReport validation_from_json(const json& j) {
  ValidationReport rep;
  auto load = [](const json& arr, std::vector<Issue>& out) {
    for (const json& i : arr) {
      out.push_back({i.value("locator", ""), i.value("rule", ""),
                     i.value("message", "")});
    }
  };
  if (j.contains("errors")) load(j["errors"], rep.errors);
  if (j.contains("warnings")) load(j["warnings"], rep.warnings);
  if (j.contains("counts")) {
    for (auto it = j["counts"].begin(); it != j["counts"].end(); ++it) {
      rep.counts[it.key()] = it.value().get<std::int64_t>();
    }
  }
  return rep;
}

json record_json(const SubmissionRecord& r) {
  json out;
  out["submission_id"] = r.submission_id;
  out["model_name"] = r.model_name;
  out["task"] = std::string(task_name(r.task));
  out["received_at"] = r.received_at;
  out["status"] = std::string(submission_status_name(r.status));
  if (r.report) out["report"] = report_json(*r.report);
  if (r.failure) out["failure"] = json::parse(validation_to_json(*r.failure));
  return out;
}

SubmissionRecord record_from_json(const json& j) {
  SubmissionRecord r;
  r.submission_id = j.value("submission_id", "");
  r.model_name = j.value("model_name", "");
  r.task = parse_task(j.value("task", "tc")).value_or(Task::TC);
  r.received_at = j.value("received_at", "");
  const std::string status = j.value("status", "received");
  if (status == "validating") r.status = SubmissionStatus::Validating;
  else if (status == "scoring") r.status = SubmissionStatus::Scoring;
  else if (status == "scored") r.status = SubmissionStatus::Scored;
  else if (status == "rejected") r.status = SubmissionStatus::Rejected;
  else r.status = SubmissionStatus::Received;
  if (j.contains("report")) r.report = report_from_json(j["report"]);
  if (j.contains("failure")) r.failure = validation_from_json(j["failure"]);
  return r;
}

json error_body(const std::string& code, const std::string& message,
                json details = json::object()) {
  json out;
  out["code"] = code;
  out["message"] = message;
  out["details"] = std::move(details);
  return out;
}

int http_status_for(const std::string& code) {
  if (code == "unknown_task" || code == "malformed_request" || code == "invalid_grid") return 400;
  if (code == "unauthorized") return 401;
  if (code == "not_found") return 404;
  if (code == "payload_too_large") return 413;
  if (code == "rate_limited") return 429;
  return 500;
}

}  // namespace

std::string_view submission_status_name(SubmissionStatus s) {
  switch (s) {
    case SubmissionStatus::Received:
      return "received";
    case SubmissionStatus::Validating:
      return "validating";
    case SubmissionStatus::Scoring:
      return "scoring";
    case SubmissionStatus::Scored:
      return "scored";
    case SubmissionStatus::Rejected:
      return "rejected";
  }
  return "received";
}

ServerConfig load_server_config(const std::filesystem::path& path) {
  ServerConfig cfg;
  json doc;
  try {
    doc = json::parse(slurp(path));
  } catch (const json::parse_error& e) {
    throw EvalError("bad_config", std::string("config parse error: ") + e.what());
  }
  cfg.host = doc.value("host", cfg.host);
  cfg.port = doc.value("port", cfg.port);
  cfg.ground_truth = doc.value("ground_truth", std::string());
  cfg.data_dir = doc.value("data_dir", cfg.data_dir.string());
  cfg.tau = doc.value("tau", cfg.tau);
  cfg.theta = doc.value("theta", cfg.theta);
  if (doc.contains("policy")) {
    const json& p = doc["policy"];
    cfg.policy.casefold = p.value("casefold", true);
    cfg.policy.collapse_whitespace = p.value("collapse_whitespace", true);
    cfg.policy.strip_edges = p.value("strip_edges", true);
  }
  if (doc.contains("tokens")) {
    for (const json& t : doc["tokens"]) cfg.tokens.push_back(t.get<std::string>());
  }
  cfg.rate_limit_per_day = doc.value("rate_limit_per_day", cfg.rate_limit_per_day);
  cfg.workers = doc.value("workers", cfg.workers);
  cfg.max_payload_bytes = doc.value("max_payload_bytes", cfg.max_payload_bytes);
  cfg.page_size = doc.value("page_size", cfg.page_size);
  if (cfg.ground_truth.empty()) {
    throw EvalError("bad_config", "config requires 'ground_truth'");
  }
  return cfg;
}

// --- SubmissionStore ---------------------------------------------------------

SubmissionStore::SubmissionStore(std::filesystem::path data_dir)
    : root_(std::move(data_dir)) {
  fs::create_directories(root_ / "payloads");
  fs::create_directories(root_ / "meta");
  fs::create_directories(root_ / "results");
  // Continue the id sequence after the largest one on disk.
  for (const auto& entry : fs::directory_iterator(root_ / "meta")) {
    const std::string stem = entry.path().stem().string();
    const auto dash = stem.find('-');
    if (dash == std::string::npos) continue;
    const auto dash2 = stem.find('-', dash + 1);
    if (dash2 == std::string::npos) continue;
    const std::uint64_t seq =
        std::strtoull(stem.substr(dash + 1, dash2 - dash - 1).c_str(), nullptr, 10);
    seq_ = std::max(seq_, seq);
  }
}

std::string SubmissionStore::create(const std::string& payload, Task task,
                                    const std::string& model_name) {
  std::lock_guard lock(mu_);
  const std::string received_at = now_iso();
  const auto millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
  const std::uint64_t seq = ++seq_;
  char id[64];
  std::snprintf(id, sizeof(id), "%013lld-%06" PRIu64,
                static_cast<long long>(millis), seq);

  atomic_write(root_ / "payloads" / (std::string(id) + ".json"), payload);
  SubmissionRecord rec;
  rec.submission_id = id;
  rec.model_name = model_name;
  rec.task = task;
  rec.received_at = received_at;
  rec.status = SubmissionStatus::Received;
  atomic_write(root_ / "meta" / (std::string(id) + ".json"),
               record_json(rec).dump(2));
  return id;
}

void SubmissionStore::advance_status(const std::string& id, SubmissionStatus status) {
  std::lock_guard lock(mu_);
  const fs::path meta = root_ / "meta" / (id + ".json");
  if (!fs::exists(meta)) return;
  SubmissionRecord rec = record_from_json(json::parse(slurp(meta)));
  if (static_cast<int>(status) <= static_cast<int>(rec.status)) return;
  rec.status = status;
  atomic_write(meta, record_json(rec).dump(2));
}

void SubmissionStore::publish(const SubmissionRecord& final_record) {
  std::lock_guard lock(mu_);
  atomic_write(root_ / "results" / (final_record.submission_id + ".json"),
               record_json(final_record).dump(2));
}

std::optional<SubmissionRecord> SubmissionStore::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  const fs::path result = root_ / "results" / (id + ".json");
  const fs::path meta = root_ / "meta" / (id + ".json");
  try {
    if (fs::exists(result)) return record_from_json(json::parse(slurp(result)));
    if (fs::exists(meta)) return record_from_json(json::parse(slurp(meta)));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return std::nullopt;
}

std::string SubmissionStore::payload(const std::string& id) const {
  std::lock_guard lock(mu_);
  return slurp(root_ / "payloads" / (id + ".json"));
}

std::vector<SubmissionRecord> SubmissionStore::terminal_records() const {
  std::lock_guard lock(mu_);
  std::vector<SubmissionRecord> out;
  for (const auto& entry : fs::directory_iterator(root_ / "results")) {
    if (entry.path().extension() != ".json") continue;
    try {
      out.push_back(record_from_json(json::parse(slurp(entry.path()))));
    } catch (const std::exception&) {
      // Unparseable result files are skipped rather than taking down the
      // whole service.
    }
  }
  return out;
}

std::vector<std::string> SubmissionStore::pending() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_ / "meta")) {
    if (entry.path().extension() != ".json") continue;
    const std::string id = entry.path().stem().string();
    if (!fs::exists(root_ / "results" / (id + ".json"))) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- EvalService --------------------------------------------------------------

struct EvalService::Http {
  httplib::Server svr;
  std::thread thread;
  int port = 0;
};

EvalService::EvalService(ServerConfig config, bool start_workers)
    : config_(std::move(config)), store_(config_.data_dir) {
  auto loaded = load_dataset(config_.ground_truth);
  if (!loaded.report.ok()) {
    throw EvalError("invalid_ground_truth",
                    "ground truth failed validation: " +
                        validation_to_text(loaded.report));
  }
  ground_truth_ = std::move(loaded.dataset);

  for (SubmissionRecord& rec : store_.terminal_records()) {
    records_.emplace(rec.submission_id, std::move(rec));
  }
  std::vector<std::string> backlog = store_.pending();
  for (const std::string& id : backlog) {
    if (auto rec = store_.get(id)) {
      records_.emplace(id, std::move(*rec));
    }
  }

  if (start_workers) {
    int n = config_.workers > 0
                ? config_.workers
                : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    for (int i = 0; i < n; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }
  for (const std::string& id : backlog) enqueue(id);
}

EvalService::~EvalService() { stop(); }

void EvalService::enqueue(const std::string& id) {
  {
    std::lock_guard lock(queue_mu_);
    queue_.push_back(id);
  }
  queue_cv_.notify_one();
}

std::string EvalService::submit(const std::string& payload,
                                const std::string& task_str,
                                const std::string& model_name) {
  if (payload.size() > config_.max_payload_bytes) {
    throw EvalError("payload_too_large",
                    "payload exceeds " + std::to_string(config_.max_payload_bytes) +
                        " bytes");
  }
  const auto task = parse_task(task_str);
  if (!task) {
    throw EvalError("unknown_task", "task must be one of clc, lc, tc");
  }
  const std::string id =
      store_.create(payload, *task, model_name.empty() ? "unnamed" : model_name);
  if (auto rec = store_.get(id)) {
    std::unique_lock lock(records_mu_);
    records_.emplace(id, std::move(*rec));
  }
  enqueue(id);
  return id;
}

std::optional<SubmissionRecord> EvalService::status(const std::string& id) const {
  std::shared_lock lock(records_mu_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<LeaderboardEntry> EvalService::leaderboard(Task task, int page,
                                                       int* total) const {
  std::vector<LeaderboardEntry> all;
  {
    std::shared_lock lock(records_mu_);
    for (const auto& [id, rec] : records_) {
      if (rec.status != SubmissionStatus::Scored || rec.task != task || !rec.report) {
        continue;
      }
      LeaderboardEntry e;
      e.model_name = rec.model_name;
      e.task = rec.task;
      e.acc = rec.report->bi.acc;
      e.delta_r = rec.report->delta_r;
      e.submission_id = rec.submission_id;
      e.received_at = rec.received_at;
      e.report = *rec.report;
      all.push_back(std::move(e));
    }
  }
  std::sort(all.begin(), all.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (a.acc != b.acc) return a.acc > b.acc;
    if (a.received_at != b.received_at) return a.received_at < b.received_at;
    return a.submission_id < b.submission_id;
  });
  for (std::size_t i = 0; i < all.size(); ++i) all[i].rank = static_cast<int>(i) + 1;
  if (total) *total = static_cast<int>(all.size());

  if (page < 1) page = 1;
  const std::size_t begin = static_cast<std::size_t>(page - 1) * config_.page_size;
  if (begin >= all.size()) return {};
  const std::size_t end = std::min(all.size(), begin + config_.page_size);
  return {all.begin() + begin, all.begin() + end};
}

bool EvalService::idle() const {
  std::lock_guard lock(queue_mu_);
  return queue_.empty() && in_flight_.load() == 0;
}

void EvalService::worker_loop() {
  while (true) {
    std::string id;
    {
      std::unique_lock lock(queue_mu_);
      queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;  // queued work stays durable for the next start
      id = queue_.front();
      queue_.pop_front();
      ++in_flight_;
    }
    try {
      score_one(id);
    } catch (const std::exception&) {
      // score_one publishes failures itself; a throw here means storage
      // trouble, and the submission stays pending for a restart.
    }
    --in_flight_;
  }
}

void EvalService::score_one(const std::string& id) {
  auto meta = store_.get(id);
  if (!meta || meta->status == SubmissionStatus::Scored ||
      meta->status == SubmissionStatus::Rejected) {
    return;
  }
  SubmissionRecord rec = *meta;

  auto set_status = [&](SubmissionStatus s) {
    store_.advance_status(id, s);
    rec.status = s;
    std::unique_lock lock(records_mu_);
    records_[id] = rec;
  };

  set_status(SubmissionStatus::Validating);
  const std::string payload = store_.payload(id);
  auto loaded = parse_submission(payload, ground_truth_, rec.task, {});
  if (!loaded.report.ok()) {
    rec.status = SubmissionStatus::Rejected;
    rec.failure = std::move(loaded.report);
    store_.publish(rec);
    std::unique_lock lock(records_mu_);
    records_[id] = rec;
    return;
  }

  set_status(SubmissionStatus::Scoring);
  ScoreParams params;
  params.tau = config_.tau;
  params.theta = config_.theta;
  params.policy = config_.policy;
  params.threads = 1;  // the pool parallelizes across submissions
  loaded.bundle.model_name = rec.model_name;
  try {
    TaskReport report = score_submission(ground_truth_, loaded.bundle, params);
    rec.status = SubmissionStatus::Scored;
    rec.report = std::move(report);
  } catch (const EvalError& e) {
    ValidationReport failure;
    failure.error("$", e.code(), e.what());
    rec.status = SubmissionStatus::Rejected;
    rec.failure = std::move(failure);
  }
  store_.publish(rec);  // atomic: the entry appears fully scored or not at all
  std::unique_lock lock(records_mu_);
  records_[id] = rec;
}

bool EvalService::check_token(const std::string& token) const {
  if (config_.tokens.empty()) return true;
  return std::find(config_.tokens.begin(), config_.tokens.end(), token) !=
         config_.tokens.end();
}

bool EvalService::rate_limit_ok(const std::string& token) {
  if (config_.tokens.empty() || config_.rate_limit_per_day <= 0) return true;
  const auto now = std::chrono::system_clock::now();
  const auto window = std::chrono::hours(24);
  std::lock_guard lock(rate_mu_);
  auto& hits = rate_[token];
  while (!hits.empty() && now - hits.front() > window) hits.pop_front();
  if (static_cast<int>(hits.size()) >= config_.rate_limit_per_day) return false;
  hits.push_back(now);
  return true;
}

int EvalService::start_http() {
  http_ = std::make_unique<Http>();
  httplib::Server& svr = http_->svr;
  svr.set_payload_max_length(config_.max_payload_bytes + (1u << 16));

  auto reply_error = [](httplib::Response& res, const std::string& code,
                        const std::string& message) {
    res.status = http_status_for(code);
    res.set_content(error_body(code, message).dump(), "application/json");
  };

  svr.Get("/api/v1/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });

  svr.Post("/api/v1/submissions", [this, reply_error](const httplib::Request& req,
                                                      httplib::Response& res) {
    const std::string token = req.get_header_value("X-Auth-Token");
    if (!check_token(token)) {
      reply_error(res, "unauthorized", "missing or invalid API token");
      return;
    }
    if (!rate_limit_ok(token)) {
      reply_error(res, "rate_limited", "daily submission limit reached");
      return;
    }
    if (!req.has_file("file") || !req.has_file("task")) {
      reply_error(res, "malformed_request",
                  "multipart fields 'file' and 'task' are required");
      return;
    }
    const std::string payload = req.get_file_value("file").content;
    const std::string task = req.get_file_value("task").content;
    const std::string model =
        req.has_file("model_name") ? req.get_file_value("model_name").content : "";
    try {
      const std::string id = submit(payload, task, model);
      json out;
      out["submission_id"] = id;
      res.status = 202;
      res.set_content(out.dump(), "application/json");
    } catch (const EvalError& e) {
      reply_error(res, e.code(), e.what());
    }
  });

  svr.Get(R"(/api/v1/submissions/([^/]+))",
          [this, reply_error](const httplib::Request& req, httplib::Response& res) {
            const auto rec = status(req.matches[1]);
            if (!rec) {
              reply_error(res, "not_found", "unknown submission id");
              return;
            }
            res.set_content(record_json(*rec).dump(2), "application/json");
          });

  svr.Get("/api/v1/leaderboard", [this, reply_error](const httplib::Request& req,
                                                     httplib::Response& res) {
    const auto task = parse_task(req.get_param_value("task"));
    if (!task) {
      reply_error(res, "unknown_task", "query parameter task=clc|lc|tc is required");
      return;
    }
    int page = 1;
    if (req.has_param("page")) {
      page = std::max(1, std::atoi(req.get_param_value("page").c_str()));
    }
    int total = 0;
    const auto entries = leaderboard(*task, page, &total);
    json out;
    out["task"] = std::string(task_name(*task));
    out["page"] = page;
    out["page_size"] = config_.page_size;
    out["total"] = total;
    json arr = json::array();
    for (const LeaderboardEntry& e : entries) {
      json node;
      node["rank"] = e.rank;
      node["model_name"] = e.model_name;
      node["acc"] = e.acc;
      if (e.delta_r) node["delta_r"] = *e.delta_r;
      node["submission_id"] = e.submission_id;
      node["received_at"] = e.received_at;
      node["report"] = report_json(e.report);
      arr.push_back(std::move(node));
    }
    out["entries"] = std::move(arr);
    res.set_content(out.dump(2), "application/json");
  });

  int port = config_.port;
  if (port == 0) {
    port = svr.bind_to_any_port(config_.host);
    if (port < 0) throw EvalError("bind_failed", "cannot bind to a port");
  } else if (!svr.bind_to_port(config_.host, port)) {
    throw EvalError("bind_failed", "cannot bind " + config_.host + ":" +
                                       std::to_string(port));
  }
  http_->port = port;
  http_->thread = std::thread([this] { http_->svr.listen_after_bind(); });
  svr.wait_until_ready();
  return port;
}

void EvalService::wait_http() {
  if (http_ && http_->thread.joinable()) http_->thread.join();
}

void EvalService::stop() {
  if (http_) {
    http_->svr.stop();
    if (http_->thread.joinable()) http_->thread.join();
    http_.reset();
  }
  stopping_ = true;
  queue_cv_.notify_all();
  for (std::thread& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
}

}  // namespace evqa
