// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVQA_SERVER_HPP
#define EVQA_SERVER_HPP

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <thread>

#include "evqa/ingest.hpp"

// Online evaluation service: accepts submissions over HTTP, scores them
// against a held-out ground truth with frozen parameters, and publishes a
// leaderboard. Persistence is a file-backed store with atomic publishes, so
// a crash never leaves a half-visible entry.
namespace evqa {

struct ServerConfig {
  std::string host = "0.0.0.0";
  int port = 8080;  // 0 binds an ephemeral port
  std::filesystem::path ground_truth;
  std::filesystem::path data_dir = "evqa-data";
  double tau = 0.75;
  double theta = 0.5;
  text::NormalizationPolicy policy;
  std::vector<std::string> tokens;  // empty = open server (no auth, no limits)
  int rate_limit_per_day = 10;
  int workers = 0;  // 0 = hardware concurrency
  std::size_t max_payload_bytes = 32u << 20;
  int page_size = 50;
};

ServerConfig load_server_config(const std::filesystem::path& path);

enum class SubmissionStatus { Received, Validating, Scoring, Scored, Rejected };

std::string_view submission_status_name(SubmissionStatus s);

struct SubmissionRecord {
  std::string submission_id;
  std::string model_name;
  Task task = Task::TC;
  std::string received_at;  // ISO 8601 UTC, millisecond precision
  SubmissionStatus status = SubmissionStatus::Received;
  std::optional<TaskReport> report;          // scored
  std::optional<ValidationReport> failure;   // rejected
};

struct LeaderboardEntry {
  int rank = 0;
  std::string model_name;
  Task task = Task::TC;
  double acc = 0.0;
  std::optional<double> delta_r;
  std::string submission_id;
  std::string received_at;
  TaskReport report;
};

// Directory layout: payloads/<id>.json (raw bytes), meta/<id>.json (status),
// results/<id>.json (terminal record, written once via rename). Only results
// files feed the leaderboard.
class SubmissionStore {
 public:
  explicit SubmissionStore(std::filesystem::path data_dir);

  std::string create(const std::string& payload, Task task,
                     const std::string& model_name);
  // Status moves forward only; stale transitions are ignored.
  void advance_status(const std::string& id, SubmissionStatus status);
  void publish(const SubmissionRecord& final_record);

  std::optional<SubmissionRecord> get(const std::string& id) const;
  std::string payload(const std::string& id) const;
  std::vector<SubmissionRecord> terminal_records() const;
  // Submissions with no terminal record yet (recovered work after restart).
  std::vector<std::string> pending() const;

 private:
  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::uint64_t seq_ = 0;
};

class EvalService {
 public:
  // Loads the ground truth eagerly; throws EvalError("invalid_ground_truth")
  // when it fails validation. start_workers=false leaves queued submissions
  // unprocessed (used to exercise restart recovery).
  explicit EvalService(ServerConfig config, bool start_workers = true);
  ~EvalService();

  EvalService(const EvalService&) = delete;
  EvalService& operator=(const EvalService&) = delete;

  // Core operations (the HTTP layer is a thin wrapper over these).
  std::string submit(const std::string& payload, const std::string& task_str,
                     const std::string& model_name);
  std::optional<SubmissionRecord> status(const std::string& id) const;
  std::vector<LeaderboardEntry> leaderboard(Task task, int page,
                                            int* total = nullptr) const;

  // Binds and serves on a background thread; returns the bound port.
  int start_http();
  void wait_http();  // blocks until stop() is called
  // Graceful: stops accepting, finishes in-flight scoring, leaves queued
  // work durable for the next start.
  void stop();

  bool idle() const;  // no queued or in-flight scoring work
  const ServerConfig& config() const { return config_; }

 private:
  void worker_loop();
  void score_one(const std::string& id);
  void enqueue(const std::string& id);
  bool check_token(const std::string& token) const;
  bool rate_limit_ok(const std::string& token);

  ServerConfig config_;
  Dataset ground_truth_;
  SubmissionStore store_;

  mutable std::shared_mutex records_mu_;
  std::map<std::string, SubmissionRecord> records_;

  mutable std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<std::string> queue_;
  std::atomic<int> in_flight_{0};
  std::atomic<bool> stopping_{false};
  std::vector<std::thread> workers_;

  std::mutex rate_mu_;
  std::map<std::string, std::deque<std::chrono::system_clock::time_point>> rate_;

  struct Http;  // hides the httplib dependency from this header
  std::unique_ptr<Http> http_;
};

}  // namespace evqa

#endif  // EVQA_SERVER_HPP
