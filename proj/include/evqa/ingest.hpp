// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVQA_INGEST_HPP
#define EVQA_INGEST_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "evqa/scoring.hpp"

// Parsing, validation, corpus statistics and report rendering. All file I/O
// is UTF-8 JSON; writers emit a canonical field order so load -> serialize
// -> load is a fixed point.
namespace evqa {

struct Issue {
  std::string locator;  // e.g. "questions[3].evidence"
  std::string rule;     // stable id, e.g. "quad.vertex_count"
  std::string message;
};

// Any error rejects the file for scoring; warnings never block.
struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  std::map<std::string, std::int64_t> counts;

  bool ok() const { return errors.empty(); }
  void error(std::string locator, std::string rule, std::string message) {
    errors.push_back({std::move(locator), std::move(rule), std::move(message)});
  }
  void warn(std::string locator, std::string rule, std::string message) {
    warnings.push_back({std::move(locator), std::move(rule), std::move(message)});
  }
};

// Strict mode (default) keeps record-level problems as errors; lenient mode
// downgrades them to warnings and skips the offending records. File-level
// problems (unreadable, not JSON, wrong schema root) stay fatal either way.
struct LoadOptions {
  bool lenient = false;
};

struct DatasetLoad {
  Dataset dataset;
  ValidationReport report;
};

DatasetLoad load_dataset(const std::filesystem::path& path, const LoadOptions& = {});
DatasetLoad parse_dataset(std::string_view json_text, const LoadOptions& = {});

struct SubmissionLoad {
  SubmissionBundle bundle;
  ValidationReport report;
};

// Validates against the ground truth: track coverage, per-task field
// requirements, unknown/duplicate question ids, track/language agreement.
SubmissionLoad load_submission(const std::filesystem::path& path, const Dataset& dataset,
                               Task task, const LoadOptions& = {});
SubmissionLoad parse_submission(std::string_view json_text, const Dataset& dataset,
                                Task task, const LoadOptions& = {});

struct OcrLoad {
  OcrIndex ocr;
  ValidationReport report;
};

OcrLoad load_ocr(const std::filesystem::path& path, const LoadOptions& = {});
OcrLoad parse_ocr(std::string_view json_text, const LoadOptions& = {});

std::string dataset_to_json(const Dataset& dataset);
std::string submission_to_json(const SubmissionBundle& bundle);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
void save_submission(const std::filesystem::path& path, const SubmissionBundle& bundle);

// --- corpus statistics ------------------------------------------------------

struct PrefixNode {
  std::int64_t count = 0;
  std::map<std::string, PrefixNode> children;
};

struct LanguageStats {
  std::int64_t question_count = 0;
  std::int64_t image_count = 0;
  std::map<int, std::int64_t> question_length_hist;  // token count -> n
  std::map<int, std::int64_t> answer_length_hist;
  PrefixNode question_prefixes;  // first-k-word tree
};

struct CorpusStats {
  std::map<LanguageTag, LanguageStats> languages;
  std::int64_t total_questions = 0;
  std::int64_t total_images = 0;
  int prefix_depth = 4;
  bool lexicon_used = false;
};

CorpusStats corpus_stats(const Dataset& dataset,
                         const text::Tokenizer& tokenizer = text::default_tokenizer(),
                         int prefix_depth = 4);

// --- rendering --------------------------------------------------------------

enum class ReportFormat { Json, Table, Csv };

std::string render_report(const TaskReport& report, ReportFormat format);

// Slice filter: "acc" (default), a slice name, or "all".
std::string sweep_to_csv(const std::vector<std::pair<double, TaskReport>>& curve,
                         const std::string& slice = "acc");

std::string stats_to_json(const CorpusStats& stats);
std::string stats_to_text(const CorpusStats& stats);

std::string validation_to_json(const ValidationReport& report);
std::string validation_to_text(const ValidationReport& report);

}  // namespace evqa

#endif  // EVQA_INGEST_HPP
