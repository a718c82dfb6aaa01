// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front door: validate | score | oracle | sweep | stats | serve.
// Exit codes: 0 success, 1 validation/scoring failure, 2 usage error,
// 3 internal error. Low scores are still exit 0.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "evqa/ingest.hpp"
#include "evqa/oracles.hpp"
#include "evqa/server.hpp"

namespace {

namespace fs = std::filesystem;
using namespace evqa;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct GlobalFlags {
  bool json = false;
  bool quiet = false;
  int threads = 1;
};

std::atomic<bool> g_shutdown{false};

void handle_signal(int) { g_shutdown.store(true); }

void emit(const GlobalFlags& g, const std::string& text) {
  if (!g.quiet) std::cout << text;
}

int require_file(const std::string& path) {
  if (!fs::exists(path)) {
    std::cerr << "error: no such file: " << path << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

// Prints the validation report and returns the exit code for it.
int finish_validation(const GlobalFlags& g, const ValidationReport& rep) {
  emit(g, g.json ? validation_to_json(rep) : validation_to_text(rep));
  return rep.ok() ? kExitOk : kExitValidation;
}

std::optional<Dataset> load_gt_or_fail(const GlobalFlags& g, const std::string& path,
                                       bool lenient, int& exit_code) {
  if (int rc = require_file(path); rc != kExitOk) {
    exit_code = rc;
    return std::nullopt;
  }
  auto loaded = load_dataset(path, {lenient});
  if (!loaded.report.ok()) {
    std::cerr << "ground truth failed validation:\n"
              << validation_to_text(loaded.report);
    exit_code = kExitValidation;
    return std::nullopt;
  }
  if (!g.quiet && !loaded.report.warnings.empty() && !g.json) {
    std::cerr << loaded.report.warnings.size() << " ground-truth warnings\n";
  }
  exit_code = kExitOk;
  return std::move(loaded.dataset);
}

void write_or_print(const GlobalFlags& g, const std::string& out_path,
                    const std::string& content) {
  if (out_path.empty()) {
    emit(g, content);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw EvalError("file_write", "cannot write " + out_path);
  out << content;
}

ReportFormat parse_format(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  return ReportFormat::Table;
}

int run(int argc, char** argv) {
  CLI::App app{"evidence-grounded scene-text VQA evaluation toolkit"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_flag("--json", g.json, "machine-readable output");
  app.add_flag("--quiet", g.quiet, "suppress stdout reports");
  app.add_option("--threads", g.threads, "scoring worker threads (0 = auto)");

  // validate ------------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "validate a dataset, submission or OCR file");
  std::string v_dataset, v_submission, v_ocr, v_task = "clc";
  bool v_lenient = false;
  validate->add_option("--dataset", v_dataset, "dataset JSON (ground truth)");
  validate->add_option("--submission", v_submission, "submission JSON (requires --dataset)");
  validate->add_option("--ocr", v_ocr, "OCR tokens JSON");
  validate->add_option("--task", v_task, "task for submission checks (clc|lc|tc)");
  validate->add_flag("--lenient", v_lenient, "downgrade record errors to warnings");

  // score ---------------------------------------------------------------
  auto* score = app.add_subcommand("score", "score a submission against ground truth");
  std::string s_task, s_gt, s_pred, s_format = "table", s_out;
  double s_tau = 0.75, s_theta = 0.5;
  bool s_lenient = false;
  score->add_option("--task", s_task, "clc|lc|tc")->required();
  score->add_option("--gt", s_gt, "ground-truth dataset JSON")->required();
  score->add_option("--pred", s_pred, "submission JSON")->required();
  score->add_option("--tau", s_tau, "answer penalty threshold (default 0.75)");
  score->add_option("--theta", s_theta, "evidence IoU threshold (default 0.5)");
  score->add_option("--format", s_format, "json|table|csv");
  score->add_option("--out", s_out, "write the report here instead of stdout");
  score->add_flag("--lenient", s_lenient, "skip bad records instead of failing");

  // oracle ----------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "non-learned baselines and upper bounds");
  oracle->require_subcommand(1);
  std::string o_gt, o_train, o_ocr, o_kind = "sv", o_out_submission, o_format = "table";
  double o_tau = 0.75, o_theta = 0.5;
  std::uint64_t o_seed = 0;
  int o_max_tokens = 4;
  auto add_common = [&](CLI::App* sub, bool needs_report_only) {
    sub->add_option("--gt", o_gt, "dataset to evaluate on")->required();
    sub->add_option("--tau", o_tau, "answer penalty threshold");
    sub->add_option("--theta", o_theta, "evidence IoU threshold");
    sub->add_option("--out-submission", o_out_submission,
                    "also write the oracle's choices as a submission file");
    sub->add_option("--format", o_format, "json|table|csv");
    (void)needs_report_only;
  };
  auto* vocab_ub = oracle->add_subcommand("vocab-ub", "vocabulary upper bound");
  vocab_ub->add_option("--train", o_train, "training dataset (answer source)")->required();
  vocab_ub->add_option("--kind", o_kind, "sv|lv");
  add_common(vocab_ub, false);
  auto* ocr_ub = oracle->add_subcommand("ocr-ub", "OCR token-combination upper bound");
  ocr_ub->add_option("--ocr", o_ocr, "OCR tokens JSON")->required();
  ocr_ub->add_option("--max-tokens", o_max_tokens, "combination length cap (default 4)");
  add_common(ocr_ub, false);
  auto* random_sc = oracle->add_subcommand("random", "random OCR token baseline");
  random_sc->add_option("--ocr", o_ocr, "OCR tokens JSON")->required();
  random_sc->add_option("--seed", o_seed, "PRNG seed")->required();
  add_common(random_sc, false);

  // sweep -----------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "score over a parameter grid");
  std::string w_task, w_gt, w_pred, w_param = "tau", w_grid, w_out, w_slice = "acc";
  double w_tau = 0.75, w_theta = 0.5;
  sweep_cmd->add_option("--task", w_task, "clc|lc|tc")->required();
  sweep_cmd->add_option("--gt", w_gt)->required();
  sweep_cmd->add_option("--pred", w_pred)->required();
  sweep_cmd->add_option("--parameter", w_param, "tau|theta");
  sweep_cmd->add_option("--grid", w_grid, "comma-separated increasing values in (0,1]")->required();
  sweep_cmd->add_option("--tau", w_tau, "fixed tau while sweeping theta");
  sweep_cmd->add_option("--theta", w_theta, "fixed theta while sweeping tau");
  sweep_cmd->add_option("--slice", w_slice, "curve slice (acc, bi_en, ..., all)");
  sweep_cmd->add_option("--out", w_out, "CSV output path (default stdout)");

  // stats -----------------------------------------------------------------
  auto* stats_cmd = app.add_subcommand("stats", "corpus statistics");
  std::string t_dataset, t_lexicon;
  int t_prefix_depth = 4;
  stats_cmd->add_option("--dataset", t_dataset)->required();
  stats_cmd->add_option("--lexicon", t_lexicon, "one word per line, enables CJK segmentation");
  stats_cmd->add_option("--prefix-depth", t_prefix_depth, "question prefix tree depth");

  // serve -----------------------------------------------------------------
  auto* serve = app.add_subcommand("serve", "run the evaluation server");
  std::string r_config;
  serve->add_option("--config", r_config, "server config JSON (or $EVQA_CONFIG)");

  // Let --json/--quiet/--threads appear after the subcommand name too.
  for (CLI::App* sub : app.get_subcommands(nullptr)) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands(nullptr)) nested->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (validate->parsed()) {
    if (v_dataset.empty() && v_ocr.empty()) {
      std::cerr << "error: validate needs --dataset and/or --ocr/--submission\n";
      return kExitUsage;
    }
    if (!v_submission.empty() && v_dataset.empty()) {
      std::cerr << "error: --submission requires --dataset\n";
      return kExitUsage;
    }
    int rc = kExitOk;
    if (!v_ocr.empty()) {
      if (int frc = require_file(v_ocr); frc != kExitOk) return frc;
      rc = std::max(rc, finish_validation(g, load_ocr(v_ocr, {v_lenient}).report));
    }
    if (!v_dataset.empty() && v_submission.empty()) {
      if (int frc = require_file(v_dataset); frc != kExitOk) return frc;
      rc = std::max(rc, finish_validation(g, load_dataset(v_dataset, {v_lenient}).report));
    }
    if (!v_submission.empty()) {
      if (int frc = require_file(v_submission); frc != kExitOk) return frc;
      const auto task = parse_task(v_task);
      if (!task) {
        std::cerr << "error: unknown task '" << v_task << "'\n";
        return kExitUsage;
      }
      int gt_rc = kExitOk;
      auto gt = load_gt_or_fail(g, v_dataset, v_lenient, gt_rc);
      if (!gt) return gt_rc;
      rc = std::max(rc, finish_validation(
                            g, load_submission(v_submission, *gt, *task, {v_lenient}).report));
    }
    return rc;
  }

  if (score->parsed()) {
    const auto task = parse_task(s_task);
    if (!task) {
      std::cerr << "error: unknown task '" << s_task << "'\n";
      return kExitUsage;
    }
    if (int rc = require_file(s_pred); rc != kExitOk) return rc;
    int rc = kExitOk;
    auto gt = load_gt_or_fail(g, s_gt, s_lenient, rc);
    if (!gt) return rc;
    auto sub = load_submission(s_pred, *gt, *task, {s_lenient});
    if (!sub.report.ok()) {
      std::cerr << validation_to_text(sub.report);
      return kExitValidation;
    }
    if (!g.quiet && !sub.report.warnings.empty()) {
      std::cerr << validation_to_text(sub.report);
    }
    ScoreParams params;
    params.tau = s_tau;
    params.theta = s_theta;
    params.threads = g.threads;
    const TaskReport report = score_submission(*gt, sub.bundle, params);
    write_or_print(g, s_out,
                   render_report(report, g.json ? ReportFormat::Json
                                                : parse_format(s_format)));
    return kExitOk;
  }

  if (oracle->parsed()) {
    int rc = kExitOk;
    auto gt = load_gt_or_fail(g, o_gt, false, rc);
    if (!gt) return rc;
    ScoreParams params;
    params.tau = o_tau;
    params.theta = o_theta;
    params.threads = g.threads;

    OracleResult result;
    if (vocab_ub->parsed()) {
      int train_rc = kExitOk;
      auto train = load_gt_or_fail(g, o_train, false, train_rc);
      if (!train) return train_rc;
      const auto kind = o_kind == "lv" ? Vocabulary::Kind::LV : Vocabulary::Kind::SV;
      if (o_kind != "sv" && o_kind != "lv") {
        std::cerr << "error: --kind must be sv or lv\n";
        return kExitUsage;
      }
      std::vector<std::pair<std::string, LanguageTag>> answers;
      answers.reserve(train->size());
      for (const QARecord& r : train->records) answers.emplace_back(r.answer, r.language);
      if (answers.empty()) {
        std::cerr << "warning: training set is empty, vocabulary is empty\n";
      }
      result = vocab_upper_bound(build_vocabulary(answers, kind), *gt, params);
    } else if (ocr_ub->parsed() || random_sc->parsed()) {
      if (int frc = require_file(o_ocr); frc != kExitOk) return frc;
      auto ocr = load_ocr(o_ocr, {});
      if (!ocr.report.ok()) {
        std::cerr << validation_to_text(ocr.report);
        return kExitValidation;
      }
      result = ocr_ub->parsed()
                   ? ocr_upper_bound(ocr.ocr, *gt, params, o_max_tokens)
                   : random_baseline(ocr.ocr, *gt, params, o_seed);
    }

    if (!o_out_submission.empty()) {
      save_submission(o_out_submission, result.submission);
    }
    const auto format = g.json ? ReportFormat::Json : parse_format(o_format);
    std::string out = render_report(result.clc_report, format);
    out += render_report(result.tc_report, format);
    emit(g, out);
    return kExitOk;
  }

  if (sweep_cmd->parsed()) {
    const auto task = parse_task(w_task);
    if (!task) {
      std::cerr << "error: unknown task '" << w_task << "'\n";
      return kExitUsage;
    }
    std::vector<double> grid;
    {
      std::stringstream ss{w_grid};
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          grid.push_back(std::stod(item));
        } catch (const std::exception&) {
          std::cerr << "error: bad grid value '" << item << "'\n";
          return kExitUsage;
        }
      }
    }
    if (int rc = require_file(w_pred); rc != kExitOk) return rc;
    int rc = kExitOk;
    auto gt = load_gt_or_fail(g, w_gt, false, rc);
    if (!gt) return rc;
    auto sub = load_submission(w_pred, *gt, *task, {});
    if (!sub.report.ok()) {
      std::cerr << validation_to_text(sub.report);
      return kExitValidation;
    }
    ScoreParams params;
    params.tau = w_tau;
    params.theta = w_theta;
    params.threads = g.threads;
    const auto parameter =
        w_param == "theta" ? SweepParameter::Theta : SweepParameter::Tau;
    if (w_param != "tau" && w_param != "theta") {
      std::cerr << "error: --parameter must be tau or theta\n";
      return kExitUsage;
    }
    try {
      const auto curve = sweep(*gt, sub.bundle, parameter, grid, params);
      write_or_print(g, w_out, sweep_to_csv(curve, w_slice));
    } catch (const EvalError& e) {
      if (e.code() == "invalid_grid") {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
      }
      throw;
    }
    return kExitOk;
  }

  if (stats_cmd->parsed()) {
    int rc = kExitOk;
    auto gt = load_gt_or_fail(g, t_dataset, false, rc);
    if (!gt) return rc;
    text::Tokenizer tokenizer;
    if (!t_lexicon.empty()) {
      if (int frc = require_file(t_lexicon); frc != kExitOk) return frc;
      std::ifstream in(t_lexicon);
      std::vector<std::string> words;
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) words.push_back(line);
      }
      tokenizer = text::Tokenizer(std::move(words));
    }
    const CorpusStats stats = corpus_stats(*gt, tokenizer, t_prefix_depth);
    emit(g, g.json ? stats_to_json(stats) : stats_to_text(stats));
    return kExitOk;
  }

  if (serve->parsed()) {
    std::string config_path = r_config;
    if (config_path.empty()) {
      if (const char* env = std::getenv("EVQA_CONFIG")) config_path = env;
    }
    if (config_path.empty()) {
      std::cerr << "error: serve needs --config or $EVQA_CONFIG\n";
      return kExitUsage;
    }
    if (int frc = require_file(config_path); frc != kExitOk) return frc;
    EvalService service(load_server_config(config_path));
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    const int port = service.start_http();
    if (!g.quiet) {
      std::cerr << "listening on " << service.config().host << ":" << port << "\n";
    }
    while (!g_shutdown.load()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    service.stop();  // completes in-flight scoring
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const EvalError& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
