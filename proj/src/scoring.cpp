// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#include "evqa/scoring.hpp"

#include <algorithm>
#include <unordered_map>

#include "parallel.hpp"

namespace evqa {
namespace {

void check_params(const ScoreParams& p) {
  if (!(p.tau > 0.0 && p.tau <= 1.0)) {
    throw EvalError("invalid_parameter", "tau must be in (0,1]");
  }
  if (!(p.theta > 0.0 && p.theta <= 1.0)) {
    throw EvalError("invalid_parameter", "theta must be in (0,1]");
  }
}

// question_id -> prediction, rejecting duplicates and ids outside the
// ground truth. An empty intersection with the dataset is an error for the
// primary (bi) track; mono tracks may legitimately cover nothing.
std::unordered_map<std::string, const Prediction*> index_predictions(
    const Dataset& dataset, const std::vector<Prediction>& predictions,
    std::string_view track_label, bool allow_empty) {
  std::unordered_map<std::string, const Prediction*> by_id;
  by_id.reserve(predictions.size());
  for (const Prediction& p : predictions) {
    if (!dataset.find(p.question_id)) {
      throw EvalError("unknown_question",
                      "prediction references unknown question_id '" +
                          p.question_id + "'");
    }
    if (!by_id.emplace(p.question_id, &p).second) {
      throw EvalError("duplicate_prediction",
                      "duplicate prediction for question_id '" +
                          p.question_id + "'");
    }
  }
  if (by_id.empty() && !allow_empty) {
    throw EvalError("empty_submission",
                    std::string(track_label) +
                        " track covers zero ground-truth questions");
  }
  return by_id;
}

struct SliceAccum {
  double en = 0, ch = 0, s = 0, l = 0, all = 0;
  int n_en = 0, n_ch = 0, n_s = 0, n_l = 0, n = 0;

  void add(LanguageTag lang, AnswerClass cls, double score) {
    all += score;
    ++n;
    if (lang == LanguageTag::English) {
      en += score;
      ++n_en;
    } else {
      ch += score;
      ++n_ch;
    }
    if (cls == AnswerClass::Short) {
      s += score;
      ++n_s;
    } else {
      l += score;
      ++n_l;
    }
  }

  SliceMeans means() const {
    auto pct = [](double sum, int n) { return n == 0 ? 0.0 : 100.0 * sum / n; };
    SliceMeans m;
    m.en = pct(en, n_en);
    m.ch = pct(ch, n_ch);
    m.s = pct(s, n_s);
    m.l = pct(l, n_l);
    m.acc = pct(all, n);
    m.n_en = n_en;
    m.n_ch = n_ch;
    m.n_s = n_s;
    m.n_l = n_l;
    m.n = n;
    return m;
  }
};

enum class Mode { AnswerOnly, EvidenceOnly, Full };

double question_value(const QARecord& rec, const Prediction* pred, Mode mode,
                      const ScoreParams& params, QuestionScore* detail) {
  QuestionScore qs;
  qs.question_id = rec.question_id;
  qs.language = rec.language;
  qs.answer_class = answer_class(rec.answer, rec.language);
  double value = 0.0;
  if (pred) {
    if (mode != Mode::EvidenceOnly && pred->answer) {
      const auto sim = text::similarity_score(
          text::normalize(*pred->answer, params.policy),
          text::normalize(rec.answer, params.policy), params.tau);
      qs.s_l = sim.value;
    }
    switch (mode) {
      case Mode::AnswerOnly:
        qs.s_e = qs.s_l;
        value = qs.s_l;
        break;
      case Mode::EvidenceOnly: {
        const auto verdict =
            classify_evidence(rec.evidence, pred->evidence, params.theta);
        qs.verdict = verdict;
        value = verdict.iou;
        break;
      }
      case Mode::Full: {
        const auto verdict =
            classify_evidence(rec.evidence, pred->evidence, params.theta);
        qs.verdict = verdict;
        qs.s_e = verdict.label == EvidenceLabel::Sufficient ? qs.s_l : 0.0;
        value = qs.s_e;
        break;
      }
    }
  }
  if (detail) *detail = std::move(qs);
  return value;
}

struct TrackScore {
  SliceMeans slices;
  int unanswered = 0;
};

// Scores one prediction list over a subset of the dataset (all records for
// which `keep` is true). Accumulation order is the dataset order, so the
// result is bitwise identical for any thread count.
template <typename Keep>
TrackScore score_track(const Dataset& dataset,
                       const std::vector<Prediction>& predictions, Mode mode,
                       const ScoreParams& params, Keep keep,
                       std::string_view track_label, bool allow_empty = false) {
  const auto by_id =
      index_predictions(dataset, predictions, track_label, allow_empty);
  const std::size_t n = dataset.size();
  std::vector<double> values(n, 0.0);
  std::vector<char> matched(n, 0);
  detail::parallel_for(n, params.threads, [&](std::size_t i) {
    const QARecord& rec = dataset.records[i];
    if (!keep(rec)) return;
    auto it = by_id.find(rec.question_id);
    const Prediction* pred = it == by_id.end() ? nullptr : it->second;
    matched[i] = pred != nullptr;
    values[i] = question_value(rec, pred, mode, params, nullptr);
  });
  TrackScore out;
  SliceAccum acc;
  for (std::size_t i = 0; i < n; ++i) {
    const QARecord& rec = dataset.records[i];
    if (!keep(rec)) continue;
    acc.add(rec.language, answer_class(rec.answer, rec.language), values[i]);
    if (!matched[i]) ++out.unanswered;
  }
  out.slices = acc.means();
  return out;
}

constexpr auto keep_all = [](const QARecord&) { return true; };

}  // namespace

std::string_view evidence_label_name(EvidenceLabel l) {
  switch (l) {
    case EvidenceLabel::Incorrect:
      return "incorrect";
    case EvidenceLabel::Insufficient:
      return "insufficient";
    case EvidenceLabel::Sufficient:
      return "sufficient";
  }
  return "incorrect";
}

EvidenceVerdict classify_evidence(const QuadBox& gt_box,
                                  const std::optional<QuadBox>& pred_box,
                                  double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw EvalError("invalid_parameter", "theta must be in (0,1]");
  }
  EvidenceVerdict v;
  v.theta = theta;
  if (!pred_box) {
    // Covers both absent evidence and boxes dropped as degenerate upstream.
    return v;
  }
  v.iou = iou(gt_box, *pred_box);
  if (v.iou <= 0.0) {
    v.label = EvidenceLabel::Incorrect;
  } else if (v.iou < theta) {
    v.label = EvidenceLabel::Insufficient;
  } else {
    v.label = EvidenceLabel::Sufficient;
  }
  return v;
}

QuestionScore eve_score(const QARecord& record, const Prediction& pred,
                        const ScoreParams& params) {
  check_params(params);
  if (record.question_id != pred.question_id) {
    throw EvalError("unknown_question", "prediction '" + pred.question_id +
                                            "' does not match record '" +
                                            record.question_id + "'");
  }
  QuestionScore qs;
  question_value(record, &pred, Mode::Full, params, &qs);
  return qs;
}

TaskReport score_tc(const Dataset& dataset, const std::vector<Prediction>& predictions,
                    const ScoreParams& params) {
  check_params(params);
  TaskReport report;
  report.task = Task::TC;
  report.params = params;
  const auto ts = score_track(dataset, predictions, Mode::AnswerOnly, params,
                              keep_all, "bi");
  report.bi = ts.slices;
  report.unanswered = ts.unanswered;
  return report;
}

TaskReport score_lc(const Dataset& dataset, const std::vector<Prediction>& predictions,
                    const ScoreParams& params) {
  check_params(params);
  TaskReport report;
  report.task = Task::LC;
  report.params = params;
  const auto ts = score_track(dataset, predictions, Mode::EvidenceOnly, params,
                              keep_all, "bi");
  report.bi = ts.slices;
  report.unanswered = ts.unanswered;
  return report;
}

TaskReport score_clc(const Dataset& dataset, const SubmissionBundle& bundle,
                     const ScoreParams& params,
                     std::optional<double> paired_tc_acc) {
  check_params(params);
  const std::vector<Prediction>* bi = bundle.track(Track::Bi);
  const std::vector<Prediction>* mono_en = bundle.track(Track::MonoEn);
  const std::vector<Prediction>* mono_zh = bundle.track(Track::MonoZh);
  if (!bi || !mono_en || !mono_zh) {
    throw EvalError("missing_track",
                    "CLC requires mono_en, mono_zh and bi tracks");
  }
  auto check_language = [&](const std::vector<Prediction>& preds, LanguageTag lang,
                            Track track) {
    for (const Prediction& p : preds) {
      const QARecord* rec = dataset.find(p.question_id);
      if (rec && rec->language != lang) {
        throw EvalError("track_mismatch",
                        std::string(track_name(track)) + " track covers " +
                            std::string(language_code(rec->language)) +
                            " question '" + p.question_id + "'");
      }
    }
  };
  check_language(*mono_en, LanguageTag::English, Track::MonoEn);
  check_language(*mono_zh, LanguageTag::Chinese, Track::MonoZh);

  TaskReport report;
  report.task = Task::CLC;
  report.model = bundle.model_name;
  report.params = params;

  const auto bi_score =
      score_track(dataset, *bi, Mode::Full, params, keep_all, "bi");
  report.bi = bi_score.slices;
  report.unanswered = bi_score.unanswered;

  const auto en_score = score_track(
      dataset, *mono_en, Mode::Full, params,
      [](const QARecord& r) { return r.language == LanguageTag::English; },
      "mono_en", /*allow_empty=*/true);
  const auto zh_score = score_track(
      dataset, *mono_zh, Mode::Full, params,
      [](const QARecord& r) { return r.language == LanguageTag::Chinese; },
      "mono_zh", /*allow_empty=*/true);
  report.mono_en = en_score.slices.acc;
  report.mono_zh = zh_score.slices.acc;
  report.unanswered += en_score.unanswered + zh_score.unanswered;

  if (paired_tc_acc) {
    report.delta_r = reasonable_score(report.bi.acc, *paired_tc_acc);
  }
  return report;
}

TaskReport score_submission(const Dataset& dataset, const SubmissionBundle& bundle,
                            const ScoreParams& params) {
  TaskReport report;
  switch (bundle.task) {
    case Task::TC: {
      const auto* bi = bundle.track(Track::Bi);
      if (!bi) throw EvalError("missing_track", "TC requires the bi track");
      report = score_tc(dataset, *bi, params);
      break;
    }
    case Task::LC: {
      const auto* bi = bundle.track(Track::Bi);
      if (!bi) throw EvalError("missing_track", "LC requires the bi track");
      report = score_lc(dataset, *bi, params);
      break;
    }
    case Task::CLC: {
      const auto* bi = bundle.track(Track::Bi);
      if (!bi) throw EvalError("missing_track", "CLC requires the bi track");
      const TaskReport paired = score_tc(dataset, *bi, params);
      report = score_clc(dataset, bundle, params, paired.bi.acc);
      break;
    }
  }
  report.model = bundle.model_name;
  return report;
}

std::optional<double> reasonable_score(double clc_acc, double tc_acc) {
  if (tc_acc == 0.0) return std::nullopt;
  return clc_acc / tc_acc;
}

std::string_view sweep_parameter_name(SweepParameter p) {
  return p == SweepParameter::Tau ? "tau" : "theta";
}

std::vector<std::pair<double, TaskReport>> sweep(const Dataset& dataset,
                                                 const SubmissionBundle& bundle,
                                                 SweepParameter parameter,
                                                 const std::vector<double>& grid,
                                                 const ScoreParams& params) {
  if (grid.empty()) {
    throw EvalError("invalid_grid", "sweep grid is empty");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= 1.0)) {
      throw EvalError("invalid_grid", "grid values must be in (0,1]");
    }
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw EvalError("invalid_grid", "grid must be strictly increasing");
    }
  }
  std::vector<std::pair<double, TaskReport>> out;
  out.reserve(grid.size());
  for (double v : grid) {
    ScoreParams p = params;
    (parameter == SweepParameter::Tau ? p.tau : p.theta) = v;
    out.emplace_back(v, score_submission(dataset, bundle, p));
  }
  return out;
}

}  // namespace evqa
