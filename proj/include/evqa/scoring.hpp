// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVQA_SCORING_HPP
#define EVQA_SCORING_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evqa/core.hpp"

namespace evqa {

// Tri-state evidence sufficiency: Incorrect at IoU 0, Insufficient below
// theta, Sufficient at or above it.
enum class EvidenceLabel { Incorrect, Insufficient, Sufficient };

std::string_view evidence_label_name(EvidenceLabel l);

struct EvidenceVerdict {
  double iou = 0.0;
  double theta = 0.5;
  EvidenceLabel label = EvidenceLabel::Incorrect;
  bool degenerate = false;  // diagnostic: predicted box failed validation
};

// Missing or degenerate predicted boxes classify Incorrect (IoU 0) instead
// of failing the run.
EvidenceVerdict classify_evidence(const QuadBox& gt_box,
                                  const std::optional<QuadBox>& pred_box,
                                  double theta);

struct ScoreParams {
  double tau = 0.75;   // answer penalty threshold
  double theta = 0.5;  // evidence sufficiency threshold
  text::NormalizationPolicy policy;
  int threads = 1;  // per-question scoring fan-out; results are identical
                    // for any value
};

struct QuestionScore {
  std::string question_id;
  LanguageTag language = LanguageTag::English;
  AnswerClass answer_class = AnswerClass::Short;  // of the ground truth
  double s_l = 0.0;
  std::optional<EvidenceVerdict> verdict;  // absent under TC
  double s_e = 0.0;                        // == s_l without evidence gating
};

// Full evidence-gated score for one question: a right answer only counts
// when its evidence is Sufficient.
QuestionScore eve_score(const QARecord& record, const Prediction& pred,
                        const ScoreParams& params);

// Per-track slice means, as percentages, with member counts (a slice with
// n == 0 renders as absent).
struct SliceMeans {
  double en = 0, ch = 0, s = 0, l = 0, acc = 0;
  int n_en = 0, n_ch = 0, n_s = 0, n_l = 0, n = 0;
};

struct TaskReport {
  Task task = Task::TC;
  std::string model;
  ScoreParams params;
  std::optional<double> mono_en;  // monolingual tracks, CLC only
  std::optional<double> mono_zh;
  SliceMeans bi;
  std::optional<double> delta_r;
  int unanswered = 0;  // ground-truth questions with no prediction
  std::optional<std::uint64_t> seed;  // pinned for seeded baselines
};

// Answer-only scoring (s_l per question). Missing predictions score 0 and
// count as unanswered.
TaskReport score_tc(const Dataset& dataset, const std::vector<Prediction>& predictions,
                    const ScoreParams& params);

// Localization-only scoring: per-question IoU means; answers are ignored.
TaskReport score_lc(const Dataset& dataset, const std::vector<Prediction>& predictions,
                    const ScoreParams& params);

// Evidence-gated scoring over all three tracks. Mono tracks are scored on
// their language subsets; delta_r is embedded when a paired TC accuracy is
// supplied. Throws EvalError: "empty_submission", "duplicate_prediction",
// "unknown_question", "track_mismatch", "missing_track".
TaskReport score_clc(const Dataset& dataset, const SubmissionBundle& bundle,
                     const ScoreParams& params,
                     std::optional<double> paired_tc_acc = std::nullopt);

// Dispatch on bundle.task; CLC automatically pairs a TC run of the same bi
// track (same tau) so the report carries delta_r.
TaskReport score_submission(const Dataset& dataset, const SubmissionBundle& bundle,
                            const ScoreParams& params);

// CLC_all / TC_all. Not applicable (nullopt) when tc_acc is 0.
std::optional<double> reasonable_score(double clc_acc, double tc_acc);

enum class SweepParameter { Tau, Theta };

std::string_view sweep_parameter_name(SweepParameter p);

// One report per grid point, grid strictly increasing in (0,1].
std::vector<std::pair<double, TaskReport>> sweep(const Dataset& dataset,
                                                 const SubmissionBundle& bundle,
                                                 SweepParameter parameter,
                                                 const std::vector<double>& grid,
                                                 const ScoreParams& params);

}  // namespace evqa

#endif  // EVQA_SCORING_HPP
