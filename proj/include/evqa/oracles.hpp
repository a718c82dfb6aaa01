// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVQA_ORACLES_HPP
#define EVQA_ORACLES_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "evqa/scoring.hpp"

// Non-learned baselines: vocabulary upper bounds, the OCR token-combination
// upper bound, the seeded random-token baseline, and evidence attachment for
// answer-only submissions. All are deterministic given (inputs, seed).
namespace evqa {

struct Vocabulary {
  enum class Kind { SV, LV };  // answers seen twice+ / all distinct answers
  Kind kind = Kind::LV;
  LanguageTag language = LanguageTag::English;
  std::set<std::string> entries;  // normalized

  bool contains(const std::string& normalized_answer) const {
    return entries.count(normalized_answer) > 0;
  }
};

std::string_view vocabulary_kind_name(Vocabulary::Kind k);

// One vocabulary per language present in the training answers. SV keeps
// answers that appeared more than once; LV keeps every distinct answer, so
// SV ⊆ LV.
std::map<LanguageTag, Vocabulary> build_vocabulary(
    const std::vector<std::pair<std::string, LanguageTag>>& train_answers,
    Vocabulary::Kind kind, const text::NormalizationPolicy& policy = {});

struct OracleChoice {
  std::string question_id;
  std::optional<std::string> answer;
  std::optional<QuadBox> evidence;
  double s_l = 0.0;
  double s_e = 0.0;
  double iou = 0.0;
};

// Per-question choices plus their aggregate reports. The submission carries
// mono_en/mono_zh/bi tracks (language-filtered copies), so oracle output can
// be re-scored or uploaded like any model's.
struct OracleResult {
  std::string name;
  SubmissionBundle submission;
  std::vector<OracleChoice> choices;
  TaskReport clc_report;
  TaskReport tc_report;
};

// Assumes every in-vocabulary answer is predicted exactly with perfect
// evidence; everything else is unanswered.
OracleResult vocab_upper_bound(const std::map<LanguageTag, Vocabulary>& vocab,
                               const Dataset& dataset, const ScoreParams& params);

// Best achievable score assembling answers from ordered sequences of up to
// max_tokens distinct OCR tokens per image (space-joined for English,
// concatenated for Chinese). Selection maximizes s_l, ties broken by higher
// evidence IoU. Images with more than 25 tokens are pruned to the 25 with
// the smallest NL against the ground truth before enumeration. Evidence is
// the token's own box for single tokens, the minimal axis-aligned box over
// the chosen quads otherwise.
OracleResult ocr_upper_bound(const OcrIndex& ocr, const Dataset& dataset,
                             const ScoreParams& params, int max_tokens = 4);

// Uniformly picks one OCR token (answer + box) per question. Per-question
// draws derive from (seed, question_id), so results are order-independent.
OracleResult random_baseline(const OcrIndex& ocr, const Dataset& dataset,
                             const ScoreParams& params, std::uint64_t seed);

// For answer-only predictions: an exact (normalized) token match gets one
// matching box chosen uniformly at random; otherwise the box of the token
// with the smallest NL, ties broken by earliest token order. Questions whose
// image has no tokens keep no evidence.
std::vector<Prediction> attach_evidence(std::vector<Prediction> predictions,
                                        const Dataset& dataset, const OcrIndex& ocr,
                                        std::uint64_t seed,
                                        const text::NormalizationPolicy& policy = {});

}  // namespace evqa

#endif  // EVQA_ORACLES_HPP
