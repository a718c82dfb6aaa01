// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures and independent test-side oracles. The oracles here stay
// deliberately naive (recursive edit distance, Monte-Carlo area sampling,
// analytic rectangle overlap) so they cannot share a bug with the library.

#ifndef EVQA_TESTS_FIXTURES_HPP
#define EVQA_TESTS_FIXTURES_HPP

#include <map>
#include <random>
#include <string>
#include <vector>

#include "evqa/core.hpp"
#include "evqa/scoring.hpp"

namespace fixtures {

using evqa::Dataset;
using evqa::LanguageTag;
using evqa::OcrIndex;
using evqa::OcrToken;
using evqa::Prediction;
using evqa::QARecord;
using evqa::QuadBox;
using evqa::SubmissionBundle;
using evqa::Task;
using evqa::Track;

inline evqa::geom::Quad rect(double x0, double y0, double x1, double y1) {
  return {evqa::geom::Point{x0, y0}, evqa::geom::Point{x1, y0},
          evqa::geom::Point{x1, y1}, evqa::geom::Point{x0, y1}};
}

inline QuadBox rect_box(double x0, double y0, double x1, double y1) {
  return QuadBox::make_or_throw(rect(x0, y0, x1, y1));
}

// --- memoized recursive Levenshtein oracle ----------------------------------

inline std::size_t lev_oracle_impl(const std::u32string& a, const std::u32string& b,
                                   std::size_t i, std::size_t j,
                                   std::map<std::pair<std::size_t, std::size_t>, std::size_t>& memo) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  const auto key = std::make_pair(i, j);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  std::size_t best;
  if (a[i] == b[j]) {
    best = lev_oracle_impl(a, b, i + 1, j + 1, memo);
  } else {
    const std::size_t del = lev_oracle_impl(a, b, i + 1, j, memo);
    const std::size_t ins = lev_oracle_impl(a, b, i, j + 1, memo);
    const std::size_t sub = lev_oracle_impl(a, b, i + 1, j + 1, memo);
    best = 1 + std::min({del, ins, sub});
  }
  memo.emplace(key, best);
  return best;
}

inline std::size_t levenshtein_oracle(const std::string& a, const std::string& b) {
  const std::u32string ua = evqa::text::decode_utf8(a);
  const std::u32string ub = evqa::text::decode_utf8(b);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  return lev_oracle_impl(ua, ub, 0, 0, memo);
}

// --- Monte-Carlo IoU oracle --------------------------------------------------

inline bool point_in_quad(const evqa::geom::Quad& q, double x, double y) {
  // Crossing-number test.
  bool inside = false;
  for (std::size_t i = 0, j = 3; i < 4; j = i++) {
    const double xi = q[i].x(), yi = q[i].y();
    const double xj = q[j].x(), yj = q[j].y();
    if ((yi > y) != (yj > y) &&
        x < (xj - xi) * (y - yi) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

inline double monte_carlo_iou(const evqa::geom::Quad& a, const evqa::geom::Quad& b,
                              int samples, std::uint32_t seed) {
  double min_x = a[0].x(), max_x = a[0].x(), min_y = a[0].y(), max_y = a[0].y();
  for (const auto& q : {a, b}) {
    for (const auto& p : q) {
      min_x = std::min(min_x, p.x());
      max_x = std::max(max_x, p.x());
      min_y = std::min(min_y, p.y());
      max_y = std::max(max_y, p.y());
    }
  }
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dx(min_x, max_x), dy(min_y, max_y);
  long long inter = 0, uni = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = dx(gen), y = dy(gen);
    const bool in_a = point_in_quad(a, x, y);
    const bool in_b = point_in_quad(b, x, y);
    inter += in_a && in_b;
    uni += in_a || in_b;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Analytic axis-aligned rectangle IoU, for fixtures built from rect().
inline double rect_iou(double ax0, double ay0, double ax1, double ay1,
                       double bx0, double by0, double bx1, double by1) {
  const double iw = std::max(0.0, std::min(ax1, bx1) - std::max(ax0, bx0));
  const double ih = std::max(0.0, std::min(ay1, by1) - std::max(ay0, by0));
  const double inter = iw * ih;
  const double uni = (ax1 - ax0) * (ay1 - ay0) + (bx1 - bx0) * (by1 - by0) - inter;
  return uni <= 0 ? 0.0 : inter / uni;
}

// --- synthetic bilingual datasets --------------------------------------------

// n records, alternating English/Chinese, evidence rectangles laid out on a
// grid (10 per row). English answers alternate one and two words; Chinese
// answers are whitespace-free CJK runs.
inline Dataset synthetic_dataset(int n) {
  static const char* en_short[] = {"708", "coke", "exit", "open", "2012"};
  static const char* en_long[] = {"coca cola", "red bull", "no parking"};
  static const char* zh_answers[] = {"北京", "上海大学", "出口", "欢迎光临"};
  static const char* en_questions[] = {
      "what is the room number", "what brand is the drink",
      "what does the sign say"};
  static const char* zh_questions[] = {"这是什么牌子", "门牌号是多少"};

  Dataset ds;
  for (int i = 0; i < n; ++i) {
    const bool english = i % 2 == 0;
    const double x = 10.0 * (i % 10);
    const double y = 10.0 * (i / 10);
    QARecord rec{
        "q" + std::to_string(i),
        "img" + std::to_string(i / 2),  // two questions per image
        english ? LanguageTag::English : LanguageTag::Chinese,
        english ? en_questions[i % 3] : zh_questions[i % 2],
        english ? (i % 4 == 0 ? en_long[i % 3] : en_short[i % 5])
                : zh_answers[i % 4],
        rect_box(x + 1, y + 1, x + 8, y + 7),
        {},
    };
    ds.records.push_back(std::move(rec));
  }
  ds.rebuild_index();
  return ds;
}

// Echoes the ground truth: answers and evidence boxes copied verbatim.
inline SubmissionBundle perfect_bundle(const Dataset& ds, Task task) {
  SubmissionBundle bundle;
  bundle.task = task;
  bundle.model_name = "perfect";
  std::vector<Prediction>& bi = bundle.tracks[Track::Bi];
  for (const QARecord& r : ds.records) {
    Prediction p;
    p.question_id = r.question_id;
    if (task != Task::LC) p.answer = r.answer;
    if (task != Task::TC) p.evidence = r.evidence;
    bi.push_back(p);
  }
  if (task == Task::CLC) {
    for (const QARecord& r : ds.records) {
      Prediction p;
      p.question_id = r.question_id;
      p.answer = r.answer;
      p.evidence = r.evidence;
      (r.language == LanguageTag::English ? bundle.tracks[Track::MonoEn]
                                          : bundle.tracks[Track::MonoZh])
          .push_back(p);
    }
  }
  return bundle;
}

// One token per record matching its answer and box, plus a decoy per image.
inline OcrIndex matching_ocr(const Dataset& ds) {
  OcrIndex ocr;
  for (const QARecord& r : ds.records) {
    auto& tokens = ocr.images[r.image_id];
    tokens.push_back(OcrToken{r.answer, r.evidence, 0.9});
  }
  for (auto& [image_id, tokens] : ocr.images) {
    tokens.push_back(OcrToken{"decoy", fixtures::rect_box(500, 500, 520, 510), 0.5});
  }
  return ocr;
}

// Random fixtures for the fuzz/monotonicity suites: predictions overlap the
// ground truth to varying degrees and answers carry varying edit distances.
struct Fuzzed {
  Dataset dataset;
  SubmissionBundle bundle;
};

inline Fuzzed fuzzed_fixture(std::uint32_t seed, int n = 24) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> shift(0.0, 12.0);
  std::uniform_int_distribution<int> edit(0, 3);
  std::uniform_int_distribution<int> drop(0, 9);

  Fuzzed f;
  f.dataset = synthetic_dataset(n);
  f.bundle.task = Task::CLC;
  f.bundle.model_name = "fuzz";
  auto& bi = f.bundle.tracks[Track::Bi];
  auto& mono_en = f.bundle.tracks[Track::MonoEn];
  auto& mono_zh = f.bundle.tracks[Track::MonoZh];
  for (int i = 0; i < n; ++i) {
    const QARecord& r = f.dataset.records[i];
    if (drop(gen) == 0) continue;  // leave some questions unanswered
    Prediction p;
    p.question_id = r.question_id;
    std::string ans = r.answer;
    for (int e = edit(gen); e > 0 && !ans.empty(); --e) ans.pop_back();
    p.answer = ans;
    const double dx = shift(gen);
    const double x = 10.0 * (i % 10), y = 10.0 * (i / 10);
    p.evidence = rect_box(x + 1 + dx, y + 1, x + 8 + dx, y + 7);
    bi.push_back(p);
    (r.language == LanguageTag::English ? mono_en : mono_zh).push_back(p);
  }
  if (bi.empty()) {  // keep the bundle scoreable
    Prediction p;
    p.question_id = f.dataset.records[0].question_id;
    p.answer = f.dataset.records[0].answer;
    p.evidence = f.dataset.records[0].evidence;
    bi.push_back(p);
    mono_en.push_back(p);
  }
  if (mono_en.empty()) {
    Prediction p;
    p.question_id = f.dataset.records[0].question_id;
    p.answer = f.dataset.records[0].answer;
    mono_en.push_back(p);
  }
  if (mono_zh.empty()) {
    Prediction p;
    p.question_id = f.dataset.records[1].question_id;
    p.answer = f.dataset.records[1].answer;
    mono_zh.push_back(p);
  }
  return f;
}

}  // namespace fixtures

#endif  // EVQA_TESTS_FIXTURES_HPP
