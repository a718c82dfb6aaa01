// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#include "evqa/oracles.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "evqa/rng.hpp"
#include "parallel.hpp"

namespace evqa {
namespace {

// Enumeration is capped to the tokens closest to the ground truth; beyond
// this the ordered-sequence search grows factorially.
constexpr std::size_t kMaxTokensPerImage = 25;

struct Chosen {
  std::string answer;
  std::optional<QuadBox> evidence;
};

TaskReport zero_report(Task task, const Dataset& dataset, const ScoreParams& params) {
  TaskReport r;
  r.task = task;
  r.params = params;
  SliceMeans m;
  for (const QARecord& rec : dataset.records) {
    ++m.n;
    (rec.language == LanguageTag::English ? m.n_en : m.n_ch) += 1;
    (answer_class(rec.answer, rec.language) == AnswerClass::Short ? m.n_s
                                                                  : m.n_l) += 1;
  }
  r.bi = m;
  r.unanswered = static_cast<int>(dataset.size());
  if (task == Task::CLC) {
    r.mono_en = 0.0;
    r.mono_zh = 0.0;
  }
  return r;
}

// Wraps per-question choices into a three-track bundle and scores it, or
// reports all zeros when nothing was chosen at all.
OracleResult finalize(std::string name, const Dataset& dataset,
                      const std::vector<std::optional<Chosen>>& chosen,
                      const ScoreParams& params,
                      std::optional<std::uint64_t> seed) {
  OracleResult result;
  result.name = name;
  SubmissionBundle& bundle = result.submission;
  bundle.task = Task::CLC;
  bundle.model_name = std::move(name);
  auto& mono_en = bundle.tracks[Track::MonoEn];
  auto& mono_zh = bundle.tracks[Track::MonoZh];
  auto& bi = bundle.tracks[Track::Bi];

  result.choices.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const QARecord& rec = dataset.records[i];
    OracleChoice choice;
    choice.question_id = rec.question_id;
    if (chosen[i]) {
      Prediction p;
      p.question_id = rec.question_id;
      p.answer = chosen[i]->answer;
      p.evidence = chosen[i]->evidence;
      bi.push_back(p);
      (rec.language == LanguageTag::English ? mono_en : mono_zh).push_back(p);

      const QuestionScore qs = eve_score(rec, p, params);
      choice.answer = p.answer;
      choice.evidence = p.evidence;
      choice.s_l = qs.s_l;
      choice.s_e = qs.s_e;
      choice.iou = qs.verdict ? qs.verdict->iou : 0.0;
    }
    result.choices.push_back(std::move(choice));
  }

  if (bi.empty()) {
    result.tc_report = zero_report(Task::TC, dataset, params);
    result.clc_report = zero_report(Task::CLC, dataset, params);
  } else {
    result.tc_report = score_tc(dataset, bi, params);
    result.tc_report.model = bundle.model_name;
    result.clc_report =
        score_clc(dataset, bundle, params, result.tc_report.bi.acc);
  }
  result.tc_report.seed = seed;
  result.clc_report.seed = seed;
  return result;
}

QuadBox enclosing_rect(const std::vector<const OcrToken*>& tokens) {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const OcrToken* t : tokens) {
    for (const geom::Point& p : t->box.vertices()) {
      min_x = std::min(min_x, p.x());
      max_x = std::max(max_x, p.x());
      min_y = std::min(min_y, p.y());
      max_y = std::max(max_y, p.y());
    }
  }
  return QuadBox::make_or_throw({geom::Point{min_x, min_y},
                                 geom::Point{max_x, min_y},
                                 geom::Point{max_x, max_y},
                                 geom::Point{min_x, max_y}});
}

}  // namespace

std::string_view vocabulary_kind_name(Vocabulary::Kind k) {
  return k == Vocabulary::Kind::SV ? "sv" : "lv";
}

std::map<LanguageTag, Vocabulary> build_vocabulary(
    const std::vector<std::pair<std::string, LanguageTag>>& train_answers,
    Vocabulary::Kind kind, const text::NormalizationPolicy& policy) {
  std::map<LanguageTag, std::map<std::string, int>> counts;
  for (const auto& [answer, lang] : train_answers) {
    const std::string norm = text::normalize(answer, policy);
    if (!norm.empty()) ++counts[lang][norm];
  }
  std::map<LanguageTag, Vocabulary> out;
  for (auto& [lang, by_answer] : counts) {
    Vocabulary v;
    v.kind = kind;
    v.language = lang;
    for (auto& [answer, n] : by_answer) {
      if (kind == Vocabulary::Kind::LV || n >= 2) v.entries.insert(answer);
    }
    out.emplace(lang, std::move(v));
  }
  return out;
}

OracleResult vocab_upper_bound(const std::map<LanguageTag, Vocabulary>& vocab,
                               const Dataset& dataset, const ScoreParams& params) {
  std::vector<std::optional<Chosen>> chosen(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const QARecord& rec = dataset.records[i];
    auto it = vocab.find(rec.language);
    if (it == vocab.end()) continue;
    const std::string norm = text::normalize(rec.answer, params.policy);
    if (it->second.contains(norm)) {
      chosen[i] = Chosen{norm, rec.evidence};  // perfect evidence assumed
    }
  }
  std::string name = "vocab-ub-";
  name += vocabulary_kind_name(vocab.empty() ? Vocabulary::Kind::LV
                                             : vocab.begin()->second.kind);
  return finalize(std::move(name), dataset, chosen, params, std::nullopt);
}

OracleResult ocr_upper_bound(const OcrIndex& ocr, const Dataset& dataset,
                             const ScoreParams& params, int max_tokens) {
  if (max_tokens < 1) {
    throw EvalError("invalid_parameter", "max_tokens must be >= 1");
  }
  std::vector<std::optional<Chosen>> chosen(dataset.size());
  detail::parallel_for(dataset.size(), params.threads, [&](std::size_t qi) {
    const QARecord& rec = dataset.records[qi];
    const std::vector<OcrToken>* tokens = ocr.tokens_for(rec.image_id);
    if (!tokens || tokens->empty()) return;

    const std::u32string gt = text::normalize_u32(
        text::decode_utf8(rec.answer), params.policy);
    std::vector<std::u32string> norm(tokens->size());
    for (std::size_t i = 0; i < tokens->size(); ++i) {
      norm[i] = text::normalize_u32(text::decode_utf8((*tokens)[i].text),
                                    params.policy);
    }

    std::vector<std::size_t> order(tokens->size());
    std::iota(order.begin(), order.end(), 0);
    if (order.size() > kMaxTokensPerImage) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return text::normalized_levenshtein(norm[a], gt) <
                                text::normalized_levenshtein(norm[b], gt);
                       });
      order.resize(kMaxTokensPerImage);
    }

    const bool english = rec.language == LanguageTag::English;
    struct Best {
      bool valid = false;
      double s_l = 0.0;
      double nl = 1.0;
      double iou = 0.0;
      std::u32string answer;
      std::vector<std::size_t> picks;
    } best;

    std::vector<std::size_t> picks;
    std::vector<char> used(tokens->size(), 0);
    std::u32string candidate;

    auto evidence_for = [&](const std::vector<std::size_t>& idxs) {
      if (idxs.size() == 1) return (*tokens)[idxs.front()].box;
      std::vector<const OcrToken*> ts;
      ts.reserve(idxs.size());
      for (std::size_t k : idxs) ts.push_back(&(*tokens)[k]);
      return enclosing_rect(ts);
    };

    auto consider = [&]() {
      const double nl = text::normalized_levenshtein(candidate, gt);
      const double s_l = nl < params.tau ? 1.0 - nl : 0.0;
      if (!best.valid || s_l > best.s_l) {
        best = {true, s_l, nl, iou(rec.evidence, evidence_for(picks)),
                candidate, picks};
        return;
      }
      if (s_l == best.s_l) {
        const double cand_iou = iou(rec.evidence, evidence_for(picks));
        if (cand_iou > best.iou) {
          best = {true, s_l, nl, cand_iou, candidate, picks};
        }
      }
    };

    // DFS over ordered sequences without repetition, shorter prefixes
    // first. Once the candidate is at least as long as the ground truth,
    // every extension has NL >= (len'-|gt|)/len'; extensions are cut when
    // that bound can no longer beat the incumbent (nor tie a positive s_l).
    auto dfs = [&](auto&& self) -> void {
      if (picks.size() >= static_cast<std::size_t>(max_tokens)) return;
      if (best.valid && candidate.size() >= gt.size() && !gt.empty()) {
        const double grown =
            static_cast<double>(candidate.size() + (english ? 2 : 1));
        const double bound = (grown - static_cast<double>(gt.size())) / grown;
        if (bound >= params.tau || bound > best.nl) return;
      }
      for (std::size_t k : order) {
        if (used[k]) continue;
        used[k] = 1;
        const std::size_t mark = candidate.size();
        if (!candidate.empty() && english) candidate.push_back(U' ');
        candidate.append(norm[k]);
        picks.push_back(k);
        consider();
        self(self);
        picks.pop_back();
        candidate.resize(mark);
        used[k] = 0;
      }
    };
    dfs(dfs);

    if (best.valid) {
      chosen[qi] = Chosen{text::encode_utf8(best.answer),
                          evidence_for(best.picks)};
    }
  });
  return finalize("ocr-ub", dataset, chosen, params, std::nullopt);
}

OracleResult random_baseline(const OcrIndex& ocr, const Dataset& dataset,
                             const ScoreParams& params, std::uint64_t seed) {
  std::vector<std::optional<Chosen>> chosen(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const QARecord& rec = dataset.records[i];
    const std::vector<OcrToken>* tokens = ocr.tokens_for(rec.image_id);
    if (!tokens || tokens->empty()) continue;
    auto stream = rng::question_stream(seed, rec.question_id);
    const OcrToken& pick = (*tokens)[rng::bounded(stream, tokens->size())];
    chosen[i] = Chosen{pick.text, pick.box};
  }
  return finalize("random", dataset, chosen, params, seed);
}

std::vector<Prediction> attach_evidence(std::vector<Prediction> predictions,
                                        const Dataset& dataset, const OcrIndex& ocr,
                                        std::uint64_t seed,
                                        const text::NormalizationPolicy& policy) {
  for (Prediction& p : predictions) {
    if (!p.answer) continue;
    const QARecord* rec = dataset.find(p.question_id);
    if (!rec) continue;
    const std::vector<OcrToken>* tokens = ocr.tokens_for(rec->image_id);
    if (!tokens || tokens->empty()) {
      p.evidence = std::nullopt;
      continue;
    }
    const std::string needle = text::normalize(*p.answer, policy);
    std::vector<std::size_t> exact;
    std::size_t best_idx = 0;
    double best_nl = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tokens->size(); ++i) {
      const std::string tok = text::normalize((*tokens)[i].text, policy);
      if (tok == needle) exact.push_back(i);
      const double nl = text::normalized_levenshtein(tok, needle);
      if (nl < best_nl) {
        best_nl = nl;
        best_idx = i;
      }
    }
    if (!exact.empty()) {
      auto stream = rng::question_stream(seed, p.question_id);
      best_idx = exact[rng::bounded(stream, exact.size())];
    }
    p.evidence = (*tokens)[best_idx].box;
  }
  return predictions;
}

}  // namespace evqa
