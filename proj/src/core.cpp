// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#include "evqa/core.hpp"

#include <algorithm>
#include <cmath>

namespace evqa {

std::string_view language_code(LanguageTag t) {
  return t == LanguageTag::English ? "en" : "zh";
}

std::optional<LanguageTag> parse_language(std::string_view s) {
  if (s == "en") return LanguageTag::English;
  if (s == "zh") return LanguageTag::Chinese;
  return std::nullopt;
}

std::string_view task_name(Task t) {
  switch (t) {
    case Task::CLC:
      return "clc";
    case Task::LC:
      return "lc";
    case Task::TC:
      return "tc";
  }
  return "tc";
}

std::optional<Task> parse_task(std::string_view s) {
  if (s == "clc") return Task::CLC;
  if (s == "lc") return Task::LC;
  if (s == "tc") return Task::TC;
  return std::nullopt;
}

std::string_view track_name(Track t) {
  switch (t) {
    case Track::MonoEn:
      return "mono_en";
    case Track::MonoZh:
      return "mono_zh";
    case Track::Bi:
      return "bi";
  }
  return "bi";
}

std::optional<Track> parse_track(std::string_view s) {
  if (s == "mono_en") return Track::MonoEn;
  if (s == "mono_zh") return Track::MonoZh;
  if (s == "bi") return Track::Bi;
  return std::nullopt;
}

std::optional<QuadBox> QuadBox::make(const geom::Quad& vertices, std::string* why) {
  auto fail = [why](const char* msg) -> std::optional<QuadBox> {
    if (why) *why = msg;
    return std::nullopt;
  };
  for (const geom::Point& p : vertices) {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) {
      return fail("quad has a non-finite coordinate");
    }
    if (p.x() < 0.0 || p.y() < 0.0) {
      return fail("quad has a negative coordinate");
    }
  }
  if (!geom::is_simple_quad(vertices)) {
    return fail("quad is self-intersecting or has duplicate vertices");
  }
  const double area = geom::signed_area(std::span<const geom::Point>(vertices));
  if (std::abs(area) <= geom::kVertexTol) {
    return fail("quad has zero area");
  }
  geom::Quad q = vertices;
  if (area < 0.0) std::reverse(q.begin(), q.end());
  return QuadBox(q);
}

QuadBox QuadBox::make_or_throw(const geom::Quad& vertices) {
  std::string why;
  auto q = make(vertices, &why);
  if (!q) throw EvalError("invalid_geometry", "QuadBox: " + why);
  return *q;
}

double QuadBox::area() const {
  return geom::polygon_area(std::span<const geom::Point>(q_));
}

bool QuadBox::operator==(const QuadBox& o) const {
  for (std::size_t i = 0; i < 4; ++i) {
    if (q_[i].x() != o.q_[i].x() || q_[i].y() != o.q_[i].y()) return false;
  }
  return true;
}

double iou(const QuadBox& a, const QuadBox& b) {
  return geom::iou(a.vertices(), b.vertices());
}

void Dataset::rebuild_index() {
  index.clear();
  index.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    index.emplace(records[i].question_id, i);
  }
}

AnswerClass answer_class(std::string_view answer, LanguageTag language,
                         const text::Tokenizer& tokenizer) {
  (void)language;  // the language rule lives in the tokenizer's lexicon
  const std::string normalized = text::normalize(answer);
  if (normalized.empty()) {
    throw EvalError("invalid_answer", "answer is empty after normalization");
  }
  return tokenizer.count_tokens(normalized) == 1 ? AnswerClass::Short
                                                 : AnswerClass::Long;
}

}  // namespace evqa
