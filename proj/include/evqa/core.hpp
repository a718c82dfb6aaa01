// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVQA_CORE_HPP
#define EVQA_CORE_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evqa/error.hpp"
#include "evqa/geometry.hpp"
#include "evqa/text_metrics.hpp"

// Shared domain model. Everything here is an immutable value after
// construction and safe to share across threads.
namespace evqa {

enum class LanguageTag { English, Chinese };
enum class Task { CLC, LC, TC };
enum class Track { MonoEn, MonoZh, Bi };
enum class AnswerClass { Short, Long };

std::string_view language_code(LanguageTag t);                // "en" / "zh"
std::optional<LanguageTag> parse_language(std::string_view);  // accepts en/zh
std::string_view task_name(Task t);                           // "clc" / "lc" / "tc"
std::optional<Task> parse_task(std::string_view);
std::string_view track_name(Track t);  // "mono_en" / "mono_zh" / "bi"
std::optional<Track> parse_track(std::string_view);

// An ordered quadrilateral in image pixel coordinates; the unit of evidence.
// Construction validates: 4 finite vertices with non-negative coordinates,
// simple, strictly positive area. Clockwise input is reversed so storage is
// always counter-clockwise.
class QuadBox {
 public:
  static std::optional<QuadBox> make(const geom::Quad& vertices,
                                     std::string* why = nullptr);
  static QuadBox make_or_throw(const geom::Quad& vertices);

  const geom::Quad& vertices() const { return q_; }
  double area() const;

  bool operator==(const QuadBox& o) const;

 private:
  explicit QuadBox(const geom::Quad& q) : q_(q) {}
  geom::Quad q_;
};

double iou(const QuadBox& a, const QuadBox& b);

struct QARecord {
  std::string question_id;
  std::string image_id;
  LanguageTag language;
  std::string question;
  std::string answer;  // single ground-truth string
  QuadBox evidence;
  std::vector<std::string> human_answers;  // optional, legacy-metric only
};

struct Prediction {
  std::string question_id;
  std::optional<std::string> answer;
  std::optional<QuadBox> evidence;
};

struct SubmissionBundle {
  Task task = Task::TC;
  std::string model_name;
  std::map<Track, std::vector<Prediction>> tracks;

  const std::vector<Prediction>* track(Track t) const {
    auto it = tracks.find(t);
    return it == tracks.end() ? nullptr : &it->second;
  }
};

struct OcrToken {
  std::string text;
  QuadBox box;
  double confidence = 1.0;  // in [0,1]
};

// Recognized tokens grouped per image, in file order.
struct OcrIndex {
  std::map<std::string, std::vector<OcrToken>> images;

  const std::vector<OcrToken>* tokens_for(const std::string& image_id) const {
    auto it = images.find(image_id);
    return it == images.end() ? nullptr : &it->second;
  }
};

struct Dataset {
  std::vector<QARecord> records;
  std::unordered_map<std::string, std::size_t> index;  // question_id -> slot

  const QARecord* find(const std::string& question_id) const {
    auto it = index.find(question_id);
    return it == index.end() ? nullptr : &records[it->second];
  }
  void rebuild_index();
  std::size_t size() const { return records.size(); }
};

// Short iff the per-language tokenizer yields exactly one token. The default
// tokenizer splits on whitespace (a whitespace-free CJK run is one token);
// pass a lexicon tokenizer to segment Chinese answers instead. Throws
// EvalError("invalid_answer") when the answer normalizes to empty.
AnswerClass answer_class(std::string_view answer, LanguageTag language,
                         const text::Tokenizer& tokenizer = text::default_tokenizer());

}  // namespace evqa

#endif  // EVQA_CORE_HPP
