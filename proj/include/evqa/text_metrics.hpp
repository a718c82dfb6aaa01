// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVQA_TEXT_METRICS_HPP
#define EVQA_TEXT_METRICS_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace evqa::text {

// --- unicode helpers (code point = unicode scalar value) -------------------

// Invalid byte sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

bool is_space(char32_t c);
bool is_cjk(char32_t c);

// Simple case folding over Basic Latin and Latin-1; everything else (incl.
// CJK) passes through unchanged.
char32_t fold_case(char32_t c);

// --- normalization ----------------------------------------------------------

// Recorded in every report so runs are reproducible. The unicode normal form
// is fixed to canonical-composed: inputs are expected in NFC and are not
// recomposed.
struct NormalizationPolicy {
  bool casefold = true;
  bool collapse_whitespace = true;
  bool strip_edges = true;

  bool operator==(const NormalizationPolicy&) const = default;
};

// Deterministic and idempotent. Whitespace collapse maps any run of unicode
// whitespace (incl. U+3000) to a single U+0020.
std::string normalize(std::string_view s, const NormalizationPolicy& policy = {});
std::u32string normalize_u32(std::u32string_view s, const NormalizationPolicy& policy = {});

// --- edit distance ----------------------------------------------------------

// Levenshtein distance over unicode scalar values (not bytes), so CJK
// answers count characters.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

// distance / max(|a|,|b|); NL("","") = 0. Inputs are expected normalized.
double normalized_levenshtein(std::u32string_view a, std::u32string_view b);
double normalized_levenshtein(std::string_view a, std::string_view b);

// Thresholded similarity: 1-NL below tau, hard 0 at or above it, so values
// land in {0} ∪ (1-tau, 1].
struct SimilarityScore {
  double value;
  double nl;
  double tau;
};

SimilarityScore similarity_score(std::string_view ans, std::string_view gt, double tau);

// Legacy accuracy against multiple human answers: min(matches/3, 1) over
// normalized exact matches; only {0, 1/3, 2/3, 1} can appear. Throws
// "unsupported_metric" when human_answers is empty.
double vqa_accuracy(std::string_view ans, const std::vector<std::string>& human_answers,
                    const NormalizationPolicy& policy = {});

// --- tokenization -----------------------------------------------------------

// Whitespace tokenizer; an optional lexicon turns on forward maximal
// matching inside contiguous CJK runs (whitespace-free Chinese text is one
// token without it).
class Tokenizer {
 public:
  Tokenizer() = default;
  explicit Tokenizer(std::vector<std::string> lexicon);

  std::vector<std::string> tokenize(std::string_view s) const;
  std::size_t count_tokens(std::string_view s) const;
  bool has_lexicon() const { return !lexicon_.empty(); }
  std::size_t lexicon_size() const { return lexicon_.size(); }

 private:
  std::vector<std::u32string> lexicon_;  // sorted, unique
  std::size_t max_word_ = 0;
};

const Tokenizer& default_tokenizer();

}  // namespace evqa::text

#endif  // EVQA_TEXT_METRICS_HPP
