// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#include "evqa/text_metrics.hpp"

#include <algorithm>

#include "evqa/error.hpp"

namespace evqa::text {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  const auto n = s.size();
  while (i < n) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (len > 1) {
      if (i + len > n) {
        out.push_back(0xFFFD);
        ++i;
        continue;
      }
      bool ok = true;
      for (std::size_t k = 1; k < len; ++k) {
        const unsigned char bk = static_cast<unsigned char>(s[i + k]);
        if ((bk & 0xC0) != 0x80) {
          ok = false;
          break;
        }
        cp = (cp << 6) | (bk & 0x3F);
      }
      // Reject overlong forms, surrogates and out-of-range values.
      if (!ok || (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
          (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
          (cp >= 0xD800 && cp <= 0xDFFF)) {
        out.push_back(0xFFFD);
        ++i;
        continue;
      }
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool is_space(char32_t c) {
  switch (c) {
    case 0x09:
    case 0x0A:
    case 0x0B:
    case 0x0C:
    case 0x0D:
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_cjk(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) ||    // unified ideographs
         (c >= 0x3400 && c <= 0x4DBF) ||    // extension A
         (c >= 0xF900 && c <= 0xFAFF) ||    // compatibility ideographs
         (c >= 0x20000 && c <= 0x2EBEF) ||  // extensions B..F
         (c >= 0x3007 && c <= 0x3007);      // ideographic zero
}

char32_t fold_case(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  // Latin-1 uppercase block, excluding the multiplication sign.
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  return c;
}

std::u32string normalize_u32(std::u32string_view s, const NormalizationPolicy& policy) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (policy.casefold) c = fold_case(c);
    if (policy.collapse_whitespace && is_space(c)) {
      if (!out.empty() && out.back() == U' ') continue;
      out.push_back(U' ');
    } else {
      out.push_back(c);
    }
  }
  if (policy.strip_edges) {
    std::size_t b = 0, e = out.size();
    while (b < e && is_space(out[b])) ++b;
    while (e > b && is_space(out[e - 1])) --e;
    out = out.substr(b, e - b);
  }
  return out;
}

std::string normalize(std::string_view s, const NormalizationPolicy& policy) {
  return encode_utf8(normalize_u32(decode_utf8(s), policy));
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a == b) return 0;
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  if (b.size() > a.size()) std::swap(a, b);  // keep the DP row short
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i + 1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t sub = diag + (a[i] == b[j] ? 0 : 1);
      diag = row[j + 1];
      row[j + 1] = std::min({row[j + 1] + 1, row[j] + 1, sub});
    }
  }
  return row.back();
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(decode_utf8(a), decode_utf8(b));
}

double normalized_levenshtein(std::u32string_view a, std::u32string_view b) {
  const std::size_t denom = std::max(a.size(), b.size());
  if (denom == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(denom);
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
  return normalized_levenshtein(decode_utf8(a), decode_utf8(b));
}

SimilarityScore similarity_score(std::string_view ans, std::string_view gt, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw EvalError("invalid_parameter", "similarity_score: tau must be in (0,1]");
  }
  const double nl = normalized_levenshtein(ans, gt);
  return {nl < tau ? 1.0 - nl : 0.0, nl, tau};
}

double vqa_accuracy(std::string_view ans, const std::vector<std::string>& human_answers,
                    const NormalizationPolicy& policy) {
  if (human_answers.empty()) {
    throw EvalError("unsupported_metric", "vqa_accuracy: record has no human answers");
  }
  const std::string needle = normalize(ans, policy);
  int matches = 0;
  for (const std::string& h : human_answers) {
    if (normalize(h, policy) == needle) ++matches;
  }
  return std::min(matches / 3.0, 1.0);
}

Tokenizer::Tokenizer(std::vector<std::string> lexicon) {
  lexicon_.reserve(lexicon.size());
  for (const std::string& w : lexicon) {
    std::u32string u = decode_utf8(w);
    if (u.empty()) continue;
    max_word_ = std::max(max_word_, u.size());
    lexicon_.push_back(std::move(u));
  }
  std::sort(lexicon_.begin(), lexicon_.end());
  lexicon_.erase(std::unique(lexicon_.begin(), lexicon_.end()), lexicon_.end());
}

std::vector<std::string> Tokenizer::tokenize(std::string_view s) const {
  const std::u32string u = decode_utf8(s);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  auto emit = [&](std::u32string_view piece) {
    if (!piece.empty()) tokens.push_back(encode_utf8(piece));
  };
  while (i < u.size()) {
    if (is_space(u[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < u.size() && !is_space(u[j])) ++j;
    const std::u32string_view chunk(u.data() + i, j - i);
    i = j;
    if (lexicon_.empty()) {
      emit(chunk);
      continue;
    }
    // Segment CJK runs by forward maximal matching; everything else in the
    // chunk stays glued together.
    std::size_t k = 0;
    std::size_t plain_start = 0;
    while (k < chunk.size()) {
      if (!is_cjk(chunk[k])) {
        ++k;
        continue;
      }
      emit(chunk.substr(plain_start, k - plain_start));
      std::size_t run_end = k;
      while (run_end < chunk.size() && is_cjk(chunk[run_end])) ++run_end;
      while (k < run_end) {
        std::size_t best = 1;
        const std::size_t cap = std::min(max_word_, run_end - k);
        for (std::size_t len = cap; len >= 2; --len) {
          if (std::binary_search(lexicon_.begin(), lexicon_.end(),
                                 chunk.substr(k, len))) {
            best = len;
            break;
          }
        }
        emit(chunk.substr(k, best));
        k += best;
      }
      plain_start = k;
    }
    emit(chunk.substr(plain_start, k - plain_start));
  }
  return tokens;
}

std::size_t Tokenizer::count_tokens(std::string_view s) const {
  return tokenize(s).size();
}

const Tokenizer& default_tokenizer() {
  static const Tokenizer tok;
  return tok;
}

}  // namespace evqa::text
