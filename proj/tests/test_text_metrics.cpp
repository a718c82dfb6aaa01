// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#include "evqa/text_metrics.hpp"

#include <random>

#include <doctest.h>

#include "fixtures.hpp"

using namespace evqa::text;

namespace {

// Random strings over a small mixed Latin/CJK alphabet.
std::string random_string(std::mt19937& gen, int max_len) {
  static const char* alphabet[] = {"a", "b", "c", "x", "2", "/", " ",
                                   "中", "国", "文", "字"};
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(alphabet) - 1);
  std::string out;
  const int n = len(gen);
  for (int i = 0; i < n; ++i) out += alphabet[pick(gen)];
  return out;
}

}  // namespace

TEST_CASE("utf8 round trip") {
  const std::string samples[] = {"", "abc", "中文字符", "a中b文c", "29/08/2012",
                                 "naïve café"};
  for (const std::string& s : samples) {
    CHECK(encode_utf8(decode_utf8(s)) == s);
  }
  CHECK(decode_utf8("中文").size() == 2);  // scalar values, not bytes
  // Invalid bytes map to U+FFFD rather than failing.
  CHECK(decode_utf8("\xff").size() == 1);
  CHECK(decode_utf8("\xff")[0] == char32_t(0xFFFD));
}

TEST_CASE("normalize: casefold, collapse, strip") {
  CHECK(normalize("  Coca   Cola ") == "coca cola");
  CHECK(normalize("708") == "708");
  CHECK(normalize("CAFFE") == "caffe");
  CHECK(normalize("\tA　B\n") == "a b");  // ideographic space collapses too
  CHECK(normalize("中文 答案") == "中文 答案");  // CJK untouched by casefold

  SUBCASE("policy toggles") {
    NormalizationPolicy keep_case;
    keep_case.casefold = false;
    CHECK(normalize("Coca Cola", keep_case) == "Coca Cola");
    NormalizationPolicy keep_ws;
    keep_ws.collapse_whitespace = false;
    keep_ws.strip_edges = false;
    CHECK(normalize("a  b ", keep_ws) == "a  b ");
  }

  SUBCASE("idempotent on random inputs") {
    std::mt19937 gen(7);
    for (int i = 0; i < 200; ++i) {
      const std::string s = random_string(gen, 16);
      const std::string once = normalize(s);
      CHECK(normalize(once) == once);
    }
  }
}

TEST_CASE("levenshtein basics") {
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("abc", "") == 3);
  CHECK(levenshtein("same", "same") == 0);
  CHECK(levenshtein("中国", "中文") == 1);  // one substitution, not bytes
  CHECK(levenshtein("中文", "a中文b") == 2);
}

TEST_CASE("levenshtein matches the memoized recursive oracle") {
  std::mt19937 gen(11);
  for (int i = 0; i < 300; ++i) {
    const std::string a = random_string(gen, 12);
    const std::string b = random_string(gen, 12);
    CHECK(levenshtein(a, b) == fixtures::levenshtein_oracle(a, b));
  }
}

TEST_CASE("levenshtein metric axioms and bounds") {
  std::mt19937 gen(13);
  for (int i = 0; i < 150; ++i) {
    const std::string a = random_string(gen, 10);
    const std::string b = random_string(gen, 10);
    const std::string c = random_string(gen, 10);
    const auto dab = levenshtein(a, b);
    const auto dba = levenshtein(b, a);
    const auto dac = levenshtein(a, c);
    const auto dbc = levenshtein(b, c);
    CHECK(dab == dba);
    CHECK((dab == 0) == (a == b));
    CHECK(dac <= dab + dbc);
    const auto la = decode_utf8(a).size();
    const auto lb = decode_utf8(b).size();
    CHECK(dab >= (la > lb ? la - lb : lb - la));
    CHECK(dab <= std::max(la, lb));
  }
}

TEST_CASE("normalized levenshtein") {
  CHECK(normalized_levenshtein("2012", "29/08/2012") == doctest::Approx(0.6));
  CHECK(normalized_levenshtein("x", "x") == 0.0);
  CHECK(normalized_levenshtein("", "ab") == 1.0);
  CHECK(normalized_levenshtein("", "") == 0.0);
}

TEST_CASE("similarity score thresholds") {
  const auto qualitative = similarity_score("2012", "29/08/2012", 0.75);
  CHECK(qualitative.nl == doctest::Approx(0.6));
  CHECK(qualitative.value == doctest::Approx(0.4));

  // NL of 0.8 sits at/above tau=0.75 and is cut to zero.
  CHECK(similarity_score("a", "abcde", 0.75).value == 0.0);
  CHECK(similarity_score("match", "match", 0.01).value == 1.0);
  CHECK_THROWS(similarity_score("a", "b", 0.0));
  CHECK_THROWS(similarity_score("a", "b", 1.5));

  SUBCASE("values never land in (0, 1-tau]") {
    std::mt19937 gen(17);
    for (int i = 0; i < 300; ++i) {
      const std::string a = random_string(gen, 8);
      const std::string b = random_string(gen, 8);
      const double tau = 0.75;
      const double v = similarity_score(a, b, tau).value;
      CHECK((v == 0.0 || v > 1.0 - tau));
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("vqa accuracy") {
  std::vector<std::string> humans(10, "other");
  humans[0] = humans[1] = humans[2] = "708";
  CHECK(vqa_accuracy("708", humans) == doctest::Approx(1.0));

  std::vector<std::string> one{"708", "x", "y"};
  CHECK(vqa_accuracy("708", one) == doctest::Approx(1.0 / 3.0));
  CHECK(vqa_accuracy("nope", one) == 0.0);
  CHECK(vqa_accuracy("708 ", one) == doctest::Approx(1.0 / 3.0));  // normalized match
  CHECK_THROWS(vqa_accuracy("x", {}));

  SUBCASE("only the four discrete values appear") {
    std::mt19937 gen(19);
    for (int i = 0; i < 100; ++i) {
      std::vector<std::string> hs;
      std::uniform_int_distribution<int> n(1, 10);
      std::uniform_int_distribution<int> coin(0, 1);
      const int count = n(gen);
      for (int k = 0; k < count; ++k) hs.push_back(coin(gen) ? "a" : "b");
      const double v = vqa_accuracy("a", hs);
      const bool discrete = v == 0.0 || v == doctest::Approx(1.0 / 3.0) ||
                            v == doctest::Approx(2.0 / 3.0) || v == 1.0;
      CHECK(discrete);
    }
  }
}

TEST_CASE("tokenizer") {
  const Tokenizer& plain = default_tokenizer();
  CHECK(plain.count_tokens("coca cola") == 2);
  CHECK(plain.count_tokens("708") == 1);
  CHECK(plain.count_tokens("29/08/2012") == 1);
  CHECK(plain.count_tokens("北京大学") == 1);  // whitespace-free CJK run

  Tokenizer segmented({"北京", "大学", "欢迎", "光临"});
  const auto tokens = segmented.tokenize("北京大学");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0] == "北京");
  CHECK(tokens[1] == "大学");
  // Maximal matching is greedy left-to-right; unknown chars stay single.
  CHECK(segmented.count_tokens("欢迎光临吗") == 3);
  // Latin text is unaffected by the lexicon.
  CHECK(segmented.count_tokens("coca cola") == 2);
  CHECK(segmented.tokenize("abc北京def")[0] == "abc");
}
