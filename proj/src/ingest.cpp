// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#include "evqa/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace evqa {
namespace {

using json = nlohmann::ordered_json;

std::optional<std::string> read_file(const std::filesystem::path& path,
                                     ValidationReport& rep) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    rep.error(path.string(), "file.read", "cannot open file");
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::optional<json> parse_json(std::string_view text, ValidationReport& rep) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    rep.error("$", "file.parse", e.what());
    return std::nullopt;
  }
}

// Appends to errors, or to warnings in lenient mode (the record is skipped
// either way).
void record_issue(ValidationReport& rep, bool lenient, std::string locator,
                  std::string rule, std::string message) {
  if (lenient) {
    rep.warn(std::move(locator), std::move(rule), std::move(message));
  } else {
    rep.error(std::move(locator), std::move(rule), std::move(message));
  }
}

const json* get_member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::optional<std::string> get_string(const json& obj, const char* key) {
  const json* v = get_member(obj, key);
  if (!v || !v->is_string()) return std::nullopt;
  return v->get<std::string>();
}

std::optional<geom::Quad> parse_quad_node(const json& node, std::string* why) {
  if (!node.is_array() || node.size() != 4) {
    if (why) *why = "quad must have 4 vertices";
    return std::nullopt;
  }
  geom::Quad q;
  for (std::size_t i = 0; i < 4; ++i) {
    const json& pt = node[i];
    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() ||
        !pt[1].is_number()) {
      if (why) *why = "vertex must be a [x,y] number pair";
      return std::nullopt;
    }
    q[i] = geom::Point{pt[0].get<double>(), pt[1].get<double>()};
  }
  return q;
}

json quad_to_json(const QuadBox& box) {
  json arr = json::array();
  for (const geom::Point& p : box.vertices()) {
    arr.push_back(json::array({p.x(), p.y()}));
  }
  return arr;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

DatasetLoad parse_dataset(std::string_view json_text, const LoadOptions& opts) {
  DatasetLoad out;
  ValidationReport& rep = out.report;
  const auto doc = parse_json(json_text, rep);
  if (!doc) return out;
  if (!doc->is_object() || !get_member(*doc, "questions") ||
      !(*doc)["questions"].is_array()) {
    rep.error("$", "schema.root", "expected object with a 'questions' array");
    return out;
  }
  const auto version = get_string(*doc, "version");
  if (!version) {
    rep.warn("$.version", "schema.version", "missing version, assuming 1.0");
  } else if (*version != "1.0") {
    rep.warn("$.version", "schema.version", "unknown version '" + *version + "'");
  }

  std::set<std::string> seen_ids;
  std::map<LanguageTag, std::set<std::string>> images;
  const json& questions = (*doc)["questions"];
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const std::string loc = "questions[" + std::to_string(i) + "]";
    const json& node = questions[i];
    if (!node.is_object()) {
      record_issue(rep, opts.lenient, loc, "schema.record", "record is not an object");
      continue;
    }
    bool bad = false;
    auto fail = [&](std::string locator, std::string rule, std::string msg) {
      record_issue(rep, opts.lenient, std::move(locator), std::move(rule),
                   std::move(msg));
      bad = true;
    };

    const auto qid = get_string(node, "question_id");
    if (!qid || qid->empty()) fail(loc + ".question_id", "schema.missing_field", "question_id is required");
    const auto image_id = get_string(node, "image_id");
    if (!image_id || image_id->empty()) fail(loc + ".image_id", "schema.missing_field", "image_id is required");
    const auto lang_str = get_string(node, "language");
    std::optional<LanguageTag> lang;
    if (!lang_str || !(lang = parse_language(*lang_str))) {
      fail(loc + ".language", "record.bad_language", "language must be 'en' or 'zh'");
    }
    const auto question = get_string(node, "question");
    if (!question || text::normalize(*question).empty()) {
      fail(loc + ".question", "record.empty_question", "question is empty after normalization");
    }
    const auto answer = get_string(node, "answer");
    std::string answer_norm;
    if (!answer || (answer_norm = text::normalize(*answer)).empty()) {
      fail(loc + ".answer", "record.empty_answer", "answer is empty after normalization");
    } else if (answer_norm == "yes" || answer_norm == "no") {
      fail(loc + ".answer", "record.yes_no_answer",
           "yes/no answers are prohibited by the dataset rules");
    }

    std::optional<QuadBox> evidence;
    const json* ev = get_member(node, "evidence");
    if (!ev) {
      fail(loc + ".evidence", "schema.missing_field", "evidence is required");
    } else {
      std::string why;
      const auto quad = parse_quad_node(*ev, &why);
      if (!quad) {
        fail(loc + ".evidence", "quad.vertex_count", why);
      } else if (!(evidence = QuadBox::make(*quad, &why))) {
        fail(loc + ".evidence", "quad.invalid", why);
      }
    }

    std::vector<std::string> human_answers;
    if (const json* ha = get_member(node, "human_answers")) {
      if (!ha->is_array()) {
        fail(loc + ".human_answers", "schema.bad_type", "human_answers must be an array");
      } else {
        for (const json& h : *ha) {
          if (!h.is_string()) {
            fail(loc + ".human_answers", "schema.bad_type", "human answers must be strings");
            break;
          }
          human_answers.push_back(h.get<std::string>());
        }
      }
    }

    if (qid && !qid->empty() && !seen_ids.insert(*qid).second) {
      fail(loc + ".question_id", "record.duplicate_id",
           "duplicate question_id '" + *qid + "'");
    }
    if (bad) continue;

    images[*lang].insert(*image_id);
    out.dataset.records.push_back(QARecord{*qid, *image_id, *lang, *question,
                                           *answer, *evidence,
                                           std::move(human_answers)});
  }
  out.dataset.rebuild_index();

  std::int64_t q_en = 0, q_zh = 0;
  for (const QARecord& r : out.dataset.records) {
    (r.language == LanguageTag::English ? q_en : q_zh) += 1;
  }
  rep.counts["en_questions"] = q_en;
  rep.counts["zh_questions"] = q_zh;
  rep.counts["en_images"] = static_cast<std::int64_t>(images[LanguageTag::English].size());
  rep.counts["zh_images"] = static_cast<std::int64_t>(images[LanguageTag::Chinese].size());
  rep.counts["questions"] = q_en + q_zh;
  return out;
}

DatasetLoad load_dataset(const std::filesystem::path& path, const LoadOptions& opts) {
  DatasetLoad out;
  const auto text = read_file(path, out.report);
  if (!text) return out;
  auto parsed = parse_dataset(*text, opts);
  parsed.report.errors.insert(parsed.report.errors.begin(),
                              out.report.errors.begin(), out.report.errors.end());
  return parsed;
}

SubmissionLoad parse_submission(std::string_view json_text, const Dataset& dataset,
                                Task task, const LoadOptions& opts) {
  SubmissionLoad out;
  out.bundle.task = task;
  ValidationReport& rep = out.report;
  const auto doc = parse_json(json_text, rep);
  if (!doc) return out;
  if (!doc->is_object() || !get_member(*doc, "tracks") ||
      !(*doc)["tracks"].is_object()) {
    rep.error("$", "schema.root", "expected object with a 'tracks' object");
    return out;
  }
  if (const auto declared = get_string(*doc, "task")) {
    const auto file_task = parse_task(*declared);
    if (!file_task) {
      rep.warn("$.task", "sub.task_mismatch", "unknown task '" + *declared + "'");
    } else if (*file_task != task) {
      rep.warn("$.task", "sub.task_mismatch",
               "file declares task '" + *declared + "', scoring as '" +
                   std::string(task_name(task)) + "'");
    }
  }
  out.bundle.model_name = get_string(*doc, "model").value_or("unnamed");

  const bool wants_mono = task == Task::CLC;
  const json& tracks = (*doc)["tracks"];
  for (auto it = tracks.begin(); it != tracks.end(); ++it) {
    const auto track = parse_track(it.key());
    if (!track) {
      rep.warn("$.tracks." + it.key(), "sub.extra_track",
               "unknown track '" + it.key() + "' ignored");
      continue;
    }
    if (!wants_mono && *track != Track::Bi) {
      rep.warn("$.tracks." + it.key(), "sub.extra_track",
               std::string(task_name(task)) + " uses only the bi track; '" +
                   it.key() + "' ignored");
      continue;
    }
    if (!it->is_array()) {
      rep.error("$.tracks." + it.key(), "schema.bad_type", "track must be an array");
      continue;
    }

    std::vector<Prediction> preds;
    std::set<std::string> seen;
    int evidence_ignored = 0;
    int answers_ignored = 0;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string loc = "$.tracks." + it.key() + "[" + std::to_string(i) + "]";
      const json& node = (*it)[i];
      if (!node.is_object()) {
        record_issue(rep, opts.lenient, loc, "schema.record", "prediction is not an object");
        continue;
      }
      bool bad = false;
      auto fail = [&](std::string locator, std::string rule, std::string msg) {
        record_issue(rep, opts.lenient, std::move(locator), std::move(rule),
                     std::move(msg));
        bad = true;
      };

      Prediction p;
      const auto qid = get_string(node, "question_id");
      if (!qid || qid->empty()) {
        fail(loc + ".question_id", "schema.missing_field", "question_id is required");
      } else {
        p.question_id = *qid;
        const QARecord* rec = dataset.find(*qid);
        if (!rec) {
          fail(loc + ".question_id", "sub.unknown_question",
               "question_id '" + *qid + "' is not in the ground truth");
        } else if (*track == Track::MonoEn && rec->language != LanguageTag::English) {
          fail(loc, "sub.track_language", "mono_en covers non-English question '" + *qid + "'");
        } else if (*track == Track::MonoZh && rec->language != LanguageTag::Chinese) {
          fail(loc, "sub.track_language", "mono_zh covers non-Chinese question '" + *qid + "'");
        }
        if (!bad && !seen.insert(*qid).second) {
          fail(loc, "sub.duplicate_prediction",
               "duplicate prediction for '" + *qid + "' in track " + it.key());
        }
      }

      if (const json* ans = get_member(node, "answer")) {
        if (!ans->is_string()) {
          fail(loc + ".answer", "schema.bad_type", "answer must be a string");
        } else {
          p.answer = ans->get<std::string>();
        }
      }
      if (const json* ev = get_member(node, "evidence")) {
        std::string why;
        const auto quad = parse_quad_node(*ev, &why);
        std::optional<QuadBox> box;
        if (quad) box = QuadBox::make(*quad, &why);
        if (!box) {
          // One bad box must not sink the run: drop it and let the verdict
          // be Incorrect.
          rep.warn(loc + ".evidence", "sub.degenerate_evidence",
                   why + "; evidence dropped, scores IoU 0");
        } else {
          p.evidence = std::move(box);
        }
      }

      // Per-task field requirements.
      if (task == Task::TC) {
        if (!p.answer) fail(loc, "sub.missing_answer", "TC predictions require an answer");
        if (p.evidence) {
          p.evidence.reset();
          ++evidence_ignored;
        }
      } else if (task == Task::LC) {
        if (!p.evidence && !get_member(node, "evidence")) {
          fail(loc, "sub.missing_evidence", "LC predictions require an evidence box");
        }
        if (p.answer) {
          ++answers_ignored;
        }
      } else {  // CLC
        if (!p.answer) fail(loc, "sub.missing_answer", "CLC predictions require an answer");
        if (!p.evidence && !get_member(node, "evidence")) {
          rep.warn(loc, "sub.missing_evidence",
                   "CLC prediction has no evidence; it will score Incorrect");
        }
      }

      if (!bad) preds.push_back(std::move(p));
    }
    if (evidence_ignored > 0) {
      rep.warn("$.tracks." + it.key(), "sub.evidence_ignored",
               std::to_string(evidence_ignored) + " evidence boxes ignored (TC scores answers only)");
    }
    if (answers_ignored > 0) {
      rep.warn("$.tracks." + it.key(), "sub.answer_ignored",
               std::to_string(answers_ignored) + " answers ignored (LC scores evidence only)");
    }
    rep.counts[std::string(track_name(*track)) + "_predictions"] =
        static_cast<std::int64_t>(preds.size());
    out.bundle.tracks[*track] = std::move(preds);
  }

  if (!out.bundle.track(Track::Bi)) {
    rep.error("$.tracks", "sub.missing_track", "submission must carry a 'bi' track");
  }
  if (wants_mono) {
    if (!out.bundle.track(Track::MonoEn) || !out.bundle.track(Track::MonoZh)) {
      rep.error("$.tracks", "sub.missing_track",
                "CLC requires mono_en, mono_zh and bi tracks");
    }
  }
  return out;
}

SubmissionLoad load_submission(const std::filesystem::path& path, const Dataset& dataset,
                               Task task, const LoadOptions& opts) {
  SubmissionLoad out;
  const auto text = read_file(path, out.report);
  if (!text) return out;
  auto parsed = parse_submission(*text, dataset, task, opts);
  parsed.report.errors.insert(parsed.report.errors.begin(),
                              out.report.errors.begin(), out.report.errors.end());
  return parsed;
}

OcrLoad parse_ocr(std::string_view json_text, const LoadOptions& opts) {
  OcrLoad out;
  ValidationReport& rep = out.report;
  const auto doc = parse_json(json_text, rep);
  if (!doc) return out;
  if (!doc->is_object() || !get_member(*doc, "images") || !(*doc)["images"].is_array()) {
    rep.error("$", "schema.root", "expected object with an 'images' array");
    return out;
  }
  std::int64_t token_count = 0;
  const json& images = (*doc)["images"];
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string loc = "images[" + std::to_string(i) + "]";
    const json& node = images[i];
    if (!node.is_object()) {
      record_issue(rep, opts.lenient, loc, "schema.record", "image entry is not an object");
      continue;
    }
    const auto image_id = get_string(node, "image_id");
    if (!image_id || image_id->empty()) {
      record_issue(rep, opts.lenient, loc + ".image_id", "schema.missing_field",
                   "image_id is required");
      continue;
    }
    std::vector<OcrToken>& tokens = out.ocr.images[*image_id];
    const json* toks = get_member(node, "tokens");
    if (!toks || !toks->is_array()) {
      record_issue(rep, opts.lenient, loc + ".tokens", "schema.missing_field",
                   "tokens array is required");
      continue;
    }
    for (std::size_t j = 0; j < toks->size(); ++j) {
      const std::string tloc = loc + ".tokens[" + std::to_string(j) + "]";
      const json& tok = (*toks)[j];
      if (!tok.is_object()) {
        record_issue(rep, opts.lenient, tloc, "schema.record", "token is not an object");
        continue;
      }
      bool bad = false;
      auto fail = [&](std::string locator, std::string rule, std::string msg) {
        record_issue(rep, opts.lenient, std::move(locator), std::move(rule),
                     std::move(msg));
        bad = true;
      };
      const auto textv = get_string(tok, "text");
      if (!textv || textv->empty()) {
        fail(tloc + ".text", "ocr.empty_text", "token text must be non-empty");
      }
      double confidence = 1.0;
      if (const json* c = get_member(tok, "confidence")) {
        if (!c->is_number()) {
          fail(tloc + ".confidence", "schema.bad_type", "confidence must be a number");
        } else {
          confidence = c->get<double>();
          if (!(confidence >= 0.0 && confidence <= 1.0)) {
            fail(tloc + ".confidence", "ocr.bad_confidence", "confidence must be in [0,1]");
          }
        }
      }
      std::optional<QuadBox> box;
      const json* bx = get_member(tok, "box");
      if (!bx) {
        fail(tloc + ".box", "schema.missing_field", "box is required");
      } else {
        std::string why;
        const auto quad = parse_quad_node(*bx, &why);
        if (!quad || !(box = QuadBox::make(*quad, &why))) {
          fail(tloc + ".box", "quad.invalid", why);
        }
      }
      if (bad) continue;
      tokens.push_back(OcrToken{*textv, *box, confidence});
      ++token_count;
    }
  }
  rep.counts["images"] = static_cast<std::int64_t>(out.ocr.images.size());
  rep.counts["tokens"] = token_count;
  return out;
}

OcrLoad load_ocr(const std::filesystem::path& path, const LoadOptions& opts) {
  OcrLoad out;
  const auto text = read_file(path, out.report);
  if (!text) return out;
  auto parsed = parse_ocr(*text, opts);
  parsed.report.errors.insert(parsed.report.errors.begin(),
                              out.report.errors.begin(), out.report.errors.end());
  return parsed;
}

std::string dataset_to_json(const Dataset& dataset) {
  json doc;
  doc["version"] = "1.0";
  json questions = json::array();
  for (const QARecord& r : dataset.records) {
    json q;
    q["question_id"] = r.question_id;
    q["image_id"] = r.image_id;
    q["language"] = std::string(language_code(r.language));
    q["question"] = r.question;
    q["answer"] = r.answer;
    q["evidence"] = quad_to_json(r.evidence);
    if (!r.human_answers.empty()) q["human_answers"] = r.human_answers;
    questions.push_back(std::move(q));
  }
  doc["questions"] = std::move(questions);
  return doc.dump(2) + "\n";
}

std::string submission_to_json(const SubmissionBundle& bundle) {
  json doc;
  doc["task"] = std::string(task_name(bundle.task));
  doc["model"] = bundle.model_name;
  json tracks;
  for (const auto& [track, preds] : bundle.tracks) {
    json arr = json::array();
    for (const Prediction& p : preds) {
      json node;
      node["question_id"] = p.question_id;
      if (p.answer) node["answer"] = *p.answer;
      if (p.evidence) node["evidence"] = quad_to_json(*p.evidence);
      arr.push_back(std::move(node));
    }
    tracks[std::string(track_name(track))] = std::move(arr);
  }
  doc["tracks"] = std::move(tracks);
  return doc.dump(2) + "\n";
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EvalError("file_write", "cannot write " + path.string());
  out << dataset_to_json(dataset);
}

void save_submission(const std::filesystem::path& path, const SubmissionBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EvalError("file_write", "cannot write " + path.string());
  out << submission_to_json(bundle);
}

CorpusStats corpus_stats(const Dataset& dataset, const text::Tokenizer& tokenizer,
                         int prefix_depth) {
  CorpusStats stats;
  stats.prefix_depth = prefix_depth;
  stats.lexicon_used = tokenizer.has_lexicon();
  std::map<LanguageTag, std::set<std::string>> images;
  std::set<std::string> all_images;
  for (const QARecord& r : dataset.records) {
    LanguageStats& ls = stats.languages[r.language];
    ++ls.question_count;
    ++stats.total_questions;
    images[r.language].insert(r.image_id);
    all_images.insert(r.image_id);

    const auto q_tokens = tokenizer.tokenize(text::normalize(r.question));
    const auto a_tokens = tokenizer.tokenize(text::normalize(r.answer));
    ++ls.question_length_hist[static_cast<int>(q_tokens.size())];
    ++ls.answer_length_hist[static_cast<int>(a_tokens.size())];

    PrefixNode* node = &ls.question_prefixes;
    for (std::size_t k = 0;
         k < q_tokens.size() && k < static_cast<std::size_t>(prefix_depth); ++k) {
      node = &node->children[q_tokens[k]];
      ++node->count;
    }
  }
  for (auto& [lang, ls] : stats.languages) {
    ls.image_count = static_cast<std::int64_t>(images[lang].size());
  }
  stats.total_images = static_cast<std::int64_t>(all_images.size());
  return stats;
}

namespace {

json prefix_to_json(const PrefixNode& node) {
  json out = json::object();
  for (const auto& [word, child] : node.children) {
    json c;
    c["count"] = child.count;
    if (!child.children.empty()) c["children"] = prefix_to_json(child);
    out[word] = std::move(c);
  }
  return out;
}

json hist_to_json(const std::map<int, std::int64_t>& hist) {
  json out = json::object();
  for (const auto& [len, n] : hist) out[std::to_string(len)] = n;
  return out;
}

json policy_to_json(const text::NormalizationPolicy& p) {
  json out;
  out["casefold"] = p.casefold;
  out["collapse_whitespace"] = p.collapse_whitespace;
  out["strip_edges"] = p.strip_edges;
  out["unicode_normal_form"] = "nfc";
  return out;
}

json slice_value(double value, int n) {
  if (n == 0) return nullptr;
  return value;
}

json report_to_json_obj(const TaskReport& r) {
  json out;
  out["task"] = std::string(task_name(r.task));
  out["model"] = r.model;
  json params;
  params["tau"] = r.params.tau;
  params["theta"] = r.params.theta;
  params["policy"] = policy_to_json(r.params.policy);
  if (r.seed) {
    params["seed"] = *r.seed;
    // Draws are rerunnable from this line alone.
    params["rng"] = "splitmix64(seed xor fnv1a64(question_id)), rejection-sampled";
  }
  out["parameters"] = std::move(params);
  if (r.mono_en || r.mono_zh) {
    json mono;
    if (r.mono_en) mono["en"] = *r.mono_en;
    if (r.mono_zh) mono["zh"] = *r.mono_zh;
    out["mono"] = std::move(mono);
  }
  json bi;
  bi["en"] = slice_value(r.bi.en, r.bi.n_en);
  bi["ch"] = slice_value(r.bi.ch, r.bi.n_ch);
  bi["short"] = slice_value(r.bi.s, r.bi.n_s);
  bi["long"] = slice_value(r.bi.l, r.bi.n_l);
  bi["acc"] = slice_value(r.bi.acc, r.bi.n);
  out["bi"] = std::move(bi);
  json counts;
  counts["en"] = r.bi.n_en;
  counts["ch"] = r.bi.n_ch;
  counts["short"] = r.bi.n_s;
  counts["long"] = r.bi.n_l;
  counts["total"] = r.bi.n;
  out["counts"] = std::move(counts);
  if (r.delta_r) out["delta_r"] = *r.delta_r;
  out["unanswered"] = r.unanswered;
  return out;
}

}  // namespace

std::string render_report(const TaskReport& r, ReportFormat format) {
  if (format == ReportFormat::Json) {
    return report_to_json_obj(r).dump(2) + "\n";
  }
  if (format == ReportFormat::Csv) {
    std::ostringstream out;
    out << "slice,score\n";
    auto row = [&](const char* name, double v, int n) {
      if (n > 0) out << name << "," << fmt("%.6f", v) << "\n";
    };
    if (r.mono_en) row("mono_en", *r.mono_en, 1);
    if (r.mono_zh) row("mono_zh", *r.mono_zh, 1);
    row("bi_en", r.bi.en, r.bi.n_en);
    row("bi_ch", r.bi.ch, r.bi.n_ch);
    row("bi_s", r.bi.s, r.bi.n_s);
    row("bi_l", r.bi.l, r.bi.n_l);
    row("acc", r.bi.acc, r.bi.n);
    if (r.delta_r) row("delta_r", *r.delta_r, 1);
    return std::move(out).str();
  }

  // Aligned table, one decimal for percentages and two for the reasonable
  // score; absent slices print "-".
  std::ostringstream out;
  out << "task=" << task_name(r.task);
  if (!r.model.empty()) out << " model=" << r.model;
  out << " tau=" << fmt("%.2f", r.params.tau) << " theta=" << fmt("%.2f", r.params.theta);
  if (r.seed) out << " seed=" << *r.seed;
  out << " unanswered=" << r.unanswered << "\n";
  const auto& p = r.params.policy;
  out << "policy: casefold=" << (p.casefold ? "on" : "off")
      << " collapse_ws=" << (p.collapse_whitespace ? "on" : "off")
      << " strip=" << (p.strip_edges ? "on" : "off") << " unicode=nfc\n";

  auto cell = [&](std::optional<double> v, const char* spec) {
    return v ? fmt(spec, *v) : std::string("-");
  };
  auto slice = [&](double v, int n) -> std::optional<double> {
    if (n == 0) return std::nullopt;
    return v;
  };
  const char* names[] = {"Mono En", "Mono Ch", "Bi En", "Bi Ch", "S", "L", "Acc", "D_r"};
  const std::string cells[] = {
      cell(r.mono_en, "%.1f"),
      cell(r.mono_zh, "%.1f"),
      cell(slice(r.bi.en, r.bi.n_en), "%.1f"),
      cell(slice(r.bi.ch, r.bi.n_ch), "%.1f"),
      cell(slice(r.bi.s, r.bi.n_s), "%.1f"),
      cell(slice(r.bi.l, r.bi.n_l), "%.1f"),
      cell(slice(r.bi.acc, r.bi.n), "%.1f"),
      cell(r.delta_r, "%.2f"),
  };
  char buf[32];
  for (int i = 0; i < 8; ++i) {
    std::snprintf(buf, sizeof(buf), "%8s", names[i]);
    out << buf;
  }
  out << "\n";
  for (int i = 0; i < 8; ++i) {
    std::snprintf(buf, sizeof(buf), "%8s", cells[i].c_str());
    out << buf;
  }
  out << "\n";
  return std::move(out).str();
}

std::string sweep_to_csv(const std::vector<std::pair<double, TaskReport>>& curve,
                         const std::string& slice) {
  std::ostringstream out;
  out << "parameter,slice,score\n";
  for (const auto& [value, report] : curve) {
    auto row = [&](const char* name, double v, int n) {
      if (n == 0) return;
      if (slice == "all" || slice == name) {
        out << fmt("%.6g", value) << "," << name << "," << fmt("%.6f", v) << "\n";
      }
    };
    if (report.mono_en) row("mono_en", *report.mono_en, 1);
    if (report.mono_zh) row("mono_zh", *report.mono_zh, 1);
    row("bi_en", report.bi.en, report.bi.n_en);
    row("bi_ch", report.bi.ch, report.bi.n_ch);
    row("bi_s", report.bi.s, report.bi.n_s);
    row("bi_l", report.bi.l, report.bi.n_l);
    row("acc", report.bi.acc, report.bi.n);
    if (report.delta_r) row("delta_r", *report.delta_r, 1);
  }
  return std::move(out).str();
}

std::string stats_to_json(const CorpusStats& stats) {
  json out;
  json total;
  total["questions"] = stats.total_questions;
  total["images"] = stats.total_images;
  out["total"] = std::move(total);
  for (const auto& [lang, ls] : stats.languages) {
    json node;
    node["questions"] = ls.question_count;
    node["images"] = ls.image_count;
    node["question_length_hist"] = hist_to_json(ls.question_length_hist);
    node["answer_length_hist"] = hist_to_json(ls.answer_length_hist);
    node["question_prefixes"] = prefix_to_json(ls.question_prefixes);
    out[std::string(language_code(lang))] = std::move(node);
  }
  out["prefix_depth"] = stats.prefix_depth;
  out["lexicon_used"] = stats.lexicon_used;
  return out.dump(2) + "\n";
}

std::string stats_to_text(const CorpusStats& stats) {
  std::ostringstream out;
  out << "questions=" << stats.total_questions << " images=" << stats.total_images
      << "\n";
  for (const auto& [lang, ls] : stats.languages) {
    out << language_code(lang) << ": questions=" << ls.question_count
        << " images=" << ls.image_count << "\n";
    out << "  question length:";
    for (const auto& [len, n] : ls.question_length_hist) out << " " << len << ":" << n;
    out << "\n  answer length:";
    for (const auto& [len, n] : ls.answer_length_hist) out << " " << len << ":" << n;
    out << "\n";
  }
  return std::move(out).str();
}

std::string validation_to_json(const ValidationReport& rep) {
  json out;
  out["ok"] = rep.ok();
  auto issues = [](const std::vector<Issue>& v) {
    json arr = json::array();
    for (const Issue& i : v) {
      json node;
      node["locator"] = i.locator;
      node["rule"] = i.rule;
      node["message"] = i.message;
      arr.push_back(std::move(node));
    }
    return arr;
  };
  out["errors"] = issues(rep.errors);
  out["warnings"] = issues(rep.warnings);
  json counts;
  for (const auto& [k, v] : rep.counts) counts[k] = v;
  out["counts"] = std::move(counts);
  return out.dump(2) + "\n";
}

std::string validation_to_text(const ValidationReport& rep) {
  std::ostringstream out;
  out << rep.errors.size() << " errors, " << rep.warnings.size() << " warnings\n";
  for (const Issue& i : rep.errors) {
    out << "error " << i.rule << " at " << i.locator << ": " << i.message << "\n";
  }
  for (const Issue& i : rep.warnings) {
    out << "warning " << i.rule << " at " << i.locator << ": " << i.message << "\n";
  }
  if (!rep.counts.empty()) {
    out << "counts:";
    for (const auto& [k, v] : rep.counts) out << " " << k << "=" << v;
    out << "\n";
  }
  return std::move(out).str();
}

}  // namespace evqa
