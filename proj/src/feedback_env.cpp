// Copyright 2026 The prosodyrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prosodyrl/feedback_env.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "prosodyrl/textmetrics.hpp"

namespace prosodyrl {

namespace {

constexpr const char* kNoiseToken = "~noise~";

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

double AsrNoiseConfig::multiplier(Speed speed) const {
  switch (speed) {
    case Speed::kSlow:
      return speed_slow;
    case Speed::kNormal:
      return speed_normal;
    case Speed::kFast:
      return speed_fast;
  }
  throw std::out_of_range("invalid speed label");
}

std::string simulate_asr(const SpeechSample& sample, const AsrNoiseConfig& cfg,
                         Rng& rng) {
  const double mult = cfg.multiplier(sample.labels.speed);
  const double risk_p = clamp01(cfg.clean_err * mult);
  const double sub_p = clamp01(cfg.base_sub * mult);
  const double del_p = clamp01(cfg.base_del * mult);
  std::string out;
  for (size_t i = 0; i < sample.words.size(); ++i) {
    const bool at_risk = sample.articulated[i] ? rng.bernoulli(risk_p) : true;
    const std::string* word = &sample.words[i];
    if (at_risk) {
      if (rng.bernoulli(sub_p)) {
        static const std::string noise = kNoiseToken;
        word = &noise;
      } else if (rng.bernoulli(del_p)) {
        continue;
      }
    }
    if (!out.empty()) out += ' ';
    out += *word;
  }
  return out;
}

ProsodyLabels judge_labels(const SpeechSample& sample, const JudgeConfig& cfg,
                           Rng& rng) {
  ProsodyLabels judged = sample.labels;
  for (int d = 0; d < kDimensionCount; ++d) {
    if (!rng.bernoulli(cfg.flip_prob)) continue;
    const int count = kCategoryCounts[d];
    const int old_index = label_index(judged, d);
    const int offset = 1 + static_cast<int>(rng.uniform_int(
                               static_cast<uint64_t>(count - 1)));
    judged = with_label_index(judged, d, (old_index + offset) % count);
  }
  return judged;
}

namespace {

struct LexiconEntry {
  const char* word;
  Emotion emotion;
};

constexpr LexiconEntry kEmotionLexicon[] = {
    {"wonderful", Emotion::kHappy},     {"joy", Emotion::kHappy},
    {"alas", Emotion::kSad},            {"grief", Emotion::kSad},
    {"furious", Emotion::kAngry},       {"rage", Emotion::kAngry},
    {"astonishing", Emotion::kSurprised}, {"suddenly", Emotion::kSurprised},
};

}  // namespace

ProsodyLabels annotate(const std::string& prompt_text) {
  ProsodyLabels labels;
  if (prompt_text.find('?') != std::string::npos) {
    labels.structure = Structure::kQuestion;
  } else if (prompt_text.find('!') != std::string::npos) {
    labels.structure = Structure::kExclamation;
  } else {
    labels.structure = Structure::kStatement;
  }

  labels.emotion = Emotion::kNeutral;
  bool found = false;
  for (const std::string& token : normalize_tokens(prompt_text)) {
    for (const LexiconEntry& entry : kEmotionLexicon) {
      if (token == entry.word) {
        labels.emotion = entry.emotion;
        found = true;
        break;
      }
    }
    if (found) break;
  }

  if (labels.emotion == Emotion::kHappy || labels.emotion == Emotion::kAngry) {
    labels.speed = Speed::kFast;
  } else if (labels.emotion == Emotion::kSad) {
    labels.speed = Speed::kSlow;
  } else {
    labels.speed = Speed::kNormal;
  }

  if (labels.structure == Structure::kQuestion ||
      labels.emotion == Emotion::kSurprised) {
    labels.tone = Tone::kRising;
  } else if (labels.emotion == Emotion::kSad) {
    labels.tone = Tone::kFalling;
  } else {
    labels.tone = Tone::kFlat;
  }
  return labels;
}

TemplateBank default_template_bank() {
  using S = Structure;
  using E = Emotion;
  TemplateBank bank;
  bank.templates = {
      {S::kStatement, E::kNeutral, "The {a} stands beside the {b}."},
      {S::kStatement, E::kNeutral, "We noticed the {a} near the {b}."},
      {S::kStatement, E::kHappy, "The wonderful {a} sang near the {b}."},
      {S::kStatement, E::kHappy, "Pure joy settled upon the {a}."},
      {S::kStatement, E::kSad, "Alas, the {a} was lost in the {b}."},
      {S::kStatement, E::kSad, "Grief settled upon the old {a}."},
      {S::kStatement, E::kAngry, "The furious {a} shook the {b}."},
      {S::kStatement, E::kAngry, "Rage moved through the quiet {a}."},
      {S::kStatement, E::kSurprised, "Suddenly the {a} burst from the {b}."},
      {S::kStatement, E::kSurprised, "The astonishing {a} covers the {b}."},
      {S::kQuestion, E::kNeutral, "Why was the {a} near the {b}?"},
      {S::kQuestion, E::kNeutral, "Did the {a} reach the {b}?"},
      {S::kQuestion, E::kHappy, "Will the wonderful {a} come again?"},
      {S::kQuestion, E::kHappy, "Did joy reach the old {a}?"},
      {S::kQuestion, E::kSad, "Why did grief follow the {a}?"},
      {S::kQuestion, E::kSad, "Will the {a} sink under grief?"},
      {S::kQuestion, E::kAngry, "Why did the furious {a} shout?"},
      {S::kQuestion, E::kAngry, "Did rage reach the {b}?"},
      {S::kQuestion, E::kSurprised, "Did the {a} suddenly vanish?"},
      {S::kQuestion, E::kSurprised, "Will the astonishing {a} come again?"},
      {S::kExclamation, E::kNeutral, "Oh, the {a} stands near the {b}!"},
      {S::kExclamation, E::kNeutral, "So the {a} reached the {b}!"},
      {S::kExclamation, E::kHappy, "How wonderful the {a} looks!"},
      {S::kExclamation, E::kHappy, "Oh, the pure joy of this {a}!"},
      {S::kExclamation, E::kSad, "Oh, grief covers the {a}!"},
      {S::kExclamation, E::kSad, "How the {a} fell under grief!"},
      {S::kExclamation, E::kAngry, "So the furious {a} shook the {b}!"},
      {S::kExclamation, E::kAngry, "How the rage sounds in the {a}!"},
      {S::kExclamation, E::kSurprised, "How astonishing the {a} looks!"},
      {S::kExclamation, E::kSurprised, "Oh, the {a} suddenly burst!"},
  };
  bank.fillers = {"garden", "river",  "window", "lantern", "meadow",
                  "forest", "valley", "bridge", "tower",   "pond"};
  return bank;
}

namespace {

void replace_all(std::string& text, const std::string& from,
                 const std::string& to) {
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::vector<PromptRecord> generate_dataset(int n, Rng& rng,
                                           const TemplateBank& bank) {
  if (n < 1) {
    throw std::invalid_argument("generate_dataset: n must be >= 1");
  }
  if (bank.fillers.size() < 2) {
    throw std::invalid_argument("generate_dataset: need at least 2 fillers");
  }
  std::vector<std::pair<Structure, Emotion>> combos;
  std::vector<std::vector<size_t>> combo_templates;
  for (size_t t = 0; t < bank.templates.size(); ++t) {
    const PromptTemplate& tpl = bank.templates[t];
    const std::pair<Structure, Emotion> key{tpl.structure, tpl.emotion};
    auto it = std::find(combos.begin(), combos.end(), key);
    if (it == combos.end()) {
      combos.push_back(key);
      combo_templates.push_back({t});
    } else {
      combo_templates[static_cast<size_t>(it - combos.begin())].push_back(t);
    }
  }

  std::vector<PromptRecord> records;
  records.reserve(static_cast<size_t>(n));
  const uint64_t n_fillers = bank.fillers.size();
  for (int i = 0; i < n; ++i) {
    const std::vector<size_t>& pool =
        combo_templates[static_cast<size_t>(i) % combos.size()];
    const size_t t = pool[rng.uniform_int(pool.size())];
    const uint64_t f1 = rng.uniform_int(n_fillers);
    const uint64_t f2 = (f1 + 1 + rng.uniform_int(n_fillers - 1)) % n_fillers;
    std::string text = bank.templates[t].pattern;
    replace_all(text, "{a}", bank.fillers[f1]);
    replace_all(text, "{b}", bank.fillers[f2]);
    char id[16];
    std::snprintf(id, sizeof(id), "p%06d", i);
    records.push_back(PromptRecord{id, text, annotate(text)});
  }
  return records;
}

namespace {

using nlohmann::json;

std::string label_field(const json& labels, const char* field, int line) {
  if (!labels.contains(field) || !labels[field].is_string()) {
    throw std::runtime_error("dataset line " + std::to_string(line) +
                             ": labels." + field + " missing or not a string");
  }
  return labels[field].get<std::string>();
}

template <typename Parser>
auto parse_category(Parser parser, const std::string& value,
                    const char* field, int line) {
  const auto parsed = parser(value);
  if (!parsed) {
    throw std::runtime_error("dataset line " + std::to_string(line) +
                             ": unknown " + field + " '" + value + "'");
  }
  return *parsed;
}

}  // namespace

std::vector<PromptRecord> load_prompts(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open dataset: " + path);
  }
  std::vector<PromptRecord> records;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": malformed record");
    }
    if (!obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("text") || !obj["text"].is_string() ||
        !obj.contains("labels") || !obj["labels"].is_object()) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": record needs string id, string text, and "
                               "labels object");
    }
    PromptRecord rec;
    rec.id = obj["id"].get<std::string>();
    rec.text = obj["text"].get<std::string>();
    if (!seen_ids.insert(rec.id).second) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": duplicate id '" + rec.id + "'");
    }
    if (normalize_tokens(rec.text).empty()) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": text is empty after normalization");
    }
    const json& labels = obj["labels"];
    rec.target.structure = parse_category(
        structure_from_string, label_field(labels, "structure", line_no),
        "structure", line_no);
    rec.target.emotion =
        parse_category(emotion_from_string,
                       label_field(labels, "emotion", line_no), "emotion",
                       line_no);
    rec.target.speed = parse_category(speed_from_string,
                                      label_field(labels, "speed", line_no),
                                      "speed", line_no);
    rec.target.tone = parse_category(tone_from_string,
                                     label_field(labels, "tone", line_no),
                                     "tone", line_no);
    records.push_back(std::move(rec));
  }
  return records;
}

void save_prompts(const std::vector<PromptRecord>& prompts,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open dataset for writing: " + path);
  }
  for (const PromptRecord& rec : prompts) {
    json obj;
    obj["id"] = rec.id;
    obj["text"] = rec.text;
    obj["labels"] = {{"structure", to_string(rec.target.structure)},
                     {"emotion", to_string(rec.target.emotion)},
                     {"speed", to_string(rec.target.speed)},
                     {"tone", to_string(rec.target.tone)}};
    out << obj.dump() << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed for dataset: " + path);
  }
}

}  // namespace prosodyrl
