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

#pragma once

#include <string>
#include <vector>

#include "prosodyrl/labels.hpp"
#include "prosodyrl/policy.hpp"
#include "prosodyrl/rng.hpp"

namespace prosodyrl {

// One training prompt with its rule-derived target labels.
struct PromptRecord {
  std::string id;
  std::string text;
  ProsodyLabels target;

  bool operator==(const PromptRecord&) const = default;
};

// Corruption model for the simulated transcription channel. A garbled word
// is always at risk; an articulated word is at risk with probability
// clean_err. Speed multipliers scale every probability before use, with the
// result clamped to [0, 1].
struct AsrNoiseConfig {
  double base_sub = 0.4;
  double base_del = 0.4;
  double clean_err = 0.01;
  double speed_slow = 0.5;
  double speed_normal = 1.0;
  double speed_fast = 2.0;

  double multiplier(Speed speed) const;
};

// Simulated prosody judge: each dimension is reported faithfully with
// probability 1 - flip_prob, otherwise as a uniformly random different
// category.
struct JudgeConfig {
  double flip_prob = 0.05;
};

// Transcribes a sample through the noisy channel. Words are processed in
// order; per word the draws are: at-risk check (articulated words only),
// then substitution, then deletion, each drawn lazily. Substituted words
// become the reserved token "~noise~", which is outside the prompt
// vocabulary. Surviving words join with single spaces.
std::string simulate_asr(const SpeechSample& sample, const AsrNoiseConfig& cfg,
                         Rng& rng);

// Reads the sample's prosody labels through the flip channel. Dimensions are
// judged in the fixed order structure, emotion, speed, tone; the replacement
// category is drawn lazily on flip.
ProsodyLabels judge_labels(const SpeechSample& sample, const JudgeConfig& cfg,
                           Rng& rng);

// Deterministic rule-based annotation. Structure comes from punctuation
// ("?" wins over "!"), emotion from the first lexicon word scanning the
// normalized tokens left to right, speed and tone from the structure and
// emotion rules. Total on any input; empty text maps to the defaults.
ProsodyLabels annotate(const std::string& prompt_text);

// Sentence template with "{a}" and "{b}" filler slots. Rendered text must
// annotate to exactly (structure, emotion) plus the derived speed and tone.
struct PromptTemplate {
  Structure structure = Structure::kStatement;
  Emotion emotion = Emotion::kNeutral;
  std::string pattern;
};

struct TemplateBank {
  std::vector<PromptTemplate> templates;
  std::vector<std::string> fillers;
};

// Two templates for each of the 15 reachable (structure, emotion) pairs.
// The word lists are chosen so that at feature_dim 40 no two classes share
// a hashed feature slot on their distinguishing words, keeping every label
// dimension linearly separable from the bag-of-words features.
TemplateBank default_template_bank();

// Cycles through the reachable label combinations and samples a template and
// distinct fillers for each record. Ids are "p" plus a six-digit index.
std::vector<PromptRecord> generate_dataset(int n, Rng& rng,
                                           const TemplateBank& bank);

// Line-delimited dataset records as documented in the README.
std::vector<PromptRecord> load_prompts(const std::string& path);
void save_prompts(const std::vector<PromptRecord>& prompts,
                  const std::string& path);

}  // namespace prosodyrl

