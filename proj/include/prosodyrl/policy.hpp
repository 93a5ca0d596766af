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
#include "prosodyrl/rng.hpp"
#include "prosodyrl/textmetrics.hpp"

namespace prosodyrl {

// Linear-softmax generator. A prompt is reduced to a hashed bag-of-words
// feature vector; four categorical heads emit the prosody labels and a
// sigmoid head emits one articulation flag per word. Everything has a
// closed-form log-probability and an analytic score-function gradient, so
// the whole training objective is checkable against finite differences.
//
// Feature hashing: FNV-1a over the token bytes, taken modulo
// feature_dim - 1; the final slot is a constant 1 bias. Token counts
// accumulate, they are not clipped to presence bits.

struct PromptFeatures {
  std::vector<double> values;  // size feature_dim, last entry 1
};

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  static Matrix zeros(int rows, int cols);
  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return data[static_cast<size_t>(r) * cols + c];
  }
};

// Trainable parameters; doubles as the gradient container (same shape).
struct PolicyParams {
  int feature_dim = 0;
  Matrix head_structure;     // 3 x F
  Matrix head_emotion;       // 5 x F
  Matrix head_speed;         // 3 x F
  Matrix head_tone;          // 3 x F
  std::vector<double> head_articulation;  // F

  static PolicyParams zeros(int feature_dim);

  Matrix& head(int dimension);
  const Matrix& head(int dimension) const;
};

// One generated output: the four emitted prosody tokens, the prompt's words
// copied verbatim, and one articulation flag per word.
struct SpeechSample {
  ProsodyLabels labels;
  TokenSequence words;
  std::vector<bool> articulated;
};

uint64_t fnv1a64(std::string_view bytes);

// Hashed bag-of-words of the normalized prompt text. feature_dim >= 2.
PromptFeatures featurize(const std::string& prompt_text, int feature_dim);

// Softmax of (head matrix . features); strictly positive, sums to 1.
// Throws if any logit is non-finite (parameter blow-up).
std::vector<double> head_distribution(const PolicyParams& params,
                                      const PromptFeatures& features,
                                      int dimension);

double articulation_logit(const PolicyParams& params,
                          const PromptFeatures& features);
double articulation_probability(const PolicyParams& params,
                                const PromptFeatures& features);

// Draws the four prosody tokens and per-word articulation flags.
SpeechSample sample(const PolicyParams& params, const std::string& prompt_text,
                    Rng& rng);

// log P(sample | prompt; params), always <= 0.
double log_prob(const PolicyParams& params, const std::string& prompt_text,
                const SpeechSample& sample);

// Analytic gradient of log_prob with respect to every parameter block:
// (onehot - p) (x) features for each categorical head and
// sum_w (flag_w - sigma) * features for the articulation head.
PolicyParams grad_log_prob(const PolicyParams& params,
                           const std::string& prompt_text,
                           const SpeechSample& sample);

// In-place y += a * x over every parameter block. Shapes must agree.
void axpy(double a, const PolicyParams& x, PolicyParams& y);
double param_norm(const PolicyParams& params);
double param_distance(const PolicyParams& a, const PolicyParams& b);
bool params_finite(const PolicyParams& params);

// Plain-text checkpoint with a shape header and hexfloat payload; the
// round trip is bit-exact. Layout is documented in the README.
void save_checkpoint(const PolicyParams& params, const std::string& path);
PolicyParams load_checkpoint(const std::string& path);

}  // namespace prosodyrl
