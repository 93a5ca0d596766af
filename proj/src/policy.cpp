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

#include "prosodyrl/policy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prosodyrl {

namespace {

// softplus(x) = log(1 + e^x), stable for large |x|.
double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> head_logits(const PolicyParams& params,
                                const PromptFeatures& features,
                                int dimension) {
  const Matrix& head = params.head(dimension);
  std::vector<double> logits(static_cast<size_t>(head.rows), 0.0);
  for (int r = 0; r < head.rows; ++r) {
    double acc = 0.0;
    for (int c = 0; c < head.cols; ++c) {
      acc += head.at(r, c) * features.values[static_cast<size_t>(c)];
    }
    logits[static_cast<size_t>(r)] = acc;
  }
  return logits;
}

// log softmax denominator with the max shifted out.
double log_sum_exp(const std::vector<double>& logits) {
  double max_logit = logits[0];
  for (double l : logits) max_logit = std::max(max_logit, l);
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - max_logit);
  return max_logit + std::log(sum);
}

}  // namespace

Matrix Matrix::zeros(int rows, int cols) {
  Matrix m;
  m.rows = rows;
  m.cols = cols;
  m.data.assign(static_cast<size_t>(rows) * cols, 0.0);
  return m;
}

PolicyParams PolicyParams::zeros(int feature_dim) {
  PolicyParams p;
  p.feature_dim = feature_dim;
  p.head_structure = Matrix::zeros(kStructureCount, feature_dim);
  p.head_emotion = Matrix::zeros(kEmotionCount, feature_dim);
  p.head_speed = Matrix::zeros(kSpeedCount, feature_dim);
  p.head_tone = Matrix::zeros(kToneCount, feature_dim);
  p.head_articulation.assign(static_cast<size_t>(feature_dim), 0.0);
  return p;
}

Matrix& PolicyParams::head(int dimension) {
  switch (dimension) {
    case 0:
      return head_structure;
    case 1:
      return head_emotion;
    case 2:
      return head_speed;
    case 3:
      return head_tone;
    default:
      throw std::out_of_range("head dimension must be in [0, 4)");
  }
}

const Matrix& PolicyParams::head(int dimension) const {
  return const_cast<PolicyParams*>(this)->head(dimension);
}

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t hash = 14695981039346656037ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 1099511628211ULL;
  }
  return hash;
}

PromptFeatures featurize(const std::string& prompt_text, int feature_dim) {
  if (feature_dim < 2) {
    throw std::invalid_argument("feature_dim must be >= 2");
  }
  PromptFeatures features;
  features.values.assign(static_cast<size_t>(feature_dim), 0.0);
  const uint64_t slots = static_cast<uint64_t>(feature_dim) - 1;
  for (const std::string& token : normalize_tokens(prompt_text)) {
    features.values[fnv1a64(token) % slots] += 1.0;
  }
  features.values.back() = 1.0;
  return features;
}

std::vector<double> head_distribution(const PolicyParams& params,
                                      const PromptFeatures& features,
                                      int dimension) {
  std::vector<double> logits = head_logits(params, features, dimension);
  double max_logit = logits[0];
  for (double l : logits) {
    if (!std::isfinite(l)) {
      throw std::runtime_error("non-finite logits in head '" +
                               std::string(kDimensionNames[dimension]) +
                               "': parameter blow-up");
    }
    max_logit = std::max(max_logit, l);
  }
  double sum = 0.0;
  for (double& l : logits) {
    l = std::exp(l - max_logit);
    sum += l;
  }
  for (double& l : logits) l /= sum;
  return logits;
}

double articulation_logit(const PolicyParams& params,
                          const PromptFeatures& features) {
  double acc = 0.0;
  for (size_t c = 0; c < params.head_articulation.size(); ++c) {
    acc += params.head_articulation[c] * features.values[c];
  }
  return acc;
}

double articulation_probability(const PolicyParams& params,
                                const PromptFeatures& features) {
  return sigmoid(articulation_logit(params, features));
}

SpeechSample sample(const PolicyParams& params, const std::string& prompt_text,
                    Rng& rng) {
  const PromptFeatures features = featurize(prompt_text, params.feature_dim);
  SpeechSample out;
  ProsodyLabels labels;
  for (int d = 0; d < kDimensionCount; ++d) {
    const std::vector<double> probs = head_distribution(params, features, d);
    labels = with_label_index(labels, d, rng.categorical(probs));
  }
  out.labels = labels;
  out.words = normalize_tokens(prompt_text);
  const double p_art = articulation_probability(params, features);
  out.articulated.reserve(out.words.size());
  for (size_t i = 0; i < out.words.size(); ++i) {
    out.articulated.push_back(rng.bernoulli(p_art));
  }
  return out;
}

double log_prob(const PolicyParams& params, const std::string& prompt_text,
                const SpeechSample& sample) {
  const PromptFeatures features = featurize(prompt_text, params.feature_dim);
  double lp = 0.0;
  for (int d = 0; d < kDimensionCount; ++d) {
    const std::vector<double> logits = head_logits(params, features, d);
    const int chosen = label_index(sample.labels, d);
    lp += logits[static_cast<size_t>(chosen)] - log_sum_exp(logits);
  }
  const double z = articulation_logit(params, features);
  for (bool flag : sample.articulated) {
    // log sigma(z) = -softplus(-z), log(1 - sigma(z)) = -softplus(z)
    lp -= flag ? softplus(-z) : softplus(z);
  }
  return lp;
}

PolicyParams grad_log_prob(const PolicyParams& params,
                           const std::string& prompt_text,
                           const SpeechSample& sample) {
  const PromptFeatures features = featurize(prompt_text, params.feature_dim);
  PolicyParams grad = PolicyParams::zeros(params.feature_dim);
  for (int d = 0; d < kDimensionCount; ++d) {
    const std::vector<double> probs = head_distribution(params, features, d);
    const int chosen = label_index(sample.labels, d);
    Matrix& g = grad.head(d);
    for (int r = 0; r < g.rows; ++r) {
      const double coeff =
          (r == chosen ? 1.0 : 0.0) - probs[static_cast<size_t>(r)];
      for (int c = 0; c < g.cols; ++c) {
        g.at(r, c) = coeff * features.values[static_cast<size_t>(c)];
      }
    }
  }
  const double p_art = articulation_probability(params, features);
  double coeff = 0.0;
  for (bool flag : sample.articulated) {
    coeff += (flag ? 1.0 : 0.0) - p_art;
  }
  for (size_t c = 0; c < grad.head_articulation.size(); ++c) {
    grad.head_articulation[c] = coeff * features.values[c];
  }
  return grad;
}

void axpy(double a, const PolicyParams& x, PolicyParams& y) {
  if (x.feature_dim != y.feature_dim) {
    throw std::invalid_argument("axpy: parameter shapes differ");
  }
  for (int d = 0; d < kDimensionCount; ++d) {
    const Matrix& xm = x.head(d);
    Matrix& ym = y.head(d);
    for (size_t i = 0; i < xm.data.size(); ++i) ym.data[i] += a * xm.data[i];
  }
  for (size_t i = 0; i < x.head_articulation.size(); ++i) {
    y.head_articulation[i] += a * x.head_articulation[i];
  }
}

double param_norm(const PolicyParams& params) {
  double sq = 0.0;
  for (int d = 0; d < kDimensionCount; ++d) {
    for (double v : params.head(d).data) sq += v * v;
  }
  for (double v : params.head_articulation) sq += v * v;
  return std::sqrt(sq);
}

double param_distance(const PolicyParams& a, const PolicyParams& b) {
  PolicyParams diff = a;
  axpy(-1.0, b, diff);
  return param_norm(diff);
}

bool params_finite(const PolicyParams& params) {
  for (int d = 0; d < kDimensionCount; ++d) {
    for (double v : params.head(d).data) {
      if (!std::isfinite(v)) return false;
    }
  }
  for (double v : params.head_articulation) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

namespace {

void write_row(std::ofstream& out, const double* row, int n) {
  char buf[64];
  for (int c = 0; c < n; ++c) {
    std::snprintf(buf, sizeof(buf), "%a", row[c]);
    out << (c ? " " : "") << buf;
  }
  out << '\n';
}

}  // namespace

void save_checkpoint(const PolicyParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open checkpoint for writing: " + path);
  }
  out << "prosodyrl-checkpoint v1\n";
  out << "feature_dim " << params.feature_dim << '\n';
  out << "categories " << kStructureCount << ' ' << kEmotionCount << ' '
      << kSpeedCount << ' ' << kToneCount << '\n';
  for (int d = 0; d < kDimensionCount; ++d) {
    const Matrix& head = params.head(d);
    out << "block " << kDimensionNames[d] << '\n';
    for (int r = 0; r < head.rows; ++r) {
      write_row(out, head.data.data() + static_cast<size_t>(r) * head.cols,
                head.cols);
    }
  }
  out << "block articulation\n";
  write_row(out, params.head_articulation.data(), params.feature_dim);
  out << "end\n";
  if (!out) {
    throw std::runtime_error("write failed for checkpoint: " + path);
  }
}

namespace {

std::string next_line(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("truncated checkpoint: " + path);
  }
  return line;
}

void parse_row(const std::string& line, double* row, int n,
               const std::string& path) {
  std::istringstream ss(line);
  std::string tok;
  for (int c = 0; c < n; ++c) {
    if (!(ss >> tok)) {
      throw std::runtime_error("short parameter row in checkpoint: " + path);
    }
    row[c] = std::strtod(tok.c_str(), nullptr);
  }
  if (ss >> tok) {
    throw std::runtime_error("excess values in checkpoint row: " + path);
  }
}

}  // namespace

PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open checkpoint: " + path);
  }
  if (next_line(in, path) != "prosodyrl-checkpoint v1") {
    throw std::runtime_error("unrecognized checkpoint header: " + path);
  }
  std::string word;
  int feature_dim = 0;
  {
    std::istringstream ss(next_line(in, path));
    if (!(ss >> word >> feature_dim) || word != "feature_dim" ||
        feature_dim < 2) {
      throw std::runtime_error("bad feature_dim line in checkpoint: " + path);
    }
  }
  {
    std::istringstream ss(next_line(in, path));
    int sizes[kDimensionCount] = {0, 0, 0, 0};
    ss >> word >> sizes[0] >> sizes[1] >> sizes[2] >> sizes[3];
    if (word != "categories" || sizes[0] != kStructureCount ||
        sizes[1] != kEmotionCount || sizes[2] != kSpeedCount ||
        sizes[3] != kToneCount) {
      throw std::runtime_error("category sizes in checkpoint do not match: " +
                               path);
    }
  }
  PolicyParams params = PolicyParams::zeros(feature_dim);
  for (int d = 0; d < kDimensionCount; ++d) {
    const std::string expected = "block " + std::string(kDimensionNames[d]);
    if (next_line(in, path) != expected) {
      throw std::runtime_error("expected '" + expected +
                               "' in checkpoint: " + path);
    }
    Matrix& head = params.head(d);
    for (int r = 0; r < head.rows; ++r) {
      parse_row(next_line(in, path),
                head.data.data() + static_cast<size_t>(r) * head.cols,
                head.cols, path);
    }
  }
  if (next_line(in, path) != "block articulation") {
    throw std::runtime_error("expected 'block articulation' in checkpoint: " +
                             path);
  }
  parse_row(next_line(in, path), params.head_articulation.data(), feature_dim,
            path);
  if (next_line(in, path) != "end") {
    throw std::runtime_error("missing 'end' marker in checkpoint: " + path);
  }
  return params;
}

}  // namespace prosodyrl
