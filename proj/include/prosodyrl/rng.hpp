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

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace prosodyrl {

// Seeding discipline: every run has one master seed. Independent generator
// streams are derived with splitmix64 over (base xor splitmix64(index)), so
// stream k of a run never depends on how many draws other streams consumed.
// mt19937_64 and the draw helpers below are fully specified, which keeps
// runs byte-reproducible across platforms (std::*_distribution is not, so
// it is deliberately not used anywhere).

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives the seed of sub-stream `stream` from a base seed.
inline uint64_t seed_stream(uint64_t base, uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream));
}

// Two-level split: tag picks the purpose (shuffle, rollout, eval, ...),
// index picks the element within that purpose.
inline uint64_t seed_stream(uint64_t base, uint64_t tag, uint64_t index) {
  return seed_stream(seed_stream(base, tag), index);
}

// Stream tags used by the training loop and the evaluator.
inline constexpr uint64_t kStreamShuffle = 1;
inline constexpr uint64_t kStreamRollout = 2;
inline constexpr uint64_t kStreamEval = 3;
inline constexpr uint64_t kStreamDataset = 4;

// Deterministic draw helpers on top of mt19937_64.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  uint64_t uniform_int(uint64_t n) {
    const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n + 1) % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x > limit);
    return x % n;
  }

  // Index draw from an (unnormalized is not allowed) probability vector.
  // Falls back to the last index when rounding leaves u at the tail.
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double cum = 0.0;
    for (size_t i = 0; i + 1 < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  // Standard normal via Box-Muller; only used by tests to build random
  // parameter vectors, never on the training path.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Fisher-Yates with the helpers above (std::shuffle draws in an
  // implementation-defined way).
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = uniform_int(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace prosodyrl
