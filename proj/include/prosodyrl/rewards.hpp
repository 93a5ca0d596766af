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

#include <array>

#include "prosodyrl/labels.hpp"

namespace prosodyrl {

// Composite reward: total = -alpha1 * wer + alpha2 * label_reward, where the
// label reward is a weighted sum of per-dimension binary matches. Defaults
// keep the label reward in [0, 1]: uniform dimension weights summing to 1,
// alpha1 = 0.3, alpha2 = 0.7.

struct RewardWeights {
  double alpha1 = 0.3;
  double alpha2 = 0.7;
  std::array<double, kDimensionCount> w = {0.25, 0.25, 0.25, 0.25};
};

struct RewardBreakdown {
  double wer_value = 0.0;
  double label_value = 0.0;
  double total = 0.0;
};

// Component k is 1 iff dimension k agrees between predicted and target.
std::array<int, kDimensionCount> match_vector(const ProsodyLabels& predicted,
                                              const ProsodyLabels& target);

// Dot product of the dimension weights with the match vector.
double label_reward(const ProsodyLabels& predicted, const ProsodyLabels& target,
                    const RewardWeights& weights);

RewardBreakdown composite_reward(double wer_value, double label_value,
                                 const RewardWeights& weights);

}  // namespace prosodyrl
