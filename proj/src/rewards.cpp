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

#include "prosodyrl/rewards.hpp"

namespace prosodyrl {

std::array<int, kDimensionCount> match_vector(const ProsodyLabels& predicted,
                                              const ProsodyLabels& target) {
  return {predicted.structure == target.structure ? 1 : 0,
          predicted.emotion == target.emotion ? 1 : 0,
          predicted.speed == target.speed ? 1 : 0,
          predicted.tone == target.tone ? 1 : 0};
}

double label_reward(const ProsodyLabels& predicted, const ProsodyLabels& target,
                    const RewardWeights& weights) {
  const auto matches = match_vector(predicted, target);
  double reward = 0.0;
  for (int k = 0; k < kDimensionCount; ++k) {
    reward += weights.w[static_cast<size_t>(k)] * matches[static_cast<size_t>(k)];
  }
  return reward;
}

RewardBreakdown composite_reward(double wer_value, double label_value,
                                 const RewardWeights& weights) {
  RewardBreakdown breakdown;
  breakdown.wer_value = wer_value;
  breakdown.label_value = label_value;
  breakdown.total = -weights.alpha1 * wer_value + weights.alpha2 * label_value;
  return breakdown;
}

}  // namespace prosodyrl
