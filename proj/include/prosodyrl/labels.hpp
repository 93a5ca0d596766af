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
#include <optional>
#include <string>
#include <string_view>

namespace prosodyrl {

// Closed category sets for the four prosodic-emotional dimensions. The
// enumerator order fixes the row order of the policy heads and the layout
// of checkpoints, so it must not be reordered. Serialized names are the
// lowercase strings below, bit-exact in dataset and metrics files.

enum class Structure : int { kStatement = 0, kQuestion = 1, kExclamation = 2 };
enum class Emotion : int {
  kNeutral = 0,
  kHappy = 1,
  kSad = 2,
  kAngry = 3,
  kSurprised = 4
};
enum class Speed : int { kSlow = 0, kNormal = 1, kFast = 2 };
enum class Tone : int { kFlat = 0, kRising = 1, kFalling = 2 };

inline constexpr int kStructureCount = 3;
inline constexpr int kEmotionCount = 5;
inline constexpr int kSpeedCount = 3;
inline constexpr int kToneCount = 3;
inline constexpr int kDimensionCount = 4;

inline constexpr std::array<int, kDimensionCount> kCategoryCounts = {
    kStructureCount, kEmotionCount, kSpeedCount, kToneCount};

inline constexpr std::array<std::string_view, kDimensionCount>
    kDimensionNames = {"structure", "emotion", "speed", "tone"};

struct ProsodyLabels {
  Structure structure = Structure::kStatement;
  Emotion emotion = Emotion::kNeutral;
  Speed speed = Speed::kNormal;
  Tone tone = Tone::kFlat;

  bool operator==(const ProsodyLabels&) const = default;
};

std::string_view to_string(Structure s);
std::string_view to_string(Emotion e);
std::string_view to_string(Speed s);
std::string_view to_string(Tone t);

std::optional<Structure> structure_from_string(std::string_view name);
std::optional<Emotion> emotion_from_string(std::string_view name);
std::optional<Speed> speed_from_string(std::string_view name);
std::optional<Tone> tone_from_string(std::string_view name);

// Category index along one of the four dimensions (0 = structure, ...).
int label_index(const ProsodyLabels& labels, int dimension);
ProsodyLabels with_label_index(ProsodyLabels labels, int dimension, int value);

}  // namespace prosodyrl
