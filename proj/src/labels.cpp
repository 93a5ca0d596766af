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

#include "prosodyrl/labels.hpp"

#include <stdexcept>

namespace prosodyrl {

namespace {

constexpr std::array<std::string_view, kStructureCount> kStructureNames = {
    "statement", "question", "exclamation"};
constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "neutral", "happy", "sad", "angry", "surprised"};
constexpr std::array<std::string_view, kSpeedCount> kSpeedNames = {
    "slow", "normal", "fast"};
constexpr std::array<std::string_view, kToneCount> kToneNames = {
    "flat", "rising", "falling"};

template <typename Enum, size_t N>
std::optional<Enum> from_string(const std::array<std::string_view, N>& names,
                                std::string_view name) {
  for (size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Structure s) {
  return kStructureNames[static_cast<size_t>(s)];
}
std::string_view to_string(Emotion e) {
  return kEmotionNames[static_cast<size_t>(e)];
}
std::string_view to_string(Speed s) {
  return kSpeedNames[static_cast<size_t>(s)];
}
std::string_view to_string(Tone t) {
  return kToneNames[static_cast<size_t>(t)];
}

std::optional<Structure> structure_from_string(std::string_view name) {
  return from_string<Structure>(kStructureNames, name);
}
std::optional<Emotion> emotion_from_string(std::string_view name) {
  return from_string<Emotion>(kEmotionNames, name);
}
std::optional<Speed> speed_from_string(std::string_view name) {
  return from_string<Speed>(kSpeedNames, name);
}
std::optional<Tone> tone_from_string(std::string_view name) {
  return from_string<Tone>(kToneNames, name);
}

int label_index(const ProsodyLabels& labels, int dimension) {
  switch (dimension) {
    case 0:
      return static_cast<int>(labels.structure);
    case 1:
      return static_cast<int>(labels.emotion);
    case 2:
      return static_cast<int>(labels.speed);
    case 3:
      return static_cast<int>(labels.tone);
    default:
      throw std::out_of_range("label dimension must be in [0, 4)");
  }
}

ProsodyLabels with_label_index(ProsodyLabels labels, int dimension,
                               int value) {
  if (dimension >= 0 && dimension < kDimensionCount &&
      (value < 0 || value >= kCategoryCounts[dimension])) {
    throw std::out_of_range("label value out of range for its dimension");
  }
  switch (dimension) {
    case 0:
      labels.structure = static_cast<Structure>(value);
      break;
    case 1:
      labels.emotion = static_cast<Emotion>(value);
      break;
    case 2:
      labels.speed = static_cast<Speed>(value);
      break;
    case 3:
      labels.tone = static_cast<Tone>(value);
      break;
    default:
      throw std::out_of_range("label dimension must be in [0, 4)");
  }
  return labels;
}

}  // namespace prosodyrl
