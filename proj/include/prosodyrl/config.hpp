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
#include <cstdint>
#include <string>

namespace prosodyrl {

enum class AdvantageMode { kStandardized, kCentered, kRaw };

std::string to_string(AdvantageMode mode);

// Every trainable and environmental knob of a run. Config files are flat
// key=value text where each key matches a field name below; command line
// overrides use the same keys.
struct RunConfig {
  std::string dataset_path;
  std::string output_dir;
  uint64_t seed = 1;
  int feature_dim = 32;
  int group_size = 8;
  double alpha1 = 0.3;
  double alpha2 = 0.7;
  std::array<double, 4> label_weights = {0.25, 0.25, 0.25, 0.25};
  double beta = 0.01;
  double learning_rate = 0.2;
  int epochs = 7;
  int max_steps = 0;
  double asr_base_sub = 0.4;
  double asr_base_del = 0.4;
  double asr_clean_err = 0.01;
  double asr_speed_slow = 0.5;
  double asr_speed_normal = 1.0;
  double asr_speed_fast = 2.0;
  double judge_flip_prob = 0.05;
  AdvantageMode advantage_mode = AdvantageMode::kStandardized;
  bool use_label_reward = true;
  bool use_group_norm = true;
};

// Reads a config file. Lines are "key = value"; blank lines, comments
// starting with '#', and bracketed section headers are skipped. Unknown keys
// are errors naming the key.
RunConfig load_config(const std::string& path);

// Applies one "key" / "value" override pair onto cfg. Throws on unknown keys
// or unparseable values, naming the field.
void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);

// Renders every effective field in a fixed order, parseable by load_config.
std::string serialize_config(const RunConfig& cfg);

// Range checks; throws naming the first offending field.
void validate_config(const RunConfig& cfg);

}  // namespace prosodyrl

