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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace prosodyrl {

// Runs a training job: resolved config snapshot, per-step flushed metrics
// file, and final checkpoint land in the config's output_dir.
int cmd_train(const std::string& config_path,
              const std::vector<std::pair<std::string, std::string>>&
                  overrides);

// Scores a checkpoint over a dataset; prints a one-line JSON report and
// optionally writes it to out_path. config_path (may be empty) supplies the
// environment and reward fields; its feature_dim must then match the
// checkpoint.
int cmd_eval(const std::string& checkpoint_path,
             const std::string& dataset_path, int n_samples, uint64_t seed,
             bool seed_given, const std::string& config_path,
             const std::string& out_path);

// Prints per-line and corpus word error rates for two line-aligned files.
int cmd_wer(const std::string& ref_path, const std::string& hyp_path);

// Generates a dataset file from the default template bank.
int cmd_datagen(int n, uint64_t seed, const std::string& out_path);

// Argument parsing and dispatch for the prosodyrl binary.
int run_cli(int argc, const char* const* argv);

}  // namespace prosodyrl

