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

#include <functional>
#include <string>

#include "doctest.h"
#include "prosodyrl/config.hpp"
#include "test_util.hpp"

using namespace prosodyrl;

namespace {

std::string thrown_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("default configuration values") {
  const RunConfig cfg;
  CHECK(cfg.seed == 1);
  CHECK(cfg.feature_dim == 32);
  CHECK(cfg.group_size == 8);
  CHECK(cfg.alpha1 == 0.3);
  CHECK(cfg.alpha2 == 0.7);
  CHECK(cfg.label_weights ==
        std::array<double, 4>{0.25, 0.25, 0.25, 0.25});
  CHECK(cfg.beta == 0.01);
  CHECK(cfg.learning_rate == 0.2);
  CHECK(cfg.epochs == 7);
  CHECK(cfg.max_steps == 0);
  CHECK(cfg.asr_base_sub == 0.4);
  CHECK(cfg.asr_base_del == 0.4);
  CHECK(cfg.asr_clean_err == 0.01);
  CHECK(cfg.asr_speed_slow == 0.5);
  CHECK(cfg.asr_speed_normal == 1.0);
  CHECK(cfg.asr_speed_fast == 2.0);
  CHECK(cfg.judge_flip_prob == 0.05);
  CHECK(cfg.advantage_mode == AdvantageMode::kStandardized);
  CHECK(cfg.use_label_reward);
  CHECK(cfg.use_group_norm);
  validate_config(cfg);
}

TEST_CASE("serialized configs parse back to the same values") {
  RunConfig cfg;
  cfg.dataset_path = "data/prompts.jsonl";
  cfg.output_dir = "runs/a";
  cfg.seed = 42;
  cfg.feature_dim = 40;
  cfg.label_weights = {0.1, 0.4, 0.2, 0.3};
  cfg.learning_rate = 0.05;
  cfg.advantage_mode = AdvantageMode::kCentered;
  cfg.use_group_norm = false;
  testutil::TempDir dir("config");
  const std::string path = dir.file("run.cfg");
  testutil::write_file(path, serialize_config(cfg));
  const RunConfig loaded = load_config(path);
  CHECK(loaded.dataset_path == cfg.dataset_path);
  CHECK(loaded.output_dir == cfg.output_dir);
  CHECK(loaded.seed == cfg.seed);
  CHECK(loaded.feature_dim == cfg.feature_dim);
  CHECK(loaded.label_weights == cfg.label_weights);
  CHECK(loaded.learning_rate == cfg.learning_rate);
  CHECK(loaded.advantage_mode == cfg.advantage_mode);
  CHECK(loaded.use_group_norm == cfg.use_group_norm);
  CHECK(serialize_config(loaded) == serialize_config(cfg));
}

TEST_CASE("config files allow comments, sections, and spacing") {
  testutil::TempDir dir("config_fmt");
  const std::string path = dir.file("run.cfg");
  testutil::write_file(path,
                       "# a comment\n"
                       "\n"
                       "[run]\n"
                       "  seed=9\n"
                       "feature_dim =  12\n"
                       "advantage_mode = raw\n"
                       "label_weights = 0.5, 0.25, 0.125 ,0.125\n");
  const RunConfig cfg = load_config(path);
  CHECK(cfg.seed == 9);
  CHECK(cfg.feature_dim == 12);
  CHECK(cfg.advantage_mode == AdvantageMode::kRaw);
  CHECK(cfg.label_weights == std::array<double, 4>{0.5, 0.25, 0.125, 0.125});
}

TEST_CASE("malformed config lines name the line") {
  testutil::TempDir dir("config_bad");
  const std::string path = dir.file("run.cfg");
  testutil::write_file(path, "seed = 1\nthis is not a setting\n");
  const std::string msg =
      thrown_message([&] { static_cast<void>(load_config(path)); });
  CHECK(msg.find("config line 2") != std::string::npos);
  CHECK(thrown_message([&] {
          static_cast<void>(load_config(dir.file("absent.cfg")));
        }).find("cannot open config") != std::string::npos);
}

TEST_CASE("overrides update fields and reject unknown keys") {
  RunConfig cfg;
  apply_override(cfg, "learning_rate", "0.125");
  CHECK(cfg.learning_rate == 0.125);
  apply_override(cfg, "use_label_reward", "false");
  CHECK_FALSE(cfg.use_label_reward);
  apply_override(cfg, "use_label_reward", "1");
  CHECK(cfg.use_label_reward);
  apply_override(cfg, "advantage_mode", "centered");
  CHECK(cfg.advantage_mode == AdvantageMode::kCentered);
  apply_override(cfg, "max_steps", "250");
  CHECK(cfg.max_steps == 250);

  const std::string msg = thrown_message(
      [&] { apply_override(cfg, "learning_rte", "0.1"); });
  CHECK(msg.find("unknown config field 'learning_rte'") != std::string::npos);
}

TEST_CASE("unparseable values name the field") {
  RunConfig cfg;
  CHECK(thrown_message([&] { apply_override(cfg, "beta", "fast"); })
            .find("config field 'beta'") != std::string::npos);
  CHECK(thrown_message([&] { apply_override(cfg, "epochs", "2.5"); })
            .find("config field 'epochs'") != std::string::npos);
  CHECK(thrown_message([&] { apply_override(cfg, "seed", "-3"); })
            .find("'seed'") != std::string::npos);
  CHECK(thrown_message([&] {
          apply_override(cfg, "label_weights", "0.5,0.5");
        }).find("'label_weights'") != std::string::npos);
  CHECK(thrown_message([&] {
          apply_override(cfg, "label_weights", "0.25,0.25,0.25,0.25,0.25");
        }).find("'label_weights'") != std::string::npos);
  CHECK(thrown_message([&] {
          apply_override(cfg, "advantage_mode", "normalized");
        }).find("'advantage_mode'") != std::string::npos);
  CHECK(thrown_message([&] {
          apply_override(cfg, "use_group_norm", "maybe");
        }).find("'use_group_norm'") != std::string::npos);
}

TEST_CASE("validation names the offending field") {
  const auto violation = [](const std::function<void(RunConfig&)>& mutate) {
    RunConfig cfg;
    mutate(cfg);
    return thrown_message([&] { validate_config(cfg); });
  };
  CHECK(violation([](RunConfig& c) { c.feature_dim = 1; })
            .find("'feature_dim'") != std::string::npos);
  CHECK(violation([](RunConfig& c) { c.group_size = 1; })
            .find("'group_size'") != std::string::npos);
  CHECK(violation([](RunConfig& c) { c.alpha1 = -0.1; })
            .find("'alpha1'") != std::string::npos);
  CHECK(violation([](RunConfig& c) { c.label_weights[2] = -1.0; })
            .find("'label_weights'") != std::string::npos);
  CHECK(violation([](RunConfig& c) { c.learning_rate = -0.5; })
            .find("'learning_rate'") != std::string::npos);
  CHECK(violation([](RunConfig& c) { c.epochs = -1; })
            .find("'epochs'") != std::string::npos);
  CHECK(violation([](RunConfig& c) { c.max_steps = -5; })
            .find("'max_steps'") != std::string::npos);
  CHECK(violation([](RunConfig& c) { c.asr_base_sub = 1.5; })
            .find("'asr_base_sub'") != std::string::npos);
  CHECK(violation([](RunConfig& c) { c.asr_clean_err = -0.01; })
            .find("'asr_clean_err'") != std::string::npos);
  CHECK(violation([](RunConfig& c) { c.asr_speed_fast = -2.0; })
            .find("'asr_speed_fast'") != std::string::npos);
  CHECK(violation([](RunConfig& c) { c.judge_flip_prob = 0.5; })
            .find("'judge_flip_prob'") != std::string::npos);

  RunConfig zero_lr;
  zero_lr.learning_rate = 0.0;
  validate_config(zero_lr);
}

TEST_CASE("advantage mode names round trip") {
  CHECK(to_string(AdvantageMode::kStandardized) == "standardized");
  CHECK(to_string(AdvantageMode::kCentered) == "centered");
  CHECK(to_string(AdvantageMode::kRaw) == "raw");
}
