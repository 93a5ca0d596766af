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

#include "prosodyrl/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "prosodyrl/config.hpp"
#include "prosodyrl/feedback_env.hpp"
#include "prosodyrl/grpo.hpp"
#include "prosodyrl/textmetrics.hpp"

namespace prosodyrl {

namespace {

bool verbose_enabled() {
  const char* value = std::getenv("PROSODYRL_VERBOSE");
  return value != nullptr && value[0] != '\0' &&
         std::string(value) != "0";
}

int report_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << '\n';
  return 1;
}

}  // namespace

int cmd_train(const std::string& config_path,
              const std::vector<std::pair<std::string, std::string>>&
                  overrides) {
  try {
    RunConfig cfg = load_config(config_path);
    for (const auto& [key, value] : overrides) {
      apply_override(cfg, key, value);
    }
    validate_config(cfg);
    if (cfg.dataset_path.empty()) {
      throw std::runtime_error("config field 'dataset_path' must be set");
    }
    if (cfg.output_dir.empty()) {
      throw std::runtime_error("config field 'output_dir' must be set");
    }
    const std::vector<PromptRecord> prompts = load_prompts(cfg.dataset_path);

    std::filesystem::create_directories(cfg.output_dir);
    const std::filesystem::path out_dir(cfg.output_dir);
    {
      std::ofstream snapshot(out_dir / "config_resolved.cfg");
      if (!snapshot) {
        throw std::runtime_error("cannot write to output_dir: " +
                                 cfg.output_dir);
      }
      snapshot << serialize_config(cfg);
    }

    std::ofstream metrics(out_dir / "metrics.jsonl");
    if (!metrics) {
      throw std::runtime_error("cannot write to output_dir: " +
                               cfg.output_dir);
    }
    const bool verbose = verbose_enabled();
    const MetricsSink sink = [&metrics, verbose](const MetricsRow& row) {
      const std::string line = metrics_row_to_json(row);
      metrics << line << '\n';
      metrics.flush();
      if (verbose) {
        std::cerr << line << '\n';
      }
    };
    const TrainResult result = train(cfg, prompts, sink);
    save_checkpoint(result.params,
                    (out_dir / "checkpoint_final.txt").string());
    std::cout << "train: " << result.history.size() << " steps, outputs in "
              << cfg.output_dir << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int cmd_eval(const std::string& checkpoint_path,
             const std::string& dataset_path, int n_samples, uint64_t seed,
             bool seed_given, const std::string& config_path,
             const std::string& out_path) {
  try {
    if (n_samples < 1) {
      throw std::runtime_error("--n-samples must be >= 1");
    }
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
      validate_config(cfg);
    }
    const PolicyParams params = load_checkpoint(checkpoint_path);
    if (!config_path.empty() && cfg.feature_dim != params.feature_dim) {
      throw std::runtime_error(
          "checkpoint feature_dim " + std::to_string(params.feature_dim) +
          " does not match config feature_dim " +
          std::to_string(cfg.feature_dim));
    }
    const std::vector<PromptRecord> prompts = load_prompts(dataset_path);
    const uint64_t eval_seed = seed_given ? seed : cfg.seed;
    const EvalReport report =
        evaluate_policy(params, prompts, make_asr_config(cfg),
                        make_judge_config(cfg), make_reward_weights(cfg),
                        n_samples, eval_seed);
    nlohmann::json j;
    j["n_prompts"] = report.n_prompts;
    j["n_samples"] = report.n_samples;
    j["seed"] = eval_seed;
    j["mean_wer"] = report.mean_wer;
    j["mean_reward"] = report.mean_reward;
    j["label_match_rate"] = report.label_match_rate;
    j["match_structure"] = report.match_structure;
    j["match_emotion"] = report.match_emotion;
    j["match_speed"] = report.match_speed;
    j["match_tone"] = report.match_tone;
    const std::string line = j.dump();
    std::cout << line << '\n';
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) {
        throw std::runtime_error("cannot write report: " + out_path);
      }
      out << line << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

int cmd_wer(const std::string& ref_path, const std::string& hyp_path) {
  try {
    const std::vector<std::string> refs = read_lines(ref_path);
    const std::vector<std::string> hyps = read_lines(hyp_path);
    if (refs.size() != hyps.size()) {
      throw std::runtime_error(
          "line count mismatch: ref has " + std::to_string(refs.size()) +
          " lines, hyp has " + std::to_string(hyps.size()));
    }
    long total_errors = 0;
    long total_ref = 0;
    for (size_t i = 0; i < refs.size(); ++i) {
      const EditCounts counts =
          edit_counts(normalize_tokens(refs[i]), normalize_tokens(hyps[i]));
      total_errors += counts.total_errors();
      total_ref += counts.reference_length;
      std::printf("line %zu: errors=%ld ref=%ld wer=%.6f\n", i + 1,
                  counts.total_errors(), counts.reference_length,
                  wer_from_counts(counts.total_errors(),
                                  counts.reference_length));
    }
    std::printf("corpus: errors=%ld ref_tokens=%ld wer=%.6f\n", total_errors,
                total_ref, wer_from_counts(total_errors, total_ref));
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int cmd_datagen(int n, uint64_t seed, const std::string& out_path) {
  try {
    if (n < 1) {
      throw std::runtime_error("--n must be >= 1");
    }
    Rng rng(seed_stream(seed, kStreamDataset, 0));
    const TemplateBank bank = default_template_bank();
    save_prompts(generate_dataset(n, rng, bank), out_path);
    std::cout << "datagen: wrote " << n << " records to " << out_path << '\n';
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

namespace {

std::vector<std::pair<std::string, std::string>> pair_overrides(
    const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (size_t i = 0; i < extras.size(); ++i) {
    std::string token = extras[i];
    if (token.rfind("--", 0) != 0) {
      throw std::runtime_error("expected --key before '" + token + "'");
    }
    token = token.substr(2);
    const size_t eq = token.find('=');
    if (eq != std::string::npos) {
      overrides.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) {
        throw std::runtime_error("override --" + token + " is missing a value");
      }
      overrides.emplace_back(token, extras[++i]);
    }
  }
  return overrides;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"GRPO trainer for a toy prosody-labeled speech generator"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train a policy from a config file");
  train_cmd->add_option("--config", config_path, "Run config file")
      ->required();
  train_cmd->allow_extras();

  std::string checkpoint_path;
  std::string eval_dataset;
  std::string eval_config;
  std::string eval_out;
  int n_samples = 4;
  uint64_t eval_seed = 0;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Score a checkpoint over a dataset");
  eval_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint file")
      ->required();
  eval_cmd->add_option("--dataset", eval_dataset, "Dataset file")->required();
  eval_cmd->add_option("--n-samples", n_samples, "Samples per prompt");
  CLI::Option* seed_opt =
      eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");
  eval_cmd->add_option("--config", eval_config,
                       "Config supplying environment and reward fields");
  eval_cmd->add_option("--out", eval_out, "Write the JSON report here too");

  std::string ref_path;
  std::string hyp_path;
  CLI::App* wer_cmd =
      app.add_subcommand("wer", "Word error rate between line-aligned files");
  wer_cmd->add_option("--ref", ref_path, "Reference text file")->required();
  wer_cmd->add_option("--hyp", hyp_path, "Hypothesis text file")->required();

  int datagen_n = 0;
  uint64_t datagen_seed = 1;
  std::string datagen_out;
  CLI::App* datagen_cmd =
      app.add_subcommand("datagen", "Generate a prompt dataset");
  datagen_cmd->add_option("--n", datagen_n, "Record count")->required();
  datagen_cmd->add_option("--seed", datagen_seed, "Generator seed");
  datagen_cmd->add_option("--out", datagen_out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train_cmd->parsed()) {
      return cmd_train(config_path, pair_overrides(train_cmd->remaining()));
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(checkpoint_path, eval_dataset, n_samples, eval_seed,
                      seed_opt->count() > 0, eval_config, eval_out);
    }
    if (wer_cmd->parsed()) {
      return cmd_wer(ref_path, hyp_path);
    }
    if (datagen_cmd->parsed()) {
      return cmd_datagen(datagen_n, datagen_seed, datagen_out);
    }
  } catch (const std::exception& e) {
    return report_error(e);
  }
  std::cerr << "error: no subcommand selected\n";
  return 1;
}

}  // namespace prosodyrl
