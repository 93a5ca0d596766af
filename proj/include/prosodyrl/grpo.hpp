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

#include <functional>
#include <string>
#include <vector>

#include "prosodyrl/config.hpp"
#include "prosodyrl/feedback_env.hpp"
#include "prosodyrl/policy.hpp"
#include "prosodyrl/rewards.hpp"
#include "prosodyrl/rng.hpp"

namespace prosodyrl {

// One prompt's group of rollouts with their feedback. All vectors share
// length G >= 2. Advantages are zero until compute_advantages fills them.
struct GroupRollout {
  PromptRecord prompt;
  std::vector<SpeechSample> samples;
  std::vector<ProsodyLabels> judged;
  std::vector<double> rewards;
  std::vector<double> advantages;
  std::vector<double> logp_old;
  std::vector<RewardBreakdown> breakdowns;
};

struct GrpoHyper {
  int group_size = 8;
  double beta = 0.01;
  double learning_rate = 0.2;
  int epochs = 7;
  AdvantageMode advantage_mode = AdvantageMode::kStandardized;
  bool use_label_reward = true;
  bool use_group_norm = true;

  AdvantageMode effective_mode() const {
    return use_group_norm ? advantage_mode : AdvantageMode::kRaw;
  }
};

// Draws G samples under params and scores each through the simulated
// channels. Per-sample generator streams are split off the incoming rng so
// sample i's draws do not depend on how many draws sample i-1 consumed.
GroupRollout rollout_group(const PolicyParams& params,
                           const PromptRecord& prompt, int group_size,
                           const AsrNoiseConfig& asr_cfg,
                           const JudgeConfig& judge_cfg,
                           const RewardWeights& weights, Rng& rng);

// standardized: (r - mean) / (population std + 1e-8); centered: r - mean;
// raw: r unchanged.
std::vector<double> compute_advantages(const std::vector<double>& rewards,
                                       AdvantageMode mode);

// Closed-form divergences between the policy's output distributions.
double kl_categorical(const std::vector<double>& p,
                      const std::vector<double>& q);
double kl_bernoulli(double p, double q);

// Mean over prompts of the per-prompt divergence: the four categorical head
// divergences plus one Bernoulli divergence per prompt word.
double kl_divergence(const PolicyParams& params,
                     const PolicyParams& params_old,
                     const std::vector<PromptRecord>& prompts);

// loss = -(1/B) sum_groups (1/G) sum_i A_i * log_prob(params, prompt, s_i)
//        + beta * kl_divergence(params, params_old, batch prompts).
// Descending this loss ascends the group-relative objective.
double grpo_loss(const PolicyParams& params, const PolicyParams& params_old,
                 const std::vector<GroupRollout>& rollouts,
                 const GrpoHyper& hyper);

// Analytic gradient of grpo_loss with respect to params.
PolicyParams grpo_grad(const PolicyParams& params,
                       const PolicyParams& params_old,
                       const std::vector<GroupRollout>& rollouts,
                       const GrpoHyper& hyper);

// One plain gradient descent step on grpo_loss. When grad_out is non-null the
// computed gradient is stored there.
PolicyParams grpo_step(const PolicyParams& params,
                       const PolicyParams& params_old,
                       const std::vector<GroupRollout>& rollouts,
                       const GrpoHyper& hyper,
                       PolicyParams* grad_out = nullptr);

// One metrics line per update step. Rates are means over the step's group.
struct MetricsRow {
  int step = 0;
  int epoch = 0;
  double mean_reward = 0.0;
  double mean_wer = 0.0;
  double label_match_rate = 0.0;
  double match_structure = 0.0;
  double match_emotion = 0.0;
  double match_speed = 0.0;
  double match_tone = 0.0;
  double kl_value = 0.0;
  double grad_norm = 0.0;
  double loss = 0.0;
};

// Single-line record with alphabetically ordered keys; byte-stable for a
// given row.
std::string metrics_row_to_json(const MetricsRow& row);

struct TrainResult {
  PolicyParams params;
  std::vector<MetricsRow> history;
};

using MetricsSink = std::function<void(const MetricsRow&)>;

// Full training loop: per epoch, visit prompts in a seed-shuffled order; per
// prompt, snapshot the policy, roll out one group, compute advantages, and
// take one descent step. Each finished row is handed to sink (when set)
// before the next step starts, so partial metrics survive an abort.
// cfg.max_steps caps total update steps when non-zero. The ablation flags
// act here: use_label_reward=false zeroes alpha2 for the rollout reward,
// use_group_norm=false forces raw advantages.
TrainResult train(const RunConfig& cfg,
                  const std::vector<PromptRecord>& prompts,
                  const MetricsSink& sink = nullptr);

struct EvalReport {
  int n_prompts = 0;
  int n_samples = 0;
  double mean_wer = 0.0;
  double mean_reward = 0.0;
  double label_match_rate = 0.0;
  double match_structure = 0.0;
  double match_emotion = 0.0;
  double match_speed = 0.0;
  double match_tone = 0.0;
};

// Scores params over the dataset with n_samples rollouts per prompt, using
// per-prompt evaluation streams derived from seed.
EvalReport evaluate_policy(const PolicyParams& params,
                           const std::vector<PromptRecord>& prompts,
                           const AsrNoiseConfig& asr_cfg,
                           const JudgeConfig& judge_cfg,
                           const RewardWeights& weights, int n_samples,
                           uint64_t seed);

// Paired comparison of per-step gradient estimate noise between raw and
// standardized advantages. Both modes see the same T rollouts (one group per
// step, prompts visited cyclically), so the comparison is noise-free in the
// pairing. Variance is the trace of the empirical covariance of the per-step
// gradient; mean_norm_sq is the squared norm of the mean gradient. The
// noise-to-signal ratio variance / mean_norm_sq is the scale-free quantity
// to compare across modes, since standardization rescales the gradient.
struct GradientVarianceStats {
  double raw_variance = 0.0;
  double raw_mean_norm_sq = 0.0;
  double std_variance = 0.0;
  double std_mean_norm_sq = 0.0;

  double raw_relative() const { return raw_variance / raw_mean_norm_sq; }
  double std_relative() const { return std_variance / std_mean_norm_sq; }
};

GradientVarianceStats measure_gradient_variance(
    const PolicyParams& params, const std::vector<PromptRecord>& prompts,
    const AsrNoiseConfig& asr_cfg, const JudgeConfig& judge_cfg,
    const RewardWeights& weights, int group_size, int steps, uint64_t seed);

// Bridges from the flat run configuration to the module configs.
AsrNoiseConfig make_asr_config(const RunConfig& cfg);
JudgeConfig make_judge_config(const RunConfig& cfg);
RewardWeights make_reward_weights(const RunConfig& cfg);
GrpoHyper make_hyper(const RunConfig& cfg);

}  // namespace prosodyrl

