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

#include "prosodyrl/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "prosodyrl/textmetrics.hpp"

namespace prosodyrl {

GroupRollout rollout_group(const PolicyParams& params,
                           const PromptRecord& prompt, int group_size,
                           const AsrNoiseConfig& asr_cfg,
                           const JudgeConfig& judge_cfg,
                           const RewardWeights& weights, Rng& rng) {
  if (group_size < 2) {
    throw std::invalid_argument("rollout_group: group size must be >= 2");
  }
  GroupRollout out;
  out.prompt = prompt;
  const size_t g = static_cast<size_t>(group_size);
  out.samples.reserve(g);
  out.judged.reserve(g);
  out.rewards.reserve(g);
  out.logp_old.reserve(g);
  out.breakdowns.reserve(g);
  const uint64_t base = rng.next_u64();
  for (int i = 0; i < group_size; ++i) {
    Rng sub(seed_stream(base, static_cast<uint64_t>(i)));
    SpeechSample s = sample(params, prompt.text, sub);
    const std::string transcript = simulate_asr(s, asr_cfg, sub);
    const ProsodyLabels judged = judge_labels(s, judge_cfg, sub);
    const RewardBreakdown breakdown = composite_reward(
        wer(prompt.text, transcript), label_reward(judged, prompt.target, weights),
        weights);
    out.logp_old.push_back(log_prob(params, prompt.text, s));
    out.samples.push_back(std::move(s));
    out.judged.push_back(judged);
    out.rewards.push_back(breakdown.total);
    out.breakdowns.push_back(breakdown);
  }
  out.advantages.assign(g, 0.0);
  return out;
}

std::vector<double> compute_advantages(const std::vector<double>& rewards,
                                       AdvantageMode mode) {
  if (rewards.size() < 2) {
    throw std::invalid_argument("compute_advantages: need at least 2 rewards");
  }
  if (mode == AdvantageMode::kRaw) {
    return rewards;
  }
  const double n = static_cast<double>(rewards.size());
  const double mean =
      std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  std::vector<double> advantages(rewards.size());
  for (size_t i = 0; i < rewards.size(); ++i) {
    advantages[i] = rewards[i] - mean;
  }
  if (mode == AdvantageMode::kStandardized) {
    double var = 0.0;
    for (double a : advantages) var += a * a;
    const double denom = std::sqrt(var / n) + 1e-8;
    for (double& a : advantages) a /= denom;
  }
  return advantages;
}

double kl_categorical(const std::vector<double>& p,
                      const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("kl_categorical: size mismatch");
  }
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return kl;
}

double kl_bernoulli(double p, double q) {
  double kl = 0.0;
  if (p > 0.0) kl += p * (std::log(p) - std::log(q));
  if (p < 1.0) kl += (1.0 - p) * (std::log1p(-p) - std::log1p(-q));
  return kl;
}

double kl_divergence(const PolicyParams& params,
                     const PolicyParams& params_old,
                     const std::vector<PromptRecord>& prompts) {
  if (prompts.empty()) {
    throw std::invalid_argument("kl_divergence: empty prompt batch");
  }
  double total = 0.0;
  for (const PromptRecord& prompt : prompts) {
    const PromptFeatures features = featurize(prompt.text, params.feature_dim);
    double per_prompt = 0.0;
    for (int d = 0; d < kDimensionCount; ++d) {
      per_prompt += kl_categorical(head_distribution(params, features, d),
                                   head_distribution(params_old, features, d));
    }
    const double n_words =
        static_cast<double>(normalize_tokens(prompt.text).size());
    per_prompt += n_words *
                  kl_bernoulli(articulation_probability(params, features),
                               articulation_probability(params_old, features));
    total += per_prompt;
  }
  return total / static_cast<double>(prompts.size());
}

double grpo_loss(const PolicyParams& params, const PolicyParams& params_old,
                 const std::vector<GroupRollout>& rollouts,
                 const GrpoHyper& hyper) {
  if (rollouts.empty()) {
    throw std::invalid_argument("grpo_loss: empty rollout batch");
  }
  double policy_term = 0.0;
  for (const GroupRollout& group : rollouts) {
    double group_term = 0.0;
    for (size_t i = 0; i < group.samples.size(); ++i) {
      group_term += group.advantages[i] *
                    log_prob(params, group.prompt.text, group.samples[i]);
    }
    policy_term += group_term / static_cast<double>(group.samples.size());
  }
  double loss = -policy_term / static_cast<double>(rollouts.size());
  if (hyper.beta != 0.0) {
    std::vector<PromptRecord> prompts;
    prompts.reserve(rollouts.size());
    for (const GroupRollout& group : rollouts) prompts.push_back(group.prompt);
    loss += hyper.beta * kl_divergence(params, params_old, prompts);
  }
  if (!std::isfinite(loss)) {
    throw std::runtime_error("grpo_loss diverged to a non-finite value");
  }
  return loss;
}

namespace {

// d KL(p(u) || q) / d u_k = p_k * ((ln p_k - ln q_k) - KL); the articulation
// counterpart is s(1-s)(z - z_old) per word. Both follow from
// differentiating the closed forms through softmax and sigmoid.
void accumulate_kl_gradient(const PolicyParams& params,
                            const PolicyParams& params_old,
                            const std::vector<PromptRecord>& prompts,
                            double scale, PolicyParams& acc) {
  for (const PromptRecord& prompt : prompts) {
    const PromptFeatures features = featurize(prompt.text, params.feature_dim);
    for (int d = 0; d < kDimensionCount; ++d) {
      const std::vector<double> p = head_distribution(params, features, d);
      const std::vector<double> q =
          head_distribution(params_old, features, d);
      const double kl = kl_categorical(p, q);
      Matrix& g = acc.head(d);
      for (int r = 0; r < g.rows; ++r) {
        const size_t k = static_cast<size_t>(r);
        if (p[k] <= 0.0 || q[k] <= 0.0) continue;
        const double coeff = p[k] * ((std::log(p[k]) - std::log(q[k])) - kl);
        for (int c = 0; c < g.cols; ++c) {
          g.at(r, c) += scale * coeff * features.values[static_cast<size_t>(c)];
        }
      }
    }
    const double z = articulation_logit(params, features);
    const double z_old = articulation_logit(params_old, features);
    const double s = articulation_probability(params, features);
    const double n_words =
        static_cast<double>(normalize_tokens(prompt.text).size());
    const double coeff = n_words * s * (1.0 - s) * (z - z_old);
    for (size_t c = 0; c < acc.head_articulation.size(); ++c) {
      acc.head_articulation[c] += scale * coeff * features.values[c];
    }
  }
}

}  // namespace

PolicyParams grpo_grad(const PolicyParams& params,
                       const PolicyParams& params_old,
                       const std::vector<GroupRollout>& rollouts,
                       const GrpoHyper& hyper) {
  if (rollouts.empty()) {
    throw std::invalid_argument("grpo_grad: empty rollout batch");
  }
  PolicyParams acc = PolicyParams::zeros(params.feature_dim);
  const double batch = static_cast<double>(rollouts.size());
  for (const GroupRollout& group : rollouts) {
    const double group_scale =
        -1.0 / (batch * static_cast<double>(group.samples.size()));
    for (size_t i = 0; i < group.samples.size(); ++i) {
      if (group.advantages[i] == 0.0) continue;
      axpy(group_scale * group.advantages[i],
           grad_log_prob(params, group.prompt.text, group.samples[i]), acc);
    }
  }
  if (hyper.beta != 0.0) {
    std::vector<PromptRecord> prompts;
    prompts.reserve(rollouts.size());
    for (const GroupRollout& group : rollouts) prompts.push_back(group.prompt);
    accumulate_kl_gradient(params, params_old, prompts, hyper.beta / batch,
                           acc);
  }
  return acc;
}

PolicyParams grpo_step(const PolicyParams& params,
                       const PolicyParams& params_old,
                       const std::vector<GroupRollout>& rollouts,
                       const GrpoHyper& hyper, PolicyParams* grad_out) {
  PolicyParams grad = grpo_grad(params, params_old, rollouts, hyper);
  if (!params_finite(grad)) {
    throw std::runtime_error(
        "grpo_step aborted: non-finite gradient (policy diverged)");
  }
  PolicyParams updated = params;
  axpy(-hyper.learning_rate, grad, updated);
  if (grad_out != nullptr) {
    *grad_out = std::move(grad);
  }
  return updated;
}

std::string metrics_row_to_json(const MetricsRow& row) {
  nlohmann::json j;
  j["step"] = row.step;
  j["epoch"] = row.epoch;
  j["mean_reward"] = row.mean_reward;
  j["mean_wer"] = row.mean_wer;
  j["label_match_rate"] = row.label_match_rate;
  j["match_structure"] = row.match_structure;
  j["match_emotion"] = row.match_emotion;
  j["match_speed"] = row.match_speed;
  j["match_tone"] = row.match_tone;
  j["kl_value"] = row.kl_value;
  j["grad_norm"] = row.grad_norm;
  j["loss"] = row.loss;
  return j.dump();
}

AsrNoiseConfig make_asr_config(const RunConfig& cfg) {
  AsrNoiseConfig asr;
  asr.base_sub = cfg.asr_base_sub;
  asr.base_del = cfg.asr_base_del;
  asr.clean_err = cfg.asr_clean_err;
  asr.speed_slow = cfg.asr_speed_slow;
  asr.speed_normal = cfg.asr_speed_normal;
  asr.speed_fast = cfg.asr_speed_fast;
  return asr;
}

JudgeConfig make_judge_config(const RunConfig& cfg) {
  return JudgeConfig{cfg.judge_flip_prob};
}

RewardWeights make_reward_weights(const RunConfig& cfg) {
  RewardWeights weights;
  weights.alpha1 = cfg.alpha1;
  weights.alpha2 = cfg.alpha2;
  weights.w = cfg.label_weights;
  return weights;
}

GrpoHyper make_hyper(const RunConfig& cfg) {
  GrpoHyper hyper;
  hyper.group_size = cfg.group_size;
  hyper.beta = cfg.beta;
  hyper.learning_rate = cfg.learning_rate;
  hyper.epochs = cfg.epochs;
  hyper.advantage_mode = cfg.advantage_mode;
  hyper.use_label_reward = cfg.use_label_reward;
  hyper.use_group_norm = cfg.use_group_norm;
  return hyper;
}

namespace {

MetricsRow summarize_step(int step, int epoch, const GroupRollout& rollout,
                          double kl_value, double grad_norm, double loss) {
  MetricsRow row;
  row.step = step;
  row.epoch = epoch;
  const double g = static_cast<double>(rollout.samples.size());
  std::array<double, kDimensionCount> matches = {0.0, 0.0, 0.0, 0.0};
  for (size_t i = 0; i < rollout.samples.size(); ++i) {
    row.mean_reward += rollout.rewards[i];
    row.mean_wer += rollout.breakdowns[i].wer_value;
    const std::array<int, kDimensionCount> m =
        match_vector(rollout.judged[i], rollout.prompt.target);
    for (int d = 0; d < kDimensionCount; ++d) {
      matches[static_cast<size_t>(d)] += m[static_cast<size_t>(d)];
    }
  }
  row.mean_reward /= g;
  row.mean_wer /= g;
  row.match_structure = matches[0] / g;
  row.match_emotion = matches[1] / g;
  row.match_speed = matches[2] / g;
  row.match_tone = matches[3] / g;
  row.label_match_rate = (row.match_structure + row.match_emotion +
                          row.match_speed + row.match_tone) /
                         kDimensionCount;
  row.kl_value = kl_value;
  row.grad_norm = grad_norm;
  row.loss = loss;
  return row;
}

}  // namespace

TrainResult train(const RunConfig& cfg,
                  const std::vector<PromptRecord>& prompts,
                  const MetricsSink& sink) {
  if (prompts.empty()) {
    throw std::invalid_argument("train: empty dataset");
  }
  const AsrNoiseConfig asr_cfg = make_asr_config(cfg);
  const JudgeConfig judge_cfg = make_judge_config(cfg);
  const GrpoHyper hyper = make_hyper(cfg);
  RewardWeights weights = make_reward_weights(cfg);
  if (!cfg.use_label_reward) {
    weights.alpha2 = 0.0;
  }

  TrainResult result;
  result.params = PolicyParams::zeros(cfg.feature_dim);
  int step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<size_t> order(prompts.size());
    std::iota(order.begin(), order.end(), size_t{0});
    Rng shuffle_rng(
        seed_stream(cfg.seed, kStreamShuffle, static_cast<uint64_t>(epoch)));
    shuffle_rng.shuffle(order);
    for (size_t idx : order) {
      if (cfg.max_steps > 0 && step >= cfg.max_steps) {
        return result;
      }
      ++step;
      const PromptRecord& prompt = prompts[idx];
      const PolicyParams params_old = result.params;
      Rng rollout_rng(
          seed_stream(cfg.seed, kStreamRollout, static_cast<uint64_t>(step)));
      std::vector<GroupRollout> batch;
      batch.push_back(rollout_group(params_old, prompt, hyper.group_size,
                                    asr_cfg, judge_cfg, weights, rollout_rng));
      batch[0].advantages =
          compute_advantages(batch[0].rewards, hyper.effective_mode());
      const double loss =
          grpo_loss(result.params, params_old, batch, hyper);
      PolicyParams grad;
      result.params =
          grpo_step(result.params, params_old, batch, hyper, &grad);
      const double kl_value =
          kl_divergence(result.params, params_old, {prompt});
      const MetricsRow row = summarize_step(step, epoch, batch[0], kl_value,
                                            param_norm(grad), loss);
      if (sink) {
        sink(row);
      }
      result.history.push_back(row);
    }
  }
  return result;
}

EvalReport evaluate_policy(const PolicyParams& params,
                           const std::vector<PromptRecord>& prompts,
                           const AsrNoiseConfig& asr_cfg,
                           const JudgeConfig& judge_cfg,
                           const RewardWeights& weights, int n_samples,
                           uint64_t seed) {
  if (prompts.empty()) {
    throw std::invalid_argument("evaluate_policy: empty dataset");
  }
  if (n_samples < 1) {
    throw std::invalid_argument("evaluate_policy: n_samples must be >= 1");
  }
  EvalReport report;
  report.n_prompts = static_cast<int>(prompts.size());
  report.n_samples = n_samples;
  std::array<double, kDimensionCount> matches = {0.0, 0.0, 0.0, 0.0};
  for (size_t p = 0; p < prompts.size(); ++p) {
    const PromptRecord& prompt = prompts[p];
    Rng rng(seed_stream(seed, kStreamEval, static_cast<uint64_t>(p)));
    for (int k = 0; k < n_samples; ++k) {
      const SpeechSample s = sample(params, prompt.text, rng);
      const std::string transcript = simulate_asr(s, asr_cfg, rng);
      const ProsodyLabels judged = judge_labels(s, judge_cfg, rng);
      const double wer_value = wer(prompt.text, transcript);
      const double label_value = label_reward(judged, prompt.target, weights);
      report.mean_wer += wer_value;
      report.mean_reward +=
          composite_reward(wer_value, label_value, weights).total;
      const std::array<int, kDimensionCount> m =
          match_vector(judged, prompt.target);
      for (int d = 0; d < kDimensionCount; ++d) {
        matches[static_cast<size_t>(d)] += m[static_cast<size_t>(d)];
      }
    }
  }
  const double total = static_cast<double>(prompts.size()) * n_samples;
  report.mean_wer /= total;
  report.mean_reward /= total;
  report.match_structure = matches[0] / total;
  report.match_emotion = matches[1] / total;
  report.match_speed = matches[2] / total;
  report.match_tone = matches[3] / total;
  report.label_match_rate = (report.match_structure + report.match_emotion +
                             report.match_speed + report.match_tone) /
                            kDimensionCount;
  return report;
}

GradientVarianceStats measure_gradient_variance(
    const PolicyParams& params, const std::vector<PromptRecord>& prompts,
    const AsrNoiseConfig& asr_cfg, const JudgeConfig& judge_cfg,
    const RewardWeights& weights, int group_size, int steps, uint64_t seed) {
  if (prompts.empty() || steps < 2) {
    throw std::invalid_argument(
        "measure_gradient_variance: need prompts and steps >= 2");
  }
  GrpoHyper hyper;
  hyper.group_size = group_size;
  hyper.beta = 0.0;
  PolicyParams raw_sum = PolicyParams::zeros(params.feature_dim);
  PolicyParams std_sum = PolicyParams::zeros(params.feature_dim);
  double raw_sq = 0.0;
  double std_sq = 0.0;
  for (int t = 1; t <= steps; ++t) {
    const PromptRecord& prompt =
        prompts[static_cast<size_t>(t - 1) % prompts.size()];
    Rng rng(seed_stream(seed, kStreamRollout, static_cast<uint64_t>(t)));
    std::vector<GroupRollout> batch;
    batch.push_back(rollout_group(params, prompt, group_size, asr_cfg,
                                  judge_cfg, weights, rng));
    batch[0].advantages =
        compute_advantages(batch[0].rewards, AdvantageMode::kRaw);
    const PolicyParams raw_grad = grpo_grad(params, params, batch, hyper);
    batch[0].advantages =
        compute_advantages(batch[0].rewards, AdvantageMode::kStandardized);
    const PolicyParams std_grad = grpo_grad(params, params, batch, hyper);
    axpy(1.0, raw_grad, raw_sum);
    axpy(1.0, std_grad, std_sum);
    const double raw_norm = param_norm(raw_grad);
    const double std_norm = param_norm(std_grad);
    raw_sq += raw_norm * raw_norm;
    std_sq += std_norm * std_norm;
  }
  const double t = static_cast<double>(steps);
  GradientVarianceStats stats;
  const double raw_mean_norm = param_norm(raw_sum) / t;
  const double std_mean_norm = param_norm(std_sum) / t;
  stats.raw_mean_norm_sq = raw_mean_norm * raw_mean_norm;
  stats.std_mean_norm_sq = std_mean_norm * std_mean_norm;
  stats.raw_variance = std::max(0.0, raw_sq / t - stats.raw_mean_norm_sq);
  stats.std_variance = std::max(0.0, std_sq / t - stats.std_mean_norm_sq);
  return stats;
}

}  // namespace prosodyrl
