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

#include "prosodyrl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prosodyrl {

namespace {

std::string trim(const std::string& s) {
  const size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::runtime_error("config field '" + key + "': cannot parse value '" +
                           value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) bad_value(key, value);
    return parsed;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int parsed = std::stoi(value, &used);
    if (used != value.size()) bad_value(key, value);
    return parsed;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  // stoull would wrap a negative literal around instead of failing.
  if (value.find('-') != std::string::npos) bad_value(key, value);
  try {
    size_t used = 0;
    const uint64_t parsed = std::stoull(value, &used);
    if (used != value.size()) bad_value(key, value);
    return parsed;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::array<double, 4> parse_weights(const std::string& key,
                                    const std::string& value) {
  std::array<double, 4> out;
  std::stringstream ss(value);
  std::string part;
  for (int i = 0; i < 4; ++i) {
    if (!std::getline(ss, part, ',')) bad_value(key, value);
    out[static_cast<size_t>(i)] = parse_double(key, trim(part));
  }
  if (std::getline(ss, part, ',')) bad_value(key, value);
  return out;
}

AdvantageMode parse_mode(const std::string& key, const std::string& value) {
  if (value == "standardized") return AdvantageMode::kStandardized;
  if (value == "centered") return AdvantageMode::kCentered;
  if (value == "raw") return AdvantageMode::kRaw;
  bad_value(key, value);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_string(AdvantageMode mode) {
  switch (mode) {
    case AdvantageMode::kStandardized:
      return "standardized";
    case AdvantageMode::kCentered:
      return "centered";
    case AdvantageMode::kRaw:
      return "raw";
  }
  throw std::out_of_range("invalid advantage mode");
}

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "dataset_path") {
    cfg.dataset_path = value;
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "feature_dim") {
    cfg.feature_dim = parse_int(key, value);
  } else if (key == "group_size") {
    cfg.group_size = parse_int(key, value);
  } else if (key == "alpha1") {
    cfg.alpha1 = parse_double(key, value);
  } else if (key == "alpha2") {
    cfg.alpha2 = parse_double(key, value);
  } else if (key == "label_weights") {
    cfg.label_weights = parse_weights(key, value);
  } else if (key == "beta") {
    cfg.beta = parse_double(key, value);
  } else if (key == "learning_rate") {
    cfg.learning_rate = parse_double(key, value);
  } else if (key == "epochs") {
    cfg.epochs = parse_int(key, value);
  } else if (key == "max_steps") {
    cfg.max_steps = parse_int(key, value);
  } else if (key == "asr_base_sub") {
    cfg.asr_base_sub = parse_double(key, value);
  } else if (key == "asr_base_del") {
    cfg.asr_base_del = parse_double(key, value);
  } else if (key == "asr_clean_err") {
    cfg.asr_clean_err = parse_double(key, value);
  } else if (key == "asr_speed_slow") {
    cfg.asr_speed_slow = parse_double(key, value);
  } else if (key == "asr_speed_normal") {
    cfg.asr_speed_normal = parse_double(key, value);
  } else if (key == "asr_speed_fast") {
    cfg.asr_speed_fast = parse_double(key, value);
  } else if (key == "judge_flip_prob") {
    cfg.judge_flip_prob = parse_double(key, value);
  } else if (key == "advantage_mode") {
    cfg.advantage_mode = parse_mode(key, value);
  } else if (key == "use_label_reward") {
    cfg.use_label_reward = parse_bool(key, value);
  } else if (key == "use_group_norm") {
    cfg.use_group_norm = parse_bool(key, value);
  } else {
    throw std::runtime_error("unknown config field '" + key + "'");
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config: " + path);
  }
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == '[') continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    apply_override(cfg, trim(stripped.substr(0, eq)),
                   trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "dataset_path = " << cfg.dataset_path << '\n';
  out << "output_dir = " << cfg.output_dir << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "feature_dim = " << cfg.feature_dim << '\n';
  out << "group_size = " << cfg.group_size << '\n';
  out << "alpha1 = " << format_double(cfg.alpha1) << '\n';
  out << "alpha2 = " << format_double(cfg.alpha2) << '\n';
  out << "label_weights = " << format_double(cfg.label_weights[0]) << ','
      << format_double(cfg.label_weights[1]) << ','
      << format_double(cfg.label_weights[2]) << ','
      << format_double(cfg.label_weights[3]) << '\n';
  out << "beta = " << format_double(cfg.beta) << '\n';
  out << "learning_rate = " << format_double(cfg.learning_rate) << '\n';
  out << "epochs = " << cfg.epochs << '\n';
  out << "max_steps = " << cfg.max_steps << '\n';
  out << "asr_base_sub = " << format_double(cfg.asr_base_sub) << '\n';
  out << "asr_base_del = " << format_double(cfg.asr_base_del) << '\n';
  out << "asr_clean_err = " << format_double(cfg.asr_clean_err) << '\n';
  out << "asr_speed_slow = " << format_double(cfg.asr_speed_slow) << '\n';
  out << "asr_speed_normal = " << format_double(cfg.asr_speed_normal) << '\n';
  out << "asr_speed_fast = " << format_double(cfg.asr_speed_fast) << '\n';
  out << "judge_flip_prob = " << format_double(cfg.judge_flip_prob) << '\n';
  out << "advantage_mode = " << to_string(cfg.advantage_mode) << '\n';
  out << "use_label_reward = " << (cfg.use_label_reward ? "true" : "false")
      << '\n';
  out << "use_group_norm = " << (cfg.use_group_norm ? "true" : "false")
      << '\n';
  return out.str();
}

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) {
    throw std::runtime_error("config field '" + std::string(field) + "' " +
                             what);
  }
}

void require_prob(double v, const char* field) {
  require(v >= 0.0 && v <= 1.0 && std::isfinite(v), field,
          "must be a probability in [0, 1]");
}

}  // namespace

void validate_config(const RunConfig& cfg) {
  require(cfg.feature_dim >= 2, "feature_dim", "must be >= 2");
  require(cfg.group_size >= 2, "group_size", "must be >= 2");
  require(cfg.alpha1 >= 0.0 && std::isfinite(cfg.alpha1), "alpha1",
          "must be non-negative");
  require(cfg.alpha2 >= 0.0 && std::isfinite(cfg.alpha2), "alpha2",
          "must be non-negative");
  for (double w : cfg.label_weights) {
    require(w >= 0.0 && std::isfinite(w), "label_weights",
            "must be non-negative");
  }
  require(cfg.beta >= 0.0 && std::isfinite(cfg.beta), "beta",
          "must be non-negative");
  require(cfg.learning_rate >= 0.0 && std::isfinite(cfg.learning_rate),
          "learning_rate", "must be non-negative");
  require(cfg.epochs >= 0, "epochs", "must be >= 0");
  require(cfg.max_steps >= 0, "max_steps", "must be >= 0 (0 means no cap)");
  require_prob(cfg.asr_base_sub, "asr_base_sub");
  require_prob(cfg.asr_base_del, "asr_base_del");
  require_prob(cfg.asr_clean_err, "asr_clean_err");
  require(cfg.asr_speed_slow >= 0.0 && std::isfinite(cfg.asr_speed_slow),
          "asr_speed_slow", "must be non-negative");
  require(cfg.asr_speed_normal >= 0.0 && std::isfinite(cfg.asr_speed_normal),
          "asr_speed_normal", "must be non-negative");
  require(cfg.asr_speed_fast >= 0.0 && std::isfinite(cfg.asr_speed_fast),
          "asr_speed_fast", "must be non-negative");
  require(cfg.judge_flip_prob >= 0.0 && cfg.judge_flip_prob < 0.5 &&
              std::isfinite(cfg.judge_flip_prob),
          "judge_flip_prob", "must be in [0, 0.5)");
}

}  // namespace prosodyrl
