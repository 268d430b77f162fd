// Copyright 2026 The vcl Authors. All Rights Reserved.
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

#include "vcl/core/config.hpp"

#include "vcl/core/errors.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace vcl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Field {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
};

#define VCL_INT_FIELD(name, member)                                                          \
  Field {                                                                                    \
    name, [](const ExperimentConfig& c) { return std::to_string(c.member); },                \
        [](ExperimentConfig& c, const std::string& k, const std::string& v) {                \
          c.member = static_cast<decltype(c.member)>(parse_int(k, v));                       \
        }                                                                                    \
  }
#define VCL_DOUBLE_FIELD(name, member)                                                       \
  Field {                                                                                    \
    name, [](const ExperimentConfig& c) { return fmt_double(c.member); },                    \
        [](ExperimentConfig& c, const std::string& k, const std::string& v) {                \
          c.member = parse_double(k, v);                                                     \
        }                                                                                    \
  }
#define VCL_BOOL_FIELD(name, member)                                                         \
  Field {                                                                                    \
    name, [](const ExperimentConfig& c) { return std::string(c.member ? "true" : "false"); }, \
        [](ExperimentConfig& c, const std::string& k, const std::string& v) {                \
          c.member = parse_bool(k, v);                                                       \
        }                                                                                    \
  }
#define VCL_STRING_FIELD(name, member)                                                       \
  Field {                                                                                    \
    name, [](const ExperimentConfig& c) { return c.member; },                                \
        [](ExperimentConfig& c, const std::string&, const std::string& v) { c.member = v; }  \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      VCL_STRING_FIELD("dataset", dataset),
      VCL_STRING_FIELD("cache_dir", cache_dir),
      VCL_INT_FIELD("n_tasks", n_tasks),
      VCL_INT_FIELD("frames", dims.frames),
      VCL_INT_FIELD("tokens", dims.tokens),
      VCL_INT_FIELD("input_width", dims.input_width),
      VCL_INT_FIELD("model_width", dims.model_width),
      VCL_INT_FIELD("prompts_per_task", dims.prompts_per_task),
      VCL_INT_FIELD("spatial_prompt_len", dims.spatial_prompt_len),
      VCL_INT_FIELD("temporal_prompt_len", dims.temporal_prompt_len),
      VCL_INT_FIELD("memory_budget", memory_budget),
      VCL_STRING_FIELD("optimizer", optimizer.method),
      VCL_DOUBLE_FIELD("learning_rate", optimizer.learning_rate),
      VCL_DOUBLE_FIELD("momentum", optimizer.momentum),
      VCL_INT_FIELD("batch_size", optimizer.batch_size),
      VCL_INT_FIELD("epochs", optimizer.epochs),
      Field{"variant", [](const ExperimentConfig& c) { return to_string(c.variant); },
            [](ExperimentConfig& c, const std::string&, const std::string& v) {
              c.variant = parse_variant(v);
            }},
      VCL_INT_FIELD("seed", seed),
      VCL_DOUBLE_FIELD("temperature", temperature),
      VCL_STRING_FIELD("text_template", text_template),
      VCL_INT_FIELD("temporal_layers", temporal_layers),
      VCL_INT_FIELD("temporal_heads", temporal_heads),
      VCL_INT_FIELD("ffn_width", ffn_width),
      VCL_BOOL_FIELD("positional_embeddings", positional_embeddings),
      VCL_DOUBLE_FIELD("dropout", dropout),
      VCL_BOOL_FIELD("stage3", stage3),
      VCL_BOOL_FIELD("stage3_prompted_term", stage3_prompted_term),
      VCL_INT_FIELD("l2p_pool_size", l2p_pool_size),
      VCL_INT_FIELD("l2p_prompt_length", l2p_prompt_length),
      VCL_INT_FIELD("l2p_top_k", l2p_top_k),
      VCL_DOUBLE_FIELD("l2p_learning_rate", l2p_learning_rate),
      VCL_DOUBLE_FIELD("l2p_key_weight", l2p_key_weight),
      VCL_INT_FIELD("num_classes", synthetic.num_classes),
      VCL_INT_FIELD("train_per_class", synthetic.train_per_class),
      VCL_INT_FIELD("eval_per_class", synthetic.eval_per_class),
      VCL_INT_FIELD("raw_frames", synthetic.raw_frames),
      VCL_DOUBLE_FIELD("sigma_fraction", synthetic.sigma_fraction),
      VCL_DOUBLE_FIELD("sigma", synthetic.sigma),
      VCL_INT_FIELD("foreground_patches", synthetic.foreground_patches),
      VCL_DOUBLE_FIELD("marker_strength", synthetic.marker_strength),
      VCL_DOUBLE_FIELD("attention_gain", synthetic.attention_gain),
      VCL_INT_FIELD("encoder_seed", synthetic.encoder_seed),
  };
  return table;
}

#undef VCL_INT_FIELD
#undef VCL_DOUBLE_FIELD
#undef VCL_BOOL_FIELD
#undef VCL_STRING_FIELD

}  // namespace

ExperimentConfig ExperimentConfig::synthetic_benchmark() {
  ExperimentConfig cfg;
  cfg.dataset = "synthetic";
  cfg.n_tasks = 5;
  cfg.dims.frames = 8;
  cfg.dims.tokens = 8;
  cfg.dims.input_width = 32;
  cfg.dims.model_width = 32;
  cfg.memory_budget = 100;
  cfg.synthetic = SyntheticSettings{};
  return cfg;
}

void ExperimentConfig::validate() const {
  dims.validate();
  if (dataset != "synthetic" && dataset != "cache") {
    throw ConfigError("dataset must be 'synthetic' or 'cache', got '" + dataset + "'");
  }
  if (dataset == "cache" && cache_dir.empty()) {
    throw ConfigError("dataset 'cache' requires cache_dir");
  }
  if (n_tasks < 1) throw ConfigError("n_tasks must be >= 1");
  if (memory_budget < 0) throw ConfigError("memory_budget must be >= 0");
  if (optimizer.method != "sgd" && optimizer.method != "adam") {
    throw ConfigError("optimizer must be 'sgd' or 'adam'");
  }
  if (!(optimizer.learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  if (optimizer.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (optimizer.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(temperature > 0)) throw ConfigError("temperature must be positive");
  if (text_template.find("{label}") == std::string::npos) {
    throw ConfigError("text_template must contain '{label}'");
  }
  if (temporal_layers < 0 || temporal_heads < 1) {
    throw ConfigError("temporal encoder needs layers >= 0 and heads >= 1");
  }
  if (dims.model_width % temporal_heads != 0) {
    throw ConfigError("model_width must be divisible by temporal_heads");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
  if (uses_task_prompts(variant) && dims.prompts_per_task < 1) {
    throw ConfigError("variant pivot requires prompts_per_task >= 1");
  }
  if (l2p_top_k < 1 || l2p_top_k > l2p_pool_size || l2p_prompt_length < 1) {
    throw ConfigError("l2p settings need 1 <= top_k <= pool_size and prompt_length >= 1");
  }
  if (dataset == "synthetic") {
    const auto& s = synthetic;
    if (s.num_classes < 1 || s.train_per_class < 1 || s.eval_per_class < 1) {
      throw ConfigError("synthetic: class and sample counts must be positive");
    }
    if (s.raw_frames < dims.frames) throw ConfigError("synthetic: raw_frames must be >= frames");
    if (s.foreground_patches < 0 || s.foreground_patches >= dims.tokens - 1) {
      throw ConfigError("synthetic: foreground_patches must leave at least one background patch");
    }
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::map<std::string, std::string> out;
  for (const auto& f : fields()) out[f.key] = f.get(*this);
  return out;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : to_map()) j[k] = v;
  return j;
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg.to_map()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace vcl
