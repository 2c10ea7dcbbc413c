#include "agentsim/trainer/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "agentsim/core/error.hpp"

namespace agentsim::trainer {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); }

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) invalid("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ParamMap param_map_from_json(const json& j) {
  ParamMap out;
  if (j.is_null()) return out;
  if (!j.is_object()) invalid("parameter map must be an object");
  for (const auto& [key, v] : j.items()) {
    ParamValue p;
    if (v.is_number()) {
      p.fixed = v.get<double>();
    } else if (v.is_object() && v.contains("uniform")) {
      const auto& r = v.at("uniform");
      if (!r.is_array() || r.size() != 2) invalid("uniform sampler needs [low, high]");
      p.sampler.kind = kernel::ParameterSampler::Kind::kUniform;
      p.sampler.low = r[0].get<double>();
      p.sampler.high = r[1].get<double>();
    } else if (v.is_object() && v.contains("choice")) {
      p.sampler.kind = kernel::ParameterSampler::Kind::kChoice;
      p.sampler.choices = v.at("choice").get<std::vector<double>>();
      if (p.sampler.choices.empty()) invalid("choice sampler needs at least one value");
    } else {
      invalid("parameter '" + key + "' must be a number, {uniform: [lo, hi]} or {choice: [...]}");
    }
    out[key] = std::move(p);
  }
  return out;
}

json to_json(const ParamMap& params) {
  json j = json::object();
  for (const auto& [key, p] : params) {
    if (p.fixed) {
      j[key] = *p.fixed;
    } else if (p.sampler.kind == kernel::ParameterSampler::Kind::kUniform) {
      j[key] = {{"uniform", {p.sampler.low, p.sampler.high}}};
    } else {
      j[key] = {{"choice", p.sampler.choices}};
    }
  }
  return j;
}

void apply_params(kernel::Academy& academy, const ParamMap& params) {
  for (const auto& [key, p] : params) {
    if (p.fixed) {
      academy.set_environment_parameter(key, *p.fixed);
    } else {
      academy.set_parameter_sampler(key, p.sampler);
    }
  }
}

std::map<std::string, double> fixed_params(const ParamMap& params) {
  std::map<std::string, double> out;
  for (const auto& [key, p] : params) {
    if (p.fixed) out[key] = *p.fixed;
  }
  return out;
}

void TrainConfig::validate() const {
  if (algorithm != "ppo" && algorithm != "bc") invalid("algorithm must be 'ppo' or 'bc'");
  if (!(gamma >= 0.0 && gamma <= 1.0)) invalid("gamma must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) invalid("lambda must lie in [0, 1]");
  if (!(clip_eps > 0.0)) invalid("clip_eps must be positive");
  if (!(lr > 0.0)) invalid("lr must be positive");
  if (horizon <= 0 || batch_size <= 0 || minibatch_size <= 0 || epochs <= 0) {
    invalid("horizon, batch_size, minibatch_size and epochs must be positive");
  }
  if (eval_episodes <= 0) invalid("eval_episodes must be positive");
  for (int h : hidden) {
    if (h <= 0) invalid("hidden layer sizes must be positive");
  }
  if (icm.enabled && (icm.feature_dim <= 0 || icm.beta < 0.0 || icm.beta > 1.0)) {
    invalid("icm needs feature_dim > 0 and beta in [0, 1]");
  }
  if (self_play.enabled && (self_play.window == 0 || self_play.snapshot_interval == 0 ||
                            self_play.p_latest < 0.0 || self_play.p_latest > 1.0)) {
    invalid("self_play needs window > 0, snapshot_interval > 0 and p_latest in [0, 1]");
  }
}

TrainConfig config_from_json(const json& j) {
  if (!j.is_object()) invalid("config must be a JSON object");
  reject_unknown(j,
                 {"env", "env_params", "algorithm", "gamma", "lambda", "clip_eps", "lr",
                  "entropy_coef", "value_coef", "horizon", "batch_size", "minibatch_size", "epochs",
                  "total_steps", "icm", "self_play", "curriculum", "seed", "hidden", "activation",
                  "max_grad_norm", "eval_episodes", "eval_interval", "eval_deterministic", "eval_splits", "demo",
                  "demo_episodes", "init_model"},
                 "config");
  TrainConfig c;
  read(j, "env", c.env);
  if (j.contains("env_params")) c.env_params = param_map_from_json(j.at("env_params"));
  read(j, "algorithm", c.algorithm);
  read(j, "gamma", c.gamma);
  read(j, "lambda", c.lambda);
  read(j, "clip_eps", c.clip_eps);
  read(j, "lr", c.lr);
  read(j, "entropy_coef", c.entropy_coef);
  read(j, "value_coef", c.value_coef);
  read(j, "horizon", c.horizon);
  read(j, "batch_size", c.batch_size);
  read(j, "minibatch_size", c.minibatch_size);
  read(j, "epochs", c.epochs);
  read(j, "total_steps", c.total_steps);
  read(j, "seed", c.seed);
  read(j, "hidden", c.hidden);
  if (j.contains("activation")) {
    const auto a = j.at("activation").get<std::string>();
    if (a == "tanh") {
      c.activation = Activation::kTanh;
    } else if (a == "relu") {
      c.activation = Activation::kRelu;
    } else {
      invalid("activation must be 'tanh' or 'relu'");
    }
  }
  read(j, "max_grad_norm", c.max_grad_norm);
  read(j, "eval_episodes", c.eval_episodes);
  read(j, "eval_interval", c.eval_interval);
  read(j, "eval_deterministic", c.eval_deterministic);
  read(j, "demo", c.demo);
  read(j, "demo_episodes", c.demo_episodes);
  read(j, "init_model", c.init_model);
  if (j.contains("icm")) {
    const auto& i = j.at("icm");
    reject_unknown(i, {"enabled", "eta", "beta", "feature_dim"}, "icm");
    c.icm.enabled = true;
    read(i, "enabled", c.icm.enabled);
    read(i, "eta", c.icm.eta);
    read(i, "beta", c.icm.beta);
    read(i, "feature_dim", c.icm.feature_dim);
  }
  if (j.contains("self_play")) {
    const auto& s = j.at("self_play");
    reject_unknown(s,
                   {"enabled", "snapshot_interval", "window", "p_latest", "initial_elo", "k_factor",
                    "swap_interval"},
                   "self_play");
    c.self_play.enabled = true;
    read(s, "enabled", c.self_play.enabled);
    read(s, "snapshot_interval", c.self_play.snapshot_interval);
    read(s, "window", c.self_play.window);
    read(s, "p_latest", c.self_play.p_latest);
    read(s, "initial_elo", c.self_play.initial_elo);
    read(s, "k_factor", c.self_play.k_factor);
    read(s, "swap_interval", c.self_play.swap_interval);
  }
  if (j.contains("curriculum")) c.curriculum = lesson_plan_from_json(j.at("curriculum"));
  if (j.contains("eval_splits")) {
    for (const auto& [name, split] : j.at("eval_splits").items()) {
      c.eval_splits[name] = param_map_from_json(split);
    }
  }
  c.validate();
  return c;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json to_json(const TrainConfig& c) {
  json j = {{"env", c.env},
            {"env_params", to_json(c.env_params)},
            {"algorithm", c.algorithm},
            {"gamma", c.gamma},
            {"lambda", c.lambda},
            {"clip_eps", c.clip_eps},
            {"lr", c.lr},
            {"entropy_coef", c.entropy_coef},
            {"value_coef", c.value_coef},
            {"horizon", c.horizon},
            {"batch_size", c.batch_size},
            {"minibatch_size", c.minibatch_size},
            {"epochs", c.epochs},
            {"total_steps", c.total_steps},
            {"seed", c.seed},
            {"hidden", c.hidden},
            {"activation", c.activation == Activation::kTanh ? "tanh" : "relu"},
            {"max_grad_norm", c.max_grad_norm},
            {"eval_episodes", c.eval_episodes},
            {"eval_interval", c.eval_interval},
            {"eval_deterministic", c.eval_deterministic},
            {"demo", c.demo},
            {"demo_episodes", c.demo_episodes},
            {"init_model", c.init_model},
            {"icm",
             {{"enabled", c.icm.enabled},
              {"eta", c.icm.eta},
              {"beta", c.icm.beta},
              {"feature_dim", c.icm.feature_dim}}},
            {"self_play",
             {{"enabled", c.self_play.enabled},
              {"snapshot_interval", c.self_play.snapshot_interval},
              {"window", c.self_play.window},
              {"p_latest", c.self_play.p_latest},
              {"initial_elo", c.self_play.initial_elo},
              {"k_factor", c.self_play.k_factor},
              {"swap_interval", c.self_play.swap_interval}}}};
  if (!c.curriculum.empty()) j["curriculum"] = to_json(c.curriculum);
  json splits = json::object();
  for (const auto& [name, p] : c.eval_splits) splits[name] = to_json(p);
  j["eval_splits"] = splits;
  return j;
}

std::string config_hash(const TrainConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace agentsim::trainer
