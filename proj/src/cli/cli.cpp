#include "agentsim/cli/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <csignal>
#include <iostream>

#include "agentsim/cli/play.hpp"
#include "agentsim/core/error.hpp"
#include "agentsim/envsuite/registry.hpp"
#include "agentsim/protocol/benchmark.hpp"
#include "agentsim/protocol/demo.hpp"
#include "agentsim/protocol/recorder.hpp"
#include "agentsim/protocol/server.hpp"
#include "agentsim/trainer/checkpoint.hpp"
#include "agentsim/trainer/train_run.hpp"

namespace agentsim::cli {

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct SignalGuard {
  using Handler = void (*)(int);
  Handler old_int, old_term;
  SignalGuard() {
    g_stop = false;
    old_int = std::signal(SIGINT, on_signal);
    old_term = std::signal(SIGTERM, on_signal);
  }
  ~SignalGuard() {
    std::signal(SIGINT, old_int);
    std::signal(SIGTERM, old_term);
  }
};

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--param", "expected key=value, got '" + item + "'");
    }
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--param", "'" + item + "' has a non-numeric value");
    }
  }
  return out;
}

trainer::ParamMap to_param_map(const std::map<std::string, double>& params) {
  trainer::ParamMap m;
  for (const auto& [k, v] : params) m[k] = trainer::ParamValue{v, {}};
  return m;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"agentsim: multi-agent simulation, protocol server and trainer"};
  app.require_subcommand(1);

  std::string env = "Basic";
  std::uint16_t port = 0;
  std::uint64_t seed = 0;
  std::string config;
  std::vector<std::string> models;
  int episodes = 100;
  int steps = 1000;
  std::string record;
  double speed = 1.0;
  std::vector<std::string> param_items;
  std::string out_dir;
  std::string host = "127.0.0.1";

  auto add_env = [&](CLI::App* sub) {
    sub->add_option("--env", env, "environment name")->check(
        CLI::IsMember(envsuite::environment_names()));
    sub->add_option("--param", param_items, "environment parameter key=value (repeatable)");
  };

  auto* serve = app.add_subcommand("serve", "serve an environment over the framed TCP protocol");
  add_env(serve);
  serve->add_option("--port", port, "listen port")->default_val(protocol::kDefaultPort);
  serve->add_option("--host", host, "listen address");
  serve->add_option("--seed", seed, "environment seed");

  auto* train = app.add_subcommand("train", "run PPO or BC training from a JSON config");
  train->add_option("--config", config, "training config (JSON)")->required()->check(
      CLI::ExistingFile);
  auto* train_seed = train->add_option("--seed", seed, "override the config seed");
  auto* train_steps = train->add_option("--steps", steps, "override total_steps");
  train->add_option("--out", out_dir, "run directory (default: <log root>/<env>_<algo>_s<seed>)");

  auto* play = app.add_subcommand("play", "host the browser play and recording session");
  add_env(play);
  play->add_option("--port", port, "HTTP/WebSocket port")->default_val(8080);
  play->add_option("--host", host, "listen address");
  play->add_option("--seed", seed, "environment seed");
  play->add_option("--record", record, "demo file written when recording stops")
      ->default_val("play.agdm");
  play->add_option("--speed", speed, "real-time multiplier (0: step on every client message)")
      ->check(CLI::NonNegativeNumber);

  auto* rec = app.add_subcommand("record", "record scripted-expert demonstrations");
  add_env(rec);
  rec->add_option("--episodes", episodes, "episodes to record")->check(CLI::PositiveNumber);
  rec->add_option("--seed", seed, "environment seed");
  rec->add_option("--record", record, "output demo file")->required();

  auto* eval = app.add_subcommand("eval", "evaluate checkpoints greedily");
  add_env(eval);
  eval->add_option("--model", models, "checkpoint per behavior, in behavior order")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--episodes", episodes, "episodes")->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed, "evaluation seed");

  auto* bench = app.add_subcommand("benchmark", "time protocol step exchanges over loopback");
  add_env(bench);
  bench->add_option("--steps", steps, "exchanges to time")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "environment seed");

  std::map<std::string, double> params;
  try {
    app.parse(argc, argv);
    params = parse_params(param_items);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (*serve) {
      SignalGuard guard;
      auto academy = envsuite::make_env(env, params, seed);
      protocol::ServerOptions opts;
      opts.host = host;
      opts.port = port;
      opts.metrics_path = protocol::log_root() / ("serve_" + env) / "metrics.jsonl";
      protocol::Server server(*academy, opts);
      server.bind();
      out << "serving " << env << " on " << host << ":" << server.port() << std::endl;
      server.serve(g_stop);
      return 0;
    }

    if (*train) {
      SignalGuard guard;
      trainer::TrainConfig cfg = trainer::load_config(config);
      if (*train_seed) cfg.seed = seed;
      if (*train_steps) cfg.total_steps = static_cast<std::uint64_t>(steps);
      const auto dir = out_dir.empty() ? trainer::default_run_dir(cfg) : std::filesystem::path(out_dir);
      trainer::TrainHooks hooks;
      hooks.on_record = [&](const nlohmann::json& j) { out << j.dump() << std::endl; };
      hooks.should_stop = [] { return g_stop.load(); };
      const auto result = trainer::train_run(cfg, dir, hooks);
      out << result.report.dump(2) << std::endl;
      return 0;
    }

    if (*play) {
      SignalGuard guard;
      PlaySession session(env, params, seed, record);
      PlayServer server(session, {host, port, speed});
      server.bind();
      out << "play " << env << " at http://" << host << ":" << server.port() << "/ (ws /play)"
          << std::endl;
      server.serve(g_stop);
      if (session.last_written()) {
        out << "demo: " << session.last_written()->string() << " (" << session.last_written_records()
            << " records)" << std::endl;
      }
      return 0;
    }

    if (*rec) {
      const auto demo = protocol::record_scripted(env, episodes, seed, params);
      protocol::write_demo(record, demo.spec, demo.records);
      out << nlohmann::json{{"env", env},
                            {"episodes", protocol::episode_count(demo)},
                            {"records", demo.records.size()},
                            {"path", record}}
                 .dump()
          << std::endl;
      return 0;
    }

    if (*eval) {
      const auto def = envsuite::definition(env);
      if (models.size() != def.behaviors.size()) {
        err << "error: " << env << " needs " << def.behaviors.size()
            << " --model file(s), one per behavior\n";
        return 1;
      }
      std::vector<std::unique_ptr<trainer::Policy>> owned;
      std::map<std::string, const trainer::Policy*> policies;
      for (std::size_t i = 0; i < models.size(); ++i) {
        owned.push_back(std::make_unique<trainer::Policy>(def.behaviors[i],
                                                          trainer::load_checkpoint(models[i])));
        policies[def.behaviors[i].name] = owned.back().get();
      }
      const auto r = trainer::evaluate(env, to_param_map(params), policies, "", episodes, seed);
      out << nlohmann::json{{"env", env},
                            {"episodes", r.episodes},
                            {"mean", r.mean},
                            {"std", r.std},
                            {"mean_length", r.mean_length},
                            {"seed", seed}}
                 .dump()
          << std::endl;
      return 0;
    }

    if (*bench) {
      out << protocol::run_benchmark(env, steps, seed, params).to_json().dump() << std::endl;
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace agentsim::cli
