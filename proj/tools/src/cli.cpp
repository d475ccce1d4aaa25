#include "gnireg_cli/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "commands.hpp"
#include "gnireg/errors.hpp"
#include "gnireg/parallel.hpp"
#include "gnireg_cli/config.hpp"

namespace gnireg::cli {

using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::optional<std::int64_t> seed;
  std::string out;
  std::optional<std::size_t> threads;
  std::vector<std::string> checkpoints;
  std::string data;
  bool plot = false;
  std::optional<std::string> mode, noise_mode, activation;
  std::optional<std::size_t> steps, batch, inits, draws, points, probes, bins;
  std::optional<double> lr, noise_variance;
  std::vector<double> sigmas, freqs, amplitudes, alphas;
  std::vector<std::int64_t> hidden;
  std::vector<std::string> sets;
};

struct Command {
  const char* name;
  const char* help;
  void (*fn)(Context&);
};

const Command kCommands[] = {
    {"train", "train a network and log metrics", cmd_train},
    {"dominance", "compare R against the Taylor remainder over random inits", cmd_dominance},
    {"spectrum", "amplitude spectrum of a 1-D network over training", cmd_spectrum},
    {"hesstrace", "Hutchinson estimate of the loss Hessian trace", cmd_hesstrace},
    {"layerstats", "masked layer norms and weight traces", cmd_layerstats},
    {"calibrate", "expected calibration error and reliability table", cmd_calibrate},
    {"sensitivity", "accuracy under Gaussian input corruption", cmd_sensitivity},
    {"margin", "first-order margin bounds and flip distances", cmd_margin},
    {"parseval", "check the derivative energy identity on a sum of tones", cmd_parseval},
    {"gendata", "write a synthetic dataset as CSV", cmd_gendata},
};

void add_options(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "TOML or JSON config file");
  sub.add_option("--seed", f.seed, "master seed");
  sub.add_option("--out", f.out, "output directory");
  sub.add_option("--threads", f.threads, "worker cap")->check(CLI::PositiveNumber);
  sub.add_option("--checkpoint", f.checkpoints, "checkpoint JSON (repeatable)");
  sub.add_option("--data", f.data, "CSV dataset");
  sub.add_flag("--plot", f.plot, "also write SVG plots");
  sub.add_option("--mode", f.mode, "baseline, gni or explicit");
  sub.add_option("--steps", f.steps, "SGD steps");
  sub.add_option("--lr", f.lr, "learning rate");
  sub.add_option("--batch", f.batch, "batch size");
  sub.add_option("--noise-variance", f.noise_variance, "variance on every layer");
  sub.add_option("--noise-mode", f.noise_mode, "additive or multiplicative");
  sub.add_option("--hidden", f.hidden, "hidden widths")->delimiter(',');
  sub.add_option("--activation", f.activation, "hidden activation");
  sub.add_option("--sigmas", f.sigmas, "noise variances to scan")->delimiter(',');
  sub.add_option("--inits", f.inits, "random initialisations");
  sub.add_option("--draws", f.draws, "noise draws per estimate");
  sub.add_option("--freqs", f.freqs, "frequencies")->delimiter(',');
  sub.add_option("--amplitudes", f.amplitudes, "tone amplitudes")->delimiter(',');
  sub.add_option("--points", f.points, "grid or point count");
  sub.add_option("--probes", f.probes, "Hutchinson probes");
  sub.add_option("--bins", f.bins, "calibration bins");
  sub.add_option("--alphas", f.alphas, "corruption scales")->delimiter(',');
  sub.add_option("--set", f.sets, "override any setting: path=value (repeatable)");
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

// Builds the override document implied by flags; it is merged like a
// config file so type checks apply.
json flag_overrides(const std::string& command, const Flags& f) {
  json o = json::object();
  auto put = [&](const std::string& path, json value) {
    json* node = &o;
    std::size_t start = 0;
    for (std::size_t dot; (dot = path.find('.', start)) != std::string::npos; start = dot + 1) {
      node = &(*node)[path.substr(start, dot - start)];
    }
    (*node)[path.substr(start)] = std::move(value);
  };
  if (f.seed) put("seed", *f.seed);
  if (f.threads) put("threads", *f.threads);
  if (!f.out.empty()) put("output_dir", f.out);
  if (f.mode) put("train.mode", *f.mode);
  if (f.steps) put("train.steps", *f.steps);
  if (f.lr) put("train.learning_rate", *f.lr);
  if (f.batch) put("train.batch_size", *f.batch);
  if (f.noise_variance) put("noise.variance", *f.noise_variance);
  if (f.noise_mode) put("noise.mode", *f.noise_mode);
  if (!f.hidden.empty()) put("model.hidden", f.hidden);
  if (f.activation) put("model.activation", *f.activation);
  if (!f.sigmas.empty()) put("diagnostics.sigmas", f.sigmas);
  if (f.inits) put("diagnostics.inits", *f.inits);
  if (f.draws) put("diagnostics.draws", *f.draws);
  if (f.probes) put("diagnostics.probes", *f.probes);
  if (f.bins) put("diagnostics.bins", *f.bins);
  if (!f.alphas.empty()) put("diagnostics.alphas", f.alphas);
  if (!f.amplitudes.empty()) put("diagnostics.amplitudes", f.amplitudes);
  if (!f.freqs.empty()) put(command == "parseval" ? "diagnostics.freqs" : "data.freqs", f.freqs);
  if (f.points) {
    if (command == "parseval" || command == "spectrum") {
      put("diagnostics.grid_points", *f.points);
    } else if (command == "margin") {
      put("diagnostics.points", *f.points);
    } else {
      put("data.points", *f.points);
    }
  }
  if (!f.data.empty()) {
    put("data.kind", "csv");
    put("data.path", f.data);
    if (command == "calibrate" || command == "margin" || command == "sensitivity") {
      put("data.task", "classification");
    }
  }
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set " + s + ": expected path=value");
    put(s.substr(0, eq), parse_value(s.substr(eq + 1)));
  }
  return o;
}

std::filesystem::path output_dir(const json& cfg) {
  const auto configured = get_string(cfg, "output_dir");
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("GNIREG_OUTPUT_DIR"); env && *env) return env;
  return "gnireg-out";
}

int execute(const Command& cmd, const Flags& f, std::ostream& out) {
  json cfg = default_config(cmd.name);
  if (!f.config.empty()) {
    json file = load_config_file(f.config);
    file.erase("command");
    merge_config(cfg, file);
  }
  merge_config(cfg, flag_overrides(cmd.name, f));
  for (const auto& path : f.checkpoints) {
    if (!std::filesystem::exists(path)) throw ConfigError("checkpoint file not found: " + path);
  }

  Context ctx;
  ctx.out_dir = output_dir(cfg);
  cfg["output_dir"] = ctx.out_dir.string();
  ctx.cfg = std::move(cfg);
  ctx.checkpoints = f.checkpoints;
  ctx.plot = f.plot;
  ctx.out = &out;
  set_max_threads(std::max<std::size_t>(1, get_count(ctx.cfg, "threads")));
  std::filesystem::create_directories(ctx.out_dir);
  cmd.fn(ctx);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian noise injection experiments"};
  app.name("gnireg");
  app.require_subcommand(1);
  Flags flags;
  std::map<CLI::App*, const Command*> subs;
  for (const auto& c : kCommands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_options(*sub, flags);
    subs[sub] = &c;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const Command* cmd = nullptr;
  for (auto& [sub, c] : subs) {
    if (sub->parsed()) cmd = c;
  }

  const std::string prefix = std::string("gnireg ") + cmd->name + ": ";
  try {
    return execute(*cmd, flags, out);
  } catch (const ConfigError& e) {
    err << prefix << e.what() << '\n';
    return 2;
  } catch (const ArgumentError& e) {
    err << prefix << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << prefix << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    err << prefix << e.what() << '\n';
    return 2;
  } catch (const UnsupportedError& e) {
    err << prefix << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    err << prefix << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << prefix << e.what() << '\n';
    return 1;
  }
}

}  // namespace gnireg::cli
