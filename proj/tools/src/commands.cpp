#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "gnireg/calibration.hpp"
#include "gnireg/checkpoint.hpp"
#include "gnireg/csv.hpp"
#include "gnireg/diagnostics.hpp"
#include "gnireg/errors.hpp"
#include "gnireg/spectrum.hpp"
#include "gnireg/trainer.hpp"
#include "gnireg_cli/config.hpp"
#include "gnireg_cli/svg.hpp"

namespace gnireg::cli {

using nlohmann::json;

namespace {

template <typename T>
std::vector<T> get_list(const json& cfg, const std::string& path) {
  const json& node = get_node(cfg, path);
  if (!node.is_array()) throw ConfigError(path + ": expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const json& v = node[i];
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
    } else {
      if (!v.is_number_integer()) {
        throw ConfigError(path + "[" + std::to_string(i) + "]: expected an integer");
      }
    }
    out.push_back(v.get<T>());
  }
  return out;
}

template <typename F>
auto parse_field(const json& cfg, const std::string& path, F parse) {
  try {
    return parse(get_string(cfg, path));
  } catch (const ArgumentError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::uint64_t data_seed(const json& cfg) {
  const json& s = get_node(cfg, "data.seed");
  return s.is_null() ? static_cast<std::uint64_t>(get_int(cfg, "seed"))
                     : static_cast<std::uint64_t>(s.get<std::int64_t>());
}

void require_file(const std::string& path, const std::string& field) {
  if (path.empty()) throw ConfigError(field + ": no dataset file given");
  if (!std::filesystem::exists(path)) throw ConfigError(field + ": dataset file not found: " + path);
}

struct Data {
  Dataset train;
  Dataset test;
};

TaskKind task_of(const json& cfg) {
  const auto t = get_string(cfg, "data.task");
  if (t == "regression") return TaskKind::regression;
  if (t == "classification") return TaskKind::classification;
  throw ConfigError("data.task: expected regression or classification");
}

Data load_data(const json& cfg, std::size_t classes_hint = 0) {
  const auto kind = get_string(cfg, "data.kind");
  const std::uint64_t seed = data_seed(cfg);
  Data d;
  if (kind == "sinusoid") {
    SinusoidSpec spec;
    spec.points = get_count(cfg, "data.points");
    spec.freqs = get_list<double>(cfg, "data.freqs");
    const auto phases = get_list<double>(cfg, "data.phases");
    if (!phases.empty()) spec.phases = phases;
    spec.z_min = get_number(cfg, "data.z_min");
    spec.z_max = get_number(cfg, "data.z_max");
    d.train = gen_sinusoid(spec, seed);
    spec.points = get_count(cfg, "data.test_points");
    spec.grid = false;
    d.test = gen_sinusoid(spec, seed);
  } else if (kind == "blobs") {
    BlobSpec spec;
    spec.classes = get_count(cfg, "data.classes");
    spec.per_class = get_count(cfg, "data.per_class");
    spec.dim = get_count(cfg, "data.dim");
    spec.separation = get_number(cfg, "data.separation");
    spec.cluster_sigma = get_number(cfg, "data.cluster_sigma");
    d.train = gen_blobs(spec, seed);
    spec.per_class = get_count(cfg, "data.test_per_class");
    d.test = gen_blobs(spec, RandomSource(seed, 0x7E57).next_u64());
  } else if (kind == "csv") {
    CsvSpec spec;
    spec.header = get_bool(cfg, "data.header");
    spec.task = task_of(cfg);
    spec.classes = classes_hint;
    spec.target_columns.clear();
    for (auto c : get_list<std::int64_t>(cfg, "data.target_columns")) spec.target_columns.push_back(static_cast<int>(c));
    const auto path = get_string(cfg, "data.path");
    require_file(path, "data.path");
    d.train = load_csv(path, spec);
    const auto test_path = get_string(cfg, "data.test_path");
    if (test_path.empty()) {
      d.test = d.train;
    } else {
      require_file(test_path, "data.test_path");
      d.test = load_csv(test_path, spec);
    }
  } else if (kind == "idx") {
    const auto classes = classes_hint ? classes_hint : get_count(cfg, "data.classes");
    const auto images = get_string(cfg, "data.images");
    const auto labels = get_string(cfg, "data.labels");
    require_file(images, "data.images");
    require_file(labels, "data.labels");
    d.train = load_idx(images, labels, classes);
    const auto ti = get_string(cfg, "data.test_images");
    if (ti.empty()) {
      d.test = d.train;
    } else {
      const auto tl = get_string(cfg, "data.test_labels");
      require_file(ti, "data.test_images");
      require_file(tl, "data.test_labels");
      d.test = load_idx(ti, tl, classes);
    }
  } else {
    throw ConfigError("data.kind: expected sinusoid, blobs, csv or idx");
  }
  return d;
}

LossKind resolved_loss(const json& cfg, const Dataset& ds) {
  const auto name = get_string(cfg, "train.loss");
  if (name == "auto") {
    return ds.task == TaskKind::classification ? LossKind::cross_entropy : LossKind::mse;
  }
  return parse_field(cfg, "train.loss", parse_loss_kind);
}

std::vector<std::size_t> model_widths(const json& cfg, const Dataset& ds) {
  std::vector<std::size_t> w = {static_cast<std::size_t>(ds.input_dim())};
  for (auto h : get_list<std::int64_t>(cfg, "model.hidden")) {
    if (h <= 0) throw ConfigError("model.hidden: widths must be positive");
    w.push_back(static_cast<std::size_t>(h));
  }
  w.push_back(static_cast<std::size_t>(ds.target_dim()));
  return w;
}

NoiseSpec noise_spec(const json& cfg, std::size_t depth) {
  const NoiseMode mode = parse_field(cfg, "noise.mode", parse_noise_mode);
  const auto per_layer = get_list<double>(cfg, "noise.variances");
  NoiseSpec spec;
  if (per_layer.empty()) {
    spec = NoiseSpec::uniform(depth, mode, get_number(cfg, "noise.variance"));
  } else {
    if (per_layer.size() != depth) {
      throw ConfigError("noise.variances: expected " + std::to_string(depth) + " entries");
    }
    for (double v : per_layer) spec.layers.push_back({mode, v});
  }
  try {
    spec.validate(depth);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  return spec;
}

TrainConfig train_config(const json& cfg, const Dataset& ds, std::size_t depth) {
  TrainConfig tc;
  tc.mode = parse_field(cfg, "train.mode", parse_train_mode);
  tc.loss = resolved_loss(cfg, ds);
  if (get_string(cfg, "train.variant") != "auto") {
    tc.variant = parse_field(cfg, "train.variant", parse_reg_variant);
  }
  tc.noise = noise_spec(cfg, depth);
  tc.learning_rate = get_number(cfg, "train.learning_rate");
  tc.batch_size = get_count(cfg, "train.batch_size");
  tc.steps = get_count(cfg, "train.steps");
  tc.seed = static_cast<std::uint64_t>(get_int(cfg, "seed"));
  tc.eval_every = get_count(cfg, "train.eval_every");
  tc.reg_eval_points = get_count(cfg, "train.reg_eval_points");
  tc.fd_reg_gradient = get_bool(cfg, "train.fd_reg_gradient");
  return tc;
}

Network initial_network(const json& cfg, const Dataset& ds) {
  const auto widths = model_widths(cfg, ds);
  const Activation act = parse_field(cfg, "model.activation", parse_activation);
  const InitScheme scheme = parse_field(cfg, "model.init", parse_init_scheme);
  RandomSource rs(static_cast<std::uint64_t>(get_int(cfg, "seed")), 0x1417);
  return Network::init(widths, act, rs, scheme);
}

void check_dims(const Network& net, const Dataset& ds) {
  if (net.input_dim() != static_cast<std::size_t>(ds.input_dim()) ||
      net.output_dim() != static_cast<std::size_t>(ds.target_dim())) {
    throw ConfigError("checkpoint dims (" + std::to_string(net.input_dim()) + " -> " +
                      std::to_string(net.output_dim()) + ") do not match the dataset (" +
                      std::to_string(ds.input_dim()) + " -> " + std::to_string(ds.target_dim()) + ")");
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <typename F>
void write_csv_file(const std::filesystem::path& path, F body) {
  std::ostringstream os;
  body(os);
  write_text(path, os.str());
}

void write_summary(Context& ctx, const std::string& name, json summary) {
  summary["config"] = ctx.cfg;
  write_text(ctx.out_dir / name, summary.dump(2) + "\n");
}

json metric_json(const MetricRow& r) {
  json j = {{"step", r.step}, {"train_loss", r.train_loss}, {"R_total", r.reg_total}};
  j["test_loss"] = std::isnan(r.test_loss) ? json(nullptr) : json(r.test_loss);
  return j;
}

struct Trained {
  Network network;
  std::optional<MetricLog> log;
  std::size_t step = 0;
};

// The network a diagnostic runs on: the first --checkpoint if given,
// otherwise one trained from the config, with `hook` called at every
// logged step.
Trained obtain_network(Context& ctx, const Data& data, const EvalHook& hook = {}) {
  if (!ctx.checkpoints.empty()) {
    auto ck = load_checkpoint(ctx.checkpoints.front());
    check_dims(ck.network, data.test);
    if (hook) hook(ck.step, ck.network);
    return {std::move(ck.network), std::nullopt, ck.step};
  }
  Network net = initial_network(ctx.cfg, data.train);
  const TrainConfig tc = train_config(ctx.cfg, data.train, net.depth());
  auto res = train(std::move(net), data.train, &data.test, tc, hook);
  return {std::move(res.network), std::move(res.log), tc.steps};
}

std::size_t classes_hint(const Context& ctx) {
  if (ctx.checkpoints.empty()) return 0;
  return load_checkpoint(ctx.checkpoints.front()).network.output_dim();
}

std::vector<std::size_t> labels_of(const Dataset& ds) {
  if (ds.task != TaskKind::classification) throw ConfigError("data: a classification dataset is required");
  std::vector<std::size_t> out;
  for (int l : ds.labels) out.push_back(static_cast<std::size_t>(l));
  return out;
}

void log_line(Context& ctx, const std::string& s) {
  if (ctx.out) *ctx.out << s << '\n';
}

}  // namespace

void cmd_train(Context& ctx) {
  const Data data = load_data(ctx.cfg);
  Network net = initial_network(ctx.cfg, data.train);
  const TrainConfig tc = train_config(ctx.cfg, data.train, net.depth());
  auto res = train(std::move(net), data.train, &data.test, tc);

  write_csv_file(ctx.out_dir / "metrics.csv", [&](std::ostream& os) { res.log.write_csv(os); });
  save_checkpoint({res.network, tc.seed, tc.steps}, ctx.out_dir / "checkpoint.json");

  json summary = {{"final", metric_json(res.log.rows.back())}};
  const auto ev = evaluate(res.network, data.test, tc.loss);
  if (ev.accuracy) summary["final"]["test_accuracy"] = *ev.accuracy;
  write_summary(ctx, "summary.json", summary);

  if (ctx.plot) {
    Series tr{"train", {}, {}}, te{"test", {}, {}};
    for (const auto& r : res.log.rows) {
      tr.x.push_back(static_cast<double>(r.step));
      tr.y.push_back(r.train_loss);
      te.x.push_back(static_cast<double>(r.step));
      te.y.push_back(r.test_loss);
    }
    write_text(ctx.out_dir / "loss.svg", line_plot({tr, te}, "loss", "step", "loss"));
  }
  log_line(ctx, "wrote " + (ctx.out_dir / "metrics.csv").string());
}

void cmd_spectrum(Context& ctx) {
  Grid grid;
  grid.points = get_count(ctx.cfg, "diagnostics.grid_points");
  grid.z_min = get_number(ctx.cfg, "data.z_min");
  grid.z_max = get_number(ctx.cfg, "data.z_max");
  SpectrumSeries series;
  series.grid_size = grid.points;
  std::optional<MetricLog> log;
  if (!ctx.checkpoints.empty()) {
    for (const auto& path : ctx.checkpoints) {
      auto ck = load_checkpoint(path);
      series.add(ck.step, network_spectrum(ck.network, grid));
    }
  } else {
    const Data data = load_data(ctx.cfg);
    if (data.train.input_dim() != 1 || data.train.target_dim() != 1) {
      throw ConfigError("spectrum: the dataset must be one-dimensional");
    }
    auto t = obtain_network(ctx, data, [&](std::size_t step, const Network& net) {
      series.add(step, network_spectrum(net, grid));
    });
    log = std::move(t.log);
  }
  const bool clip = get_bool(ctx.cfg, "diagnostics.clip");
  write_csv_file(ctx.out_dir / "spectrum.csv", [&](std::ostream& os) { series.write_long_csv(os); });
  write_csv_file(ctx.out_dir / "spectrum_matrix.csv",
                 [&](std::ostream& os) { series.write_matrix_csv(os, clip); });
  if (log) {
    write_csv_file(ctx.out_dir / "metrics.csv", [&](std::ostream& os) { log->write_csv(os); });
  }
  const auto band_from = get_count(ctx.cfg, "diagnostics.band_from");
  json summary = {{"grid_points", grid.points}, {"band_from", band_from}, {"rows", json::array()}};
  for (std::size_t i = 0; i < series.steps.size(); ++i) {
    summary["rows"].push_back({{"step", series.steps[i]},
                               {"band_amplitude", band_amplitude(series.amplitudes[i], band_from)}});
  }
  write_summary(ctx, "spectrum.json", summary);
  if (ctx.plot) {
    std::vector<std::string> labels;
    for (auto s : series.steps) labels.push_back(std::to_string(s));
    write_text(ctx.out_dir / "spectrum.svg",
               heatmap(series.amplitudes, labels, "amplitude spectrum over training", "frequency bin",
                       "step", 0.0, 1.0));
  }
  log_line(ctx, "wrote " + (ctx.out_dir / "spectrum.csv").string());
}

void cmd_dominance(Context& ctx) {
  const Data data = load_data(ctx.cfg);
  DominanceConfig dc;
  dc.widths = model_widths(ctx.cfg, data.train);
  dc.activation = parse_field(ctx.cfg, "model.activation", parse_activation);
  dc.init = parse_field(ctx.cfg, "model.init", parse_init_scheme);
  dc.loss = resolved_loss(ctx.cfg, data.train);
  dc.mode = parse_field(ctx.cfg, "noise.mode", parse_noise_mode);
  dc.variances = get_list<double>(ctx.cfg, "diagnostics.sigmas");
  dc.inits = get_count(ctx.cfg, "diagnostics.inits");
  dc.batch_size = get_count(ctx.cfg, "diagnostics.batch_size");
  dc.draws = get_count(ctx.cfg, "diagnostics.draws");
  dc.seed = static_cast<std::uint64_t>(get_int(ctx.cfg, "seed"));
  const auto rows = dominance_scan(data.train, dc);
  write_csv_file(ctx.out_dir / "dominance.csv", [&](std::ostream& os) { write_dominance_csv(os, rows); });
  std::size_t degenerate = 0;
  for (const auto& r : rows) degenerate += r.degenerate;
  const double frac = dominance_fraction(rows);
  json summary = {{"rows", rows.size()}, {"degenerate", degenerate}};
  summary["fraction_dominant"] = std::isnan(frac) ? json(nullptr) : json(frac);
  write_summary(ctx, "dominance.json", summary);
  log_line(ctx, "fraction of rows with R > |E[C]|: " + format_double(frac));
}

void cmd_hesstrace(Context& ctx) {
  const Data data = load_data(ctx.cfg);
  const LossKind loss = resolved_loss(ctx.cfg, data.train);
  const auto probes = get_count(ctx.cfg, "diagnostics.probes");
  const double rel = get_number(ctx.cfg, "diagnostics.relative_step");
  const auto seed = static_cast<std::uint64_t>(get_int(ctx.cfg, "seed"));
  const auto order = batches(data.train, get_count(ctx.cfg, "train.batch_size"), seed, 0);
  const Batch batch = data.train.gather(order.front());
  struct Row {
    std::size_t step;
    TraceEstimate est;
  };
  std::vector<Row> rows;
  const RandomSource root(seed, 0x4E55);
  auto t = obtain_network(ctx, data, [&](std::size_t step, const Network& net) {
    RandomSource rs = root.split(step);
    rows.push_back({step, hessian_trace(net, batch, loss, probes, rs, rel)});
  });
  write_csv_file(ctx.out_dir / "hesstrace.csv", [&](std::ostream& os) {
    write_csv_row(os, {"step", "estimate", "stderr", "probes"});
    for (const auto& r : rows) {
      write_csv_row(os, {std::to_string(r.step), format_double(r.est.estimate),
                         format_double(r.est.std_error), std::to_string(r.est.probes)});
    }
  });
  if (t.log) write_csv_file(ctx.out_dir / "metrics.csv", [&](std::ostream& os) { t.log->write_csv(os); });
  json summary = {{"step", rows.back().step}, {"estimate", rows.back().est.estimate}, {"probes", probes}};
  summary["stderr"] = std::isnan(rows.back().est.std_error) ? json(nullptr) : json(rows.back().est.std_error);
  write_summary(ctx, "hesstrace.json", summary);
  log_line(ctx, "Hessian trace estimate: " + format_double(rows.back().est.estimate));
}

void cmd_layerstats(Context& ctx) {
  const Data data = load_data(ctx.cfg);
  struct Row {
    std::size_t step;
    LayerStatsReport rep;
  };
  std::vector<Row> rows;
  auto t = obtain_network(ctx, data, [&](std::size_t step, const Network& net) {
    rows.push_back({step, layer_stats(net, data.train.inputs)});
  });
  write_csv_file(ctx.out_dir / "layerstats.csv", [&](std::ostream& os) {
    write_csv_row(os, {"step", "layer", "masked_norm_sq", "trace"});
    for (const auto& r : rows) {
      for (const auto& s : r.rep.rows) {
        write_csv_row(os, {std::to_string(r.step), std::to_string(s.layer),
                           format_double(s.masked_norm_sq), format_double(s.trace)});
      }
    }
  });
  if (t.log) write_csv_file(ctx.out_dir / "metrics.csv", [&](std::ostream& os) { t.log->write_csv(os); });
  const auto& last = rows.back().rep;
  std::vector<double> k, n;
  for (const auto& s : last.rows) {
    k.push_back(static_cast<double>(s.layer));
    n.push_back(s.masked_norm_sq);
  }
  const double rho = spearman(k, n);
  json summary = {{"step", rows.back().step}, {"square_layers", last.rows.size()}};
  summary["spearman_layer_vs_norm"] = std::isnan(rho) ? json(nullptr) : json(rho);
  if (last.warning) summary["warning"] = *last.warning;
  write_summary(ctx, "layerstats.json", summary);
  log_line(ctx, "Spearman(layer, masked norm): " + format_double(rho));
}

void cmd_calibrate(Context& ctx) {
  const Data data = load_data(ctx.cfg, classes_hint(ctx));
  auto t = obtain_network(ctx, data);
  const Matrix probs = softmax_rows(predict(t.network, data.test.inputs));
  const auto report = calibrate(probs, labels_of(data.test), get_count(ctx.cfg, "diagnostics.bins"));
  write_csv_file(ctx.out_dir / "reliability.csv", [&](std::ostream& os) { report.write_reliability_csv(os); });
  write_summary(ctx, "calibration.json", json::parse(report.to_json()));
  log_line(ctx, "ECE: " + format_double(report.ece));
}

void cmd_sensitivity(Context& ctx) {
  const Data data = load_data(ctx.cfg, classes_hint(ctx));
  labels_of(data.test);
  auto t = obtain_network(ctx, data);
  RandomSource rs(static_cast<std::uint64_t>(get_int(ctx.cfg, "seed")), 0x5E45);
  const auto rows = sensitivity_sweep(t.network, data.test, get_list<double>(ctx.cfg, "diagnostics.alphas"),
                                      get_count(ctx.cfg, "diagnostics.sensitivity_draws"), rs);
  write_csv_file(ctx.out_dir / "sensitivity.csv", [&](std::ostream& os) {
    write_csv_row(os, {"alpha", "accuracy", "stddev"});
    for (const auto& r : rows) {
      write_csv_row(os, {format_double(r.alpha), format_double(r.accuracy), format_double(r.stddev)});
    }
  });
  json summary = {{"rows", json::array()}};
  for (const auto& r : rows) summary["rows"].push_back({{"alpha", r.alpha}, {"accuracy", r.accuracy}});
  write_summary(ctx, "sensitivity.json", summary);
  log_line(ctx, "wrote " + (ctx.out_dir / "sensitivity.csv").string());
}

void cmd_margin(Context& ctx) {
  const Data data = load_data(ctx.cfg, classes_hint(ctx));
  auto t = obtain_network(ctx, data);
  Matrix inputs = data.test.inputs;
  const auto limit = get_count(ctx.cfg, "diagnostics.points");
  if (limit > 0 && static_cast<Eigen::Index>(limit) < inputs.rows()) {
    inputs = inputs.topRows(static_cast<Eigen::Index>(limit)).eval();
  }
  const auto report = margin_bounds(t.network, inputs);
  std::vector<double> flips;
  const bool search = get_bool(ctx.cfg, "diagnostics.flip_search");
  if (search) {
    FlipSearchConfig fc;
    fc.directions = get_count(ctx.cfg, "diagnostics.directions");
    RandomSource rs(static_cast<std::uint64_t>(get_int(ctx.cfg, "seed")), 0xF11B);
    flips = flip_distances(t.network, inputs, fc, rs);
  }
  std::size_t violations = 0;
  double mean_bound = 0.0;
  write_csv_file(ctx.out_dir / "margin.csv", [&](std::ostream& os) {
    write_csv_row(os, {"point", "predicted", "runner_up", "gap", "jacobian_norm", "bound", "flip_distance"});
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      const auto& r = report.rows[i];
      mean_bound += r.bound;
      if (search && flips[i] < r.bound) ++violations;
      write_csv_row(os, {std::to_string(i), std::to_string(r.predicted), std::to_string(r.runner_up),
                         format_double(r.gap), format_double(r.jacobian_norm), format_double(r.bound),
                         search ? format_double(flips[i]) : ""});
    }
  });
  mean_bound /= static_cast<double>(report.rows.size());
  json summary = {{"points", report.rows.size()}, {"mean_bound", mean_bound}};
  if (search) {
    summary["violations"] = violations;
    summary["respected_fraction"] =
        1.0 - static_cast<double>(violations) / static_cast<double>(report.rows.size());
  }
  write_summary(ctx, "margin.json", summary);
  log_line(ctx, "mean margin bound: " + format_double(mean_bound));
}

void cmd_parseval(Context& ctx) {
  const auto freqs = get_list<double>(ctx.cfg, "diagnostics.freqs");
  auto amps = get_list<double>(ctx.cfg, "diagnostics.amplitudes");
  auto phases = get_list<double>(ctx.cfg, "diagnostics.tone_phases");
  if (freqs.empty()) throw ConfigError("diagnostics.freqs: need at least one frequency");
  if (amps.empty()) amps.assign(freqs.size(), 1.0);
  if (phases.empty()) phases.assign(freqs.size(), 0.0);
  if (amps.size() != freqs.size()) throw ConfigError("diagnostics.amplitudes: one per frequency");
  if (phases.size() != freqs.size()) throw ConfigError("diagnostics.tone_phases: one per frequency");
  const double two_pi = 2.0 * std::numbers::pi;
  auto f = [&](double z) {
    double s = 0;
    for (std::size_t i = 0; i < freqs.size(); ++i) s += amps[i] * std::sin(two_pi * freqs[i] * z + phases[i]);
    return s;
  };
  auto df = [&](double z) {
    double s = 0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      s += amps[i] * two_pi * freqs[i] * std::cos(two_pi * freqs[i] * z + phases[i]);
    }
    return s;
  };
  Grid grid{0.0, 1.0, get_count(ctx.cfg, "diagnostics.grid_points")};
  const double step = get_number(ctx.cfg, "diagnostics.fd_step");
  const auto exact = parseval_check(f, grid, df);
  const auto fd = parseval_check(f, grid, {}, step);
  write_csv_file(ctx.out_dir / "parseval.csv", [&](std::ostream& os) {
    write_csv_row(os, {"derivative", "lhs", "rhs", "rel_gap"});
    write_csv_row(os, {"analytic", format_double(exact.lhs), format_double(exact.rhs), format_double(exact.rel_gap)});
    write_csv_row(os, {"finite_difference", format_double(fd.lhs), format_double(fd.rhs), format_double(fd.rel_gap)});
  });
  json summary = {{"lhs", exact.lhs},
                  {"rhs", exact.rhs},
                  {"rel_gap", exact.rel_gap},
                  {"finite_difference", {{"lhs", fd.lhs}, {"rhs", fd.rhs}, {"rel_gap", fd.rel_gap}}}};
  write_summary(ctx, "parseval.json", summary);
  log_line(ctx, "lhs " + format_double(exact.lhs) + " rhs " + format_double(exact.rhs));
}

void cmd_gendata(Context& ctx) {
  const Data data = load_data(ctx.cfg);
  save_csv(data.train, ctx.out_dir / "train.csv");
  save_csv(data.test, ctx.out_dir / "test.csv");
  json summary = {{"train_rows", data.train.size()}, {"test_rows", data.test.size()}};
  if (!data.train.phases.empty()) summary["phases"] = data.train.phases;
  write_summary(ctx, "data.json", summary);
  log_line(ctx, "wrote " + (ctx.out_dir / "train.csv").string());
}

}  // namespace gnireg::cli
