#include "gnireg/trainer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gnireg/csv.hpp"
#include "gnireg/errors.hpp"

namespace gnireg {

std::string_view to_string(TrainMode m) {
  switch (m) {
    case TrainMode::baseline: return "baseline";
    case TrainMode::gni: return "gni";
    case TrainMode::explicit_reg: return "explicit";
  }
  return "?";
}

TrainMode parse_train_mode(std::string_view name) {
  if (name == "baseline") return TrainMode::baseline;
  if (name == "gni") return TrainMode::gni;
  if (name == "explicit") return TrainMode::explicit_reg;
  throw ArgumentError("unknown training mode '" + std::string(name) + "'");
}

void TrainConfig::validate(const Network& net) const {
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
  if (batch_size < 1) throw ArgumentError("batch size must be at least 1");
  if (eval_every < 1) throw ArgumentError("eval_every must be at least 1");
  noise.validate(net.depth());
  if (!compatible(resolved_variant(), loss)) {
    throw ArgumentError("regulariser variant " + std::string(to_string(resolved_variant())) +
                        " is incompatible with loss " + std::string(to_string(loss)));
  }
}

void MetricLog::write_csv(std::ostream& out) const {
  std::vector<std::string> header = {"step", "train_loss", "test_loss", "R_total"};
  const std::size_t layers = rows.empty() ? 0 : rows.front().reg_layers.size();
  for (std::size_t k = 0; k < layers; ++k) header.push_back("r_" + std::to_string(k));
  write_csv_row(out, header);
  for (const auto& r : rows) {
    std::vector<std::string> cells = {std::to_string(r.step), format_double(r.train_loss),
                                      format_double(r.test_loss), format_double(r.reg_total)};
    for (double v : r.reg_layers) cells.push_back(format_double(v));
    write_csv_row(out, cells);
  }
}

std::string MetricLog::to_csv() const {
  std::ostringstream ss;
  write_csv(ss);
  return ss.str();
}

double accuracy(const Matrix& outputs, const Matrix& one_hot_targets) {
  if (outputs.rows() == 0) return 0.0;
  Eigen::Index hits = 0;
  for (Eigen::Index r = 0; r < outputs.rows(); ++r) {
    Eigen::Index pred, truth;
    outputs.row(r).maxCoeff(&pred);
    one_hot_targets.row(r).maxCoeff(&truth);
    hits += pred == truth;
  }
  return static_cast<double>(hits) / static_cast<double>(outputs.rows());
}

Evaluation evaluate(const Network& net, const Dataset& ds, LossKind loss) {
  const Matrix out = predict(net, ds.inputs);
  Evaluation e;
  e.loss = batch_loss(out, ds.targets, loss);
  if (loss == LossKind::cross_entropy) e.accuracy = accuracy(out, ds.targets);
  return e;
}

namespace {

MetricRow record(std::size_t step, const Network& net, const Dataset& train_set,
                 const Dataset* test_set, const TrainConfig& cfg, const Matrix& reg_inputs) {
  MetricRow row;
  row.step = step;
  row.train_loss = evaluate(net, train_set, cfg.loss).loss;
  row.test_loss = test_set ? evaluate(net, *test_set, cfg.loss).loss
                           : std::numeric_limits<double>::quiet_NaN();
  const RegBreakdown reg = regulariser(net, reg_inputs, cfg.noise, cfg.resolved_variant());
  row.reg_total = reg.total;
  row.reg_layers = reg.per_layer;
  return row;
}

constexpr std::uint64_t kNoiseStream = 0x6E015E;

}  // namespace

TrainResult train(Network net, const Dataset& train_set, const Dataset* test_set,
                  const TrainConfig& cfg, const EvalHook& hook) {
  cfg.validate(net);
  train_set.validate();
  if (train_set.input_dim() != static_cast<Eigen::Index>(net.input_dim()) ||
      train_set.target_dim() != static_cast<Eigen::Index>(net.output_dim())) {
    throw ShapeError("train: dataset dims do not match network");
  }
  const Eigen::Index reg_rows = cfg.reg_eval_points == 0
                                    ? train_set.size()
                                    : std::min<Eigen::Index>(train_set.size(),
                                                             static_cast<Eigen::Index>(cfg.reg_eval_points));
  const Matrix reg_inputs = train_set.inputs.topRows(reg_rows);
  const RegVariant variant = cfg.resolved_variant();
  const RandomSource noise_root(cfg.seed, kNoiseStream);

  TrainResult result;
  auto log_now = [&](std::size_t step) {
    result.log.rows.push_back(record(step, net, train_set, test_set, cfg, reg_inputs));
    if (hook) hook(step, net);
  };
  log_now(0);

  std::uint64_t epoch = 0;
  auto order = batches(train_set, cfg.batch_size, cfg.seed, epoch);
  std::size_t next = 0;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    if (next == order.size()) {
      order = batches(train_set, cfg.batch_size, cfg.seed, ++epoch);
      next = 0;
    }
    const Batch batch = train_set.gather(order[next++]);

    double loss = 0.0;
    Gradients grad;
    switch (cfg.mode) {
      case TrainMode::baseline: {
        const ForwardTrace trace = forward(net, batch.inputs);
        loss = batch_loss(trace.output(), batch.targets, cfg.loss);
        grad = backprop(net, tape_from(trace), batch_loss_gradient(trace.output(), batch.targets, cfg.loss));
        break;
      }
      case TrainMode::gni: {
        RandomSource rs = noise_root.split(step);
        grad = noised_param_gradient(net, batch, cfg.noise, cfg.loss, rs, &loss);
        break;
      }
      case TrainMode::explicit_reg: {
        if (cfg.fd_reg_gradient) {
          const ForwardTrace trace = forward(net, batch.inputs);
          grad = backprop(net, tape_from(trace),
                          batch_loss_gradient(trace.output(), batch.targets, cfg.loss));
          grad += regulariser_gradient_fd(net, batch.inputs, cfg.noise, variant);
          loss = batch_loss(trace.output(), batch.targets, cfg.loss) +
                 regulariser(net, batch.inputs, cfg.noise, variant).total;
        } else {
          ExplicitObjective obj = explicit_objective(net, batch, cfg.noise, cfg.loss, variant);
          loss = obj.loss + obj.reg.total;
          grad = std::move(obj.gradient);
        }
        break;
      }
    }
    if (!std::isfinite(loss)) {
      throw DivergenceError(step, "training diverged at step " + std::to_string(step) +
                                      " (non-finite loss)");
    }
    net.sgd_step(grad, cfg.learning_rate);
    if ((step + 1) % cfg.eval_every == 0 || step + 1 == cfg.steps) log_now(step + 1);
  }
  result.network = std::move(net);
  return result;
}

}  // namespace gnireg
