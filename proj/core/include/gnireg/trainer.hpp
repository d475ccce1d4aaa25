#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "gnireg/data.hpp"
#include "gnireg/loss.hpp"
#include "gnireg/network.hpp"
#include "gnireg/noise.hpp"
#include "gnireg/regulariser.hpp"

namespace gnireg {

enum class TrainMode {
  baseline,      // clean loss
  gni,           // loss of a noised forward pass, fresh draw every step
  explicit_reg,  // clean loss + R
};

std::string_view to_string(TrainMode m);
TrainMode parse_train_mode(std::string_view name);

struct TrainConfig {
  TrainMode mode = TrainMode::baseline;
  LossKind loss = LossKind::mse;
  // Injection plan for gni mode, the penalty in explicit mode, and the R
  // column of the metric log in every mode.
  NoiseSpec noise;
  std::optional<RegVariant> variant;  // defaults to default_variant(loss)
  double learning_rate = 0.001;
  std::size_t batch_size = 512;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  std::size_t eval_every = 100;
  // Rows of the training set used for the logged R (0 = all).
  std::size_t reg_eval_points = 512;
  // Differentiate R by central finite differences instead of the exact
  // second-order sweep. Only sensible on tiny networks.
  bool fd_reg_gradient = false;

  RegVariant resolved_variant() const { return variant.value_or(default_variant(loss)); }
  // ArgumentError on inconsistent settings.
  void validate(const Network& net) const;
};

struct MetricRow {
  std::size_t step = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;  // NaN without a test set
  double reg_total = 0.0;
  std::vector<double> reg_layers;
};

struct MetricLog {
  std::vector<MetricRow> rows;

  // Header: step,train_loss,test_loss,R_total,r_0,...,r_{L-1}
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

struct TrainResult {
  Network network;
  MetricLog log;
};

// Called after every logged row with the current network.
using EvalHook = std::function<void(std::size_t step, const Network& net)>;

// Runs cfg.steps SGD updates. Deterministic given cfg.seed. Throws
// DivergenceError on a non-finite loss.
TrainResult train(Network net, const Dataset& train_set, const Dataset* test_set,
                  const TrainConfig& cfg, const EvalHook& hook = {});

struct Evaluation {
  double loss = 0.0;
  std::optional<double> accuracy;  // classification only
};

// Noise-free evaluation over the whole dataset.
Evaluation evaluate(const Network& net, const Dataset& ds, LossKind loss);

// Fraction of rows whose arg-max output matches the arg-max target.
double accuracy(const Matrix& outputs, const Matrix& one_hot_targets);

}  // namespace gnireg
