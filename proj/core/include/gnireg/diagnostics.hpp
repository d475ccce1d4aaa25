#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gnireg/batch.hpp"
#include "gnireg/data.hpp"
#include "gnireg/network.hpp"
#include "gnireg/noise.hpp"
#include "gnireg/random.hpp"
#include "gnireg/regulariser.hpp"

namespace gnireg {

// ---------------------------------------------------------------------------
// Remainder of the noise-marginalised loss not captured by R:
//   E[C] ~= mean_draws L~(B; eps) - R(B) - L(B)
// R uses the full trace (ce_full for cross-entropy).

struct RemainderEstimate {
  double reg = 0.0;
  double noised_mean = 0.0;
  double clean_loss = 0.0;
  double remainder = 0.0;
  double std_error = 0.0;  // standard error of noised_mean
  std::size_t draws = 0;

  // |E[C]| / R; NaN when R == 0.
  double ratio() const;
};

// Draw i uses an independent child stream of `rs`, so results do not depend
// on the thread count. ArgumentError if draws < 2.
RemainderEstimate estimate_remainder(const Network& net, const Batch& batch, const NoiseSpec& spec,
                                     LossKind loss, std::size_t draws, RandomSource& rs);

struct DominanceConfig {
  std::vector<std::size_t> widths = {1, 256, 256, 256, 256, 256, 1};
  Activation activation = Activation::sigmoid;
  InitScheme init = InitScheme::fan_in_uniform;
  LossKind loss = LossKind::mse;
  NoiseMode mode = NoiseMode::additive;
  std::vector<double> variances = {0.1, 0.25, 1.0};
  std::size_t inits = 25;
  std::size_t batch_size = 32;
  std::size_t draws = 1000;
  std::uint64_t seed = 0;
};

struct DominanceRow {
  double variance = 0.0;
  std::size_t init = 0;
  double reg = 0.0;
  double remainder = 0.0;
  double std_error = 0.0;
  double ratio = 0.0;       // NaN when degenerate
  bool degenerate = false;  // R == 0
};

// One row per (variance, init). Init i uses the same network and batch for
// every variance; noise draws are independent across variances.
std::vector<DominanceRow> dominance_scan(const Dataset& ds, const DominanceConfig& cfg);

void write_dominance_csv(std::ostream& out, const std::vector<DominanceRow>& rows);

// Fraction of non-degenerate rows with R > |E[C]|.
double dominance_fraction(const std::vector<DominanceRow>& rows);

// ---------------------------------------------------------------------------
// Hutchinson estimate of Tr(d^2 L / d theta^2) with Rademacher probes.
// Hv is a central difference of the gradient with step
// relative_step * (1 + ||theta||_inf).

struct TraceEstimate {
  double estimate = 0.0;
  double std_error = 0.0;  // NaN with a single probe
  std::size_t probes = 0;
};

using GradientFn = std::function<Vector(const Vector& theta)>;

TraceEstimate hutchinson_trace(const GradientFn& gradient, const Vector& theta, std::size_t probes,
                               RandomSource& rs, double relative_step = 1e-4);

TraceEstimate hessian_trace(const Network& net, const Batch& batch, LossKind loss,
                            std::size_t probes, RandomSource& rs, double relative_step = 1e-4);

// ---------------------------------------------------------------------------
// Per square relu layer: batch mean of ||D_k W_k||_F^2 (D_k masks inactive
// output neurons per example) and Tr(W_k). `layer` is 1-based: W_1 maps the
// input to the first hidden layer.

struct LayerStat {
  std::size_t layer = 0;
  double masked_norm_sq = 0.0;
  double trace = 0.0;
};

struct LayerStatsReport {
  std::vector<LayerStat> rows;
  std::optional<std::string> warning;
};

// UnsupportedError if a hidden layer is not relu.
LayerStatsReport layer_stats(const Network& net, const Matrix& inputs);

// Spearman rank correlation (average ranks for ties). NaN for fewer than 2
// points or zero variance.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// First-order margin lower bound M(x) >= (h_A - h_B) / (sqrt(2) ||J_0||_F),
// A the predicted class and B the runner-up.

struct MarginRow {
  Eigen::Index predicted = 0;
  Eigen::Index runner_up = 0;
  double gap = 0.0;
  double jacobian_norm = 0.0;
  double bound = 0.0;
};

struct MarginReport {
  std::vector<MarginRow> rows;
};

// ArgumentError if the network has fewer than 2 outputs.
MarginReport margin_bounds(const Network& net, const Matrix& inputs);

struct FlipSearchConfig {
  std::size_t directions = 100;
  double initial_radius = 1e-3;
  double max_radius = 1e3;
  std::size_t bisection_steps = 60;
};

// For each input row: the smallest perturbation norm found, over random unit
// directions, that changes the arg-max class. Each direction is scanned
// outward with doubling radii, then the first bracketing interval is
// bisected. +inf when no direction flips within max_radius.
std::vector<double> flip_distances(const Network& net, const Matrix& inputs,
                                   const FlipSearchConfig& cfg, RandomSource& rs);

// ---------------------------------------------------------------------------

struct SensitivityRow {
  double alpha = 0.0;
  double accuracy = 0.0;  // mean over draws
  double stddev = 0.0;
};

// Accuracy on x + N(0, alpha^2 I), averaged over `draws` corruptions.
std::vector<SensitivityRow> sensitivity_sweep(const Network& net, const Dataset& test,
                                              const std::vector<double>& alphas,
                                              std::size_t draws, RandomSource& rs);

}  // namespace gnireg
