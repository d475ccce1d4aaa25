#include "gnireg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gnireg/csv.hpp"
#include "gnireg/errors.hpp"
#include "gnireg/parallel.hpp"
#include "gnireg/trainer.hpp"

namespace gnireg {

namespace {

struct MeanStd {
  double mean = 0.0;
  double std_error = 0.0;
  double stddev = 0.0;
};

// Two-pass mean / sample deviation in index order.
MeanStd summarise(const std::vector<double>& v) {
  MeanStd s;
  const auto n = static_cast<double>(v.size());
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= n;
  if (v.size() < 2) {
    s.std_error = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / (n - 1.0));
  s.std_error = s.stddev / std::sqrt(n);
  return s;
}

// Independent base stream for one call; advances the caller's source.
RandomSource fork(RandomSource& rs) { return RandomSource(rs.seed(), rs.next_u64()); }

}  // namespace

double RemainderEstimate::ratio() const {
  if (reg == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::abs(remainder) / reg;
}

RemainderEstimate estimate_remainder(const Network& net, const Batch& batch, const NoiseSpec& spec,
                                     LossKind loss, std::size_t draws, RandomSource& rs) {
  if (draws < 2) throw ArgumentError("estimate_remainder: need at least 2 draws");
  if (batch.size() == 0) throw ArgumentError("estimate_remainder: empty batch");
  spec.validate(net.depth());
  const RegVariant variant = loss == LossKind::mse ? RegVariant::mse : RegVariant::ce_full;

  RemainderEstimate est;
  est.draws = draws;
  est.clean_loss = batch_loss(predict(net, batch.inputs), batch.targets, loss);
  est.reg = regulariser(net, batch.inputs, spec, variant).total;

  std::vector<double> samples(draws);
  const RandomSource base = fork(rs);
  parallel_for(draws, [&](std::size_t i) {
    RandomSource draw_rs = base.split(i);
    samples[i] = noised_loss(net, batch, spec, loss, draw_rs) - est.clean_loss;
  });
  // Averaging the excess over the clean loss keeps the small difference
  // L~ - L out of cancellation.
  const MeanStd s = summarise(samples);
  est.noised_mean = est.clean_loss + s.mean;
  est.std_error = s.std_error;
  est.remainder = s.mean - est.reg;
  return est;
}

std::vector<DominanceRow> dominance_scan(const Dataset& ds, const DominanceConfig& cfg) {
  ds.validate();
  if (cfg.widths.size() < 2) throw ArgumentError("dominance_scan: need at least two widths");
  if (ds.input_dim() != static_cast<Eigen::Index>(cfg.widths.front()) ||
      ds.target_dim() != static_cast<Eigen::Index>(cfg.widths.back())) {
    throw ShapeError("dominance_scan: dataset dims do not match architecture");
  }
  const std::size_t depth = cfg.widths.size() - 1;
  const RandomSource root(cfg.seed, 0xD0D0);
  std::vector<DominanceRow> rows;
  for (std::size_t init = 0; init < cfg.inits; ++init) {
    RandomSource init_rs = root.split(init);
    const Network net = Network::init(cfg.widths, cfg.activation, init_rs, cfg.init);
    const auto order = batches(ds, cfg.batch_size, cfg.seed, init);
    const Batch batch = ds.gather(order.front());
    for (std::size_t v = 0; v < cfg.variances.size(); ++v) {
      const double var = cfg.variances[v];
      RandomSource noise_rs = root.split(0x10000 + init * cfg.variances.size() + v);
      const NoiseSpec spec = NoiseSpec::uniform(depth, cfg.mode, var);
      const RemainderEstimate est = estimate_remainder(net, batch, spec, cfg.loss, cfg.draws, noise_rs);
      DominanceRow row;
      row.variance = var;
      row.init = init;
      row.reg = est.reg;
      row.remainder = est.remainder;
      row.std_error = est.std_error;
      row.degenerate = est.reg == 0.0;
      row.ratio = est.ratio();
      rows.push_back(row);
    }
  }
  // Present rows grouped by variance, matching the scatter layout.
  std::stable_sort(rows.begin(), rows.end(), [&](const DominanceRow& a, const DominanceRow& b) {
    const auto ia = std::find(cfg.variances.begin(), cfg.variances.end(), a.variance);
    const auto ib = std::find(cfg.variances.begin(), cfg.variances.end(), b.variance);
    return ia < ib;
  });
  return rows;
}

void write_dominance_csv(std::ostream& out, const std::vector<DominanceRow>& rows) {
  write_csv_row(out, {"sigma2", "init", "R", "remainder", "stderr", "ratio", "degenerate"});
  for (const auto& r : rows) {
    write_csv_row(out, {format_double(r.variance), std::to_string(r.init), format_double(r.reg),
                        format_double(r.remainder), format_double(r.std_error),
                        format_double(r.ratio), r.degenerate ? "1" : "0"});
  }
}

double dominance_fraction(const std::vector<DominanceRow>& rows) {
  std::size_t total = 0;
  std::size_t dominant = 0;
  for (const auto& r : rows) {
    if (r.degenerate) continue;
    ++total;
    dominant += r.reg > std::abs(r.remainder);
  }
  return total == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(dominant) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------

TraceEstimate hutchinson_trace(const GradientFn& gradient, const Vector& theta, std::size_t probes,
                               RandomSource& rs, double relative_step) {
  if (probes < 1) throw ArgumentError("hutchinson_trace: need at least one probe");
  const double h = relative_step * (1.0 + theta.cwiseAbs().maxCoeff());
  std::vector<double> quad(probes);
  for (std::size_t p = 0; p < probes; ++p) {
    Vector v(theta.size());
    for (auto& x : v) x = rs.rademacher();
    const Vector hv = (gradient(theta + h * v) - gradient(theta - h * v)) / (2.0 * h);
    quad[p] = v.dot(hv);
  }
  const MeanStd s = summarise(quad);
  return TraceEstimate{s.mean, s.std_error, probes};
}

TraceEstimate hessian_trace(const Network& net, const Batch& batch, LossKind loss,
                            std::size_t probes, RandomSource& rs, double relative_step) {
  Network probe = net;
  auto grad = [&](const Vector& theta) {
    probe.set_parameters(theta);
    return param_gradient(probe, batch, loss).flatten();
  };
  return hutchinson_trace(grad, net.parameters(), probes, rs, relative_step);
}

// ---------------------------------------------------------------------------

LayerStatsReport layer_stats(const Network& net, const Matrix& inputs) {
  for (std::size_t k = 0; k + 1 < net.depth(); ++k) {
    if (net.layer(k).activation != Activation::relu) {
      throw UnsupportedError("layer_stats: hidden layer " + std::to_string(k + 1) + " is not relu");
    }
  }
  const ForwardTrace trace = forward(net, inputs);
  const double inv_b = 1.0 / static_cast<double>(std::max<Eigen::Index>(1, inputs.rows()));
  LayerStatsReport rep;
  for (std::size_t k = 0; k + 1 < net.depth(); ++k) {
    const auto& w = net.layer(k).weights;
    if (w.rows() != w.cols()) continue;
    // mean_b ||D_b W||^2 = sum_i (fraction of examples with neuron i active) ||W_i||^2
    const Vector active = (trace.pre[k].array() > 0.0).cast<double>().colwise().sum().transpose() * inv_b;
    const Vector row_sq = w.rowwise().squaredNorm();
    rep.rows.push_back(LayerStat{k + 1, active.dot(row_sq), w.trace()});
  }
  if (rep.rows.empty()) rep.warning = "network has no square hidden layers";
  return rep;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ArgumentError("spearman: length mismatch");
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------

MarginReport margin_bounds(const Network& net, const Matrix& inputs) {
  if (net.output_dim() < 2) throw ArgumentError("margin_bounds: need at least 2 outputs");
  const ForwardTrace trace = forward(net, inputs);
  const JacobianSet jac = layer_jacobians(net, trace);
  MarginReport rep;
  const Matrix& out = trace.output();
  for (Eigen::Index b = 0; b < out.rows(); ++b) {
    MarginRow row;
    out.row(b).maxCoeff(&row.predicted);
    double second = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      if (c != row.predicted && out(b, c) > second) {
        second = out(b, c);
        row.runner_up = c;
      }
    }
    row.gap = out(b, row.predicted) - second;
    row.jacobian_norm = jac.at(b, 0).norm();
    row.bound = row.jacobian_norm > 0.0 ? row.gap / (std::sqrt(2.0) * row.jacobian_norm)
                                        : std::numeric_limits<double>::infinity();
    rep.rows.push_back(row);
  }
  return rep;
}

namespace {

Eigen::Index argmax_row(const Matrix& m, Eigen::Index r) {
  Eigen::Index i;
  m.row(r).maxCoeff(&i);
  return i;
}

}  // namespace

std::vector<double> flip_distances(const Network& net, const Matrix& inputs,
                                   const FlipSearchConfig& cfg, RandomSource& rs) {
  const Eigen::Index d = inputs.cols();
  const auto ndir = static_cast<Eigen::Index>(cfg.directions);
  std::vector<double> result(static_cast<std::size_t>(inputs.rows()),
                             std::numeric_limits<double>::infinity());
  const RandomSource base = fork(rs);
  parallel_for(static_cast<std::size_t>(inputs.rows()), [&](std::size_t idx) {
    const auto b = static_cast<Eigen::Index>(idx);
    RandomSource point_rs = base.split(idx);
    Matrix dirs = gaussian_matrix(point_rs, cfg.directions, static_cast<std::size_t>(d), 1.0);
    for (Eigen::Index i = 0; i < ndir; ++i) dirs.row(i).normalize();
    const RowVector x = inputs.row(b);
    const Eigen::Index cls = argmax_row(predict(net, Matrix(x)), 0);

    auto flipped_at = [&](const std::vector<double>& radius) {
      Matrix probe(ndir, d);
      for (Eigen::Index i = 0; i < ndir; ++i) probe.row(i) = x + radius[static_cast<std::size_t>(i)] * dirs.row(i);
      const Matrix out = predict(net, probe);
      std::vector<bool> f(static_cast<std::size_t>(ndir));
      for (Eigen::Index i = 0; i < ndir; ++i) f[static_cast<std::size_t>(i)] = argmax_row(out, i) != cls;
      return f;
    };

    std::vector<double> lo(static_cast<std::size_t>(ndir), 0.0);
    std::vector<double> hi(static_cast<std::size_t>(ndir), std::numeric_limits<double>::infinity());
    for (double r = cfg.initial_radius; r <= cfg.max_radius * (1.0 + 1e-12); r *= 2.0) {
      std::vector<double> radius(static_cast<std::size_t>(ndir), r);
      const auto f = flipped_at(radius);
      bool pending = false;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::isinf(hi[i])) {
          if (f[i]) hi[i] = r;
          else lo[i] = r;
        }
        pending = pending || std::isinf(hi[i]);
      }
      if (!pending) break;
    }
    for (std::size_t step = 0; step < cfg.bisection_steps; ++step) {
      std::vector<double> mid(static_cast<std::size_t>(ndir));
      for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = std::isinf(hi[i]) ? 0.0 : 0.5 * (lo[i] + hi[i]);
      const auto f = flipped_at(mid);
      for (std::size_t i = 0; i < mid.size(); ++i) {
        if (std::isinf(hi[i])) continue;
        (f[i] ? hi[i] : lo[i]) = mid[i];
      }
    }
    result[idx] = *std::min_element(hi.begin(), hi.end());
  });
  return result;
}

// ---------------------------------------------------------------------------

std::vector<SensitivityRow> sensitivity_sweep(const Network& net, const Dataset& test,
                                              const std::vector<double>& alphas,
                                              std::size_t draws, RandomSource& rs) {
  if (net.output_dim() < 2) throw ArgumentError("sensitivity_sweep: classification network required");
  if (draws < 1) throw ArgumentError("sensitivity_sweep: need at least one draw");
  std::vector<SensitivityRow> rows;
  const RandomSource base = fork(rs);
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const double alpha = alphas[a];
    if (!(alpha >= 0.0)) throw DomainError("sensitivity_sweep: alpha must be non-negative");
    std::vector<double> acc(alpha == 0.0 ? 1 : draws);
    parallel_for(acc.size(), [&](std::size_t i) {
      RandomSource draw_rs = base.split(a * draws + i);
      const Matrix noisy =
          test.inputs + gaussian_matrix(draw_rs, static_cast<std::size_t>(test.size()),
                                        static_cast<std::size_t>(test.input_dim()), alpha);
      acc[i] = accuracy(predict(net, noisy), test.targets);
    });
    const MeanStd s = summarise(acc);
    rows.push_back(SensitivityRow{alpha, s.mean, s.stddev});
  }
  return rows;
}

}  // namespace gnireg
