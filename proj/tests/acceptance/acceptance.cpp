// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass criterion numbers as arguments to run a subset.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gnireg/calibration.hpp"
#include "gnireg/diagnostics.hpp"
#include "gnireg/loss.hpp"
#include "gnireg/regulariser.hpp"
#include "gnireg/spectrum.hpp"
#include "gnireg/trainer.hpp"
#include "test_util.hpp"

#ifdef GNIREG_ACCEPTANCE_CLI
#include "gnireg_cli/cli.hpp"
#endif

using namespace gnireg;
using gnireg::test::central_diff;
using gnireg::test::rel_err;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void info(const std::string& s) { std::printf("INFO  %s\n", s.c_str()); }

std::size_t count_true(const std::vector<bool>& v) {
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), true));
}

// ---------------------------------------------------------------------------

Outcome gradient_correctness() {
  RandomSource rs(101, 0);
  double worst_loss = 0.0, worst_explicit = 0.0;
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const LossKind loss = trial % 2 ? LossKind::cross_entropy : LossKind::mse;
    const Activation act = trial % 4 < 2 ? Activation::softplus : Activation::sigmoid;
    Network net = test::random_network({2, 2, 2}, act, rs);
    Batch batch;
    batch.inputs = test::random_matrix(rs, 4, 2);
    batch.targets = loss == LossKind::mse ? test::random_matrix(rs, 4, 2) : test::one_hot_rows(rs, 4, 2);
    const Vector theta = net.parameters();
    const auto i = static_cast<Eigen::Index>(rs.below(static_cast<std::uint64_t>(theta.size())));

    auto clean = [&](const Vector& t) {
      Network n = net;
      n.set_parameters(t);
      return batch_loss(predict(n, batch.inputs), batch.targets, loss);
    };
    const double g = param_gradient(net, batch, loss).flatten()(i);
    worst_loss = std::max(worst_loss, rel_err(g, central_diff(clean, theta, i, h)));

    NoiseSpec spec;
    for (std::size_t k = 0; k < net.depth(); ++k) {
      spec.layers.push_back({trial % 3 ? NoiseMode::additive : NoiseMode::multiplicative, rs.uniform(0.05, 0.5)});
    }
    const RegVariant variant = loss == LossKind::mse ? RegVariant::mse
                               : trial % 4 == 1      ? RegVariant::ce_full
                                                     : RegVariant::ce_diag;
    auto total = [&](const Vector& t) {
      Network n = net;
      n.set_parameters(t);
      return batch_loss(predict(n, batch.inputs), batch.targets, loss) +
             regulariser(n, batch.inputs, spec, variant).total;
    };
    const double ge = explicit_objective(net, batch, spec, loss, variant).gradient.flatten()(i);
    worst_explicit = std::max(worst_explicit, rel_err(ge, central_diff(total, theta, i, h)));
  }
  return {worst_loss <= 1e-5 && worst_explicit <= 1e-4,
          fmt("max rel err: loss gradient %.2e (tol 1e-5), d(L+R) %.2e (tol 1e-4), 100 coordinates",
              worst_loss, worst_explicit)};
}

Outcome remainder_oracle() {
  RandomSource rs(202, 0);
  Network net = test::random_network({3, 5, 4, 2}, Activation::identity, rs, 0.6);
  Batch batch;
  batch.inputs = test::random_matrix(rs, 16, 3);
  batch.targets = test::random_matrix(rs, 16, 2);
  const auto spec = NoiseSpec::uniform(net.depth(), NoiseMode::additive, 0.25);
  RandomSource draws(203, 0);
  const auto est = estimate_remainder(net, batch, spec, LossKind::mse, 10000, draws);
  return {std::abs(est.remainder) <= 3.0 * est.std_error,
          fmt("|E[C]| = %.3e, 3 se = %.3e, R = %.4f, 10000 draws", std::abs(est.remainder),
              3.0 * est.std_error, est.reg)};
}

Outcome ce_hessian_check() {
  RandomSource rs(303, 0);
  // Second differences of the loss value itself.
  double worst_fd = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = static_cast<Eigen::Index>(2 + rs.below(5));
    const Vector z = gaussian(rs, static_cast<std::size_t>(c), 1.0);
    Vector y = Vector::Zero(c);
    y(static_cast<Eigen::Index>(rs.below(static_cast<std::uint64_t>(c)))) = 1.0;
    const Matrix H = ce_hessian(softmax(z));
    const double h = 1e-4;
    for (Eigen::Index i = 0; i < c; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) {
        auto f = [&](double di, double dj) {
          Vector t = z;
          t(i) += di;
          t(j) += dj;
          return softmax_ce(t, y);
        };
        const double fd = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
        worst_fd = std::max(worst_fd, std::abs(fd - H(i, j)));
      }
    }
  }
  double min_eig = INFINITY, worst_row = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = static_cast<Eigen::Index>(2 + rs.below(9));
    const Vector p = softmax(gaussian(rs, static_cast<std::size_t>(c), 0.5 + 3.0 * rs.uniform()));
    const Matrix H = ce_hessian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    worst_row = std::max(worst_row, H.rowwise().sum().cwiseAbs().maxCoeff());
  }
  return {worst_fd <= 1e-5 && min_eig >= -1e-10 && worst_row <= 1e-12,
          fmt("max |H - H_fd| %.2e (tol 1e-5), min eigenvalue %.2e (>= -1e-10), max |row sum| %.2e "
              "(tol 1e-12), 1000 random p",
              worst_fd, min_eig, worst_row)};
}

Outcome dominance() {
  DominanceConfig cfg;  // 6 x 256 sigmoid, batch 32, {0.1, 0.25, 1.0}, 25 inits, 1000 draws
  cfg.seed = 404;
  const auto data = gen_sinusoid({}, 404);
  const auto rows = dominance_scan(data, cfg);
  double worst = 0.0;
  for (const auto& r : rows) {
    if (!r.degenerate) worst = std::max(worst, r.ratio);
  }
  const double frac = dominance_fraction(rows);
  return {frac >= 0.95, fmt("fraction with R > |E[C]| = %.3f (need >= 0.95) over %zu runs, max |E[C]|/R %.3f",
                            frac, rows.size(), worst)};
}

// ---------------------------------------------------------------------------
// Sinusoid study shared by criteria 5 to 7.

struct SinusoidRun {
  double band = 0.0;
  double test_loss = 0.0;
  double striation = 0.0;  // Spearman(layer, masked norm)
};

struct SinusoidStudy {
  std::vector<SinusoidRun> baseline, gni, explicit_reg;
};

constexpr std::size_t kSeeds = 5;
constexpr std::size_t kSinusoidSteps = 4000;

SinusoidRun sinusoid_run(TrainMode mode, std::uint64_t seed) {
  SinusoidSpec spec;
  const auto train_set = gen_sinusoid(spec, seed);
  spec.grid = false;
  const auto test_set = gen_sinusoid(spec, seed);

  const std::vector<std::size_t> widths = {1, 256, 256, 256, 256, 256, 1};
  RandomSource rs(seed, 1);
  Network net = Network::init(widths, Activation::relu, rs, InitScheme::he_uniform);
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.loss = LossKind::mse;
  cfg.noise = NoiseSpec::uniform(net.depth(), NoiseMode::additive, 0.1);
  cfg.learning_rate = 0.01;
  cfg.batch_size = 64;
  cfg.steps = kSinusoidSteps;
  cfg.seed = seed;
  cfg.eval_every = kSinusoidSteps;
  auto res = train(std::move(net), train_set, &test_set, cfg);

  SinusoidRun out;
  out.band = band_amplitude(network_spectrum(res.network, Grid{}), 25);
  out.test_loss = res.log.rows.back().test_loss;
  const auto stats = layer_stats(res.network, train_set.inputs);
  std::vector<double> k, n;
  for (const auto& s : stats.rows) {
    k.push_back(static_cast<double>(s.layer));
    n.push_back(s.masked_norm_sq);
  }
  out.striation = spearman(k, n);
  return out;
}

const SinusoidStudy& sinusoid_study() {
  static const SinusoidStudy study = [] {
    SinusoidStudy s;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      s.baseline.push_back(sinusoid_run(TrainMode::baseline, seed));
      s.gni.push_back(sinusoid_run(TrainMode::gni, seed));
      s.explicit_reg.push_back(sinusoid_run(TrainMode::explicit_reg, seed));
      const auto& b = s.baseline.back();
      const auto& g = s.gni.back();
      const auto& e = s.explicit_reg.back();
      info(fmt("sinusoid seed %llu: band>=25 base %.4f gni %.4f explicit %.4f | test loss base %.4f "
               "gni %.4f explicit %.4f | striation rho base %.2f gni %.2f",
               static_cast<unsigned long long>(seed), b.band, g.band, e.band, b.test_loss, g.test_loss,
               e.test_loss, b.striation, g.striation));
    }
    return s;
  }();
  return study;
}

Outcome spectral_bias() {
  const auto& s = sinusoid_study();
  std::vector<bool> gni_lower, explicit_lower;
  for (std::size_t i = 0; i < kSeeds; ++i) {
    gni_lower.push_back(s.gni[i].band < s.baseline[i].band);
    explicit_lower.push_back(s.explicit_reg[i].band < s.baseline[i].band);
  }
  const auto g = count_true(gni_lower), e = count_true(explicit_lower);
  return {g >= 4 && e >= 4, fmt("high-band amplitude below baseline: gni %zu/5, explicit %zu/5 (need 4/5 each), "
                                "%zu steps",
                                g, e, kSinusoidSteps)};
}

Outcome profile_match() {
  const auto& s = sinusoid_study();
  std::vector<bool> closer;
  for (std::size_t i = 0; i < kSeeds; ++i) {
    const double e = s.explicit_reg[i].test_loss;
    closer.push_back(std::abs(e - s.gni[i].test_loss) < std::abs(e - s.baseline[i].test_loss));
  }
  const auto n = count_true(closer);
  return {n >= 4, fmt("explicit test loss closer to gni than to baseline in %zu/5 seeds (need 4/5)", n)};
}

Outcome striation() {
  const auto& s = sinusoid_study();
  std::vector<bool> neg, base_neg;
  for (std::size_t i = 0; i < kSeeds; ++i) {
    neg.push_back(s.gni[i].striation < 0.0);
    base_neg.push_back(s.baseline[i].striation < 0.0);
  }
  const auto n = count_true(neg);
  info(fmt("baseline striation: negative Spearman in %zu/5 seeds (reported only)", count_true(base_neg)));
  return {n >= 4, fmt("gni Spearman(layer, masked norm) < 0 in %zu/5 seeds (need 4/5)", n)};
}

// ---------------------------------------------------------------------------

Outcome parseval() {
  const double two_pi = 2.0 * std::numbers::pi;
  struct Case {
    std::vector<double> freqs, amps, phases;
  };
  const std::vector<Case> cases = {{{5}, {1}, {0}}, {{3, 11}, {1.0, 0.4}, {0.3, 1.7}}};
  double worst_exact = 0.0, worst_fd = 0.0;
  for (const auto& c : cases) {
    auto f = [&](double z) {
      double s = 0;
      for (std::size_t i = 0; i < c.freqs.size(); ++i) s += c.amps[i] * std::sin(two_pi * c.freqs[i] * z + c.phases[i]);
      return s;
    };
    auto df = [&](double z) {
      double s = 0;
      for (std::size_t i = 0; i < c.freqs.size(); ++i) {
        s += c.amps[i] * two_pi * c.freqs[i] * std::cos(two_pi * c.freqs[i] * z + c.phases[i]);
      }
      return s;
    };
    // Independent value: mean of (sum a_i 2 pi r_i cos(...))^2 = sum a_i^2 (2 pi r_i)^2 / 2.
    double expected = 0;
    for (std::size_t i = 0; i < c.freqs.size(); ++i) expected += 0.5 * std::pow(c.amps[i] * two_pi * c.freqs[i], 2);
    const auto exact = parseval_check(f, Grid{}, df);
    const auto fd = parseval_check(f, Grid{});
    worst_exact = std::max({worst_exact, exact.rel_gap, rel_err(exact.rhs, expected)});
    worst_fd = std::max(worst_fd, fd.rel_gap);
  }
  return {worst_exact <= 1e-6 && worst_fd <= 1e-3,
          fmt("pure and two-tone rel gap: analytic %.2e (tol 1e-6), finite difference %.2e (tol 1e-3)", worst_exact,
              worst_fd)};
}

// Exact distance to the nearest decision boundary of a linear classifier.
double linear_flip_distance(const Matrix& W, const Vector& b, const Vector& x) {
  const Vector h = W * x + b;
  Eigen::Index a = 0;
  h.maxCoeff(&a);
  double best = INFINITY;
  for (Eigen::Index c = 0; c < h.size(); ++c) {
    if (c == a) continue;
    best = std::min(best, (h(a) - h(c)) / (W.row(a) - W.row(c)).norm());
  }
  return best;
}

Outcome margin() {
  RandomSource rs(909, 0);
  std::size_t linear_violations = 0;
  for (int net_i = 0; net_i < 5; ++net_i) {
    DenseLayer l;
    l.weights = gaussian_matrix(rs, 4, 5, 1.0);
    l.bias = gaussian(rs, 4, 1.0);
    Network net({l});
    const Matrix x = gaussian_matrix(rs, 100, 5, 2.0);
    const auto report = margin_bounds(net, x);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double exact = linear_flip_distance(l.weights, l.bias, x.row(i).transpose());
      if (report.rows[static_cast<std::size_t>(i)].bound > exact * (1 + 1e-12)) ++linear_violations;
    }
  }

  // One hidden relu layer on 4 blobs, one net per seed.
  double worst_respected = 1.0;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    BlobSpec spec;
    spec.classes = 4;
    const auto train_set = gen_blobs(spec, seed);
    spec.per_class = 125;
    const auto test_set = gen_blobs(spec, seed + 1000);
    RandomSource init(seed, 7);
    Network net = Network::init(std::vector<std::size_t>{2, 64, 4}, Activation::relu, init, InitScheme::he_uniform);
    TrainConfig cfg;
    cfg.loss = LossKind::cross_entropy;
    cfg.noise = NoiseSpec::none(net.depth());
    cfg.learning_rate = 0.05;
    cfg.batch_size = 32;
    cfg.steps = 2000;
    cfg.seed = seed;
    cfg.eval_every = cfg.steps;
    const auto res = train(std::move(net), train_set, nullptr, cfg);
    const auto report = margin_bounds(res.network, test_set.inputs);
    RandomSource search(seed, 9);
    const auto flips = flip_distances(res.network, test_set.inputs, FlipSearchConfig{}, search);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < flips.size(); ++i) ok += flips[i] >= report.rows[i].bound;
    worst_respected = std::min(worst_respected, static_cast<double>(ok) / static_cast<double>(flips.size()));
  }
  return {linear_violations == 0 && worst_respected >= 0.95,
          fmt("linear: %zu violations over 500 points; relu on blobs: worst seed respects the bound at %.3f "
              "of 500 points (need 0 and >= 0.95)",
              linear_violations, worst_respected)};
}

// ---------------------------------------------------------------------------

Outcome calibration() {
  // Two-bin hand example: 50 at confidence 0.9 (35 right), 50 at 0.6 (30 right).
  std::vector<Prediction> hand;
  for (std::size_t i = 0; i < 50; ++i) hand.push_back({0.9, 1, i < 35 ? 1u : 0u});
  for (std::size_t i = 0; i < 50; ++i) hand.push_back({0.6, 1, i < 30 ? 1u : 0u});
  const double hand_ece = calibrate(hand, 10).ece;
  const bool hand_ok = std::abs(hand_ece - 0.1) <= 1e-12;

  std::vector<bool> ece_ok, entropy_up, robust;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    BlobSpec spec;
    spec.separation = 2.0;  // clusters overlap
    spec.per_class = 50;
    const auto train_set = gen_blobs(spec, seed);
    spec.per_class = 500;
    const auto test_set = gen_blobs(spec, seed + 1000);
    const std::vector<std::size_t> labels(test_set.labels.begin(), test_set.labels.end());
    CalibrationReport rep[2];
    double acc_far[2];
    for (int m = 0; m < 2; ++m) {
      RandomSource init(seed, 7);
      Network net = Network::init(std::vector<std::size_t>{2, 64, 64, 2}, Activation::relu, init,
                                  InitScheme::he_uniform);
      TrainConfig cfg;
      cfg.mode = m ? TrainMode::gni : TrainMode::baseline;
      cfg.loss = LossKind::cross_entropy;
      cfg.noise = NoiseSpec::uniform(net.depth(), NoiseMode::additive, 0.1);
      cfg.learning_rate = 0.05;
      cfg.batch_size = 32;
      cfg.steps = 2000;
      cfg.seed = seed;
      cfg.eval_every = cfg.steps;
      const auto res = train(std::move(net), train_set, nullptr, cfg);
      rep[m] = calibrate(softmax_rows(predict(res.network, test_set.inputs)), labels, 10);
      RandomSource corrupt(seed, 11);
      acc_far[m] = sensitivity_sweep(res.network, test_set, {4.0}, 20, corrupt).front().accuracy;
    }
    ece_ok.push_back(rep[1].ece <= rep[0].ece);
    entropy_up.push_back(rep[1].mean_entropy > rep[0].mean_entropy);
    robust.push_back(acc_far[1] >= acc_far[0]);
    info(fmt("blobs seed %llu: ECE base %.4f gni %.4f | entropy base %.4f gni %.4f | accuracy at alpha 4 "
             "base %.3f gni %.3f",
             static_cast<unsigned long long>(seed), rep[0].ece, rep[1].ece, rep[0].mean_entropy,
             rep[1].mean_entropy, acc_far[0], acc_far[1]));
  }
  info(fmt("sensitivity: gni accuracy >= baseline at alpha 4 in %zu/5 seeds (reported only)", count_true(robust)));
  const auto e = count_true(ece_ok), h = count_true(entropy_up);
  return {hand_ok && e >= 4 && h >= 4,
          fmt("hand example ECE %.15g (want 0.1); ECE(gni) <= ECE(base) %zu/5, entropy higher %zu/5 (need 4/5)",
              hand_ece, e, h)};
}

Outcome hessian_trace_check() {
  RandomSource rs(1111, 0);
  Network net = test::random_network({3, 3, 2}, Activation::softplus, rs);  // 20 parameters
  Batch batch;
  batch.inputs = test::random_matrix(rs, 8, 3);
  batch.targets = test::random_matrix(rs, 8, 2);
  const Vector theta = net.parameters();

  auto grad = [&](const Vector& t) {
    Network n = net;
    n.set_parameters(t);
    return param_gradient(n, batch, LossKind::mse).flatten();
  };
  double brute = 0.0;
  const double h = 1e-5;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Vector up = theta, down = theta;
    up(i) += h;
    down(i) -= h;
    brute += (grad(up)(i) - grad(down)(i)) / (2 * h);
  }
  RandomSource probes(1112, 0);
  const auto est = hessian_trace(net, batch, LossKind::mse, 4000, probes);
  const bool hutch_ok = std::abs(est.estimate - brute) <= 3 * est.std_error;

  const Vector q = gaussian(rs, 20, 1.0);
  RandomSource qprobes(1113, 0);
  const auto quad = hutchinson_trace([](const Vector& t) { return t; }, q, 16, qprobes);
  const bool quad_ok = std::abs(quad.estimate - 20.0) <= 1e-6;
  return {theta.size() == 20 && hutch_ok && quad_ok,
          fmt("%lld params: Hutchinson %.5f vs brute force %.5f (3 se = %.5f); quadratic hook %.9f (want 20)",
              static_cast<long long>(theta.size()), est.estimate, brute, 3 * est.std_error, quad.estimate)};
}

// ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  std::size_t compared = 0, mismatched = 0;
  auto check = [&](const std::string& a, const std::string& b) {
    ++compared;
    mismatched += a != b;
  };

  // Library level: the same runs twice.
  for (auto mode : {TrainMode::baseline, TrainMode::gni, TrainMode::explicit_reg}) {
    auto once = [&] {
      SinusoidSpec spec;
      spec.points = 128;
      const auto data = gen_sinusoid(spec, 12);
      RandomSource rs(12, 1);
      Network net = Network::init(std::vector<std::size_t>{1, 32, 32, 1}, Activation::relu, rs,
                                  InitScheme::he_uniform);
      TrainConfig cfg;
      cfg.mode = mode;
      cfg.noise = NoiseSpec::uniform(net.depth(), NoiseMode::additive, 0.1);
      cfg.learning_rate = 0.01;
      cfg.batch_size = 16;
      cfg.steps = 60;
      cfg.seed = 12;
      cfg.eval_every = 20;
      return train(std::move(net), data, &data, cfg).log.to_csv();
    };
    check(once(), once());
  }
  auto scan = [] {
    DominanceConfig cfg;
    cfg.widths = {1, 32, 32, 1};
    cfg.inits = 3;
    cfg.draws = 50;
    cfg.seed = 12;
    std::ostringstream os;
    write_dominance_csv(os, dominance_scan(gen_sinusoid({}, 12), cfg));
    return os.str();
  };
  check(scan(), scan());

#ifdef GNIREG_ACCEPTANCE_CLI
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "gnireg_acceptance_determinism";
  const std::vector<std::string> small = {"--seed", "12", "--hidden", "16,16", "--steps", "40",
                                          "--set", "train.eval_every=20", "--set", "data.points=128"};
  const std::vector<std::vector<std::string>> commands = {
      {"train", "--mode", "gni"},
      {"train", "--mode", "explicit"},
      {"spectrum", "--points", "128"},
      {"hesstrace", "--probes", "4"},
      {"layerstats"},
      {"dominance", "--inits", "2", "--draws", "20"},
      {"calibrate"},
      {"sensitivity", "--set", "diagnostics.sensitivity_draws=3"},
      {"margin", "--points", "20", "--set", "diagnostics.directions=10"},
      {"parseval", "--freqs", "3,7"},
      {"gendata"},
  };
  std::size_t cli_failures = 0;
  int i = 0;
  for (const auto& cmd : commands) {
    std::vector<std::string> base = cmd;
    base.insert(base.end(), small.begin(), small.end());
    const fs::path dirs[2] = {root / (std::to_string(i) + "a"), root / (std::to_string(i) + "b")};
    ++i;
    for (int r = 0; r < 2; ++r) {
      fs::remove_all(dirs[r]);
      auto args = base;
      args.insert(args.end(), {"--out", dirs[r].string(), "--threads", r ? "3" : "1"});
      std::ostringstream out, err;
      if (gnireg::cli::run(args, out, err) != 0) {
        ++cli_failures;
        info("determinism: " + cmd.front() + " failed: " + err.str());
      }
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() == ".csv") check(slurp(entry.path()), slurp(dirs[1] / entry.path().filename()));
    }
  }
  fs::remove_all(root);
  mismatched += cli_failures;
#endif
  return {mismatched == 0 && compared > 0,
          fmt("%zu CSV pairs compared across reruns, %zu differ", compared, mismatched)};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "gradient correctness", gradient_correctness},
    {2, "exact-remainder oracle", remainder_oracle},
    {3, "cross-entropy Hessian", ce_hessian_check},
    {4, "dominance of R over the remainder", dominance},
    {5, "spectral bias", spectral_bias},
    {6, "training-profile match", profile_match},
    {7, "layer striation", striation},
    {8, "Parseval proxy", parseval},
    {9, "margin bound", margin},
    {10, "calibration", calibration},
    {11, "Hessian trace", hessian_trace_check},
    {12, "determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}
