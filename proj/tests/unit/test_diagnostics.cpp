#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "gnireg/diagnostics.hpp"
#include "gnireg/errors.hpp"
#include "gnireg/parallel.hpp"
#include "gnireg/trainer.hpp"
#include "test_util.hpp"

using namespace gnireg;

namespace {

// Full Hessian of the batch loss by central differences of param_gradient.
Matrix fd_hessian(const Network& net, const Batch& b, LossKind loss, double h) {
  const Vector theta = net.parameters();
  const auto n = theta.size();
  Matrix hess(n, n);
  Network work = net;
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector up = theta, dn = theta;
    up(i) += h;
    dn(i) -= h;
    work.set_parameters(up);
    Vector gu = param_gradient(work, b, loss).flatten();
    work.set_parameters(dn);
    Vector gd = param_gradient(work, b, loss).flatten();
    hess.col(i) = (gu - gd) / (2 * h);
  }
  return hess;
}

Network linear_classifier(const Matrix& w) {
  return Network({DenseLayer{w, Vector::Zero(w.rows()), Activation::identity}});
}

}  // namespace

TEST_CASE("remainder is zero for a deep linear net") {
  RandomSource rs(1);
  auto net = test::random_network({2, 3, 3, 1}, Activation::identity, rs, 0.6);
  Batch b{test::random_matrix(rs, 8, 2), test::random_matrix(rs, 8, 1)};
  RandomSource nrs(2);
  auto est = estimate_remainder(net, b, NoiseSpec::uniform(3, NoiseMode::additive, 0.25),
                                LossKind::mse, 4000, nrs);
  CHECK(est.draws == 4000);
  CHECK(std::abs(est.remainder) <= 3 * est.std_error);
  CHECK(est.reg > 0);
}

TEST_CASE("zero noise gives an exactly zero remainder") {
  RandomSource rs(3);
  auto net = test::random_network({2, 4, 1}, Activation::sigmoid, rs);
  Batch b{test::random_matrix(rs, 4, 2), test::random_matrix(rs, 4, 1)};
  RandomSource nrs(4);
  auto est = estimate_remainder(net, b, NoiseSpec::none(2), LossKind::mse, 10, nrs);
  CHECK(est.reg == 0.0);
  CHECK(est.remainder == 0.0);
  CHECK(est.noised_mean == est.clean_loss);
  CHECK(std::isnan(est.ratio()));
  CHECK_THROWS_AS(estimate_remainder(net, b, NoiseSpec::none(2), LossKind::mse, 1, nrs),
                  ArgumentError);
}

TEST_CASE("remainder standard error shrinks like one over root draws") {
  RandomSource rs(5);
  auto net = test::random_network({1, 8, 8, 1}, Activation::sigmoid, rs);
  Batch b{test::random_matrix(rs, 8, 1), test::random_matrix(rs, 8, 1)};
  auto spec = NoiseSpec::uniform(3, NoiseMode::additive, 0.5);
  std::vector<double> se;
  for (std::size_t draws : {100, 400, 1600}) {
    RandomSource nrs(6);
    se.push_back(estimate_remainder(net, b, spec, LossKind::mse, draws, nrs).std_error);
  }
  CHECK(se[0] / se[1] == doctest::Approx(2.0).epsilon(0.2));
  CHECK(se[1] / se[2] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("remainder estimate does not depend on the thread count") {
  RandomSource rs(7);
  auto net = test::random_network({1, 6, 1}, Activation::elu, rs);
  Batch b{test::random_matrix(rs, 4, 1), test::random_matrix(rs, 4, 1)};
  auto spec = NoiseSpec::uniform(2, NoiseMode::additive, 0.3);
  RandomSource a(8), c(8);
  set_max_threads(1);
  auto one = estimate_remainder(net, b, spec, LossKind::mse, 200, a);
  set_max_threads(4);
  auto four = estimate_remainder(net, b, spec, LossKind::mse, 200, c);
  set_max_threads(1);
  CHECK(one.noised_mean == four.noised_mean);
  CHECK(one.std_error == four.std_error);
}

TEST_CASE("dominance scan table") {
  SinusoidSpec ss;
  ss.points = 64;
  auto ds = gen_sinusoid(ss, 1);
  DominanceConfig cfg;
  cfg.widths = {1, 8, 8, 1};
  cfg.variances = {0.0};
  cfg.inits = 3;
  cfg.batch_size = 8;
  cfg.draws = 10;
  auto rows = dominance_scan(ds, cfg);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.degenerate);
    CHECK(std::isnan(r.ratio));
  }
  CHECK(std::isnan(dominance_fraction(rows)));

  cfg.variances = {0.1, 0.5};
  cfg.draws = 50;
  auto a = dominance_scan(ds, cfg);
  auto b = dominance_scan(ds, cfg);
  std::ostringstream sa, sb;
  write_dominance_csv(sa, a);
  write_dominance_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("sigma2,init,R,remainder,stderr,ratio,degenerate\n", 0) == 0);
  REQUIRE(a.size() == 6);
  CHECK(a[0].variance == 0.1);
  CHECK(a[5].variance == 0.5);
}

TEST_CASE("hutchinson on a quadratic returns the dimension") {
  const auto n = 37;
  Vector theta = Vector::LinSpaced(n, -1, 1);
  GradientFn grad = [](const Vector& t) { return t; };
  for (double step : {1e-3, 1e-4, 1e-5}) {
    RandomSource rs(9);
    auto est = hutchinson_trace(grad, theta, 8, rs, step);
    CHECK(std::abs(est.estimate - n) < 1e-6);
  }
}

TEST_CASE("hessian trace of a single linear layer") {
  // L = 1/2 ||W x - y||^2 over one pair: d2L/dW_ij^2 = x_j^2, d2L/db_i^2 = 1.
  Matrix w(2, 3);
  w << 1, -1, 0.5, 2, 0, 1;
  auto net = linear_classifier(w);
  Matrix x(1, 3), y(1, 2);
  x << 0.3, -2, 1.5;
  y << 1, -1;
  const double expect = 2 * x.squaredNorm() + 2;
  RandomSource rs(10);
  auto est = hessian_trace(net, Batch{x, y}, LossKind::mse, 2000, rs);
  CHECK(std::abs(est.estimate - expect) <= 3 * est.std_error);
}

TEST_CASE("hutchinson agrees with the brute-force Hessian trace") {
  RandomSource rs(11);
  auto net = test::random_network({2, 3, 2}, Activation::softplus, rs);
  REQUIRE(net.parameter_count() == 17);
  Batch b{test::random_matrix(rs, 6, 2), test::one_hot_rows(rs, 6, 2)};
  const double exact = fd_hessian(net, b, LossKind::cross_entropy, 1e-4).trace();
  RandomSource prs(12);
  auto est = hessian_trace(net, b, LossKind::cross_entropy, 400, prs);
  CHECK(std::abs(est.estimate - exact) <= 3 * est.std_error);
}

TEST_CASE("layer statistics") {
  RandomSource rs(13);
  std::vector<std::size_t> widths = {2, 4, 4, 4, 1};
  auto net = test::random_network(widths, Activation::relu, rs);
  Matrix x = test::random_matrix(rs, 10, 2);
  auto rep = layer_stats(net, x);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].layer == 2);
  CHECK(rep.rows[1].layer == 3);
  CHECK(rep.rows[0].trace == doctest::Approx(net.layer(1).weights.trace()));

  // Oracle: per-example masked norms averaged over the batch.
  auto tr = forward(net, x);
  double avg = 0;
  for (Eigen::Index b = 0; b < x.rows(); ++b) avg += frobenius_sq(masked_weights(net, tr, b).weights[1]);
  avg /= static_cast<double>(x.rows());
  CHECK(rep.rows[0].masked_norm_sq == doctest::Approx(avg).epsilon(1e-12));

  // Zeroed weights, then positive weights and inputs keep every unit active.
  std::vector<DenseLayer> layers = net.layers();
  for (auto& l : layers) {
    l.weights.setZero();
    l.bias.setZero();
  }
  auto zero = layer_stats(Network(layers), x);
  for (const auto& r : zero.rows) {
    CHECK(r.masked_norm_sq == 0.0);
    CHECK(r.trace == 0.0);
  }
  for (auto& l : layers) {
    l.weights = l.weights.array() + 0.5;
    l.bias.setConstant(0.1);
  }
  Network positive(layers);
  auto full = layer_stats(positive, x.cwiseAbs());
  CHECK(full.rows[0].masked_norm_sq == doctest::Approx(frobenius_sq(positive.layer(1).weights)));

  auto none = layer_stats(test::random_network({2, 3, 4, 1}, Activation::relu, rs), x);
  CHECK(none.rows.empty());
  CHECK(none.warning.has_value());
  CHECK_THROWS_AS(layer_stats(test::random_network(widths, Activation::elu, rs), x),
                  UnsupportedError);
}

TEST_CASE("spearman") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3}, {1, 1, 2}) == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(std::isnan(spearman({1}, {1})));
  CHECK(std::isnan(spearman({1, 2, 3}, {5, 5, 5})));
}

TEST_CASE("margin bound on a linear classifier") {
  auto net = linear_classifier(Matrix::Identity(2, 2));
  Matrix x(1, 2);
  x << 2, 1;
  auto rep = margin_bounds(net, x);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].predicted == 0);
  CHECK(rep.rows[0].runner_up == 1);
  CHECK(rep.rows[0].gap == doctest::Approx(1.0));
  CHECK(rep.rows[0].jacobian_norm == doctest::Approx(std::sqrt(2.0)));
  CHECK(rep.rows[0].bound == doctest::Approx(0.5));

  RandomSource rs(14);
  auto flips = flip_distances(net, x, FlipSearchConfig{}, rs);
  CHECK(flips[0] >= 1 / std::sqrt(2.0) - 1e-9);
  CHECK(flips[0] >= rep.rows[0].bound);

  x << 1, 1;
  CHECK(margin_bounds(net, x).rows[0].bound == 0.0);

  CHECK_THROWS_AS(margin_bounds(linear_classifier(Matrix::Ones(1, 2)), x), ArgumentError);
}

TEST_CASE("linear margin bound ordering is scale invariant") {
  RandomSource rs(15);
  Matrix w = test::random_matrix(rs, 3, 4);
  Matrix x = test::random_matrix(rs, 20, 4);
  auto a = margin_bounds(linear_classifier(w), x);
  auto b = margin_bounds(linear_classifier(3.5 * w), x);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(b.rows[i].bound == doctest::Approx(a.rows[i].bound));
  }
}

TEST_CASE("flip distances respect the bound for linear classifiers") {
  RandomSource rs(16);
  Matrix w = test::random_matrix(rs, 2, 3);
  Matrix x = test::random_matrix(rs, 50, 3);
  auto net = linear_classifier(w);
  auto rep = margin_bounds(net, x);
  RandomSource frs(17);
  FlipSearchConfig fc;
  fc.directions = 50;
  auto flips = flip_distances(net, x, fc, frs);
  // Exact flip distance for two classes: gap / ||w_0 - w_1||.
  const double dist_norm = (w.row(0) - w.row(1)).norm();
  for (std::size_t i = 0; i < flips.size(); ++i) {
    const double exact = rep.rows[i].gap / dist_norm;
    CHECK(rep.rows[i].bound <= exact + 1e-12);
    CHECK(flips[i] >= exact - 1e-9);
  }
}

TEST_CASE("sensitivity sweep") {
  BlobSpec spec;
  spec.per_class = 100;
  spec.separation = 5;
  auto ds = gen_blobs(spec, 3);
  Matrix w(2, 2);
  w << 1, 0, -1, 0;
  auto net = linear_classifier(w);
  RandomSource srs(19);
  auto rows = sensitivity_sweep(net, ds, {0.0, 1e4}, 50, srs);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].accuracy == accuracy(predict(net, ds.inputs), ds.targets));
  CHECK(rows[0].stddev == 0.0);
  CHECK(std::abs(rows[1].accuracy - 0.5) < 0.05);
}
