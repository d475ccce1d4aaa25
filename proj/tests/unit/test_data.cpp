#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "gnireg/data.hpp"
#include "gnireg/errors.hpp"
#include "gnireg/trainer.hpp"
#include "test_util.hpp"

using namespace gnireg;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gnireg_" + name);
}

// Accuracy of a softmax-regression probe trained by plain gradient descent.
double linear_probe_accuracy(const Dataset& ds) {
  RandomSource rs(0);
  std::vector<std::size_t> widths = {static_cast<std::size_t>(ds.input_dim()), ds.classes()};
  Network net = Network::init(widths, Activation::identity, rs);
  Batch all = ds.all();
  for (int step = 0; step < 500; ++step) {
    net.sgd_step(param_gradient(net, all, LossKind::cross_entropy), 0.5);
  }
  return accuracy(predict(net, ds.inputs), ds.targets);
}

}  // namespace

TEST_CASE("sinusoid targets") {
  std::vector<double> f = {5}, ph = {0};
  CHECK(sinusoid_target(0.05, f, ph) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sinusoid_target(0.0, f, ph) == 0.0);

  SinusoidSpec spec;
  auto ds = gen_sinusoid(spec, 3);
  CHECK(ds.size() == 1024);
  REQUIRE(ds.phases.size() == 10);
  for (double p : ds.phases) {
    CHECK(p >= 0.0);
    CHECK(p < 2 * std::numbers::pi);
  }
  for (Eigen::Index i = 0; i < ds.size(); i += 37) {
    const double z = ds.inputs(i, 0);
    double oracle = 0;
    for (int r = 1; r <= 10; ++r) oracle += std::sin(2 * std::numbers::pi * 5 * r * z + ds.phases[r - 1]);
    CHECK(std::abs(ds.targets(i, 0) - oracle) < 1e-12);
    CHECK(std::abs(ds.targets(i, 0)) <= 10.0);
  }
  CHECK(ds.inputs(1, 0) == doctest::Approx(1.0 / 1024));

  auto again = gen_sinusoid(spec, 3);
  CHECK(again.targets == ds.targets);

  spec.grid = false;
  auto random_z = gen_sinusoid(spec, 3);
  CHECK(random_z.phases == ds.phases);
  CHECK(random_z.inputs.minCoeff() >= 0.0);
  CHECK(random_z.inputs.maxCoeff() < 1.0);

  SinusoidSpec empty;
  empty.freqs.clear();
  CHECK_THROWS_AS(gen_sinusoid(empty, 0), ArgumentError);
}

TEST_CASE("blobs") {
  BlobSpec spec;
  spec.classes = 3;
  spec.per_class = 50;
  auto a = gen_blobs(spec, 4);
  auto b = gen_blobs(spec, 4);
  CHECK(a.inputs == b.inputs);
  CHECK(a.size() == 150);
  CHECK(a.classes() == 3);
  CHECK_NOTHROW(a.validate());

  spec.separation = 20;
  spec.cluster_sigma = 0.5;
  CHECK(linear_probe_accuracy(gen_blobs(spec, 5)) >= 0.99);

  spec.separation = 0;
  spec.per_class = 300;
  const double chance = linear_probe_accuracy(gen_blobs(spec, 6));
  CHECK(chance < 1.0 / 3 + 0.1);

  spec.classes = 1;
  CHECK_THROWS_AS(gen_blobs(spec, 0), ArgumentError);
}

TEST_CASE("csv parsing") {
  auto ds = parse_csv("1,2,3\n4,5,6", CsvSpec{});
  CHECK(ds.inputs.rows() == 2);
  CHECK(ds.inputs.cols() == 2);
  CHECK(ds.targets.cols() == 1);
  CHECK(ds.targets(1, 0) == 6);

  CsvSpec first;
  first.target_columns = {0};
  first.header = true;
  auto h = parse_csv("y,a,b\n1,2,3\n", first);
  CHECK(h.size() == 1);
  CHECK(h.targets(0, 0) == 1);
  CHECK(h.inputs(0, 1) == 3);

  try {
    parse_csv("1,2,3\n4,5\n", CsvSpec{});
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv("1,x,3\n", CsvSpec{}), FormatError);

  CsvSpec cls;
  cls.task = TaskKind::classification;
  auto c = parse_csv("0.5,1\n0.1,0\n0.3,2\n", cls);
  CHECK(c.classes() == 3);
  CHECK(c.labels == std::vector<int>{1, 0, 2});
  CHECK(c.targets(2, 2) == 1.0);
}

TEST_CASE("csv save and load round trip") {
  BlobSpec spec;
  spec.classes = 3;
  spec.per_class = 4;
  auto ds = gen_blobs(spec, 9);
  auto path = temp_path("blobs.csv");
  save_csv(ds, path);
  CsvSpec cs;
  cs.task = TaskKind::classification;
  cs.classes = 3;
  auto back = load_csv(path, cs);
  CHECK(back.inputs == ds.inputs);
  CHECK(back.labels == ds.labels);
  std::filesystem::remove(path);
  CHECK_THROWS(load_csv(temp_path("missing.csv"), cs));
}

TEST_CASE("idx round trip and header decoding") {
  auto img = temp_path("img.idx"), lab = temp_path("lab.idx");
  std::vector<std::uint8_t> pixels(2 * 28 * 28);
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = static_cast<std::uint8_t>(i * 7);
  std::vector<std::uint32_t> dims = {2, 28, 28};
  write_idx(img, dims, pixels);
  std::vector<std::uint8_t> labels = {3, 7};
  std::vector<std::uint32_t> ldims = {2};
  write_idx(lab, ldims, labels);

  auto ds = load_idx(img, lab);
  CHECK(ds.size() == 2);
  CHECK(ds.input_dim() == 784);
  CHECK(ds.labels == std::vector<int>{3, 7});
  CHECK(ds.normalisation != "none");
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    CHECK(ds.inputs(static_cast<Eigen::Index>(i / 784), static_cast<Eigen::Index>(i % 784)) ==
          pixels[i] / 255.0);
  }
  // Writing the scaled values back reproduces the bytes.
  std::vector<std::uint8_t> again(pixels.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    again[i] = static_cast<std::uint8_t>(std::lround(ds.inputs.data()[i] * 255.0));
  }
  CHECK(again == pixels);

  std::vector<std::uint32_t> bad_dims = {3};
  std::vector<std::uint8_t> three = {1, 2, 3};
  write_idx(lab, bad_dims, three);
  CHECK_THROWS_AS(load_idx(img, lab), FormatError);

  {
    std::ofstream out(img, std::ios::binary);
    out.write("\x00\x00\x09\x03", 4);
  }
  try {
    load_idx(img, lab);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }
  std::filesystem::remove(img);
  std::filesystem::remove(lab);
}

TEST_CASE("batches partition the dataset") {
  SinusoidSpec spec;
  spec.points = 100;
  auto ds = gen_sinusoid(spec, 1);
  auto bs = batches(ds, 32, 5, 0);
  REQUIRE(bs.size() == 4);
  CHECK(bs.back().size() == 4);
  std::vector<std::size_t> all;
  for (const auto& b : bs) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);

  CHECK(batches(ds, 32, 5, 0) == bs);
  CHECK(batches(ds, 32, 5, 1) != bs);
  auto whole = batches(ds, 1000, 5, 0);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].size() == 100);
  CHECK_THROWS_AS(batches(ds, 0, 5, 0), ArgumentError);
}
