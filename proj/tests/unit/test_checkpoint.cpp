#include <filesystem>

#include "doctest.h"
#include "gnireg/checkpoint.hpp"
#include "gnireg/errors.hpp"
#include "test_util.hpp"

using namespace gnireg;

TEST_CASE("checkpoint json round trip is exact") {
  RandomSource rs(17);
  Checkpoint c{test::random_network({3, 4, 2}, Activation::elu, rs), 99, 1234};
  auto back = checkpoint_from_json(checkpoint_to_json(c));
  CHECK(back.seed == 99);
  CHECK(back.step == 1234);
  CHECK(back.network.parameters() == c.network.parameters());
  CHECK(back.network.layer(0).activation == Activation::elu);
  CHECK(back.network.layer(1).activation == Activation::identity);
}

TEST_CASE("checkpoint file round trip") {
  RandomSource rs(1);
  Checkpoint c{test::random_network({1, 3, 1}, Activation::relu, rs), 5, 0};
  auto path = std::filesystem::temp_directory_path() / "gnireg_ckpt_test.json";
  save_checkpoint(c, path);
  auto back = load_checkpoint(path);
  CHECK(back.network.parameters() == c.network.parameters());
  std::filesystem::remove(path);
}

TEST_CASE("malformed checkpoints are rejected") {
  CHECK_THROWS_AS(checkpoint_from_json("{"), FormatError);
  CHECK_THROWS_AS(checkpoint_from_json(R"({"format":"other"})"), FormatError);
  CHECK_THROWS_AS(
      checkpoint_from_json(
          R"({"format":"gnireg-checkpoint","version":1,"seed":0,"step":0,"layers":[{"in":2,"out":1,"activation":"identity","weights":[1],"bias":[0]}]})"),
      FormatError);
}
