#pragma once

#include "gnireg/linalg.hpp"

namespace gnireg {

// A mini-batch: one example per row. Classification targets are one-hot rows.
struct Batch {
  Matrix inputs;
  Matrix targets;

  Eigen::Index size() const { return inputs.rows(); }
};

}  // namespace gnireg
