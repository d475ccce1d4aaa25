#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gnireg/linalg.hpp"

namespace gnireg {

struct Prediction {
  double confidence = 0.0;
  std::size_t predicted = 0;
  std::size_t label = 0;
};

struct ReliabilityBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double confidence = 0.0;  // mean confidence in the bin, 0 when empty
  double accuracy = 0.0;
};

struct CalibrationReport {
  std::vector<ReliabilityBin> bins;
  double ece = 0.0;
  std::size_t n = 0;
  double accuracy = 0.0;
  double mean_confidence = 0.0;
  // Filled only when full distributions were supplied.
  std::vector<double> entropies;
  double mean_entropy = 0.0;

  std::string to_json() const;
  // bin,conf,acc,count
  void write_reliability_csv(std::ostream& out) const;
};

// Equal-width bins (lo, hi] on (0, 1]; a confidence of exactly 0 lands in
// the first bin. Empty bins carry no weight.
CalibrationReport calibrate(std::span<const Prediction> predictions, std::size_t bins = 10);

// Rows of probs are class distributions; confidence is the row maximum and
// the prediction its argmax (lowest index on ties).
CalibrationReport calibrate(const Matrix& probs, std::span<const std::size_t> labels,
                            std::size_t bins = 10);

// -sum_c p_c log p_c with 0 log 0 = 0.
double prediction_entropy(std::span<const double> probs);

}  // namespace gnireg
