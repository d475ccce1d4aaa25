#include "gnireg/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "gnireg/csv.hpp"
#include "gnireg/errors.hpp"
#include "json.hpp"

namespace gnireg {

double prediction_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

CalibrationReport calibrate(std::span<const Prediction> predictions, std::size_t bins) {
  if (predictions.empty()) throw ArgumentError("calibrate: no predictions");
  if (bins == 0) throw ArgumentError("calibrate: bins must be >= 1");

  CalibrationReport r;
  r.n = predictions.size();
  r.bins.resize(bins);
  const auto m = static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    r.bins[b].lo = static_cast<double>(b) / m;
    r.bins[b].hi = static_cast<double>(b + 1) / m;
  }
  std::vector<double> correct(bins, 0.0);
  double total_correct = 0.0;
  double total_conf = 0.0;
  for (const auto& p : predictions) {
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
      throw DomainError("calibrate: confidence outside [0, 1]");
    }
    const double raw = std::ceil(p.confidence * m) - 1.0;
    const auto idx = static_cast<std::size_t>(std::clamp(raw, 0.0, m - 1.0));
    auto& bin = r.bins[idx];
    ++bin.count;
    bin.confidence += p.confidence;
    const double hit = p.predicted == p.label ? 1.0 : 0.0;
    correct[idx] += hit;
    total_correct += hit;
    total_conf += p.confidence;
  }
  const auto n = static_cast<double>(r.n);
  for (std::size_t b = 0; b < bins; ++b) {
    auto& bin = r.bins[b];
    if (bin.count == 0) continue;
    const auto c = static_cast<double>(bin.count);
    bin.confidence /= c;
    bin.accuracy = correct[b] / c;
    r.ece += c / n * std::abs(bin.accuracy - bin.confidence);
  }
  r.accuracy = total_correct / n;
  r.mean_confidence = total_conf / n;
  return r;
}

CalibrationReport calibrate(const Matrix& probs, std::span<const std::size_t> labels,
                            std::size_t bins) {
  if (static_cast<std::size_t>(probs.rows()) != labels.size()) {
    throw ShapeError("calibrate: one label per probability row required");
  }
  std::vector<Prediction> preds(labels.size());
  std::vector<double> entropies(labels.size());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index arg = 0;
    const double conf = probs.row(i).maxCoeff(&arg);
    const auto u = static_cast<std::size_t>(i);
    preds[u] = {conf, static_cast<std::size_t>(arg), labels[u]};
    entropies[u] = prediction_entropy(std::span<const double>(&probs(i, 0), static_cast<std::size_t>(probs.cols())));
  }
  auto r = calibrate(preds, bins);
  r.entropies = std::move(entropies);
  double sum = 0.0;
  for (double h : r.entropies) sum += h;
  r.mean_entropy = sum / static_cast<double>(r.entropies.size());
  return r;
}

std::string CalibrationReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["bins"] = bins.size();
  j["ece"] = ece;
  j["accuracy"] = accuracy;
  j["mean_confidence"] = mean_confidence;
  if (!entropies.empty()) j["mean_entropy"] = mean_entropy;
  auto& rel = j["reliability"] = nlohmann::json::array();
  for (const auto& b : bins) {
    rel.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count},
                   {"confidence", b.confidence}, {"accuracy", b.accuracy}});
  }
  return j.dump(2);
}

void CalibrationReport::write_reliability_csv(std::ostream& out) const {
  write_csv_row(out, {"bin", "conf", "acc", "count"});
  for (std::size_t b = 0; b < bins.size(); ++b) {
    write_csv_row(out, {std::to_string(b + 1), format_double(bins[b].confidence),
                        format_double(bins[b].accuracy), std::to_string(bins[b].count)});
  }
}

}  // namespace gnireg
