#include "gnireg/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "gnireg/csv.hpp"
#include "gnireg/errors.hpp"

namespace gnireg {

std::vector<double> Grid::nodes() const {
  std::vector<double> z(points);
  for (std::size_t i = 0; i < points; ++i) {
    z[i] = z_min + period() * static_cast<double>(i) / static_cast<double>(points);
  }
  return z;
}

std::vector<std::complex<double>> dft(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n == 0 || !std::has_single_bit(n)) throw ArgumentError("dft: length must be a power of two");
  std::vector<std::complex<double>> a(samples.begin(), samples.end());
  // Bit-reversal permutation, then iterative butterflies.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        // Twiddles computed directly rather than by repeated multiplication.
        const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  return a;
}

std::vector<double> amplitude_spectrum(std::span<const double> samples) {
  const auto x = dft(samples);
  const std::size_t n = x.size();
  const auto nd = static_cast<double>(n);
  std::vector<double> amps(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double scale = (k == 0 || 2 * k == n) ? 1.0 : 2.0;
    amps[k] = scale * std::abs(x[k]) / nd;
  }
  return amps;
}

std::vector<double> network_spectrum(const Network& net, const Grid& grid) {
  if (net.input_dim() != 1 || net.output_dim() != 1) {
    throw UnsupportedError("spectrum: network must map R -> R");
  }
  const auto z = grid.nodes();
  const Matrix in = Eigen::Map<const Vector>(z.data(), static_cast<Eigen::Index>(z.size()));
  const Matrix out = predict(net, in);
  return amplitude_spectrum(std::span<const double>(out.data(), static_cast<std::size_t>(out.size())));
}

void SpectrumSeries::add(std::size_t step, std::vector<double> amps) {
  steps.push_back(step);
  amplitudes.push_back(std::move(amps));
}

void SpectrumSeries::write_long_csv(std::ostream& out) const {
  write_csv_row(out, {"step", "bin", "amplitude"});
  for (std::size_t r = 0; r < steps.size(); ++r) {
    for (std::size_t k = 0; k < amplitudes[r].size(); ++k) {
      write_csv_row(out, {std::to_string(steps[r]), std::to_string(k), format_double(amplitudes[r][k])});
    }
  }
}

void SpectrumSeries::write_matrix_csv(std::ostream& out, bool clip) const {
  std::vector<std::string> header = {"step"};
  const std::size_t bins = amplitudes.empty() ? 0 : amplitudes.front().size();
  for (std::size_t k = 0; k < bins; ++k) header.push_back("bin_" + std::to_string(k));
  write_csv_row(out, header);
  for (std::size_t r = 0; r < steps.size(); ++r) {
    std::vector<std::string> cells = {std::to_string(steps[r])};
    for (double a : amplitudes[r]) cells.push_back(format_double(clip ? std::clamp(a, 0.0, 1.0) : a));
    write_csv_row(out, cells);
  }
}

SpectrumSeries spectrum(std::span<const Network> nets, std::span<const std::size_t> steps,
                        const Grid& grid) {
  if (nets.size() != steps.size()) throw ArgumentError("spectrum: one step per network required");
  SpectrumSeries s;
  s.grid_size = grid.points;
  for (std::size_t i = 0; i < nets.size(); ++i) s.add(steps[i], network_spectrum(nets[i], grid));
  return s;
}

double band_amplitude(std::span<const double> amps, std::size_t from_bin) {
  double sum = 0.0;
  for (std::size_t k = from_bin; k < amps.size(); ++k) sum += amps[k];
  return sum;
}

ParsevalResult parseval_check(const std::function<double(double)>& f, const Grid& grid,
                              const std::function<double(double)>& derivative, double fd_step) {
  const auto z = grid.nodes();
  const double period = grid.period();
  const double h = fd_step * period;
  std::vector<double> values(z.size());
  double lhs = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    values[i] = f(z[i]);
    const double d = derivative ? derivative(z[i]) : (f(z[i] + h) - f(z[i] - h)) / (2.0 * h);
    lhs += d * d;
  }
  lhs /= static_cast<double>(z.size());

  const auto x = dft(values);
  const std::size_t n = x.size();
  const auto nd = static_cast<double>(n);
  double rhs = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) / period;
    // Bins k and N-k carry the +k and -k coefficients; Nyquist appears once.
    const double weight = (2 * k == n) ? 1.0 : 2.0;
    rhs += weight * omega * omega * std::norm(x[k] / nd);
  }
  ParsevalResult r{lhs, rhs, 0.0};
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  r.rel_gap = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  return r;
}

}  // namespace gnireg
