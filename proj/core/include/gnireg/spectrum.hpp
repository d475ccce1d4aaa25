#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "gnireg/network.hpp"

namespace gnireg {

// Uniform periodic grid z_i = z_min + i (z_max - z_min) / points, i < points.
struct Grid {
  double z_min = 0.0;
  double z_max = 1.0;
  std::size_t points = 1024;

  std::vector<double> nodes() const;
  double period() const { return z_max - z_min; }
};

// Radix-2 DFT X_k = sum_n x_n exp(-2 pi i k n / N). ArgumentError unless the
// length is a power of two.
std::vector<std::complex<double>> dft(std::span<const double> samples);

// Amplitudes for bins 0..N/2: |X_0|/N (the mean), 2|X_k|/N in between, and
// |X_{N/2}|/N at the Nyquist bin, so a unit tone at bin k reads 1.
std::vector<double> amplitude_spectrum(std::span<const double> samples);

// Samples a 1-in/1-out network on the grid and returns its amplitude
// spectrum. UnsupportedError for any other shape.
std::vector<double> network_spectrum(const Network& net, const Grid& grid);

// Amplitude spectra of a network over training, one row per recorded step.
struct SpectrumSeries {
  std::size_t grid_size = 0;
  std::vector<std::size_t> steps;
  std::vector<std::vector<double>> amplitudes;

  void add(std::size_t step, std::vector<double> amps);
  // step,bin,amplitude per row.
  void write_long_csv(std::ostream& out) const;
  // Header "step,bin_0,...", one row per step. With clip, values are
  // clamped to [0, 1] for heatmap display.
  void write_matrix_csv(std::ostream& out, bool clip = false) const;
};

SpectrumSeries spectrum(std::span<const Network> nets, std::span<const std::size_t> steps,
                        const Grid& grid);

// Sum of amplitudes over bins >= from_bin.
double band_amplitude(std::span<const double> amps, std::size_t from_bin);

// Discrete check of the Sobolev / Fourier identity for a periodic f:
//   lhs = mean_grid f'(z)^2
//   rhs = sum_k (2 pi k / T)^2 |c_k|^2 over the two-sided Fourier series
// f' is the analytic derivative when given, else a central difference with
// step fd_step * T evaluated off-grid.
struct ParsevalResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_gap = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|); 0 when both vanish
};

ParsevalResult parseval_check(const std::function<double(double)>& f, const Grid& grid,
                              const std::function<double(double)>& derivative = {},
                              double fd_step = 1e-6);

}  // namespace gnireg
