#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnireg/batch.hpp"
#include "gnireg/linalg.hpp"

namespace gnireg {

enum class TaskKind { regression, classification };

// N examples, one per row. Classification targets are one-hot and mirrored
// in `labels`.
struct Dataset {
  Matrix inputs;
  Matrix targets;
  std::vector<int> labels;
  TaskKind task = TaskKind::regression;
  std::string normalisation = "none";
  // Generator metadata (sinusoid phases, blob centres, ...) kept for provenance.
  std::vector<double> phases;

  Eigen::Index size() const { return inputs.rows(); }
  Eigen::Index input_dim() const { return inputs.cols(); }
  Eigen::Index target_dim() const { return targets.cols(); }
  std::size_t classes() const { return static_cast<std::size_t>(targets.cols()); }

  // ArgumentError unless dims are consistent and labels < classes.
  void validate() const;
  Batch gather(std::span<const std::size_t> indices) const;
  Batch all() const;
};

// lambda(z) = sum_i sin(2 pi r_i z + phi_i)
double sinusoid_target(double z, std::span<const double> freqs, std::span<const double> phases);

std::vector<double> default_sinusoid_freqs();  // {5, 10, ..., 50}

struct SinusoidSpec {
  std::size_t points = 1024;
  std::vector<double> freqs = default_sinusoid_freqs();
  // Explicit phases; when absent they are drawn once from U[0, 2 pi).
  std::optional<std::vector<double>> phases;
  double z_min = 0.0;
  double z_max = 1.0;
  // Evenly spaced z = z_min + i (z_max - z_min) / points; otherwise uniform draws.
  bool grid = true;
};

// ArgumentError on empty freqs or mismatched phase count.
Dataset gen_sinusoid(const SinusoidSpec& spec, std::uint64_t seed);

struct BlobSpec {
  std::size_t classes = 2;
  std::size_t per_class = 100;
  std::size_t dim = 2;
  double separation = 4.0;
  double cluster_sigma = 1.0;
};

// Isotropic Gaussian clusters whose centres sit evenly on a circle of radius
// `separation` in the first two coordinates. ArgumentError if classes < 2 or
// dim < 2.
Dataset gen_blobs(const BlobSpec& spec, std::uint64_t seed);

struct CsvSpec {
  // Zero-based target columns; negative values count from the end.
  std::vector<int> target_columns = {-1};
  bool header = false;
  TaskKind task = TaskKind::regression;
  // For classification: number of classes (0 = max label + 1).
  std::size_t classes = 0;
};

// FormatError (with line number) on ragged rows or unparsable cells.
Dataset load_csv(const std::filesystem::path& path, const CsvSpec& spec);
Dataset parse_csv(const std::string& text, const CsvSpec& spec);

// IDX image (magic 0x0803) and label (0x0801) files; pixels scaled to [0, 1].
// FormatError (with byte offset) on bad magic, truncation, or count mismatch.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::size_t classes = 10);

// Writes an unsigned-byte IDX file with the given dims. Values are stored as is.
void write_idx(const std::filesystem::path& path, std::span<const std::uint32_t> dims,
               std::span<const std::uint8_t> values);

// Seeded permutation of [0, N) for (seed, epoch) cut into batches of `size`;
// the final short batch is kept.
std::vector<std::vector<std::size_t>> batches(const Dataset& ds, std::size_t size,
                                              std::uint64_t seed, std::uint64_t epoch);

// Dataset written as CSV: input columns then target columns (labels for
// classification).
void save_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace gnireg
