#include "gnireg/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gnireg/errors.hpp"
#include "gnireg/random.hpp"

namespace gnireg {

void Dataset::validate() const {
  if (inputs.rows() < 1) throw ArgumentError("dataset is empty");
  if (targets.rows() != inputs.rows()) throw ArgumentError("dataset: inputs/targets row mismatch");
  if (task == TaskKind::classification) {
    if (labels.size() != static_cast<std::size_t>(inputs.rows())) {
      throw ArgumentError("dataset: label count mismatch");
    }
    for (int l : labels) {
      if (l < 0 || l >= targets.cols()) throw ArgumentError("dataset: label out of range");
    }
  }
}

Batch Dataset::gather(std::span<const std::size_t> indices) const {
  Batch b;
  b.inputs.resize(static_cast<Eigen::Index>(indices.size()), inputs.cols());
  b.targets.resize(static_cast<Eigen::Index>(indices.size()), targets.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto src = static_cast<Eigen::Index>(indices[i]);
    b.inputs.row(r) = inputs.row(src);
    b.targets.row(r) = targets.row(src);
  }
  return b;
}

Batch Dataset::all() const { return Batch{inputs, targets}; }

// ---------------------------------------------------------------------------

double sinusoid_target(double z, std::span<const double> freqs, std::span<const double> phases) {
  double sum = 0.0;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    sum += std::sin(2.0 * std::numbers::pi * freqs[i] * z + phases[i]);
  }
  return sum;
}

std::vector<double> default_sinusoid_freqs() {
  std::vector<double> f;
  for (int r = 5; r <= 50; r += 5) f.push_back(r);
  return f;
}

Dataset gen_sinusoid(const SinusoidSpec& spec, std::uint64_t seed) {
  if (spec.freqs.empty()) throw ArgumentError("gen_sinusoid: empty frequency list");
  if (spec.points == 0) throw ArgumentError("gen_sinusoid: zero points");
  RandomSource rs(seed, 0x51AE);
  Dataset ds;
  if (spec.phases) {
    if (spec.phases->size() != spec.freqs.size()) {
      throw ArgumentError("gen_sinusoid: phase count does not match frequency count");
    }
    ds.phases = *spec.phases;
  } else {
    RandomSource phase_rs = rs.split(0);
    for (std::size_t i = 0; i < spec.freqs.size(); ++i) {
      ds.phases.push_back(phase_rs.uniform(0.0, 2.0 * std::numbers::pi));
    }
  }
  const auto n = static_cast<Eigen::Index>(spec.points);
  ds.inputs.resize(n, 1);
  ds.targets.resize(n, 1);
  RandomSource z_rs = rs.split(1);
  const double width = spec.z_max - spec.z_min;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = spec.grid ? spec.z_min + width * static_cast<double>(i) / static_cast<double>(n)
                               : z_rs.uniform(spec.z_min, spec.z_max);
    ds.inputs(i, 0) = z;
    ds.targets(i, 0) = sinusoid_target(z, spec.freqs, ds.phases);
  }
  ds.task = TaskKind::regression;
  return ds;
}

Dataset gen_blobs(const BlobSpec& spec, std::uint64_t seed) {
  if (spec.classes < 2) throw ArgumentError("gen_blobs: need at least 2 classes");
  if (spec.dim < 2) throw ArgumentError("gen_blobs: need dim >= 2");
  if (spec.per_class == 0) throw ArgumentError("gen_blobs: per_class must be positive");
  RandomSource rs(seed, 0xB10B);
  const auto n = static_cast<Eigen::Index>(spec.classes * spec.per_class);
  const auto d = static_cast<Eigen::Index>(spec.dim);
  const auto c = static_cast<Eigen::Index>(spec.classes);
  Dataset ds;
  ds.task = TaskKind::classification;
  ds.inputs.resize(n, d);
  ds.targets = Matrix::Zero(n, c);
  ds.labels.resize(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (Eigen::Index cls = 0; cls < c; ++cls) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(cls) / static_cast<double>(c);
    for (std::size_t i = 0; i < spec.per_class; ++i, ++row) {
      for (Eigen::Index j = 0; j < d; ++j) ds.inputs(row, j) = spec.cluster_sigma * rs.normal();
      ds.inputs(row, 0) += spec.separation * std::cos(angle);
      ds.inputs(row, 1) += spec.separation * std::sin(angle);
      ds.targets(row, cls) = 1.0;
      ds.labels[static_cast<std::size_t>(row)] = static_cast<int>(cls);
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  if (quoted) throw FormatError("csv line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

double parse_number(const std::string& field, std::size_t line_no, std::size_t col) {
  const auto first = field.find_first_not_of(" \t");
  const auto last = field.find_last_not_of(" \t");
  if (first == std::string::npos) {
    throw FormatError("csv line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                      ": empty cell");
  }
  double v = 0.0;
  const char* b = field.data() + first;
  const char* e = field.data() + last + 1;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) {
    throw FormatError("csv line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                      ": not a number '" + field + "'");
  }
  return v;
}

}  // namespace

Dataset parse_csv(const std::string& text, const CsvSpec& spec) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (spec.header && line_no == 1) continue;
    const auto fields = split_csv_line(line, line_no);
    if (rows.empty()) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw FormatError("csv line " + std::to_string(line_no) + ": expected " +
                        std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> vals;
    vals.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) vals.push_back(parse_number(fields[c], line_no, c));
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw FormatError("csv: no data rows");

  std::vector<std::size_t> target_cols;
  for (int c : spec.target_columns) {
    const long idx = c < 0 ? static_cast<long>(width) + c : c;
    if (idx < 0 || idx >= static_cast<long>(width)) throw FormatError("csv: target column out of range");
    target_cols.push_back(static_cast<std::size_t>(idx));
  }
  if (target_cols.empty() || target_cols.size() >= width) {
    throw FormatError("csv: need at least one input and one target column");
  }
  std::vector<std::size_t> input_cols;
  for (std::size_t c = 0; c < width; ++c) {
    if (std::find(target_cols.begin(), target_cols.end(), c) == target_cols.end()) input_cols.push_back(c);
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  Dataset ds;
  ds.task = spec.task;
  ds.inputs.resize(n, static_cast<Eigen::Index>(input_cols.size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < input_cols.size(); ++j) {
      ds.inputs(r, static_cast<Eigen::Index>(j)) = rows[static_cast<std::size_t>(r)][input_cols[j]];
    }
  }
  if (spec.task == TaskKind::regression) {
    ds.targets.resize(n, static_cast<Eigen::Index>(target_cols.size()));
    for (Eigen::Index r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < target_cols.size(); ++j) {
        ds.targets(r, static_cast<Eigen::Index>(j)) = rows[static_cast<std::size_t>(r)][target_cols[j]];
      }
    }
  } else {
    if (target_cols.size() != 1) throw FormatError("csv: classification needs exactly one label column");
    int max_label = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const double v = rows[static_cast<std::size_t>(r)][target_cols[0]];
      if (v < 0 || v != std::floor(v)) {
        throw FormatError("csv line " + std::to_string(r + 1 + (spec.header ? 1 : 0)) +
                          ": label is not a non-negative integer");
      }
      ds.labels.push_back(static_cast<int>(v));
      max_label = std::max(max_label, static_cast<int>(v));
    }
    const std::size_t classes = spec.classes ? spec.classes : static_cast<std::size_t>(max_label) + 1;
    if (static_cast<std::size_t>(max_label) >= classes) throw FormatError("csv: label exceeds class count");
    ds.targets = Matrix::Zero(n, static_cast<Eigen::Index>(classes));
    for (Eigen::Index r = 0; r < n; ++r) ds.targets(r, ds.labels[static_cast<std::size_t>(r)]) = 1.0;
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), spec);
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  for (Eigen::Index r = 0; r < ds.size(); ++r) {
    for (Eigen::Index c = 0; c < ds.inputs.cols(); ++c) out << ds.inputs(r, c) << ',';
    if (ds.task == TaskKind::classification) {
      out << ds.labels[static_cast<std::size_t>(r)];
    } else {
      for (Eigen::Index c = 0; c < ds.targets.cols(); ++c) {
        out << ds.targets(r, c) << (c + 1 < ds.targets.cols() ? "," : "");
      }
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset,
                        const std::string& what) {
  if (offset + 4 > buf.size()) {
    throw FormatError(what + ": truncated header at byte offset " + std::to_string(offset));
  }
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

struct IdxHeader {
  std::vector<std::uint32_t> dims;
  std::size_t data_offset = 0;
};

IdxHeader parse_idx_header(const std::vector<std::uint8_t>& buf, std::uint32_t expected_magic,
                           const std::string& what) {
  const std::uint32_t magic = read_be32(buf, 0, what);
  if (magic != expected_magic) {
    std::ostringstream msg;
    msg << what << ": bad magic 0x" << std::hex << magic << " at byte offset 0 (expected 0x"
        << expected_magic << ")";
    throw FormatError(msg.str());
  }
  IdxHeader h;
  const std::size_t ndims = magic & 0xFF;
  for (std::size_t i = 0; i < ndims; ++i) h.dims.push_back(read_be32(buf, 4 + 4 * i, what));
  h.data_offset = 4 + 4 * ndims;
  std::size_t count = 1;
  for (auto d : h.dims) count *= d;
  if (buf.size() < h.data_offset + count) {
    throw FormatError(what + ": truncated payload, expected " + std::to_string(count) +
                      " bytes at byte offset " + std::to_string(h.data_offset) + ", file has " +
                      std::to_string(buf.size()));
  }
  return h;
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::size_t classes) {
  const auto img = read_bytes(images);
  const auto lab = read_bytes(labels);
  const IdxHeader ih = parse_idx_header(img, 0x00000803u, "idx images");
  const IdxHeader lh = parse_idx_header(lab, 0x00000801u, "idx labels");
  if (ih.dims[0] != lh.dims[0]) {
    throw FormatError("idx: label count " + std::to_string(lh.dims[0]) +
                      " does not match image count " + std::to_string(ih.dims[0]) +
                      " (label header at byte offset 4)");
  }
  const auto n = static_cast<Eigen::Index>(ih.dims[0]);
  const auto d = static_cast<Eigen::Index>(ih.dims[1]) * ih.dims[2];
  Dataset ds;
  ds.task = TaskKind::classification;
  ds.normalisation = "divide_by_255";
  ds.inputs.resize(n, d);
  for (Eigen::Index i = 0; i < n * d; ++i) {
    ds.inputs.data()[i] = static_cast<double>(img[ih.data_offset + static_cast<std::size_t>(i)]) / 255.0;
  }
  ds.targets = Matrix::Zero(n, static_cast<Eigen::Index>(classes));
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t off = lh.data_offset + static_cast<std::size_t>(i);
    const int label = lab[off];
    if (static_cast<std::size_t>(label) >= classes) {
      throw FormatError("idx labels: label " + std::to_string(label) + " >= class count at byte offset " +
                        std::to_string(off));
    }
    ds.labels.push_back(label);
    ds.targets(i, label) = 1.0;
  }
  return ds;
}

void write_idx(const std::filesystem::path& path, std::span<const std::uint32_t> dims,
               std::span<const std::uint8_t> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  auto put32 = [&](std::uint32_t v) {
    const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                       static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(b, 4);
  };
  put32(0x00000800u | static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) put32(d);
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size()));
}

std::vector<std::vector<std::size_t>> batches(const Dataset& ds, std::size_t size,
                                              std::uint64_t seed, std::uint64_t epoch) {
  if (size == 0) throw ArgumentError("batches: size must be positive");
  const auto n = static_cast<std::size_t>(ds.size());
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  RandomSource rs = RandomSource(seed, 0x5AFF1E).split(epoch);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[rs.below(i)]);
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += size) {
    out.emplace_back(perm.begin() + static_cast<long>(start),
                     perm.begin() + static_cast<long>(std::min(n, start + size)));
  }
  return out;
}

}  // namespace gnireg
