#include "gnireg/linalg.hpp"

#include <string>

#include "gnireg/errors.hpp"

namespace gnireg {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: (" + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     ") * (" + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
  Matrix out(a.rows(), b.cols());
  out.noalias() = a * b;
  return out;
}

double frobenius_sq(const Matrix& a) { return a.squaredNorm(); }

Vector gaussian(RandomSource& rs, std::size_t n, double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("gaussian: sigma must be non-negative");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(n));
  if (sigma == 0.0) return out;
  for (auto& v : out) v = sigma * rs.normal();
  return out;
}

Matrix gaussian_matrix(RandomSource& rs, std::size_t rows, std::size_t cols, double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("gaussian: sigma must be non-negative");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (sigma == 0.0) return out;
  double* p = out.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) p[i] = sigma * rs.normal();
  return out;
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

void require_shape(const Matrix& a, Eigen::Index rows, Eigen::Index cols, std::string_view what) {
  if (a.rows() != rows || a.cols() != cols) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()));
  }
}

}  // namespace gnireg
