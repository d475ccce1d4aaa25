#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>

#include "gnireg/random.hpp"

namespace gnireg {

// Dense row-major double-precision matrix. Batched quantities store one
// example per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

// Matrix product with an explicit shape check (throws ShapeError).
Matrix matmul(const Matrix& a, const Matrix& b);

// Sum of squared entries.
double frobenius_sq(const Matrix& a);

// n i.i.d. N(0, sigma^2) draws. sigma == 0 yields exact zeros without
// consuming randomness; sigma < 0 throws DomainError.
Vector gaussian(RandomSource& rs, std::size_t n, double sigma);

// Matrix of rows x cols i.i.d. N(0, sigma^2) draws, row-major fill order.
Matrix gaussian_matrix(RandomSource& rs, std::size_t rows, std::size_t cols, double sigma);

bool all_finite(const Matrix& a);

// Throws ShapeError with `what` in the message unless a has the given shape.
void require_shape(const Matrix& a, Eigen::Index rows, Eigen::Index cols, std::string_view what);

}  // namespace gnireg
