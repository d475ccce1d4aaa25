#pragma once

#include <string_view>

#include "gnireg/linalg.hpp"

namespace gnireg {

enum class LossKind { mse, cross_entropy };

std::string_view to_string(LossKind k);
LossKind parse_loss_kind(std::string_view name);

// 0.5 * ||y - h||^2. ShapeError on length mismatch.
double mse_loss(const Vector& output, const Vector& target);

// Max-shifted softmax.
Vector softmax(const Vector& logits);
Matrix softmax_rows(const Matrix& logits);

// -log softmax(logits)[c] for the class c marked in the one-hot target.
// ArgumentError if target is not one-hot.
double softmax_ce(const Vector& logits, const Vector& one_hot);

// Mean loss over the rows of a batch.
double batch_loss(const Matrix& outputs, const Matrix& targets, LossKind kind);

// d(mean batch loss)/d(outputs), already divided by the batch size.
Matrix batch_loss_gradient(const Matrix& outputs, const Matrix& targets, LossKind kind);

// H_ii = p_i (1 - p_i), H_ij = -p_i p_j. DomainError unless p is a
// probability vector (entries >= 0, sum 1 within 1e-9).
Matrix ce_hessian(const Vector& p);

// d^2 loss / d h_L^2 for one example: the identity for MSE, ce_hessian of
// softmax(output) for cross-entropy.
Matrix output_hessian(LossKind kind, const Vector& output);

// Index of the first one-hot entry; ArgumentError unless exactly one entry is 1
// and the rest 0.
Eigen::Index one_hot_class(const Vector& one_hot);

}  // namespace gnireg
