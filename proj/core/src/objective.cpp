#include <cmath>
#include <string>

#include "gnireg/errors.hpp"
#include "gnireg/loss.hpp"

namespace gnireg {

std::string_view to_string(LossKind k) {
  return k == LossKind::mse ? "mse" : "cross_entropy";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "mse") return LossKind::mse;
  if (name == "cross_entropy" || name == "ce") return LossKind::cross_entropy;
  throw ArgumentError("unknown loss kind '" + std::string(name) + "'");
}

double mse_loss(const Vector& output, const Vector& target) {
  if (output.size() != target.size()) throw ShapeError("mse_loss: length mismatch");
  return 0.5 * (target - output).squaredNorm();
}

Vector softmax(const Vector& logits) {
  Vector e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    p.row(r) = (logits.row(r).array() - m).exp();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

Eigen::Index one_hot_class(const Vector& one_hot) {
  Eigen::Index cls = -1;
  for (Eigen::Index i = 0; i < one_hot.size(); ++i) {
    if (one_hot[i] == 1.0) {
      if (cls >= 0) throw ArgumentError("target is not one-hot");
      cls = i;
    } else if (one_hot[i] != 0.0) {
      throw ArgumentError("target is not one-hot");
    }
  }
  if (cls < 0) throw ArgumentError("target is not one-hot");
  return cls;
}

namespace {

double log_sum_exp(const auto& row) {
  const double m = row.maxCoeff();
  return m + std::log((row.array() - m).exp().sum());
}

}  // namespace

double softmax_ce(const Vector& logits, const Vector& one_hot) {
  if (logits.size() != one_hot.size()) throw ShapeError("softmax_ce: length mismatch");
  const Eigen::Index cls = one_hot_class(one_hot);
  return log_sum_exp(logits) - logits[cls];
}

double batch_loss(const Matrix& outputs, const Matrix& targets, LossKind kind) {
  require_shape(targets, outputs.rows(), outputs.cols(), "batch_loss targets");
  if (outputs.rows() == 0) throw ArgumentError("batch_loss: empty batch");
  double total = 0.0;
  if (kind == LossKind::mse) {
    total = 0.5 * (targets - outputs).squaredNorm();
  } else {
    for (Eigen::Index r = 0; r < outputs.rows(); ++r) {
      const Eigen::Index cls = one_hot_class(targets.row(r).transpose());
      total += log_sum_exp(outputs.row(r)) - outputs(r, cls);
    }
  }
  return total / static_cast<double>(outputs.rows());
}

Matrix batch_loss_gradient(const Matrix& outputs, const Matrix& targets, LossKind kind) {
  require_shape(targets, outputs.rows(), outputs.cols(), "batch_loss_gradient targets");
  if (outputs.rows() == 0) throw ArgumentError("batch_loss_gradient: empty batch");
  const double inv = 1.0 / static_cast<double>(outputs.rows());
  if (kind == LossKind::mse) return (outputs - targets) * inv;
  return (softmax_rows(outputs) - targets) * inv;
}

Matrix ce_hessian(const Vector& p) {
  if (p.size() == 0 || (p.array() < 0.0).any() || !p.allFinite() ||
      std::abs(p.sum() - 1.0) > 1e-9) {
    throw DomainError("ce_hessian: p is not a probability vector");
  }
  Matrix h = -(p * p.transpose());
  h.diagonal() = (p.array() * (1.0 - p.array())).matrix();
  return h;
}

Matrix output_hessian(LossKind kind, const Vector& output) {
  if (kind == LossKind::mse) return Matrix::Identity(output.size(), output.size());
  return ce_hessian(softmax(output));
}

}  // namespace gnireg
