#pragma once

#include <string_view>
#include <vector>

#include "gnireg/batch.hpp"
#include "gnireg/loss.hpp"
#include "gnireg/network.hpp"
#include "gnireg/noise.hpp"

namespace gnireg {

// Which output Hessian weights the layer Jacobians:
//   mse      H_L = I, i.e. ||J_k||_F^2
//   ce_full  Tr(J_k^T H_L J_k) with the softmax cross-entropy Hessian
//   ce_diag  sum_ij (diag(H_L)^T J_k^2)_ij, dropping off-diagonal H_L terms
enum class RegVariant { mse, ce_full, ce_diag };

std::string_view to_string(RegVariant v);
RegVariant parse_reg_variant(std::string_view name);
// mse for regression, ce_diag for classification.
RegVariant default_variant(LossKind loss);
bool compatible(RegVariant v, LossKind loss);

// Noise-marginalised penalty R = sum_k r_k with
//   r_k = sigma_k^2 / 2 * mean_batch Tr(J_k^T H_L J_k)
// evaluated on clean activations. Multiplicative layers weight column j of
// J_k by h_{k,j}^2, the per-unit variance of that injection.
struct RegBreakdown {
  double total = 0.0;
  std::vector<double> per_layer;
  RegVariant variant = RegVariant::mse;
};

// ArgumentError on an empty batch.
RegBreakdown regulariser(const Network& net, const Matrix& inputs, const NoiseSpec& spec,
                         RegVariant variant);
RegBreakdown regulariser(const Network& net, const ForwardTrace& trace, const JacobianSet& jac,
                         const NoiseSpec& spec, RegVariant variant);

RegBreakdown reg_mse(const Network& net, const Matrix& inputs, const NoiseSpec& spec);

enum class CeVariant { full, diag };
RegBreakdown reg_ce(const Network& net, const Matrix& inputs, const NoiseSpec& spec,
                    CeVariant variant = CeVariant::diag);

// Per-layer values of the same penalty with J_k replaced by the product
// W_{L-1} ... W_k of the equivalent linear network. Only defined for
// additive noise on relu/elu/softplus/identity networks (UnsupportedError
// otherwise). Cross-entropy variants use H_L of the actual network.
std::vector<double> linear_upper_bound(const Network& net, const Matrix& inputs,
                                       const NoiseSpec& spec, RegVariant variant);

// Clean loss, R, and the exact gradient of (loss + R) with respect to every
// weight and bias. The gradient differentiates through the Jacobian sweep
// (second-order reverse mode).
struct ExplicitObjective {
  double loss = 0.0;
  RegBreakdown reg;
  Gradients gradient;
};

ExplicitObjective explicit_objective(const Network& net, const Batch& batch,
                                     const NoiseSpec& spec, LossKind loss, RegVariant variant);

// Central finite differences of R over every parameter. Slow; used to
// cross-check explicit_objective on small networks.
Gradients regulariser_gradient_fd(const Network& net, const Matrix& inputs, const NoiseSpec& spec,
                                  RegVariant variant, double step = 1e-6);

}  // namespace gnireg
