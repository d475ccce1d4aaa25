#include "gnireg/regulariser.hpp"

#include <string>

#include "gnireg/errors.hpp"

namespace gnireg {

std::string_view to_string(RegVariant v) {
  switch (v) {
    case RegVariant::mse: return "mse";
    case RegVariant::ce_full: return "ce_full";
    case RegVariant::ce_diag: return "ce_diag";
  }
  return "?";
}

RegVariant parse_reg_variant(std::string_view name) {
  if (name == "mse") return RegVariant::mse;
  if (name == "ce_full" || name == "full") return RegVariant::ce_full;
  if (name == "ce_diag" || name == "diag") return RegVariant::ce_diag;
  throw ArgumentError("unknown regulariser variant '" + std::string(name) + "'");
}

RegVariant default_variant(LossKind loss) {
  return loss == LossKind::mse ? RegVariant::mse : RegVariant::ce_diag;
}

bool compatible(RegVariant v, LossKind loss) {
  return (v == RegVariant::mse) == (loss == LossKind::mse);
}

namespace {

// Adjoints of R with respect to the quantities it reads directly.
struct RegAdjoint {
  std::vector<Matrix> jac;           // dR/dG_k, same shape as jac.stacked[k] (empty if silent)
  std::vector<Matrix> activations;   // dR/dh_k through multiplicative weights (empty if none)
  Matrix output;                     // dR/dh_L through H_L (cross-entropy only)
};

// Evaluates R and, when `adj` is non-null, its partial adjoints.
RegBreakdown evaluate(const Network& net, const ForwardTrace& trace, const JacobianSet& jac,
                      const NoiseSpec& spec, RegVariant variant, RegAdjoint* adj) {
  const std::size_t L = net.depth();
  spec.validate(L);
  const Eigen::Index B = trace.batch_size();
  if (B == 0) throw ArgumentError("regulariser: empty batch");
  const Eigen::Index m = jac.outputs;
  const bool ce = variant != RegVariant::mse;
  const double inv_b = 1.0 / static_cast<double>(B);

  Matrix probs;
  if (ce) probs = softmax_rows(trace.output());

  RegBreakdown out;
  out.variant = variant;
  out.per_layer.assign(L, 0.0);

  Matrix h_adj;  // dR/dH_L per example, stacked (B*m) x m
  if (adj) {
    adj->jac.assign(L + 1, Matrix());
    adj->activations.assign(L + 1, Matrix());
    if (ce) h_adj = Matrix::Zero(B * m, m);
  }

  for (std::size_t k = 0; k < L; ++k) {
    const LayerNoise& ln = spec.layers[k];
    if (!ln.active()) continue;
    const double s2 = ln.variance;
    const Matrix& g = jac.stacked[k];
    const bool mult = ln.mode == NoiseMode::multiplicative;
    const Matrix& h = trace.post[k];

    Matrix g_adj;
    Matrix c_adj;
    if (adj) {
      g_adj.resize(g.rows(), g.cols());
      if (mult) c_adj.resize(B, g.cols());
    }
    double sum = 0.0;
    for (Eigen::Index b = 0; b < B; ++b) {
      const auto gb = g.middleRows(b * m, m);
      // gc = G_b diag(c_b)
      Matrix gc = gb;
      if (mult) gc.array().rowwise() *= h.row(b).array().square();

      if (variant == RegVariant::mse) {
        sum += gb.cwiseProduct(gc).sum();
        if (adj) {
          g_adj.middleRows(b * m, m) = (s2 * inv_b) * gc;
          if (mult) c_adj.row(b) = (0.5 * s2 * inv_b) * gb.cwiseAbs2().colwise().sum();
        }
      } else {
        const Vector p = probs.row(b).transpose();
        if (variant == RegVariant::ce_full) {
          Matrix hess = -(p * p.transpose());
          hess.diagonal() = (p.array() * (1.0 - p.array())).matrix();
          const Matrix hg = hess * gb;
          sum += hg.cwiseProduct(gc).sum();
          if (adj) {
            Matrix hgc = hess * gc;
            g_adj.middleRows(b * m, m) = (s2 * inv_b) * hgc;
            h_adj.middleRows(b * m, m) += (0.5 * s2 * inv_b) * (gc * gb.transpose());
            if (mult) c_adj.row(b) = (0.5 * s2 * inv_b) * gb.cwiseProduct(hg).colwise().sum();
          }
        } else {
          const Vector hd = (p.array() * (1.0 - p.array())).matrix();
          const Vector row_energy = gb.cwiseProduct(gc).rowwise().sum();
          sum += hd.dot(row_energy);
          if (adj) {
            Matrix dgc = gc;
            dgc.array().colwise() *= hd.array();
            g_adj.middleRows(b * m, m) = (s2 * inv_b) * dgc;
            h_adj.middleRows(b * m, m).diagonal() += (0.5 * s2 * inv_b) * row_energy;
            if (mult) {
              Matrix dg = gb.cwiseAbs2();
              dg.array().colwise() *= hd.array();
              c_adj.row(b) = (0.5 * s2 * inv_b) * dg.colwise().sum();
            }
          }
        }
      }
    }
    out.per_layer[k] = 0.5 * s2 * sum * inv_b;
    out.total += out.per_layer[k];
    if (adj) {
      adj->jac[k] = std::move(g_adj);
      if (mult) adj->activations[k] = 2.0 * h.cwiseProduct(c_adj);
    }
  }

  if (adj && ce) {
    // H = diag(p) - p p^T  =>  dp_i = A_ii - sum_j (A_ij + A_ji) p_j,
    // then through softmax: dz = p * (dp - <p, dp>).
    Matrix dz(B, m);
    for (Eigen::Index b = 0; b < B; ++b) {
      const Vector p = probs.row(b).transpose();
      const Matrix a = h_adj.middleRows(b * m, m);
      const Vector dp = a.diagonal() - (a + a.transpose()) * p;
      dz.row(b) = (p.array() * (dp.array() - p.dot(dp))).matrix().transpose();
    }
    adj->output = std::move(dz);
  }
  return out;
}

void require_inputs(const Matrix& inputs) {
  if (inputs.rows() == 0) throw ArgumentError("regulariser: empty batch");
}

}  // namespace

RegBreakdown regulariser(const Network& net, const ForwardTrace& trace, const JacobianSet& jac,
                         const NoiseSpec& spec, RegVariant variant) {
  return evaluate(net, trace, jac, spec, variant, nullptr);
}

RegBreakdown regulariser(const Network& net, const Matrix& inputs, const NoiseSpec& spec,
                         RegVariant variant) {
  require_inputs(inputs);
  spec.validate(net.depth());
  const ForwardTrace trace = forward(net, inputs);
  if (spec.silent()) {
    RegBreakdown r;
    r.variant = variant;
    r.per_layer.assign(net.depth(), 0.0);
    return r;
  }
  return evaluate(net, trace, layer_jacobians(net, trace), spec, variant, nullptr);
}

RegBreakdown reg_mse(const Network& net, const Matrix& inputs, const NoiseSpec& spec) {
  return regulariser(net, inputs, spec, RegVariant::mse);
}

RegBreakdown reg_ce(const Network& net, const Matrix& inputs, const NoiseSpec& spec,
                    CeVariant variant) {
  return regulariser(net, inputs, spec,
                     variant == CeVariant::full ? RegVariant::ce_full : RegVariant::ce_diag);
}

std::vector<double> linear_upper_bound(const Network& net, const Matrix& inputs,
                                       const NoiseSpec& spec, RegVariant variant) {
  require_inputs(inputs);
  const std::size_t L = net.depth();
  spec.validate(L);
  for (const auto& l : net.layers()) {
    if (l.activation == Activation::sigmoid) {
      throw UnsupportedError("linear_upper_bound: sigmoid is not at most linear");
    }
  }
  for (const auto& ln : spec.layers) {
    if (ln.active() && ln.mode == NoiseMode::multiplicative) {
      throw UnsupportedError("linear_upper_bound: multiplicative noise");
    }
  }
  const auto m = static_cast<Eigen::Index>(net.output_dim());
  Matrix hess_mean = Matrix::Identity(m, m);
  if (variant != RegVariant::mse) {
    const Matrix probs = softmax_rows(predict(net, inputs));
    hess_mean.setZero();
    for (Eigen::Index b = 0; b < probs.rows(); ++b) {
      Matrix h = ce_hessian(probs.row(b).transpose());
      if (variant == RegVariant::ce_diag) h = Matrix(h.diagonal().asDiagonal());
      hess_mean += h;
    }
    hess_mean /= static_cast<double>(probs.rows());
  }
  std::vector<double> bound(L, 0.0);
  Matrix product = Matrix::Identity(m, m);
  for (std::size_t k = L; k-- > 0;) {
    product = product * net.layer(k).weights;
    const LayerNoise& ln = spec.layers[k];
    if (!ln.active()) continue;
    // Tr(P^T H P) is linear in H, so averaging H first is exact.
    bound[k] = 0.5 * ln.variance * (hess_mean * product).cwiseProduct(product).sum();
  }
  return bound;
}

ExplicitObjective explicit_objective(const Network& net, const Batch& batch,
                                     const NoiseSpec& spec, LossKind loss, RegVariant variant) {
  if (batch.size() == 0) throw ArgumentError("explicit_objective: empty batch");
  if (!compatible(variant, loss)) {
    throw ArgumentError("regulariser variant " + std::string(to_string(variant)) +
                        " does not match loss " + std::string(to_string(loss)));
  }
  spec.validate(net.depth());
  const std::size_t L = net.depth();
  const ForwardTrace trace = forward(net, batch.inputs);
  ExplicitObjective obj;
  obj.loss = batch_loss(trace.output(), batch.targets, loss);
  Matrix out_grad = batch_loss_gradient(trace.output(), batch.targets, loss);

  if (spec.silent()) {
    obj.reg.variant = variant;
    obj.reg.per_layer.assign(L, 0.0);
    obj.gradient = backprop(net, tape_from(trace), out_grad);
    return obj;
  }

  const JacobianSet jac = layer_jacobians(net, trace);
  RegAdjoint adj;
  obj.reg = evaluate(net, trace, jac, spec, variant, &adj);

  const Eigen::Index B = trace.batch_size();
  const Eigen::Index m = jac.outputs;
  std::size_t first = L;
  for (std::size_t k = 0; k < L; ++k) {
    if (adj.jac[k].size() > 0) {
      first = k;
      break;
    }
  }

  // Reverse through the Jacobian sweep G_k = (G_{k+1} .* S_k) W_k, from the
  // lowest noised layer upwards.
  std::vector<Matrix> extra_pre(L);
  std::vector<Matrix> sweep_w(L);
  Matrix g_adj;
  for (std::size_t k = first; k < L; ++k) {
    if (g_adj.size() == 0) {
      g_adj = adj.jac[k];
    } else if (adj.jac[k].size() > 0) {
      g_adj += adj.jac[k];
    }
    const auto& layer = net.layer(k);
    const Matrix& g_up = jac.stacked[k + 1];
    Matrix u_adj = g_adj * layer.weights.transpose();
    if (layer.activation == Activation::identity) {
      sweep_w[k].noalias() = g_up.transpose() * g_adj;
      g_adj = std::move(u_adj);
      continue;
    }
    const Matrix s = activation_derivative(layer.activation, trace.pre[k]);
    Matrix u = g_up;
    for (Eigen::Index b = 0; b < B; ++b) u.middleRows(b * m, m).array().rowwise() *= s.row(b).array();
    sweep_w[k].noalias() = u.transpose() * g_adj;

    const Matrix prod = u_adj.cwiseProduct(g_up);
    Matrix s_adj(B, s.cols());
    for (Eigen::Index b = 0; b < B; ++b) s_adj.row(b) = prod.middleRows(b * m, m).colwise().sum();
    extra_pre[k] = s_adj.cwiseProduct(activation_second_derivative(layer.activation, trace.pre[k]));

    for (Eigen::Index b = 0; b < B; ++b) u_adj.middleRows(b * m, m).array().rowwise() *= s.row(b).array();
    g_adj = std::move(u_adj);
  }

  std::vector<Matrix> extra_post(L + 1);
  for (std::size_t k = 1; k < L; ++k) extra_post[k] = adj.activations[k];
  if (adj.output.size() > 0) extra_post[L] = adj.output;

  obj.gradient = backprop(net, tape_from(trace), out_grad, extra_pre, extra_post);
  for (std::size_t k = 0; k < L; ++k) {
    if (sweep_w[k].size() > 0) obj.gradient.weights[k] += sweep_w[k];
  }
  return obj;
}

Gradients regulariser_gradient_fd(const Network& net, const Matrix& inputs, const NoiseSpec& spec,
                                  RegVariant variant, double step) {
  Network probe = net;
  const Vector theta = net.parameters();
  Vector grad(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Vector t = theta;
    t[i] = theta[i] + step;
    probe.set_parameters(t);
    const double up = regulariser(probe, inputs, spec, variant).total;
    t[i] = theta[i] - step;
    probe.set_parameters(t);
    const double down = regulariser(probe, inputs, spec, variant).total;
    grad[i] = (up - down) / (2.0 * step);
  }
  // Unflatten into the Gradients layout.
  Gradients g = net.zero_gradients();
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < g.weights.size(); ++k) {
    g.weights[k].reshaped<Eigen::RowMajor>() = grad.segment(pos, g.weights[k].size());
    pos += g.weights[k].size();
    g.biases[k] = grad.segment(pos, g.biases[k].size());
    pos += g.biases[k].size();
  }
  return g;
}

}  // namespace gnireg
