#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gnireg/batch.hpp"
#include "gnireg/linalg.hpp"
#include "gnireg/loss.hpp"
#include "gnireg/random.hpp"

namespace gnireg {

enum class Activation { relu, elu, sigmoid, softplus, identity };

std::string_view to_string(Activation a);
// Throws ArgumentError on an unknown name.
Activation parse_activation(std::string_view name);

// Elementwise phi, phi' and phi''. relu'(0) is taken as 0; elu uses alpha = 1.
Matrix activate(Activation a, const Matrix& z);
Matrix activation_derivative(Activation a, const Matrix& z);
Matrix activation_second_derivative(Activation a, const Matrix& z);

enum class InitScheme {
  fan_in_uniform,  // W, b ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in))
  he_uniform,      // W ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), b ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in))
};

std::string_view to_string(InitScheme s);
InitScheme parse_init_scheme(std::string_view name);

// Fully-connected layer h_out = phi(W h_in + b).
struct DenseLayer {
  Matrix weights;  // d_out x d_in
  Vector bias;     // d_out
  Activation activation = Activation::identity;

  std::size_t in_dim() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weights.rows()); }
};

// Per-parameter gradient with the same layout as Network.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double s);
  // Flattened in Network::parameters() order.
  Vector flatten() const;
};

// A multi-layer perceptron with L dense layers. layers()[k] maps h_k to
// h_{k+1}; h_0 is the input and h_L the (identity-activated) output.
class Network {
 public:
  Network() = default;
  // Validates that layer dimensions chain and that the final layer is
  // identity-activated (ArgumentError / ShapeError otherwise).
  explicit Network(std::vector<DenseLayer> layers);

  // widths = {d_0, ..., d_L}; hidden layers use `hidden`, the output layer is
  // identity.
  static Network init(std::span<const std::size_t> widths, Activation hidden, RandomSource& rs,
                      InitScheme scheme = InitScheme::fan_in_uniform);

  std::size_t depth() const { return layers_.size(); }
  std::size_t width(std::size_t k) const;
  std::size_t input_dim() const { return width(0); }
  std::size_t output_dim() const { return width(depth()); }
  std::vector<std::size_t> widths() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  const DenseLayer& layer(std::size_t k) const { return layers_.at(k); }

  std::size_t parameter_count() const;
  Vector parameters() const;
  void set_parameters(const Vector& theta);
  Gradients zero_gradients() const;

  // theta <- theta - lr * g
  void sgd_step(const Gradients& g, double lr);

 private:
  std::vector<DenseLayer> layers_;
};

// Clean forward pass over a batch (one example per row).
struct ForwardTrace {
  std::vector<Matrix> pre;   // pre[k] = z_{k+1} = h_k W^T + b, k = 0..L-1
  std::vector<Matrix> post;  // post[k] = h_k, k = 0..L; post[0] = inputs

  const Matrix& output() const { return post.back(); }
  Eigen::Index batch_size() const { return post.front().rows(); }
};

ForwardTrace forward(const Network& net, const Matrix& inputs);
ForwardTrace forward(const Network& net, const Vector& x);
// Output only, without keeping the intermediate activations.
Matrix predict(const Network& net, const Matrix& inputs);

// What reverse-mode needs from a forward pass: the input a_k fed to each
// layer, the pre-activations, and optionally the elementwise derivative of
// a_k with respect to the un-noised activation (multiplicative noise).
struct BackpropTape {
  std::vector<Matrix> inputs;       // inputs[k] = a_k, k = 0..L-1
  std::vector<Matrix> pre;          // pre[k] = z_{k+1}
  std::vector<Matrix> input_scale;  // empty, or one entry per layer (empty entry = identity)
};

BackpropTape tape_from(const ForwardTrace& trace);

// Reverse sweep given dObjective/dOutput. `extra_pre` (size L, entries may be
// empty) adds direct contributions to dObjective/dz_{k+1}; `extra_post` (size
// L+1) adds direct contributions to dObjective/dh_k.
Gradients backprop(const Network& net, const BackpropTape& tape, const Matrix& output_grad,
                   std::span<const Matrix> extra_pre = {},
                   std::span<const Matrix> extra_post = {});

// Gradient of the mean batch loss. Throws ArgumentError on an empty batch.
Gradients param_gradient(const Network& net, const Batch& batch, LossKind loss);

// Layer Jacobians J_k = dh_L/dh_k on the clean trace, k = 0..L.
// stacked[k] has one row per (example, output) pair: row b*d_L + i holds
// dh_{L,i}/dh_k for example b.
struct JacobianSet {
  Eigen::Index batch = 0;
  Eigen::Index outputs = 0;
  std::vector<Matrix> stacked;

  Matrix at(Eigen::Index example, std::size_t k) const;
};

JacobianSet layer_jacobians(const Network& net, const ForwardTrace& trace);

// W~_k = D_k W_k for each relu layer, where D_k marks the active output
// neurons of that layer for one example. Entry k is empty for the identity
// output layer.
struct MaskedWeights {
  std::vector<Matrix> weights;
};

// Uses row `example` of the trace. Throws UnsupportedError on hidden layers
// that are not relu.
MaskedWeights masked_weights(const Network& net, const ForwardTrace& trace,
                             Eigen::Index example = 0);

}  // namespace gnireg
