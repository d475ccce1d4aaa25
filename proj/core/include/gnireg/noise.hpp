#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "gnireg/batch.hpp"
#include "gnireg/network.hpp"
#include "gnireg/random.hpp"

namespace gnireg {

enum class NoiseMode { none, additive, multiplicative };

std::string_view to_string(NoiseMode m);
NoiseMode parse_noise_mode(std::string_view name);

struct LayerNoise {
  NoiseMode mode = NoiseMode::none;
  double variance = 0.0;  // sigma_k^2

  bool active() const { return mode != NoiseMode::none && variance > 0.0; }
};

// Injection plan for activations h_0 .. h_{L-1}. The output h_L is never
// noised.
struct NoiseSpec {
  std::vector<LayerNoise> layers;

  static NoiseSpec none(std::size_t depth);
  // Same mode and variance on every layer k = 0..L-1 (input included).
  static NoiseSpec uniform(std::size_t depth, NoiseMode mode, double variance);
  static NoiseSpec input_only(std::size_t depth, NoiseMode mode, double variance);

  bool silent() const;
  // ArgumentError if the layer count differs from depth, DomainError on a
  // negative variance.
  void validate(std::size_t depth) const;
};

// Forward pass where each layer consumes the noised activation of the layer
// below: h^_{k+1} = phi(W h~_k + b), h~_k = h^_k + eps_k.
struct NoisedForwardTrace {
  std::vector<Matrix> clean;        // h^_k, k = 0..L (h^_0 = x)
  std::vector<Matrix> noised;       // h~_k, k = 0..L-1
  std::vector<Matrix> injections;   // eps_k = h~_k - h^_k (empty when layer k is silent)
  std::vector<Matrix> pre;          // z_{k+1} along the noised path
  std::vector<Matrix> input_scale;  // dh~_k/dh^_k for multiplicative layers, else empty
  Matrix final_noise;               // E_L = noised output - clean output

  const Matrix& output() const { return clean.back(); }
};

NoisedForwardTrace noised_forward(const Network& net, const Matrix& inputs, const NoiseSpec& spec,
                                  RandomSource& rs);

// Output of a noised pass without recording the trace. Consumes the same
// draws as noised_forward.
Matrix noised_output(const Network& net, const Matrix& inputs, const NoiseSpec& spec,
                     RandomSource& rs);

// Mean batch loss under one joint noise draw.
double noised_loss(const Network& net, const Batch& batch, const NoiseSpec& spec, LossKind loss,
                   RandomSource& rs);

BackpropTape tape_from(const NoisedForwardTrace& trace);

// Gradient of the noised batch loss under one draw; writes that loss to
// *loss_out when given.
Gradients noised_param_gradient(const Network& net, const Batch& batch, const NoiseSpec& spec,
                                LossKind loss, RandomSource& rs, double* loss_out = nullptr);

}  // namespace gnireg
