#include "gnireg/noise.hpp"

#include <cmath>
#include <string>

#include "gnireg/errors.hpp"

namespace gnireg {

std::string_view to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::none: return "none";
    case NoiseMode::additive: return "additive";
    case NoiseMode::multiplicative: return "multiplicative";
  }
  return "?";
}

NoiseMode parse_noise_mode(std::string_view name) {
  for (auto m : {NoiseMode::none, NoiseMode::additive, NoiseMode::multiplicative}) {
    if (name == to_string(m)) return m;
  }
  throw ArgumentError("unknown noise mode '" + std::string(name) + "'");
}

NoiseSpec NoiseSpec::none(std::size_t depth) { return NoiseSpec{std::vector<LayerNoise>(depth)}; }

NoiseSpec NoiseSpec::uniform(std::size_t depth, NoiseMode mode, double variance) {
  return NoiseSpec{std::vector<LayerNoise>(depth, LayerNoise{mode, variance})};
}

NoiseSpec NoiseSpec::input_only(std::size_t depth, NoiseMode mode, double variance) {
  NoiseSpec s = none(depth);
  if (depth > 0) s.layers[0] = LayerNoise{mode, variance};
  return s;
}

bool NoiseSpec::silent() const {
  for (const auto& l : layers) {
    if (l.active()) return false;
  }
  return true;
}

void NoiseSpec::validate(std::size_t depth) const {
  if (layers.size() != depth) {
    throw ArgumentError("noise spec has " + std::to_string(layers.size()) +
                        " layers, network has " + std::to_string(depth));
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (!(layers[k].variance >= 0.0)) {
      throw DomainError("noise variance at layer " + std::to_string(k) + " is negative");
    }
  }
}

namespace {

// Applies layer-k noise in place. Returns the realised injection; `scale`
// receives 1 + sigma*xi for multiplicative layers.
Matrix inject(Matrix& h, const LayerNoise& ln, RandomSource& rs, Matrix* scale) {
  if (!ln.active()) return {};
  const double sigma = std::sqrt(ln.variance);
  Matrix xi = gaussian_matrix(rs, h.rows(), h.cols(), sigma);
  if (ln.mode == NoiseMode::additive) {
    h += xi;
    return xi;
  }
  Matrix factor = xi.array() + 1.0;
  Matrix eps = h.cwiseProduct(xi);
  h = h.cwiseProduct(factor);
  if (scale) *scale = std::move(factor);
  return eps;
}

}  // namespace

NoisedForwardTrace noised_forward(const Network& net, const Matrix& inputs, const NoiseSpec& spec,
                                  RandomSource& rs) {
  spec.validate(net.depth());
  if (inputs.cols() != static_cast<Eigen::Index>(net.input_dim())) {
    throw ShapeError("noised_forward: input width mismatch");
  }
  const std::size_t L = net.depth();
  NoisedForwardTrace t;
  t.clean.reserve(L + 1);
  t.clean.push_back(inputs);
  t.noised.resize(L);
  t.injections.resize(L);
  t.input_scale.resize(L);
  for (std::size_t k = 0; k < L; ++k) {
    Matrix h = t.clean[k];
    t.injections[k] = inject(h, spec.layers[k], rs, &t.input_scale[k]);
    const auto& l = net.layer(k);
    Matrix z = h * l.weights.transpose();
    z.rowwise() += l.bias.transpose();
    t.clean.push_back(activate(l.activation, z));
    t.pre.push_back(std::move(z));
    t.noised[k] = std::move(h);
  }
  t.final_noise = t.clean.back() - predict(net, inputs);
  return t;
}

Matrix noised_output(const Network& net, const Matrix& inputs, const NoiseSpec& spec,
                     RandomSource& rs) {
  spec.validate(net.depth());
  if (inputs.cols() != static_cast<Eigen::Index>(net.input_dim())) {
    throw ShapeError("noised_output: input width mismatch");
  }
  Matrix h = inputs;
  for (std::size_t k = 0; k < net.depth(); ++k) {
    inject(h, spec.layers[k], rs, nullptr);
    const auto& l = net.layer(k);
    Matrix z = h * l.weights.transpose();
    z.rowwise() += l.bias.transpose();
    h = activate(l.activation, z);
  }
  return h;
}

double noised_loss(const Network& net, const Batch& batch, const NoiseSpec& spec, LossKind loss,
                   RandomSource& rs) {
  if (batch.size() == 0) throw ArgumentError("noised_loss: empty batch");
  return batch_loss(noised_output(net, batch.inputs, spec, rs), batch.targets, loss);
}

BackpropTape tape_from(const NoisedForwardTrace& trace) {
  BackpropTape tape;
  tape.inputs = trace.noised;
  tape.pre = trace.pre;
  tape.input_scale = trace.input_scale;
  return tape;
}

Gradients noised_param_gradient(const Network& net, const Batch& batch, const NoiseSpec& spec,
                                LossKind loss, RandomSource& rs, double* loss_out) {
  if (batch.size() == 0) throw ArgumentError("noised_param_gradient: empty batch");
  spec.validate(net.depth());
  // Same recursion as noised_forward, minus the clean reference pass.
  const std::size_t L = net.depth();
  BackpropTape tape;
  tape.inputs.reserve(L);
  tape.input_scale.resize(L);
  Matrix h = batch.inputs;
  for (std::size_t k = 0; k < L; ++k) {
    inject(h, spec.layers[k], rs, &tape.input_scale[k]);
    const auto& l = net.layer(k);
    Matrix z = h * l.weights.transpose();
    z.rowwise() += l.bias.transpose();
    tape.inputs.push_back(std::move(h));
    h = activate(l.activation, z);
    tape.pre.push_back(std::move(z));
  }
  if (loss_out) *loss_out = batch_loss(h, batch.targets, loss);
  return backprop(net, tape, batch_loss_gradient(h, batch.targets, loss));
}

}  // namespace gnireg
