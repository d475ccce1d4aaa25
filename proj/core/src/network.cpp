#include "gnireg/network.hpp"

#include <cmath>
#include <string>

#include "gnireg/errors.hpp"

namespace gnireg {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::elu: return "elu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::softplus: return "softplus";
    case Activation::identity: return "identity";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  for (auto a : {Activation::relu, Activation::elu, Activation::sigmoid, Activation::softplus,
                 Activation::identity}) {
    if (name == to_string(a)) return a;
  }
  throw ArgumentError("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(InitScheme s) {
  return s == InitScheme::fan_in_uniform ? "fan_in_uniform" : "he_uniform";
}

InitScheme parse_init_scheme(std::string_view name) {
  if (name == "fan_in_uniform") return InitScheme::fan_in_uniform;
  if (name == "he_uniform") return InitScheme::he_uniform;
  throw ArgumentError("unknown init scheme '" + std::string(name) + "'");
}

namespace {

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

Matrix activate(Activation a, const Matrix& z) {
  switch (a) {
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::elu: return z.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
    case Activation::sigmoid: return z.unaryExpr(&sigmoid);
    case Activation::softplus: return z.unaryExpr(&softplus);
    case Activation::identity: return z;
  }
  return z;
}

Matrix activation_derivative(Activation a, const Matrix& z) {
  switch (a) {
    case Activation::relu: return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::elu: return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); });
    case Activation::sigmoid:
      return z.unaryExpr([](double v) {
        const double s = sigmoid(v);
        return s * (1.0 - s);
      });
    case Activation::softplus: return z.unaryExpr(&sigmoid);
    case Activation::identity: return Matrix::Ones(z.rows(), z.cols());
  }
  return z;
}

Matrix activation_second_derivative(Activation a, const Matrix& z) {
  switch (a) {
    case Activation::relu:
    case Activation::identity: return Matrix::Zero(z.rows(), z.cols());
    case Activation::elu: return z.unaryExpr([](double v) { return v > 0.0 ? 0.0 : std::exp(v); });
    case Activation::sigmoid:
      return z.unaryExpr([](double v) {
        const double s = sigmoid(v);
        return s * (1.0 - s) * (1.0 - 2.0 * s);
      });
    case Activation::softplus:
      return z.unaryExpr([](double v) {
        const double s = sigmoid(v);
        return s * (1.0 - s);
      });
  }
  return z;
}

// ---------------------------------------------------------------------------

Gradients& Gradients::operator+=(const Gradients& other) {
  for (std::size_t k = 0; k < weights.size(); ++k) {
    weights[k] += other.weights[k];
    biases[k] += other.biases[k];
  }
  return *this;
}

Gradients& Gradients::operator*=(double s) {
  for (std::size_t k = 0; k < weights.size(); ++k) {
    weights[k] *= s;
    biases[k] *= s;
  }
  return *this;
}

Vector Gradients::flatten() const {
  Eigen::Index n = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) n += weights[k].size() + biases[k].size();
  Vector out(n);
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    out.segment(pos, weights[k].size()) = weights[k].reshaped<Eigen::RowMajor>();
    pos += weights[k].size();
    out.segment(pos, biases[k].size()) = biases[k];
    pos += biases[k].size();
  }
  return out;
}

Network::Network(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ArgumentError("network needs at least one layer");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    if (l.bias.size() != l.weights.rows()) {
      throw ShapeError("layer " + std::to_string(k) + ": bias length != weight rows");
    }
    if (k > 0 && l.weights.cols() != layers_[k - 1].weights.rows()) {
      throw ShapeError("layer " + std::to_string(k) + ": input width does not match previous layer");
    }
  }
  if (layers_.back().activation != Activation::identity) {
    throw ArgumentError("final layer activation must be identity");
  }
}

Network Network::init(std::span<const std::size_t> widths, Activation hidden, RandomSource& rs,
                      InitScheme scheme) {
  if (widths.size() < 2) throw ArgumentError("need at least input and output widths");
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    const auto fan_in = static_cast<double>(widths[k]);
    const auto rows = static_cast<Eigen::Index>(widths[k + 1]);
    const auto cols = static_cast<Eigen::Index>(widths[k]);
    DenseLayer l;
    l.activation = (k + 2 == widths.size()) ? Activation::identity : hidden;
    l.weights.resize(rows, cols);
    l.bias.resize(rows);
    const double w_bound =
        scheme == InitScheme::fan_in_uniform ? 1.0 / std::sqrt(fan_in) : std::sqrt(6.0 / fan_in);
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) l.weights.data()[i] = rs.uniform(-w_bound, w_bound);
    const double b_bound = 1.0 / std::sqrt(fan_in);
    for (Eigen::Index i = 0; i < rows; ++i) l.bias[i] = rs.uniform(-b_bound, b_bound);
    layers.push_back(std::move(l));
  }
  return Network(std::move(layers));
}

std::size_t Network::width(std::size_t k) const {
  if (k == 0) return layers_.front().in_dim();
  return layers_.at(k - 1).out_dim();
}

std::vector<std::size_t> Network::widths() const {
  std::vector<std::size_t> w;
  for (std::size_t k = 0; k <= depth(); ++k) w.push_back(width(k));
  return w;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

Vector Network::parameters() const {
  Vector out(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index pos = 0;
  for (const auto& l : layers_) {
    out.segment(pos, l.weights.size()) = l.weights.reshaped<Eigen::RowMajor>();
    pos += l.weights.size();
    out.segment(pos, l.bias.size()) = l.bias;
    pos += l.bias.size();
  }
  return out;
}

void Network::set_parameters(const Vector& theta) {
  if (theta.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw ShapeError("set_parameters: wrong parameter count");
  }
  Eigen::Index pos = 0;
  for (auto& l : layers_) {
    l.weights.reshaped<Eigen::RowMajor>() = theta.segment(pos, l.weights.size());
    pos += l.weights.size();
    l.bias = theta.segment(pos, l.bias.size());
    pos += l.bias.size();
  }
}

Gradients Network::zero_gradients() const {
  Gradients g;
  for (const auto& l : layers_) {
    g.weights.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
    g.biases.push_back(Vector::Zero(l.bias.size()));
  }
  return g;
}

void Network::sgd_step(const Gradients& g, double lr) {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    layers_[k].weights -= lr * g.weights[k];
    layers_[k].bias -= lr * g.biases[k];
  }
}

// ---------------------------------------------------------------------------

ForwardTrace forward(const Network& net, const Matrix& inputs) {
  if (inputs.cols() != static_cast<Eigen::Index>(net.input_dim())) {
    throw ShapeError("forward: input width " + std::to_string(inputs.cols()) + " != " +
                     std::to_string(net.input_dim()));
  }
  ForwardTrace t;
  t.pre.reserve(net.depth());
  t.post.reserve(net.depth() + 1);
  t.post.push_back(inputs);
  for (const auto& l : net.layers()) {
    Matrix z = t.post.back() * l.weights.transpose();
    z.rowwise() += l.bias.transpose();
    t.post.push_back(activate(l.activation, z));
    t.pre.push_back(std::move(z));
  }
  return t;
}

ForwardTrace forward(const Network& net, const Vector& x) {
  return forward(net, Matrix(x.transpose()));
}

Matrix predict(const Network& net, const Matrix& inputs) {
  if (inputs.cols() != static_cast<Eigen::Index>(net.input_dim())) {
    throw ShapeError("predict: input width mismatch");
  }
  Matrix h = inputs;
  for (const auto& l : net.layers()) {
    Matrix z = h * l.weights.transpose();
    z.rowwise() += l.bias.transpose();
    h = activate(l.activation, z);
  }
  return h;
}

BackpropTape tape_from(const ForwardTrace& trace) {
  BackpropTape tape;
  tape.inputs.assign(trace.post.begin(), trace.post.end() - 1);
  tape.pre = trace.pre;
  return tape;
}

Gradients backprop(const Network& net, const BackpropTape& tape, const Matrix& output_grad,
                   std::span<const Matrix> extra_pre, std::span<const Matrix> extra_post) {
  const std::size_t L = net.depth();
  Gradients g = net.zero_gradients();
  Matrix grad_post = output_grad;  // dObjective/dh_k, starting at k = L
  if (!extra_post.empty() && extra_post[L].size() > 0) grad_post += extra_post[L];
  for (std::size_t k = L; k-- > 0;) {
    const auto& l = net.layer(k);
    Matrix grad_pre = grad_post.cwiseProduct(activation_derivative(l.activation, tape.pre[k]));
    if (!extra_pre.empty() && extra_pre[k].size() > 0) grad_pre += extra_pre[k];
    g.weights[k].noalias() = grad_pre.transpose() * tape.inputs[k];
    g.biases[k] = grad_pre.colwise().sum().transpose();
    if (k == 0) break;
    grad_post.noalias() = grad_pre * l.weights;
    if (!tape.input_scale.empty() && tape.input_scale[k].size() > 0) {
      grad_post = grad_post.cwiseProduct(tape.input_scale[k]);
    }
    if (!extra_post.empty() && extra_post[k].size() > 0) grad_post += extra_post[k];
  }
  return g;
}

Gradients param_gradient(const Network& net, const Batch& batch, LossKind loss) {
  if (batch.size() == 0) throw ArgumentError("param_gradient: empty batch");
  const ForwardTrace trace = forward(net, batch.inputs);
  return backprop(net, tape_from(trace), batch_loss_gradient(trace.output(), batch.targets, loss));
}

// ---------------------------------------------------------------------------

Matrix JacobianSet::at(Eigen::Index example, std::size_t k) const {
  return stacked.at(k).middleRows(example * outputs, outputs);
}

JacobianSet layer_jacobians(const Network& net, const ForwardTrace& trace) {
  const std::size_t L = net.depth();
  if (trace.pre.size() != L || trace.post.size() != L + 1) {
    throw ShapeError("layer_jacobians: trace depth does not match network");
  }
  for (std::size_t k = 0; k < L; ++k) {
    if (trace.pre[k].cols() != static_cast<Eigen::Index>(net.width(k + 1))) {
      throw ShapeError("layer_jacobians: stale trace (width mismatch at layer " +
                       std::to_string(k) + ")");
    }
  }
  const Eigen::Index B = trace.batch_size();
  const auto m = static_cast<Eigen::Index>(net.output_dim());
  JacobianSet js;
  js.batch = B;
  js.outputs = m;
  js.stacked.resize(L + 1);
  Matrix g(B * m, m);
  for (Eigen::Index b = 0; b < B; ++b) g.middleRows(b * m, m).setIdentity();
  js.stacked[L] = g;
  for (std::size_t k = L; k-- > 0;) {
    const auto& l = net.layer(k);
    if (l.activation != Activation::identity) {
      const Matrix s = activation_derivative(l.activation, trace.pre[k]);
      for (Eigen::Index b = 0; b < B; ++b) {
        g.middleRows(b * m, m).array().rowwise() *= s.row(b).array();
      }
    }
    g = g * l.weights;
    js.stacked[k] = g;
  }
  return js;
}

MaskedWeights masked_weights(const Network& net, const ForwardTrace& trace, Eigen::Index example) {
  MaskedWeights out;
  out.weights.resize(net.depth());
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const auto& l = net.layer(k);
    if (l.activation == Activation::identity) continue;
    if (l.activation != Activation::relu) {
      throw UnsupportedError("masked_weights: layer " + std::to_string(k) + " is " +
                             std::string(to_string(l.activation)) + ", not relu");
    }
    Matrix w = l.weights;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      if (!(trace.pre[k](example, i) > 0.0)) w.row(i).setZero();
    }
    out.weights[k] = std::move(w);
  }
  return out;
}

}  // namespace gnireg
