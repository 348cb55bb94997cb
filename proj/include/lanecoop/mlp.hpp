#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lanecoop/matrix.hpp"

namespace lanecoop {

enum class Activation { identity, relu, sigmoid, tanh, softmax };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::softmax: return "softmax";
  }
  return "identity";
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  if (s == "softmax") return Activation::softmax;
  throw FormatError("unknown activation name: " + s);
}

struct MlpLayer {
  Matrix weight;  // out x in
  Vec bias;       // out
  Activation act = Activation::identity;
};

struct MlpParams {
  std::vector<MlpLayer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().weight.cols; }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().weight.rows; }
};

// Layer dimensions must chain and softmax is only valid as the last activation.
inline void validate(const MlpParams& p) {
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& layer = p.layers[l];
    if (layer.bias.size() != layer.weight.rows)
      throw ShapeError("mlp layer " + std::to_string(l) + ": bias length != weight rows");
    if (l > 0 && layer.weight.cols != p.layers[l - 1].weight.rows)
      throw ShapeError("mlp layer " + std::to_string(l) + ": input dim does not chain");
    if (layer.act == Activation::softmax && l + 1 != p.layers.size())
      throw ShapeError("softmax is only allowed on the final layer");
  }
}

inline Vec apply_activation(Activation act, const Vec& pre) {
  Vec out(pre.size());
  switch (act) {
    case Activation::identity:
      out = pre;
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = pre[i] > 0.0 ? pre[i] : 0.0;
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = sigmoid(pre[i]);
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = std::tanh(pre[i]);
      break;
    case Activation::softmax: {
      double m = pre[0];
      for (double x : pre) m = std::max(m, x);
      double z = 0.0;
      for (std::size_t i = 0; i < pre.size(); ++i) {
        out[i] = std::exp(pre[i] - m);
        z += out[i];
      }
      for (double& x : out) x /= z;
      break;
    }
  }
  return out;
}

// d(post)/d(pre) contracted against upstream gradient.
inline Vec activation_backward(Activation act, const Vec& pre, const Vec& post, const Vec& grad_post) {
  Vec g(pre.size());
  switch (act) {
    case Activation::identity:
      g = grad_post;
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < pre.size(); ++i) g[i] = pre[i] > 0.0 ? grad_post[i] : 0.0;
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < pre.size(); ++i) g[i] = grad_post[i] * post[i] * (1.0 - post[i]);
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < pre.size(); ++i) g[i] = grad_post[i] * (1.0 - post[i] * post[i]);
      break;
    case Activation::softmax: {
      // full Jacobian-vector product: dpre_j = p_j (g_j - sum_k g_k p_k)
      double gp = 0.0;
      for (std::size_t k = 0; k < post.size(); ++k) gp += grad_post[k] * post[k];
      for (std::size_t j = 0; j < post.size(); ++j) g[j] = post[j] * (grad_post[j] - gp);
      break;
    }
  }
  return g;
}

struct MlpCache {
  Vec input;
  std::vector<Vec> pre;   // per layer
  std::vector<Vec> post;  // per layer
};

struct MlpGrads {
  std::vector<Matrix> d_weight;
  std::vector<Vec> d_bias;
};

inline MlpGrads make_zero_grads(const MlpParams& p) {
  MlpGrads g;
  g.d_weight.reserve(p.layers.size());
  g.d_bias.reserve(p.layers.size());
  for (const auto& l : p.layers) {
    g.d_weight.emplace_back(l.weight.rows, l.weight.cols);
    g.d_bias.emplace_back(l.bias.size(), 0.0);
  }
  return g;
}

inline std::pair<Vec, MlpCache> mlp_forward(const MlpParams& p, const Vec& input) {
  if (p.layers.empty()) throw ShapeError("mlp_forward: empty network");
  if (input.size() != p.layers.front().weight.cols)
    throw ShapeError("mlp_forward: input length " + std::to_string(input.size()) +
                     " != first layer input dim " + std::to_string(p.layers.front().weight.cols));
  MlpCache cache;
  cache.input = input;
  Vec x = input;
  for (const auto& layer : p.layers) {
    Vec pre = matvec(layer.weight, x);
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += layer.bias[i];
    Vec post = apply_activation(layer.act, pre);
    cache.pre.push_back(pre);
    cache.post.push_back(post);
    x = std::move(post);
  }
  return {x, std::move(cache)};
}

// Accumulates into `grads` so several backward passes can share one gradient
// buffer. Returns the gradient with respect to the input.
inline Vec mlp_backward_accumulate(const MlpParams& p, const MlpCache& cache,
                                   const Vec& grad_output, MlpGrads& grads) {
  if (cache.post.size() != p.layers.size())
    throw ShapeError("mlp_backward: cache does not match network depth");
  if (grad_output.size() != p.layers.back().weight.rows)
    throw ShapeError("mlp_backward: grad_output length mismatch");
  Vec g = grad_output;
  for (std::size_t li = p.layers.size(); li-- > 0;) {
    const auto& layer = p.layers[li];
    if (cache.pre[li].size() != layer.weight.rows)
      throw ShapeError("mlp_backward: stale cache at layer " + std::to_string(li));
    Vec dpre = activation_backward(layer.act, cache.pre[li], cache.post[li], g);
    const Vec& layer_in = li == 0 ? cache.input : cache.post[li - 1];
    add_outer(grads.d_weight[li], dpre, layer_in);
    axpy(1.0, dpre, grads.d_bias[li]);
    g = matvec_transposed(layer.weight, dpre);
  }
  return g;
}

inline std::pair<MlpGrads, Vec> mlp_backward(const MlpParams& p, const MlpCache& cache,
                                             const Vec& grad_output) {
  MlpGrads grads = make_zero_grads(p);
  Vec dx = mlp_backward_accumulate(p, cache, grad_output, grads);
  return {std::move(grads), std::move(dx)};
}

// Gaussian init scaled by 1/sqrt(fan_in).
inline MlpParams make_mlp(const std::vector<std::size_t>& dims,
                          const std::vector<Activation>& acts, Rng& rng) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1)
    throw ConfigError("make_mlp: need dims.size()-1 activations");
  MlpParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    MlpLayer layer;
    layer.weight = Matrix(dims[l + 1], dims[l]);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    for (double& w : layer.weight.data) w = gaussian(rng, 0.0, scale);
    layer.bias.assign(dims[l + 1], 0.0);
    layer.act = acts[l];
    p.layers.push_back(std::move(layer));
  }
  validate(p);
  return p;
}

// Parameter/gradient pointer lists used by the optimizer and the
// finite-difference checks.
inline void collect_params(MlpParams& p, std::vector<double*>& out) {
  for (auto& l : p.layers) {
    for (double& w : l.weight.data) out.push_back(&w);
    for (double& b : l.bias) out.push_back(&b);
  }
}

// Same per-layer ordering as collect_params.
inline void collect_grads(MlpGrads& g, std::vector<double*>& out) {
  for (std::size_t l = 0; l < g.d_weight.size(); ++l) {
    for (double& w : g.d_weight[l].data) out.push_back(&w);
    for (double& b : g.d_bias[l]) out.push_back(&b);
  }
}

}  // namespace lanecoop
