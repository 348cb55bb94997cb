#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lanecoop/common.hpp"

namespace lanecoop {

struct AdamWConfig {
  double lr = 1e-4;
  double weight_decay = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Decoupled weight decay: the decay multiplies the parameter, never the
// gradient moments.
struct AdamWState {
  AdamWConfig cfg;
  std::size_t step = 0;
  Vec m, v;

  explicit AdamWState(AdamWConfig c = {}) : cfg(c) {}
};

inline void adamw_update(AdamWState& st, const std::vector<double*>& params,
                         const std::vector<const double*>& grads) {
  if (params.size() != grads.size())
    throw ShapeError("adamw_update: params/grads size mismatch");
  if (st.m.empty()) {
    st.m.assign(params.size(), 0.0);
    st.v.assign(params.size(), 0.0);
  } else if (st.m.size() != params.size()) {
    throw ShapeError("adamw_update: optimizer state does not match parameter count");
  }
  st.step += 1;
  const double b1 = st.cfg.beta1, b2 = st.cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(st.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double g = *grads[k];
    if (!std::isfinite(g)) throw NumericError("adamw_update: non-finite gradient");
    st.m[k] = b1 * st.m[k] + (1.0 - b1) * g;
    st.v[k] = b2 * st.v[k] + (1.0 - b2) * g * g;
    const double mhat = st.m[k] / bc1;
    const double vhat = st.v[k] / bc2;
    double& p = *params[k];
    p -= st.cfg.lr * (mhat / (std::sqrt(vhat) + st.cfg.eps) + st.cfg.weight_decay * p);
  }
}

// Convenience overload for flat parameter arrays.
inline void adamw_update(AdamWState& st, Vec& params, const Vec& grads) {
  std::vector<double*> ps(params.size());
  std::vector<const double*> gs(grads.size());
  for (std::size_t i = 0; i < params.size(); ++i) ps[i] = &params[i];
  for (std::size_t i = 0; i < grads.size(); ++i) gs[i] = &grads[i];
  adamw_update(st, ps, gs);
}

}  // namespace lanecoop
