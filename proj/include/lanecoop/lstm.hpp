#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lanecoop/matrix.hpp"

namespace lanecoop {

struct LstmParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Matrix w_i, w_f, w_g, w_o;  // hidden x input
  Matrix u_i, u_f, u_g, u_o;  // hidden x hidden
  Vec b_i, b_f, b_g, b_o;
};

inline void validate(const LstmParams& p) {
  auto check_w = [&](const Matrix& m, const char* name) {
    if (m.rows != p.hidden_dim || m.cols != p.input_dim)
      throw ShapeError(std::string("lstm: bad shape for ") + name);
  };
  auto check_u = [&](const Matrix& m, const char* name) {
    if (m.rows != p.hidden_dim || m.cols != p.hidden_dim)
      throw ShapeError(std::string("lstm: bad shape for ") + name);
  };
  auto check_b = [&](const Vec& b, const char* name) {
    if (b.size() != p.hidden_dim)
      throw ShapeError(std::string("lstm: bad shape for ") + name);
  };
  check_w(p.w_i, "w_i"); check_w(p.w_f, "w_f"); check_w(p.w_g, "w_g"); check_w(p.w_o, "w_o");
  check_u(p.u_i, "u_i"); check_u(p.u_f, "u_f"); check_u(p.u_g, "u_g"); check_u(p.u_o, "u_o");
  check_b(p.b_i, "b_i"); check_b(p.b_f, "b_f"); check_b(p.b_g, "b_g"); check_b(p.b_o, "b_o");
}

inline LstmParams make_lstm(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  const double ws = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double us = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  auto init_w = [&](Matrix& m) {
    m = Matrix(hidden_dim, input_dim);
    for (double& w : m.data) w = gaussian(rng, 0.0, ws);
  };
  auto init_u = [&](Matrix& m) {
    m = Matrix(hidden_dim, hidden_dim);
    for (double& w : m.data) w = gaussian(rng, 0.0, us);
  };
  init_w(p.w_i); init_w(p.w_f); init_w(p.w_g); init_w(p.w_o);
  init_u(p.u_i); init_u(p.u_f); init_u(p.u_g); init_u(p.u_o);
  p.b_i.assign(hidden_dim, 0.0);
  p.b_f.assign(hidden_dim, 1.0);  // positive forget bias
  p.b_g.assign(hidden_dim, 0.0);
  p.b_o.assign(hidden_dim, 0.0);
  return p;
}

struct LstmStepCache {
  Vec x, h_prev, c_prev;
  Vec i, f, g, o;  // gate activations
  Vec c, tanh_c;
};

struct LstmStepResult {
  Vec h, c;
  LstmStepCache cache;
};

inline LstmStepResult lstm_step(const LstmParams& p, const Vec& x, const Vec& h_prev,
                                const Vec& c_prev, std::size_t step_index = 0) {
  if (x.size() != p.input_dim || h_prev.size() != p.hidden_dim || c_prev.size() != p.hidden_dim)
    throw ShapeError("lstm_step: input/state dimensions do not match params");
  const std::size_t n = p.hidden_dim;
  auto gate = [&](const Matrix& w, const Matrix& u, const Vec& b) {
    Vec pre = matvec(w, x);
    matvec_add(u, h_prev, pre);
    for (std::size_t k = 0; k < n; ++k) pre[k] += b[k];
    return pre;
  };
  Vec zi = gate(p.w_i, p.u_i, p.b_i);
  Vec zf = gate(p.w_f, p.u_f, p.b_f);
  Vec zg = gate(p.w_g, p.u_g, p.b_g);
  Vec zo = gate(p.w_o, p.u_o, p.b_o);

  LstmStepResult r;
  r.cache.x = x;
  r.cache.h_prev = h_prev;
  r.cache.c_prev = c_prev;
  r.cache.i.resize(n); r.cache.f.resize(n); r.cache.g.resize(n); r.cache.o.resize(n);
  r.cache.c.resize(n); r.cache.tanh_c.resize(n);
  r.h.resize(n); r.c.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double i_k = sigmoid(zi[k]);
    const double f_k = sigmoid(zf[k]);
    const double g_k = std::tanh(zg[k]);
    const double o_k = sigmoid(zo[k]);
    const double c_k = f_k * c_prev[k] + i_k * g_k;
    const double th = std::tanh(c_k);
    r.cache.i[k] = i_k; r.cache.f[k] = f_k; r.cache.g[k] = g_k; r.cache.o[k] = o_k;
    r.cache.c[k] = c_k; r.cache.tanh_c[k] = th;
    r.c[k] = c_k;
    r.h[k] = o_k * th;
    if (!std::isfinite(r.h[k]) || !std::isfinite(c_k))
      throw NumericError("lstm_step: non-finite state at step " + std::to_string(step_index));
  }
  return r;
}

struct LstmGrads {
  Matrix d_w_i, d_w_f, d_w_g, d_w_o;
  Matrix d_u_i, d_u_f, d_u_g, d_u_o;
  Vec d_b_i, d_b_f, d_b_g, d_b_o;
};

inline LstmGrads make_zero_grads(const LstmParams& p) {
  LstmGrads g;
  g.d_w_i = Matrix(p.hidden_dim, p.input_dim); g.d_w_f = g.d_w_i;
  g.d_w_g = g.d_w_i; g.d_w_o = g.d_w_i;
  g.d_u_i = Matrix(p.hidden_dim, p.hidden_dim); g.d_u_f = g.d_u_i;
  g.d_u_g = g.d_u_i; g.d_u_o = g.d_u_i;
  g.d_b_i.assign(p.hidden_dim, 0.0); g.d_b_f = g.d_b_i;
  g.d_b_g = g.d_b_i; g.d_b_o = g.d_b_i;
  return g;
}

struct LstmStepBackwardResult {
  Vec dx, dh_prev, dc_prev;
};

// Backward through one step. dh: gradient on h_t (upstream + recurrent),
// dc: recurrent gradient flowing into c_t. Parameter gradients accumulate.
inline LstmStepBackwardResult lstm_step_backward(const LstmParams& p, const LstmStepCache& cc,
                                                 const Vec& dh, const Vec& dc_in,
                                                 LstmGrads& grads) {
  const std::size_t n = p.hidden_dim;
  Vec dzi(n), dzf(n), dzg(n), dzo(n), dc(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double do_k = dh[k] * cc.tanh_c[k];
    const double dct = dh[k] * cc.o[k] * (1.0 - cc.tanh_c[k] * cc.tanh_c[k]) + dc_in[k];
    dc[k] = dct;
    dzo[k] = do_k * cc.o[k] * (1.0 - cc.o[k]);
    dzi[k] = dct * cc.g[k] * cc.i[k] * (1.0 - cc.i[k]);
    dzg[k] = dct * cc.i[k] * (1.0 - cc.g[k] * cc.g[k]);
    dzf[k] = dct * cc.c_prev[k] * cc.f[k] * (1.0 - cc.f[k]);
  }

  LstmStepBackwardResult out;
  out.dx.assign(p.input_dim, 0.0);
  out.dh_prev.assign(n, 0.0);
  out.dc_prev.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.dc_prev[k] = dc[k] * cc.f[k];

  auto route = [&](const Vec& dz, const Matrix& w, const Matrix& u, Matrix& dw, Matrix& du, Vec& db) {
    add_outer(dw, dz, cc.x);
    add_outer(du, dz, cc.h_prev);
    axpy(1.0, dz, db);
    matvec_transposed_add(w, dz, out.dx);
    matvec_transposed_add(u, dz, out.dh_prev);
  };
  route(dzi, p.w_i, p.u_i, grads.d_w_i, grads.d_u_i, grads.d_b_i);
  route(dzf, p.w_f, p.u_f, grads.d_w_f, grads.d_u_f, grads.d_b_f);
  route(dzg, p.w_g, p.u_g, grads.d_w_g, grads.d_u_g, grads.d_b_g);
  route(dzo, p.w_o, p.u_o, grads.d_w_o, grads.d_u_o, grads.d_b_o);
  return out;
}

struct LstmSequenceResult {
  Vec h_final;
  std::vector<LstmStepCache> caches;
};

inline LstmSequenceResult lstm_forward_sequence(const LstmParams& p,
                                                const std::vector<Vec>& inputs) {
  LstmSequenceResult r;
  Vec h(p.hidden_dim, 0.0), c(p.hidden_dim, 0.0);
  r.caches.reserve(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    auto step = lstm_step(p, inputs[t], h, c, t);
    h = std::move(step.h);
    c = std::move(step.c);
    r.caches.push_back(std::move(step.cache));
  }
  r.h_final = std::move(h);
  return r;
}

// BPTT with a gradient only on the final hidden state. Returns per-step
// input gradients; parameter gradients accumulate into `grads`.
inline std::vector<Vec> lstm_backward_sequence(const LstmParams& p,
                                               const std::vector<LstmStepCache>& caches,
                                               const Vec& dh_final, LstmGrads& grads) {
  std::vector<Vec> dx(caches.size());
  Vec dh = dh_final;
  Vec dc(p.hidden_dim, 0.0);
  for (std::size_t t = caches.size(); t-- > 0;) {
    auto b = lstm_step_backward(p, caches[t], dh, dc, grads);
    dx[t] = std::move(b.dx);
    dh = std::move(b.dh_prev);
    dc = std::move(b.dc_prev);
  }
  return dx;
}

inline void collect_params(LstmParams& p, std::vector<double*>& out) {
  for (Matrix* m : {&p.w_i, &p.w_f, &p.w_g, &p.w_o, &p.u_i, &p.u_f, &p.u_g, &p.u_o})
    for (double& w : m->data) out.push_back(&w);
  for (Vec* b : {&p.b_i, &p.b_f, &p.b_g, &p.b_o})
    for (double& x : *b) out.push_back(&x);
}

inline void collect_grads(LstmGrads& g, std::vector<double*>& out) {
  for (Matrix* m : {&g.d_w_i, &g.d_w_f, &g.d_w_g, &g.d_w_o, &g.d_u_i, &g.d_u_f, &g.d_u_g, &g.d_u_o})
    for (double& w : m->data) out.push_back(&w);
  for (Vec* b : {&g.d_b_i, &g.d_b_f, &g.d_b_g, &g.d_b_o})
    for (double& x : *b) out.push_back(&x);
}

}  // namespace lanecoop
