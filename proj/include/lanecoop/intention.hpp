#pragma once

#include <utility>

#include "lanecoop/mlp.hpp"
#include "lanecoop/trajectory.hpp"

namespace lanecoop {

// Three scalar heads over pooled window summaries: an intrinsic score from
// ego-centric features plus the driving-style one-hot, an interactive score
// from the surrounding-context features, and a gate blending the two.
struct IntentionParams {
  MlpParams intr;   // inner(4) + style one-hot(3) -> 1, sigmoid
  MlpParams inter;  // inter(6) -> 1, sigmoid
  MlpParams gate;   // inner(4) + inter(6) -> 1, sigmoid
};

inline IntentionParams make_intention_params(Rng& rng, std::size_t hidden = 32) {
  IntentionParams p;
  const std::vector<Activation> acts = {Activation::relu, Activation::relu, Activation::sigmoid};
  p.intr = make_mlp({kInnerFeatures + 3, hidden, hidden, 1}, acts, rng);
  p.inter = make_mlp({kInterFeatures, hidden, hidden, 1}, acts, rng);
  p.gate = make_mlp({kFeatureDim, hidden, hidden, 1}, acts, rng);
  return p;
}

struct CoopScores {
  double lcs = 0.5;
  double dcs = 0.5;
  double alpha = 0.5;
  double c_final = 0.5;
};

struct CoopCache {
  MlpCache intr, inter, gate;
  CoopScores scores;
  bool use_lcs = true;
  bool use_dcs = true;
};

inline std::pair<double, MlpCache> lcs_forward(const MlpParams& intr, const Vec& inner,
                                               const Vec& style_onehot) {
  auto [out, cache] = mlp_forward(intr, concat(inner, style_onehot));
  return {out[0], std::move(cache)};
}

inline std::pair<double, MlpCache> dcs_forward(const MlpParams& inter_net, const Vec& inter) {
  auto [out, cache] = mlp_forward(inter_net, inter);
  return {out[0], std::move(cache)};
}

// c_final = alpha * lcs + (1 - alpha) * dcs. Disabled heads are replaced by
// the neutral constant 0.5 and receive no gradient.
inline CoopCache fuse(const IntentionParams& p, const Vec& inner, const Vec& inter,
                      const Vec& style_onehot, bool use_lcs = true, bool use_dcs = true) {
  CoopCache cache;
  cache.use_lcs = use_lcs;
  cache.use_dcs = use_dcs;
  if (use_lcs) {
    auto [lcs, c] = lcs_forward(p.intr, inner, style_onehot);
    cache.scores.lcs = lcs;
    cache.intr = std::move(c);
  }
  if (use_dcs) {
    auto [dcs, c] = dcs_forward(p.inter, inter);
    cache.scores.dcs = dcs;
    cache.inter = std::move(c);
  }
  auto [gate_out, gc] = mlp_forward(p.gate, concat(inner, inter));
  cache.scores.alpha = gate_out[0];
  cache.gate = std::move(gc);
  cache.scores.c_final = cache.scores.alpha * cache.scores.lcs +
                         (1.0 - cache.scores.alpha) * cache.scores.dcs;
  return cache;
}

struct IntentionGrads {
  MlpGrads intr, inter, gate;
};

inline IntentionGrads make_zero_grads(const IntentionParams& p) {
  IntentionGrads g;
  g.intr = make_zero_grads(p.intr);
  g.inter = make_zero_grads(p.inter);
  g.gate = make_zero_grads(p.gate);
  return g;
}

// Routes d(loss)/d(c_final) through the convex combination into all three
// heads.
inline void fuse_backward(const IntentionParams& p, const CoopCache& cache, double d_c_final,
                          IntentionGrads& grads) {
  const CoopScores& s = cache.scores;
  const double d_alpha = d_c_final * (s.lcs - s.dcs);
  mlp_backward_accumulate(p.gate, cache.gate, {d_alpha}, grads.gate);
  if (cache.use_lcs) {
    const double d_lcs = d_c_final * s.alpha;
    mlp_backward_accumulate(p.intr, cache.intr, {d_lcs}, grads.intr);
  }
  if (cache.use_dcs) {
    const double d_dcs = d_c_final * (1.0 - s.alpha);
    mlp_backward_accumulate(p.inter, cache.inter, {d_dcs}, grads.inter);
  }
}

inline void collect_params(IntentionParams& p, std::vector<double*>& out) {
  collect_params(p.intr, out);
  collect_params(p.inter, out);
  collect_params(p.gate, out);
}

inline void collect_grads(IntentionGrads& g, std::vector<double*>& out) {
  collect_grads(g.intr, out);
  collect_grads(g.inter, out);
  collect_grads(g.gate, out);
}

inline Vec style_one_hot(int style) {
  Vec v(3, 0.0);
  if (style >= 0 && style < 3) v[static_cast<std::size_t>(style)] = 1.0;
  return v;
}

}  // namespace lanecoop
