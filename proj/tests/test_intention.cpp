#include <gtest/gtest.h>

#include <cmath>

#include "fd_check.hpp"
#include "lanecoop/intention.hpp"
#include "lanecoop/optim.hpp"

using namespace lanecoop;

namespace {

IntentionParams zero_params(std::size_t hidden = 8) {
  Rng rng = make_rng(0);
  IntentionParams p = make_intention_params(rng, hidden);
  for (MlpParams* net : {&p.intr, &p.inter, &p.gate})
    for (auto& layer : net->layers) {
      std::fill(layer.weight.data.begin(), layer.weight.data.end(), 0.0);
      std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
  return p;
}

Vec random_vec(std::size_t n, Rng& rng) {
  Vec v(n);
  for (double& x : v) x = gaussian(rng);
  return v;
}

double logit_of(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

TEST(Intention, ZeroWeightsGiveNeutralScores) {
  IntentionParams p = zero_params();
  Rng rng = make_rng(1);
  auto cache = fuse(p, random_vec(4, rng), random_vec(6, rng), style_one_hot(1));
  EXPECT_DOUBLE_EQ(cache.scores.lcs, 0.5);
  EXPECT_DOUBLE_EQ(cache.scores.dcs, 0.5);
  EXPECT_DOUBLE_EQ(cache.scores.alpha, 0.5);
  EXPECT_DOUBLE_EQ(cache.scores.c_final, 0.5);
}

TEST(Intention, GateAtZeroAveragesScores) {
  Rng rng = make_rng(2);
  IntentionParams p = make_intention_params(rng, 8);
  // zero out the gate so alpha = sigmoid(0) = 0.5
  for (auto& layer : p.gate.layers) {
    std::fill(layer.weight.data.begin(), layer.weight.data.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
  auto cache = fuse(p, random_vec(4, rng), random_vec(6, rng), style_one_hot(0));
  EXPECT_DOUBLE_EQ(cache.scores.alpha, 0.5);
  EXPECT_DOUBLE_EQ(cache.scores.c_final, 0.5 * (cache.scores.lcs + cache.scores.dcs));
}

TEST(Intention, SaturatedGateSelectsLcs) {
  Rng rng = make_rng(3);
  IntentionParams p = make_intention_params(rng, 8);
  for (auto& layer : p.gate.layers) {
    std::fill(layer.weight.data.begin(), layer.weight.data.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
  p.gate.layers.back().bias[0] = 40.0;  // alpha -> 1
  auto cache = fuse(p, random_vec(4, rng), random_vec(6, rng), style_one_hot(2));
  EXPECT_NEAR(cache.scores.c_final, cache.scores.lcs, 1e-6);
}

TEST(Intention, EqualScoresIgnoreAlpha) {
  Rng rng = make_rng(4);
  IntentionParams p = make_intention_params(rng, 8);
  const double target = logit_of(0.7);
  for (MlpParams* net : {&p.intr, &p.inter}) {
    for (auto& layer : net->layers) {
      std::fill(layer.weight.data.begin(), layer.weight.data.end(), 0.0);
      std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
    net->layers.back().bias[0] = target;
  }
  auto cache = fuse(p, random_vec(4, rng), random_vec(6, rng), style_one_hot(1));
  EXPECT_NEAR(cache.scores.lcs, 0.7, 1e-12);
  EXPECT_NEAR(cache.scores.dcs, 0.7, 1e-12);
  EXPECT_NEAR(cache.scores.c_final, 0.7, 1e-12);
}

TEST(Intention, StyleOneHotChangesLcs) {
  Rng rng = make_rng(5);
  IntentionParams p = make_intention_params(rng, 8);
  const Vec inner = random_vec(4, rng);
  auto [a, ca] = lcs_forward(p.intr, inner, style_one_hot(0));
  auto [b, cb] = lcs_forward(p.intr, inner, style_one_hot(2));
  EXPECT_NE(a, b);
  EXPECT_GT(a, 0.0);
  EXPECT_LT(a, 1.0);
}

TEST(Intention, ConvexityHolds) {
  Rng rng = make_rng(6);
  for (int rep = 0; rep < 200; ++rep) {
    IntentionParams p = make_intention_params(rng, 6);
    auto cache = fuse(p, random_vec(4, rng), random_vec(6, rng),
                      style_one_hot(static_cast<int>(uniform_index(rng, 3))));
    const double lo = std::min(cache.scores.lcs, cache.scores.dcs);
    const double hi = std::max(cache.scores.lcs, cache.scores.dcs);
    EXPECT_GE(cache.scores.c_final, lo - 1e-12);
    EXPECT_LE(cache.scores.c_final, hi + 1e-12);
  }
}

TEST(Intention, GradientsMatchFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng = make_rng(100 + seed);
    IntentionParams p = make_intention_params(rng, 6);
    const Vec inner = random_vec(4, rng);
    const Vec inter = random_vec(6, rng);
    const Vec onehot = style_one_hot(static_cast<int>(seed % 3));

    auto loss = [&]() {
      auto cache = fuse(p, inner, inter, onehot);
      return cache.scores.c_final;
    };
    auto cache = fuse(p, inner, inter, onehot);
    IntentionGrads grads = make_zero_grads(p);
    fuse_backward(p, cache, 1.0, grads);

    std::vector<double*> params;
    collect_params(p, params);
    std::vector<double*> gptrs;
    collect_grads(grads, gptrs);
    std::vector<double> ganal(gptrs.size());
    for (std::size_t i = 0; i < gptrs.size(); ++i) ganal[i] = *gptrs[i];
    auto r = fdcheck::compare(params, ganal, loss);
    EXPECT_LT(r.max_rel_err, 1e-4) << "seed " << seed;
  }
}

TEST(Intention, CoopRegularizerAloneConvergesToNeutral) {
  Rng rng = make_rng(9);
  IntentionParams p = make_intention_params(rng, 8);
  const Vec inner = random_vec(4, rng);
  const Vec inter = random_vec(6, rng);
  const Vec onehot = style_one_hot(0);

  AdamWConfig cfg;
  cfg.lr = 1e-2;
  cfg.weight_decay = 0.0;
  AdamWState opt(cfg);
  std::vector<double*> params;
  collect_params(p, params);

  double c = 0.0;
  for (int step = 0; step < 2000; ++step) {
    auto cache = fuse(p, inner, inter, onehot);
    c = cache.scores.c_final;
    IntentionGrads grads = make_zero_grads(p);
    fuse_backward(p, cache, 2.0 * (c - 0.5), grads);
    std::vector<double*> gptrs;
    collect_grads(grads, gptrs);
    std::vector<const double*> gconst(gptrs.begin(), gptrs.end());
    adamw_update(opt, params, gconst);
  }
  EXPECT_NEAR(c, 0.5, 1e-3);
}

TEST(Intention, DisabledHeadsAreNeutralConstants) {
  Rng rng = make_rng(10);
  IntentionParams p = make_intention_params(rng, 8);
  const Vec inner = random_vec(4, rng);
  const Vec inter = random_vec(6, rng);
  auto cache = fuse(p, inner, inter, style_one_hot(1), false, false);
  EXPECT_DOUBLE_EQ(cache.scores.lcs, 0.5);
  EXPECT_DOUBLE_EQ(cache.scores.dcs, 0.5);
  EXPECT_DOUBLE_EQ(cache.scores.c_final, 0.5);

  IntentionGrads grads = make_zero_grads(p);
  fuse_backward(p, cache, 1.0, grads);
  for (const auto& m : grads.intr.d_weight)
    for (double x : m.data) EXPECT_EQ(x, 0.0);
  for (const auto& m : grads.inter.d_weight)
    for (double x : m.data) EXPECT_EQ(x, 0.0);
}
