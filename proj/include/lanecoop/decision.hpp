#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lanecoop/intention.hpp"
#include "lanecoop/lstm.hpp"
#include "lanecoop/optim.hpp"
#include "lanecoop/style.hpp"
#include "lanecoop/trajectory.hpp"

namespace lanecoop {

struct TrainConfig {
  double lr = 1e-4;
  double weight_decay = 1e-3;
  std::size_t epochs = 200;
  std::size_t batch = 128;
  double beta = 1.0;      // reward temperature
  double lambda2 = 1e-3;  // reward L2
  double lambda_s = 1e-2; // reward margin
  std::size_t lstm_hidden = 128;
  std::size_t intention_hidden = 32;
  std::size_t reward_hidden = 64;
  std::uint64_t seed = kDefaultSeed;
  bool use_irl = true;
  bool use_lcs = true;
  bool use_dcs = true;
  double logit_clip = 30.0;
  double max_grad_norm = 5.0;    // global-norm clip; <= 0 disables
  bool keep_best_by_val_f1 = true;
  // The window features are standardized, so the broadcast cooperation
  // score enters the networks as (c - 0.5) * c_input_scale to sit on a
  // comparable scale.
  double c_input_scale = 10.0;
};

struct DecisionParams {
  LstmParams policy;  // input 11 = 10 features + broadcast c_final
  Vec head_w;
  double head_b = 0.0;
  MlpParams reward;   // 10-summary + c_final + action bit -> 1
};

inline DecisionParams make_decision_params(Rng& rng, const TrainConfig& cfg) {
  DecisionParams p;
  p.policy = make_lstm(kFeatureDim + 1, cfg.lstm_hidden, rng);
  p.head_w.resize(cfg.lstm_hidden);
  const double hs = 1.0 / std::sqrt(static_cast<double>(cfg.lstm_hidden));
  for (double& w : p.head_w) w = gaussian(rng, 0.0, hs);
  p.head_b = 0.0;
  p.reward = make_mlp({kFeatureDim + 2, cfg.reward_hidden, cfg.reward_hidden, 1},
                      {Activation::relu, Activation::relu, Activation::identity}, rng);
  return p;
}

struct Standardization {
  Vec mean, stdev;  // per feature column
};

// Per-frame feature statistics over the training split.
inline Standardization compute_standardization(const SampleSet& set) {
  Standardization n;
  n.mean.assign(kFeatureDim, 0.0);
  n.stdev.assign(kFeatureDim, 0.0);
  std::size_t frames = 0;
  for (const auto& s : set.samples) {
    if (s.split != 0) continue;
    for (std::size_t f = 0; f < s.window.rows; ++f) {
      ++frames;
      for (std::size_t j = 0; j < kFeatureDim; ++j) n.mean[j] += s.window(f, j);
    }
  }
  if (frames == 0) throw ConfigError("compute_standardization: no training samples");
  for (double& m : n.mean) m /= static_cast<double>(frames);
  for (const auto& s : set.samples) {
    if (s.split != 0) continue;
    for (std::size_t f = 0; f < s.window.rows; ++f)
      for (std::size_t j = 0; j < kFeatureDim; ++j) {
        const double d = s.window(f, j) - n.mean[j];
        n.stdev[j] += d * d;
      }
  }
  for (double& sd : n.stdev) {
    sd = std::sqrt(sd / static_cast<double>(frames));
    if (sd < 1e-12) sd = 1.0;
  }
  return n;
}

// Standardized frames (with a slot reserved for the broadcast cooperation
// score), pooled summaries, and the style one-hot.
struct PreparedSample {
  std::vector<Vec> frames;  // window rows, size kFeatureDim + 1, last = c slot
  Vec summary;              // pooled standardized features, size kFeatureDim
  Vec inner;                // first 4 of summary
  Vec inter;                // last 6 of summary
  Vec onehot;               // style one-hot (zeros if unassigned)
  int action = 0;
  int split = 0;
};

inline std::vector<PreparedSample> prepare_samples(const SampleSet& set,
                                                   const Standardization& norm) {
  std::vector<PreparedSample> out;
  out.reserve(set.samples.size());
  for (const auto& s : set.samples) {
    PreparedSample ps;
    ps.action = s.action;
    ps.split = s.split;
    ps.onehot = style_one_hot(s.style);
    ps.summary.assign(kFeatureDim, 0.0);
    ps.frames.resize(s.window.rows);
    for (std::size_t f = 0; f < s.window.rows; ++f) {
      Vec row(kFeatureDim + 1, 0.0);
      for (std::size_t j = 0; j < kFeatureDim; ++j) {
        row[j] = (s.window(f, j) - norm.mean[j]) / norm.stdev[j];
        ps.summary[j] += row[j];
      }
      ps.frames[f] = std::move(row);
    }
    for (double& x : ps.summary) x /= static_cast<double>(s.window.rows);
    ps.inner.assign(ps.summary.begin(), ps.summary.begin() + kInnerFeatures);
    ps.inter.assign(ps.summary.begin() + kInnerFeatures, ps.summary.end());
    out.push_back(std::move(ps));
  }
  return out;
}

// Fills Sample::style from the recognizer's argmax on the stored rear-
// vehicle statistics.
inline void assign_styles(SampleSet& set, const StyleModel& style_model) {
  for (auto& s : set.samples) {
    const StyleFeatures f = StyleFeatures::from_array(s.t_rear_style_features);
    s.style = static_cast<int>(predict_style(style_model, f).label);
  }
}

// ---------------------------------------------------------------------------
// Forward passes

struct PolicyForward {
  double logit = 0.0;
  LstmSequenceResult seq;
  std::vector<Vec> inputs;
};

inline PolicyForward policy_forward(const DecisionParams& p, const PreparedSample& ps,
                                    double c_final, double c_input_scale = 10.0) {
  PolicyForward out;
  out.inputs = ps.frames;
  for (auto& row : out.inputs) row.back() = (c_final - 0.5) * c_input_scale;
  out.seq = lstm_forward_sequence(p.policy, out.inputs);
  out.logit = dot(p.head_w, out.seq.h_final) + p.head_b;
  if (!std::isfinite(out.logit)) throw NumericError("policy_forward: non-finite logit");
  return out;
}

struct RewardPair {
  double r_lc = 0.0;  // action = 1
  double r_lk = 0.0;  // action = 0
  MlpCache cache_lc, cache_lk;
};

inline RewardPair reward_pair(const MlpParams& reward, const PreparedSample& ps, double c_final) {
  Vec input(kFeatureDim + 2, 0.0);
  for (std::size_t j = 0; j < kFeatureDim; ++j) input[j] = ps.summary[j];
  input[kFeatureDim] = c_final;
  RewardPair out;
  input[kFeatureDim + 1] = 1.0;
  auto [r1, c1] = mlp_forward(reward, input);
  out.r_lc = r1[0];
  out.cache_lc = std::move(c1);
  input[kFeatureDim + 1] = 0.0;
  auto [r0, c0] = mlp_forward(reward, input);
  out.r_lk = r0[0];
  out.cache_lk = std::move(c0);
  return out;
}

// ---------------------------------------------------------------------------
// Losses

inline double bce_with_logit(double logit, int label, double clip) {
  const double z = std::clamp(logit, -clip, clip);
  // stable form: max(z,0) - z*a + log(1 + exp(-|z|))
  return std::max(z, 0.0) - z * static_cast<double>(label) + std::log1p(std::exp(-std::abs(z)));
}

// Reward-gap weights normalized to mean 1 over the batch.
inline Vec reward_weights(const std::vector<RewardPair>& pairs, double beta) {
  Vec s(pairs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    s[i] = sigmoid(beta * (pairs[i].r_lc - pairs[i].r_lk));
    sum += s[i];
  }
  const double mean_s = sum / static_cast<double>(pairs.size());
  for (double& x : s) x /= mean_s;
  return s;
}

inline double bc_loss(const Vec& logits, const std::vector<int>& labels,
                      const std::vector<RewardPair>& pairs, double beta, double clip = 30.0) {
  if (logits.size() != labels.size() || logits.size() != pairs.size())
    throw ShapeError("bc_loss: batch size mismatch");
  const Vec w = reward_weights(pairs, beta);
  double loss = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i)
    loss += w[i] * bce_with_logit(logits[i], labels[i], clip);
  return loss / static_cast<double>(logits.size());
}

inline double irl_loss(const std::vector<RewardPair>& pairs, const std::vector<int>& labels,
                       double lambda2, double lambda_s) {
  if (pairs.size() != labels.size()) throw ShapeError("irl_loss: batch size mismatch");
  double pref = 0.0, l2 = 0.0, margin = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double r_a = labels[i] == 1 ? pairs[i].r_lc : pairs[i].r_lk;
    const double r_b = labels[i] == 1 ? pairs[i].r_lk : pairs[i].r_lc;
    const double m = std::max(r_a, r_b);
    const double lse = m + std::log(std::exp(r_a - m) + std::exp(r_b - m));
    pref -= r_a - lse;
    l2 += r_a * r_a + r_b * r_b;
    margin += std::abs(r_a - r_b);
  }
  const double inv_b = 1.0 / static_cast<double>(pairs.size());
  return pref * inv_b + lambda2 * l2 * inv_b + lambda_s * margin * inv_b;
}

inline double coop_loss(const Vec& c_finals) {
  double acc = 0.0;
  for (double c : c_finals) acc += (c - 0.5) * (c - 0.5);
  return c_finals.empty() ? 0.0 : acc / static_cast<double>(c_finals.size());
}

// ---------------------------------------------------------------------------
// Joint batch step

struct ModelGrads {
  LstmGrads policy;
  Vec head_w;
  double head_b = 0.0;
  MlpGrads reward;
  IntentionGrads intention;
};

struct DecisionModel {
  IntentionParams intention;
  DecisionParams decision;
  Standardization norm;
  TrainConfig cfg;
};

inline ModelGrads make_zero_grads(const DecisionModel& m) {
  ModelGrads g;
  g.policy = make_zero_grads(m.decision.policy);
  g.head_w.assign(m.decision.head_w.size(), 0.0);
  g.head_b = 0.0;
  g.reward = make_zero_grads(m.decision.reward);
  g.intention = make_zero_grads(m.intention);
  return g;
}

inline void collect_params(DecisionModel& m, std::vector<double*>& out) {
  collect_params(m.decision.policy, out);
  for (double& w : m.decision.head_w) out.push_back(&w);
  out.push_back(&m.decision.head_b);
  collect_params(m.decision.reward, out);
  collect_params(m.intention, out);
}

inline void collect_grads(ModelGrads& g, std::vector<double*>& out) {
  collect_grads(g.policy, out);
  for (double& w : g.head_w) out.push_back(&w);
  out.push_back(&g.head_b);
  collect_grads(g.reward, out);
  collect_grads(g.intention, out);
}

struct BatchStats {
  double loss = 0.0, bc = 0.0, irl = 0.0, coop = 0.0;
  double mean_w = 0.0;
  double mean_lcs = 0.0, mean_dcs = 0.0, mean_alpha = 0.0, mean_c = 0.0;
};

// Forward (and optionally backward) over one batch. Gradients accumulate
// into `grads` when provided.
inline BatchStats run_batch(const DecisionModel& model,
                            const std::vector<PreparedSample>& samples,
                            const std::vector<std::size_t>& indices, ModelGrads* grads) {
  const TrainConfig& cfg = model.cfg;
  const std::size_t b = indices.size();
  if (b == 0) throw ConfigError("run_batch: empty batch");
  const double inv_b = 1.0 / static_cast<double>(b);

  std::vector<CoopCache> coop(b);
  std::vector<PolicyForward> pol(b);
  std::vector<RewardPair> pairs(b);
  Vec logits(b), c_finals(b);
  std::vector<int> labels(b);

  BatchStats st;
  for (std::size_t k = 0; k < b; ++k) {
    const PreparedSample& ps = samples[indices[k]];
    coop[k] = fuse(model.intention, ps.inner, ps.inter, ps.onehot, cfg.use_lcs, cfg.use_dcs);
    const double c = coop[k].scores.c_final;
    c_finals[k] = c;
    pol[k] = policy_forward(model.decision, ps, c);
    logits[k] = pol[k].logit;
    pairs[k] = reward_pair(model.decision.reward, ps, c);
    labels[k] = ps.action;
    st.mean_lcs += coop[k].scores.lcs * inv_b;
    st.mean_dcs += coop[k].scores.dcs * inv_b;
    st.mean_alpha += coop[k].scores.alpha * inv_b;
    st.mean_c += c * inv_b;
  }

  // weights: plain behavior cloning (w = 1) unless the reward branch is on
  Vec w(b, 1.0);
  Vec s(b, 0.5);
  double mean_s = 0.5;
  if (cfg.use_irl) {
    double sum = 0.0;
    for (std::size_t k = 0; k < b; ++k) {
      s[k] = sigmoid(cfg.beta * (pairs[k].r_lc - pairs[k].r_lk));
      sum += s[k];
    }
    mean_s = sum * inv_b;
    for (std::size_t k = 0; k < b; ++k) w[k] = s[k] / mean_s;
  }
  st.mean_w = std::accumulate(w.begin(), w.end(), 0.0) * inv_b;

  Vec bce(b);
  for (std::size_t k = 0; k < b; ++k) {
    bce[k] = bce_with_logit(logits[k], labels[k], cfg.logit_clip);
    st.bc += w[k] * bce[k] * inv_b;
  }
  if (cfg.use_irl) st.irl = irl_loss(pairs, labels, cfg.lambda2, cfg.lambda_s);
  st.coop = coop_loss(c_finals);
  st.loss = st.bc + st.irl + st.coop;
  if (!std::isfinite(st.loss)) throw NumericError("run_batch: non-finite loss");
  if (grads == nullptr) return st;

  for (std::size_t k = 0; k < b; ++k) {
    const PreparedSample& ps = samples[indices[k]];
    const double c = c_finals[k];
    double dc = 2.0 * (c - 0.5) * inv_b;  // coop term

    // policy branch
    const double z = std::clamp(logits[k], -cfg.logit_clip, cfg.logit_clip);
    double dlogit = 0.0;
    if (std::abs(logits[k]) < cfg.logit_clip)
      dlogit = w[k] * (sigmoid(z) - static_cast<double>(labels[k])) * inv_b;
    if (dlogit != 0.0) {
      axpy(dlogit, pol[k].seq.h_final, grads->head_w);
      grads->head_b += dlogit;
      Vec dh(model.decision.head_w.size());
      for (std::size_t j = 0; j < dh.size(); ++j) dh[j] = dlogit * model.decision.head_w[j];
      auto dx = lstm_backward_sequence(model.decision.policy, pol[k].seq.caches, dh,
                                       grads->policy);
      for (const auto& row : dx) dc += row.back();
    }

    // reward branch: IRL terms plus the weight normalization path
    double dr1 = 0.0, dr0 = 0.0;
    if (cfg.use_irl) {
      const double r_a = labels[k] == 1 ? pairs[k].r_lc : pairs[k].r_lk;
      const double r_b = labels[k] == 1 ? pairs[k].r_lk : pairs[k].r_lc;
      const double m = std::max(r_a, r_b);
      const double ea = std::exp(r_a - m), eb = std::exp(r_b - m);
      const double pa = ea / (ea + eb);
      double dra = (-1.0 + pa) * inv_b;
      double drb = (1.0 - pa) * inv_b;
      dra += 2.0 * cfg.lambda2 * r_a * inv_b;
      drb += 2.0 * cfg.lambda2 * r_b * inv_b;
      const double sg = r_a > r_b ? 1.0 : (r_a < r_b ? -1.0 : 0.0);
      dra += cfg.lambda_s * sg * inv_b;
      drb -= cfg.lambda_s * sg * inv_b;
      if (labels[k] == 1) {
        dr1 += dra;
        dr0 += drb;
      } else {
        dr0 += dra;
        dr1 += drb;
      }
      // d L_BC / d s_k = (bce_k - L_BC) / (B * mean_s)
      const double ds = (bce[k] - st.bc) / (static_cast<double>(b) * mean_s);
      const double dgap = ds * cfg.beta * s[k] * (1.0 - s[k]);
      dr1 += dgap;
      dr0 -= dgap;
    }
    if (dr1 != 0.0) {
      Vec dx1 = mlp_backward_accumulate(model.decision.reward, pairs[k].cache_lc, {dr1},
                                        grads->reward);
      dc += dx1[kFeatureDim];
    }
    if (dr0 != 0.0) {
      Vec dx0 = mlp_backward_accumulate(model.decision.reward, pairs[k].cache_lk, {dr0},
                                        grads->reward);
      dc += dx0[kFeatureDim];
    }

    fuse_backward(model.intention, coop[k], dc, grads->intention);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Evaluation

struct ClassMetrics {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  double accuracy = 0.0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;  // support-weighted overall
  ClassMetrics lk, lc;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;  // LC = positive class
};

inline EvalReport metrics_from_predictions(const std::vector<int>& labels,
                                           const std::vector<int>& predictions) {
  if (labels.size() != predictions.size()) throw ShapeError("metrics: size mismatch");
  EvalReport r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool truth = labels[i] == 1, pred = predictions[i] == 1;
    r.tp += truth && pred;
    r.fp += !truth && pred;
    r.fn += truth && !pred;
    r.tn += !truth && !pred;
  }
  const auto safe_div = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  const auto n = static_cast<double>(labels.size());
  r.accuracy = safe_div(static_cast<double>(r.tp + r.tn), n);

  r.lc.support = r.tp + r.fn;
  r.lc.precision = safe_div(static_cast<double>(r.tp), static_cast<double>(r.tp + r.fp));
  r.lc.recall = safe_div(static_cast<double>(r.tp), static_cast<double>(r.tp + r.fn));
  r.lc.f1 = safe_div(2.0 * r.lc.recall * r.lc.precision, r.lc.recall + r.lc.precision);

  r.lk.support = r.tn + r.fp;
  r.lk.precision = safe_div(static_cast<double>(r.tn), static_cast<double>(r.tn + r.fn));
  r.lk.recall = safe_div(static_cast<double>(r.tn), static_cast<double>(r.tn + r.fp));
  r.lk.f1 = safe_div(2.0 * r.lk.recall * r.lk.precision, r.lk.recall + r.lk.precision);

  const double w_lk = static_cast<double>(r.lk.support) / n;
  const double w_lc = static_cast<double>(r.lc.support) / n;
  r.precision = w_lk * r.lk.precision + w_lc * r.lc.precision;
  r.recall = w_lk * r.lk.recall + w_lc * r.lc.recall;
  r.f1 = w_lk * r.lk.f1 + w_lc * r.lc.f1;
  return r;
}

// Threshold 0.5 on sigmoid(logit), i.e. logit > 0 predicts LC.
inline EvalReport evaluate(const DecisionModel& model, const std::vector<PreparedSample>& samples,
                           int split) {
  std::vector<int> labels, preds;
  for (const auto& ps : samples) {
    if (split >= 0 && ps.split != split) continue;
    const CoopCache coop =
        fuse(model.intention, ps.inner, ps.inter, ps.onehot, model.cfg.use_lcs, model.cfg.use_dcs);
    const auto pf = policy_forward(model.decision, ps, coop.scores.c_final);
    labels.push_back(ps.action);
    preds.push_back(pf.logit > 0.0 ? 1 : 0);
  }
  return metrics_from_predictions(labels, preds);
}

// ---------------------------------------------------------------------------
// Training

struct EpochStats {
  double train_loss = 0.0, val_loss = 0.0;
  double val_accuracy = 0.0, val_precision = 0.0, val_recall = 0.0, val_f1 = 0.0;
  double mean_lcs = 0.5, mean_dcs = 0.5, mean_alpha = 0.5, mean_c = 0.5;
};

struct TrainOutput {
  DecisionModel model;
  std::vector<EpochStats> history;
  EvalReport val_report;   // final-epoch model
  double best_val_f1 = 0.0;
};

inline TrainOutput train_decision(const SampleSet& set, const TrainConfig& cfg) {
  if (cfg.use_lcs) {
    for (const auto& s : set.samples)
      if (s.style < 0)
        throw ConfigError("train_decision: styles must be assigned before training (run the "
                          "style recognizer first)");
  }

  TrainOutput out;
  out.model.cfg = cfg;
  out.model.norm = compute_standardization(set);
  Rng rng = make_rng(cfg.seed);
  out.model.intention = make_intention_params(rng, cfg.intention_hidden);
  out.model.decision = make_decision_params(rng, cfg);

  const std::vector<PreparedSample> prepared = prepare_samples(set, out.model.norm);
  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t i = 0; i < prepared.size(); ++i)
    (prepared[i].split == 0 ? train_idx : val_idx).push_back(i);
  if (train_idx.empty()) throw ConfigError("train_decision: empty training split");

  AdamWConfig ocfg;
  ocfg.lr = cfg.lr;
  ocfg.weight_decay = cfg.weight_decay;
  AdamWState opt(ocfg);
  std::vector<double*> params;
  collect_params(out.model, params);

  IntentionParams best_intention;
  DecisionParams best_decision;
  bool have_best = false;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    EpochStats es;
    std::size_t batches = 0;
    for (std::size_t pos = 0; pos < train_idx.size(); pos += cfg.batch) {
      const std::size_t end = std::min(pos + cfg.batch, train_idx.size());
      std::vector<std::size_t> batch(train_idx.begin() + pos, train_idx.begin() + end);
      ModelGrads grads = make_zero_grads(out.model);
      BatchStats st;
      try {
        st = run_batch(out.model, prepared, batch, &grads);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batches) + ")");
      }
      std::vector<double*> gptrs;
      collect_grads(grads, gptrs);
      if (cfg.max_grad_norm > 0.0) {
        double norm2 = 0.0;
        for (double* g : gptrs) norm2 += *g * *g;
        const double norm = std::sqrt(norm2);
        if (norm > cfg.max_grad_norm) {
          const double scale = cfg.max_grad_norm / norm;
          for (double* g : gptrs) *g *= scale;
        }
      }
      std::vector<const double*> gconst(gptrs.begin(), gptrs.end());
      adamw_update(opt, params, gconst);
      es.train_loss += st.loss;
      es.mean_lcs += st.mean_lcs;
      es.mean_dcs += st.mean_dcs;
      es.mean_alpha += st.mean_alpha;
      es.mean_c += st.mean_c;
      ++batches;
    }
    const double inv = 1.0 / static_cast<double>(batches);
    es.train_loss *= inv;
    es.mean_lcs *= inv;
    es.mean_dcs *= inv;
    es.mean_alpha *= inv;
    es.mean_c *= inv;

    if (!val_idx.empty()) {
      BatchStats vs = run_batch(out.model, prepared, val_idx, nullptr);
      es.val_loss = vs.loss;
      EvalReport vr = evaluate(out.model, prepared, 1);
      es.val_accuracy = vr.accuracy;
      es.val_precision = vr.precision;
      es.val_recall = vr.recall;
      es.val_f1 = vr.f1;
      if (vr.f1 > out.best_val_f1) {
        out.best_val_f1 = vr.f1;
        if (cfg.keep_best_by_val_f1) {
          best_intention = out.model.intention;
          best_decision = out.model.decision;
          have_best = true;
        }
      }
    }
    out.history.push_back(es);
  }
  if (cfg.keep_best_by_val_f1 && have_best) {
    out.model.intention = best_intention;
    out.model.decision = best_decision;
  }
  out.val_report = evaluate(out.model, prepared, 1);
  return out;
}

// ---------------------------------------------------------------------------
// Ablation

struct AblationRow {
  std::string name;
  bool use_irl = false, use_lcs = false, use_dcs = false;
  double best_f1 = 0.0;
  EvalReport report;  // final model on the validation split
};

// The five configurations reported by the ablation table; every run uses
// the same seed and budget so rows differ only by the enabled modules.
inline std::vector<AblationRow> ablate(const SampleSet& set, const TrainConfig& base) {
  struct Flags {
    const char* name;
    bool irl, lcs, dcs;
  };
  const Flags rows[5] = {{"bc", false, false, false},
                         {"bc+irl", true, false, false},
                         {"bc+irl+lcs", true, true, false},
                         {"bc+irl+dcs", true, false, true},
                         {"full", true, true, true}};
  std::vector<AblationRow> out;
  for (const auto& row : rows) {
    TrainConfig cfg = base;
    cfg.use_irl = row.irl;
    cfg.use_lcs = row.lcs;
    cfg.use_dcs = row.dcs;
    TrainOutput t = train_decision(set, cfg);
    AblationRow r;
    r.name = row.name;
    r.use_irl = row.irl;
    r.use_lcs = row.lcs;
    r.use_dcs = row.dcs;
    r.best_f1 = t.best_val_f1;
    r.report = t.val_report;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lanecoop
