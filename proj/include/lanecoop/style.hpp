#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "lanecoop/mlp.hpp"
#include "lanecoop/optim.hpp"
#include "lanecoop/pca.hpp"
#include "lanecoop/stats.hpp"
#include "lanecoop/trajectory.hpp"

namespace lanecoop {

struct StyleFeatures {
  double v_mean = 0.0;
  double a_mean = 0.0;
  double v_std = 0.0;
  double a_std = 0.0;
  double v_max = 0.0;
  double a_max = 0.0;  // of |a|

  std::array<double, 6> as_array() const {
    return {v_mean, a_mean, v_std, a_std, v_max, a_max};
  }
  static StyleFeatures from_array(const std::array<double, 6>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

inline std::optional<StyleFeatures> extract_features(const Trajectory& tr) {
  if (tr.size() < kWindowFrames) return std::nullopt;
  StyleFeatures f;
  f.v_mean = mean(tr.v);
  f.a_mean = mean(tr.a);
  f.v_std = stddev(tr.v);
  f.a_std = stddev(tr.a);
  f.v_max = *std::max_element(tr.v.begin(), tr.v.end());
  f.a_max = 0.0;
  for (double a : tr.a) f.a_max = std::max(f.a_max, std::abs(a));
  return f;
}

struct KmeansResult {
  Matrix centroids;
  std::vector<int> assignments;
  double inertia = 0.0;
  std::vector<double> inertia_history;  // per Lloyd iteration of the winning restart
};

namespace detail {

inline double sq_dist(const Matrix& points, std::size_t row, const Matrix& centroids,
                      std::size_t c) {
  double d = 0.0;
  for (std::size_t j = 0; j < points.cols; ++j) {
    const double diff = points(row, j) - centroids(c, j);
    d += diff * diff;
  }
  return d;
}

inline KmeansResult kmeans_single(const Matrix& points, std::size_t k, Rng& rng,
                                  std::size_t max_iters, double tol) {
  const std::size_t n = points.rows, d = points.cols;
  KmeansResult res;
  res.centroids = Matrix(k, d);

  // k-means++ seeding
  std::vector<std::size_t> chosen;
  chosen.push_back(uniform_index(rng, n));
  Vec dist2(n, std::numeric_limits<double>::max());
  while (chosen.size() < k) {
    const std::size_t last = chosen.back();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dd = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = points(i, j) - points(last, j);
        dd += diff * diff;
      }
      dist2[i] = std::min(dist2[i], dd);
      total += dist2[i];
    }
    if (total <= 0.0) {
      chosen.push_back(uniform_index(rng, n));
      continue;
    }
    double target = uniform(rng, 0.0, total);
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      target -= dist2[i];
      if (target <= 0.0) {
        pick = i;
        break;
      }
    }
    chosen.push_back(pick);
  }
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < d; ++j) res.centroids(c, j) = points(chosen[c], j);

  res.assignments.assign(n, 0);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(points, i, res.centroids, 0);
      for (std::size_t c = 1; c < k; ++c) {
        const double dd = sq_dist(points, i, res.centroids, c);
        if (dd < best_d) {  // ties keep the lowest index
          best_d = dd;
          best = static_cast<int>(c);
        }
      }
      res.assignments[i] = best;
      inertia += best_d;
    }
    res.inertia = inertia;
    res.inertia_history.push_back(inertia);

    Matrix next(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(res.assignments[i]);
      counts[c] += 1;
      for (std::size_t j = 0; j < d; ++j) next(c, j) += points(i, j);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {  // empty cluster keeps its centroid
        for (std::size_t j = 0; j < d; ++j) next(c, j) = res.centroids(c, j);
        continue;
      }
      double move = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        next(c, j) /= static_cast<double>(counts[c]);
        const double diff = next(c, j) - res.centroids(c, j);
        move += diff * diff;
      }
      shift = std::max(shift, std::sqrt(move));
    }
    res.centroids = next;
    if (shift < tol) break;
  }

  // final assignment/inertia against the converged centroids
  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    double best_d = sq_dist(points, i, res.centroids, 0);
    for (std::size_t c = 1; c < k; ++c) {
      const double dd = sq_dist(points, i, res.centroids, c);
      if (dd < best_d) {
        best_d = dd;
        best = static_cast<int>(c);
      }
    }
    res.assignments[i] = best;
    inertia += best_d;
  }
  res.inertia = inertia;
  return res;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding; `restarts` runs keep the best
// inertia (ties go to the earliest restart).
inline KmeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                           std::size_t restarts = 10, std::size_t max_iters = 300,
                           double tol = 1e-8) {
  if (k < 1) throw ConfigError("kmeans: k must be >= 1");
  if (points.rows < k) throw ConfigError("kmeans: more clusters than points");
  KmeansResult best;
  bool have = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng = make_rng(seed + r);
    KmeansResult res = detail::kmeans_single(points, k, rng, max_iters, tol);
    if (!have || res.inertia < best.inertia) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

struct StyleModel {
  Vec feature_mean, feature_std;  // standardization over the training set
  PcaModel pca;                   // fitted on standardized features
  Matrix centroids;               // k x pca-dim
  std::vector<Style> label_order; // cluster index -> semantic style
  MlpParams recognizer;           // 6 -> 64 -> 64 -> 3 softmax, standardized inputs
  bool recognizer_trained = false;
};

inline Vec standardize_features(const StyleModel& m, const StyleFeatures& f) {
  const auto a = f.as_array();
  Vec out(6);
  for (std::size_t i = 0; i < 6; ++i) {
    if (!std::isfinite(a[i])) throw NumericError("style features contain a non-finite value");
    out[i] = (a[i] - m.feature_mean[i]) / m.feature_std[i];
  }
  return out;
}

// Ranks centroids (in the original feature space) by standardized
// v_mean + a_std; highest -> aggressive, lowest -> conservative. Ties break
// on v_max.
inline std::vector<Style> order_labels(const Matrix& centroids_original, const Vec& feature_mean,
                                       const Vec& feature_std) {
  const std::size_t k = centroids_original.rows;
  if (k != 3) throw ConfigError("order_labels: expects exactly 3 centroids");
  std::vector<double> score(k), tie(k);
  for (std::size_t c = 0; c < k; ++c) {
    const double v_mean_z = (centroids_original(c, 0) - feature_mean[0]) / feature_std[0];
    const double a_std_z = (centroids_original(c, 3) - feature_mean[3]) / feature_std[3];
    score[c] = v_mean_z + a_std_z;
    tie[c] = centroids_original(c, 4);  // v_max
  }
  std::vector<std::size_t> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return tie[a] > tie[b];
  });
  std::vector<Style> labels(k);
  labels[order[0]] = Style::aggressive;
  labels[order[1]] = Style::normal;
  labels[order[2]] = Style::conservative;
  return labels;
}

// Standardize -> PCA (components covering >= min_variance of the total) ->
// k-means in the reduced space -> semantic labels from the inverse-
// transformed centroids.
inline StyleModel fit_style_clusters(const std::vector<StyleFeatures>& features,
                                     std::uint64_t seed, double min_variance = 0.95) {
  if (features.size() < 3) throw ConfigError("fit_style_clusters: need at least 3 drivers");
  const std::size_t n = features.size();
  StyleModel m;
  m.feature_mean.assign(6, 0.0);
  m.feature_std.assign(6, 0.0);
  Matrix raw(n, 6);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = features[i].as_array();
    for (std::size_t j = 0; j < 6; ++j) {
      raw(i, j) = a[j];
      m.feature_mean[j] += a[j];
    }
  }
  for (double& x : m.feature_mean) x /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const double d = raw(i, j) - m.feature_mean[j];
      m.feature_std[j] += d * d;
    }
  for (double& x : m.feature_std) {
    x = std::sqrt(x / static_cast<double>(n));
    if (x < 1e-12) x = 1.0;  // constant feature
  }

  Matrix z(n, 6);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      z(i, j) = (raw(i, j) - m.feature_mean[j]) / m.feature_std[j];

  PcaModel full = pca_fit(z, 6);
  double total = 0.0;
  for (double v : full.explained_variance) total += v;
  std::size_t keep = 1;
  double acc = full.explained_variance[0];
  while (keep < 6 && acc < min_variance * total) {
    acc += full.explained_variance[keep];
    ++keep;
  }
  m.pca = pca_fit(z, keep);

  Matrix projected(n, keep);
  for (std::size_t i = 0; i < n; ++i) {
    Vec row(6);
    for (std::size_t j = 0; j < 6; ++j) row[j] = z(i, j);
    Vec p = pca_project(m.pca, row);
    for (std::size_t j = 0; j < keep; ++j) projected(i, j) = p[j];
  }

  KmeansResult km = kmeans(projected, 3, seed);
  m.centroids = km.centroids;

  // centroids back to the original feature space for labeling
  Matrix centroids_orig(3, 6);
  for (std::size_t c = 0; c < 3; ++c) {
    Vec zc(km.centroids.cols);
    for (std::size_t j = 0; j < zc.size(); ++j) zc[j] = km.centroids(c, j);
    Vec back = pca_reconstruct(m.pca, zc);
    for (std::size_t j = 0; j < 6; ++j)
      centroids_orig(c, j) = back[j] * m.feature_std[j] + m.feature_mean[j];
  }
  m.label_order = order_labels(centroids_orig, m.feature_mean, m.feature_std);
  return m;
}

inline int assign_cluster(const StyleModel& m, const StyleFeatures& f) {
  Vec z = standardize_features(m, f);
  Vec p = pca_project(m.pca, z);
  int best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (std::size_t c = 0; c < m.centroids.rows; ++c) {
    double d = 0.0;
    for (std::size_t j = 0; j < m.centroids.cols; ++j) {
      const double diff = p[j] - m.centroids(c, j);
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

inline Style cluster_style(const StyleModel& m, const StyleFeatures& f) {
  return m.label_order[static_cast<std::size_t>(assign_cluster(m, f))];
}

struct RecognizerTrainResult {
  bool converged = false;
  double train_accuracy = 0.0;
  std::size_t epochs_run = 0;
};

// Cross-entropy training of the 6->64->64->3 softmax recognizer on
// standardized features with semantic labels. Stops once the accuracy
// target is met and the loss is small enough for saturated probabilities.
inline RecognizerTrainResult train_recognizer(StyleModel& model,
                                              const std::vector<StyleFeatures>& features,
                                              const std::vector<Style>& labels,
                                              std::uint64_t seed, std::size_t max_epochs = 2000,
                                              double target_accuracy = 0.999,
                                              double target_loss = 5e-3) {
  if (features.size() != labels.size())
    throw ConfigError("train_recognizer: features/labels size mismatch");
  if (features.size() < 30) throw ConfigError("train_recognizer: need at least 30 examples");

  Rng rng = make_rng(seed);
  model.recognizer = make_mlp({6, 64, 64, 3},
                              {Activation::relu, Activation::relu, Activation::softmax}, rng);
  std::vector<Vec> inputs;
  inputs.reserve(features.size());
  for (const auto& f : features) inputs.push_back(standardize_features(model, f));

  AdamWConfig ocfg;
  ocfg.lr = 1e-2;
  ocfg.weight_decay = 1e-4;
  AdamWState opt(ocfg);
  std::vector<double*> params;
  collect_params(model.recognizer, params);

  MlpParams best_params = model.recognizer;
  double best_acc = -1.0;
  double best_loss = std::numeric_limits<double>::max();
  RecognizerTrainResult result;
  const double inv_n = 1.0 / static_cast<double>(inputs.size());

  for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
    MlpGrads grads = make_zero_grads(model.recognizer);
    std::size_t correct = 0;
    double loss = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      auto [probs, cache] = mlp_forward(model.recognizer, inputs[i]);
      const auto y = static_cast<std::size_t>(labels[i]);
      std::size_t arg = 0;
      for (std::size_t c = 1; c < 3; ++c)
        if (probs[c] > probs[arg]) arg = c;
      correct += arg == y ? 1 : 0;
      loss -= inv_n * std::log(std::max(probs[y], 1e-15));
      Vec grad_out(3, 0.0);
      grad_out[y] = -inv_n / std::max(probs[y], 1e-15);
      mlp_backward_accumulate(model.recognizer, cache, grad_out, grads);
    }
    std::vector<double*> gptrs;
    collect_grads(grads, gptrs);
    std::vector<const double*> gconst(gptrs.begin(), gptrs.end());
    adamw_update(opt, params, gconst);

    const double acc = static_cast<double>(correct) * inv_n;
    if (acc > best_acc || (acc == best_acc && loss < best_loss)) {
      best_acc = acc;
      best_loss = loss;
      best_params = model.recognizer;
    }
    result.epochs_run = epoch + 1;
    if (acc >= target_accuracy && loss <= target_loss) {
      result.converged = true;
      break;
    }
  }
  model.recognizer = best_params;
  model.recognizer_trained = true;
  result.train_accuracy = best_acc;
  return result;
}

struct StylePrediction {
  Style label = Style::normal;
  Vec probabilities;  // aggressive, normal, conservative
};

inline StylePrediction predict_style(const StyleModel& m, const StyleFeatures& f) {
  if (!m.recognizer_trained) throw ConfigError("predict_style: recognizer not trained");
  Vec z = standardize_features(m, f);
  auto [probs, cache] = mlp_forward(m.recognizer, z);
  StylePrediction out;
  out.probabilities = probs;
  std::size_t arg = 0;
  for (std::size_t c = 1; c < probs.size(); ++c)
    if (probs[c] > probs[arg]) arg = c;
  out.label = static_cast<Style>(arg);
  return out;
}

}  // namespace lanecoop
