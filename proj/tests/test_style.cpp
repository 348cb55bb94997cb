#include <gtest/gtest.h>

#include <cmath>

#include "lanecoop/style.hpp"

using namespace lanecoop;

namespace {

Trajectory traj_from_va(const Vec& v, const Vec& a) {
  Trajectory tr;
  tr.v = v;
  tr.a = a;
  const std::size_t n = v.size();
  tr.t.resize(n);
  tr.x_long.assign(n, 0.0);
  tr.y_lat.assign(n, 0.0);
  tr.lane_id.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i) tr.t[i] = static_cast<double>(i) * kDt;
  return tr;
}

// three separated driver populations in (v_mean, a) statistics
StyleFeatures sample_blob(int blob, Rng& rng) {
  StyleFeatures f;
  const double v_centers[3] = {16.0, 11.0, 7.0};
  const double a_std_centers[3] = {1.6, 0.9, 0.35};
  f.v_mean = gaussian(rng, v_centers[blob], 0.25);
  f.a_mean = gaussian(rng, 0.0, 0.05);
  f.v_std = gaussian(rng, 1.0 + 0.3 * blob, 0.1);
  f.a_std = gaussian(rng, a_std_centers[blob], 0.05);
  f.v_max = f.v_mean + std::abs(gaussian(rng, 2.0, 0.3));
  f.a_max = f.a_std * 2.5 + std::abs(gaussian(rng, 0.3, 0.1));
  return f;
}

}  // namespace

TEST(ExtractFeatures, ConstantSpeedNoAccel) {
  Trajectory tr = traj_from_va(Vec(40, 10.0), Vec(40, 0.0));
  auto f = extract_features(tr);
  ASSERT_TRUE(f.has_value());
  EXPECT_DOUBLE_EQ(f->v_mean, 10.0);
  EXPECT_DOUBLE_EQ(f->a_mean, 0.0);
  EXPECT_DOUBLE_EQ(f->v_std, 0.0);
  EXPECT_DOUBLE_EQ(f->a_std, 0.0);
  EXPECT_DOUBLE_EQ(f->v_max, 10.0);
  EXPECT_DOUBLE_EQ(f->a_max, 0.0);
}

TEST(ExtractFeatures, AlternatingSpeeds) {
  Vec v(40);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i % 2 == 0 ? 8.0 : 12.0;
  auto f = extract_features(traj_from_va(v, Vec(40, 0.0)));
  ASSERT_TRUE(f.has_value());
  EXPECT_DOUBLE_EQ(f->v_mean, 10.0);
  EXPECT_DOUBLE_EQ(f->v_max, 12.0);
  EXPECT_DOUBLE_EQ(f->v_std, 2.0);
}

TEST(ExtractFeatures, MatchesBruteForceOracle) {
  Rng rng = make_rng(8);
  Vec v(200), a(200);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = 10.0 + gaussian(rng, 0.0, 2.0);
    a[i] = gaussian(rng, 0.0, 1.0);
  }
  auto f = extract_features(traj_from_va(v, a));
  ASSERT_TRUE(f.has_value());

  double vm = 0.0, am = 0.0;
  for (double x : v) vm += x;
  for (double x : a) am += x;
  vm /= 200.0;
  am /= 200.0;
  double vs = 0.0, as = 0.0, vmax = -1e9, amax = 0.0;
  for (double x : v) {
    vs += (x - vm) * (x - vm);
    vmax = std::max(vmax, x);
  }
  for (double x : a) {
    as += (x - am) * (x - am);
    amax = std::max(amax, std::abs(x));
  }
  EXPECT_NEAR(f->v_mean, vm, 1e-12);
  EXPECT_NEAR(f->a_mean, am, 1e-12);
  EXPECT_NEAR(f->v_std, std::sqrt(vs / 200.0), 1e-12);
  EXPECT_NEAR(f->a_std, std::sqrt(as / 200.0), 1e-12);
  EXPECT_NEAR(f->v_max, vmax, 1e-12);
  EXPECT_NEAR(f->a_max, amax, 1e-12);
}

TEST(ExtractFeatures, TooShortIsSkipped) {
  Trajectory tr = traj_from_va(Vec(10, 10.0), Vec(10, 0.0));
  EXPECT_FALSE(extract_features(tr).has_value());
}

TEST(Kmeans, SeparatedBlobsClusterPerfectly) {
  Rng rng = make_rng(2);
  const std::size_t per = 60;
  Matrix points(3 * per, 2);
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t i = 0; i < per; ++i) {
      points(b * per + i, 0) = 10.0 * static_cast<double>(b) + gaussian(rng, 0.0, 0.1);
      points(b * per + i, 1) = -5.0 * static_cast<double>(b) + gaussian(rng, 0.0, 0.1);
    }
  auto res = kmeans(points, 3, 7);
  // all points in a blob share a cluster, and clusters differ across blobs
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t i = 1; i < per; ++i)
      EXPECT_EQ(res.assignments[b * per + i], res.assignments[b * per]);
  EXPECT_NE(res.assignments[0], res.assignments[per]);
  EXPECT_NE(res.assignments[per], res.assignments[2 * per]);
  EXPECT_LT(res.inertia, static_cast<double>(points.rows) * 0.12 * 2.0);
}

TEST(Kmeans, SingleClusterIsMean) {
  Matrix points(5, 2);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    points(i, 0) = static_cast<double>(i);
    points(i, 1) = 2.0 * static_cast<double>(i) - 3.0;
    mx += points(i, 0);
    my += points(i, 1);
  }
  auto res = kmeans(points, 1, 1);
  EXPECT_NEAR(res.centroids(0, 0), mx / 5.0, 1e-9);
  EXPECT_NEAR(res.centroids(0, 1), my / 5.0, 1e-9);
}

TEST(Kmeans, DuplicatedDatasetKeepsCentroids) {
  Rng rng = make_rng(3);
  Matrix points(90, 2);
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t i = 0; i < 30; ++i) {
      points(b * 30 + i, 0) = 8.0 * static_cast<double>(b) + gaussian(rng, 0.0, 0.15);
      points(b * 30 + i, 1) = gaussian(rng, 0.0, 0.15);
    }
  Matrix doubled(180, 2);
  for (std::size_t i = 0; i < 90; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      doubled(i, j) = points(i, j);
      doubled(90 + i, j) = points(i, j);
    }
  auto a = kmeans(points, 3, 5);
  auto b = kmeans(doubled, 3, 5);
  // compare centroid sets (order-insensitive)
  for (std::size_t c = 0; c < 3; ++c) {
    double best = 1e18;
    for (std::size_t c2 = 0; c2 < 3; ++c2) {
      const double d = std::hypot(a.centroids(c, 0) - b.centroids(c2, 0),
                                  a.centroids(c, 1) - b.centroids(c2, 1));
      best = std::min(best, d);
    }
    EXPECT_LT(best, 1e-6);
  }
}

TEST(Kmeans, InertiaNonIncreasingAcrossIterations) {
  Rng rng = make_rng(11);
  Matrix points(120, 3);
  for (double& x : points.data) x = gaussian(rng);
  auto res = kmeans(points, 4, 3, 1);
  for (std::size_t i = 1; i < res.inertia_history.size(); ++i)
    EXPECT_LE(res.inertia_history[i], res.inertia_history[i - 1] + 1e-9);
}

TEST(Kmeans, MoreClustersThanPointsThrows) {
  Matrix points(2, 2);
  EXPECT_THROW(kmeans(points, 3, 1), ConfigError);
}

TEST(OrderLabels, RanksBySpeedScore) {
  Matrix centroids(3, 6);
  const double v_means[3] = {11.0, 14.0, 8.0};
  for (std::size_t c = 0; c < 3; ++c) {
    centroids(c, 0) = v_means[c];
    centroids(c, 3) = 0.5;  // equal a_std
    centroids(c, 4) = v_means[c] + 2.0;
  }
  Vec mean = {11.0, 0.0, 0.0, 0.5, 13.0, 0.0};
  Vec stdv = {2.0, 1.0, 1.0, 0.2, 2.0, 1.0};
  auto labels = order_labels(centroids, mean, stdv);
  EXPECT_EQ(labels[1], Style::aggressive);
  EXPECT_EQ(labels[0], Style::normal);
  EXPECT_EQ(labels[2], Style::conservative);
}

TEST(OrderLabels, PermutationInvariant) {
  Matrix a(3, 6), b(3, 6);
  const double rows[3][6] = {{14, 0, 1, 1.5, 16, 3}, {11, 0, 1, 0.9, 13, 2}, {8, 0, 1, 0.4, 9, 1}};
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t j = 0; j < 6; ++j) {
      a(c, j) = rows[c][j];
      b(c, j) = rows[2 - c][j];  // reversed order
    }
  Vec mean = {11, 0, 1, 0.9, 12, 2};
  Vec stdv = {2, 1, 0.5, 0.4, 2, 1};
  auto la = order_labels(a, mean, stdv);
  auto lb = order_labels(b, mean, stdv);
  EXPECT_EQ(la[0], lb[2]);
  EXPECT_EQ(la[1], lb[1]);
  EXPECT_EQ(la[2], lb[0]);
}

TEST(OrderLabels, TieBreaksOnMaxSpeed) {
  Matrix centroids(3, 6);
  for (std::size_t c = 0; c < 3; ++c) {
    centroids(c, 0) = 10.0;  // equal score components
    centroids(c, 3) = 1.0;
    centroids(c, 4) = 10.0 + static_cast<double>(c);
  }
  Vec mean = {10, 0, 0, 1, 11, 0};
  Vec stdv = {1, 1, 1, 1, 1, 1};
  auto labels = order_labels(centroids, mean, stdv);
  EXPECT_EQ(labels[2], Style::aggressive);  // highest v_max
  EXPECT_EQ(labels[0], Style::conservative);
}

namespace {

struct BlobData {
  std::vector<StyleFeatures> features;
  std::vector<int> truth;
};

BlobData make_blob_data(std::size_t per_blob, std::uint64_t seed) {
  BlobData d;
  Rng rng = make_rng(seed);
  for (int b = 0; b < 3; ++b)
    for (std::size_t i = 0; i < per_blob; ++i) {
      d.features.push_back(sample_blob(b, rng));
      d.truth.push_back(b);
    }
  return d;
}

}  // namespace

TEST(StylePipeline, ClusterRecognizeAgree) {
  BlobData train = make_blob_data(80, 21);
  StyleModel model = fit_style_clusters(train.features, 42);

  // standardization sanity on the training set
  Vec zsum(6, 0.0), zsq(6, 0.0);
  for (const auto& f : train.features) {
    Vec z = standardize_features(model, f);
    for (std::size_t j = 0; j < 6; ++j) {
      zsum[j] += z[j];
      zsq[j] += z[j] * z[j];
    }
  }
  for (std::size_t j = 0; j < 6; ++j) {
    EXPECT_NEAR(zsum[j] / 240.0, 0.0, 1e-8);
    EXPECT_NEAR(zsq[j] / 240.0, 1.0, 1e-6);
  }

  std::vector<Style> cluster_labels;
  for (const auto& f : train.features) cluster_labels.push_back(cluster_style(model, f));
  auto result = train_recognizer(model, train.features, cluster_labels, 42);
  EXPECT_GE(result.train_accuracy, 0.95);

  // held-out agreement between the clusterer and the recognizer
  BlobData held = make_blob_data(60, 99);
  std::size_t agree = 0;
  for (const auto& f : held.features) {
    const Style a = cluster_style(model, f);
    const Style b = predict_style(model, f).label;
    agree += a == b ? 1 : 0;
  }
  EXPECT_GE(static_cast<double>(agree) / 180.0, 0.95);

  // blob with the fastest, most erratic drivers maps to aggressive
  Rng rng = make_rng(5);
  std::size_t agg = 0;
  for (int i = 0; i < 50; ++i)
    agg += predict_style(model, sample_blob(0, rng)).label == Style::aggressive ? 1 : 0;
  EXPECT_GE(agg, 48u);
}

TEST(StylePipeline, RecognizerValidationAccuracy) {
  BlobData train = make_blob_data(80, 33);
  StyleModel model = fit_style_clusters(train.features, 7);
  std::vector<Style> labels;
  for (const auto& f : train.features) labels.push_back(cluster_style(model, f));
  train_recognizer(model, train.features, labels, 7);

  BlobData val = make_blob_data(50, 55);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < val.features.size(); ++i) {
    const Style expected = cluster_style(model, val.features[i]);
    ok += predict_style(model, val.features[i]).label == expected ? 1 : 0;
  }
  EXPECT_GE(static_cast<double>(ok) / static_cast<double>(val.features.size()), 0.98);
}

TEST(TrainRecognizer, SingleClassSaturates) {
  Rng rng = make_rng(13);
  std::vector<StyleFeatures> features;
  std::vector<Style> labels;
  for (int i = 0; i < 40; ++i) {
    features.push_back(sample_blob(1, rng));
    labels.push_back(Style::normal);
  }
  StyleModel model = fit_style_clusters(features, 3);
  train_recognizer(model, features, labels, 3);
  for (int i = 0; i < 10; ++i) {
    auto pred = predict_style(model, sample_blob(1, rng));
    EXPECT_EQ(pred.label, Style::normal);
    EXPECT_GE(pred.probabilities[1], 0.99);
  }
}

TEST(PredictStyle, DeterministicPositiveAndNormalized) {
  BlobData train = make_blob_data(40, 61);
  StyleModel model = fit_style_clusters(train.features, 11);
  std::vector<Style> labels;
  for (const auto& f : train.features) labels.push_back(cluster_style(model, f));
  train_recognizer(model, train.features, labels, 11);

  Rng rng = make_rng(77);
  for (int i = 0; i < 20; ++i) {
    StyleFeatures f = sample_blob(i % 3, rng);
    auto a = predict_style(model, f);
    auto b = predict_style(model, f);
    EXPECT_EQ(a.label, b.label);
    double sum = 0.0;
    for (double p : a.probabilities) {
      EXPECT_GT(p, 0.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(PredictStyle, NonFiniteFeatureThrows) {
  BlobData train = make_blob_data(40, 91);
  StyleModel model = fit_style_clusters(train.features, 5);
  StyleFeatures bad = train.features[0];
  bad.v_mean = std::nan("");
  EXPECT_THROW(standardize_features(model, bad), NumericError);
}

TEST(PredictStyle, ArgmaxMatchesLogitArgmax) {
  // the softmax argmax equals the pre-activation argmax, so any strictly
  // increasing transform of the logits keeps the label
  BlobData train = make_blob_data(40, 17);
  StyleModel model = fit_style_clusters(train.features, 9);
  std::vector<Style> labels;
  for (const auto& f : train.features) labels.push_back(cluster_style(model, f));
  train_recognizer(model, train.features, labels, 9);

  Rng rng = make_rng(6);
  for (int i = 0; i < 20; ++i) {
    StyleFeatures f = sample_blob(i % 3, rng);
    Vec z = standardize_features(model, f);
    auto [probs, cache] = mlp_forward(model.recognizer, z);
    const Vec& logits = cache.pre.back();
    std::size_t arg_p = 0, arg_l = 0;
    for (std::size_t c = 1; c < 3; ++c) {
      if (probs[c] > probs[arg_p]) arg_p = c;
      if (logits[c] > logits[arg_l]) arg_l = c;
    }
    EXPECT_EQ(arg_p, arg_l);
  }
}
