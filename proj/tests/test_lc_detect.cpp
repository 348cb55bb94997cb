#include <gtest/gtest.h>

#include <cmath>

#include "lanecoop/lc_detect.hpp"
#include "lanecoop/synthetic.hpp"

using namespace lanecoop;

namespace {

Trajectory clean_change(double t_mid, double duration, double total = 24.0,
                        double amplitude = kLaneWidthM) {
  synthetic::LaneChangeSpec spec;
  spec.t_mid = t_mid;
  spec.duration = duration;
  spec.total_time = total;
  spec.amplitude = amplitude;
  Rng rng = make_rng(0);
  return synthetic::make_lane_change_trajectory(spec, rng);
}

}  // namespace

TEST(LateralSpeed, ConstantIsZero) {
  Vec y(10, 2.0);
  Vec v = lateral_speed(y);
  ASSERT_EQ(v.size(), 9u);
  for (double x : v) EXPECT_DOUBLE_EQ(x, 0.0);
}

TEST(LateralSpeed, LinearSlope) {
  Vec y(20);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.2 * static_cast<double>(i);
  Vec v = lateral_speed(y);
  for (double x : v) EXPECT_NEAR(x, 2.0, 1e-12);
}

TEST(LateralSpeed, MatchesBruteForceDiff) {
  Rng rng = make_rng(3);
  Vec y(100);
  double acc = 1.0;
  for (double& x : y) {
    acc += gaussian(rng, 0.0, 0.05);
    x = acc;
  }
  Vec v = lateral_speed(y);
  for (std::size_t i = 0; i + 1 < y.size(); ++i)
    EXPECT_DOUBLE_EQ(v[i], (y[i + 1] - y[i]) / kDt);
}

TEST(SearchBoundary, BracketsSigmoidTransition) {
  Trajectory tr = clean_change(12.0, 5.0);
  Vec v = lateral_speed(tr.y_lat);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[peak])) peak = i;

  auto left = search_boundary(v, tr.y_lat, peak, 0.05, LaneChangeDirection::left, kLaneWidthM);
  auto right = search_boundary(v, tr.y_lat, peak, 0.05, LaneChangeDirection::right, kLaneWidthM);
  EXPECT_TRUE(left.crossed_lane_line);
  EXPECT_TRUE(right.crossed_lane_line);
  EXPECT_LT(left.idx, peak);
  EXPECT_GT(right.idx, peak);
  // analytic 1% / 99% transition boundaries at t_mid -/+ duration/2
  EXPECT_NEAR(tr.t[left.idx], 12.0 - 2.5, 0.3);
  EXPECT_NEAR(tr.t[right.idx], 12.0 + 2.5, 0.3);
}

TEST(SearchBoundary, FlatTrajectoryFallsBack) {
  Vec y(50, 1.8288);
  Vec v = lateral_speed(y);
  auto res = search_boundary(v, y, 25, 0.05, LaneChangeDirection::left, kLaneWidthM);
  EXPECT_EQ(res.idx, 0u);
  EXPECT_FALSE(res.crossed_lane_line);
  EXPECT_FALSE(res.settled);
}

TEST(SearchBoundary, InLaneMotionNeverCrosses) {
  synthetic::LaneKeepSpec spec;
  spec.weave_amplitude = 1.2;  // stays inside the lane
  Rng rng = make_rng(1);
  Trajectory tr = synthetic::make_lane_keeping_trajectory(spec, rng);
  Vec v = lateral_speed(tr.y_lat);
  for (std::size_t start : {40u, 120u, 200u}) {
    auto l = search_boundary(v, tr.y_lat, start, 0.05, LaneChangeDirection::left, kLaneWidthM);
    auto r = search_boundary(v, tr.y_lat, start, 0.05, LaneChangeDirection::right, kLaneWidthM);
    EXPECT_FALSE(l.crossed_lane_line);
    EXPECT_FALSE(r.crossed_lane_line);
  }
}

TEST(DetectEvents, CleanSigmoidWithinTolerance) {
  for (double duration : {3.0, 5.0, 8.0}) {
    Trajectory tr = clean_change(12.0, duration);
    auto ev = detect_events(tr.y_lat);
    ASSERT_TRUE(ev.has_value()) << "duration " << duration;
    EXPECT_NEAR(tr.t[ev->start_idx], 12.0 - duration / 2.0, 0.3);
    EXPECT_NEAR(tr.t[ev->end_idx], 12.0 + duration / 2.0, 0.3);
    EXPECT_LE(ev->start_idx, ev->peak_idx);
    EXPECT_LE(ev->peak_idx, ev->end_idx);
    EXPECT_DOUBLE_EQ(ev->duration,
                     static_cast<double>(ev->end_idx - ev->start_idx) * kDt);
  }
}

TEST(DetectEvents, FlatTrajectoryHasNoEvent) {
  Vec y(200, 1.8288);
  EXPECT_FALSE(detect_events(y).has_value());
}

TEST(DetectEvents, InLaneWeaveRejected) {
  synthetic::LaneKeepSpec spec;
  spec.weave_amplitude = 1.2;
  spec.weave_period = 3.0;
  Rng rng = make_rng(7);
  Trajectory tr = synthetic::make_lane_keeping_trajectory(spec, rng);
  EXPECT_FALSE(detect_events(tr.y_lat).has_value());
}

TEST(DetectEvents, WeaveThenRealChangePicksRealChange) {
  // first bump: fast in-lane weave (largest |v| peaks); second: true change
  const double total = 44.0;
  Trajectory tr = clean_change(30.0, 6.0, total);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.t[i];
    const double envelope = std::exp(-std::pow((t - 10.0) / 2.5, 2.0));
    tr.y_lat[i] += 1.5 * envelope * std::sin(2.0 * M_PI * t / 2.0);
  }
  auto ev = detect_events(tr.y_lat);
  ASSERT_TRUE(ev.has_value());
  EXPECT_NEAR(tr.t[ev->start_idx], 30.0 - 3.0, 0.5);
  EXPECT_NEAR(tr.t[ev->end_idx], 30.0 + 3.0, 0.5);
}

TEST(DetectEvents, InvariantToLaneWidthOffset) {
  Trajectory tr = clean_change(12.0, 5.0);
  auto base = detect_events(tr.y_lat);
  ASSERT_TRUE(base.has_value());
  for (int k = 1; k <= 3; ++k) {
    Vec shifted = tr.y_lat;
    for (double& y : shifted) y += static_cast<double>(k) * kLaneWidthM;
    auto ev = detect_events(shifted);
    ASSERT_TRUE(ev.has_value());
    EXPECT_EQ(ev->start_idx, base->start_idx);
    EXPECT_EQ(ev->end_idx, base->end_idx);
  }
}

TEST(DetectEvents, AcceptedEventHasMinimumAmplitude) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = make_rng(seed);
    synthetic::LaneChangeSpec spec;
    spec.duration = 3.0 + 0.5 * static_cast<double>(seed);
    spec.noise_sigma = 0.02;
    spec.total_time = 30.0;
    spec.t_mid = 15.0;
    Trajectory tr = synthetic::make_lane_change_trajectory(spec, rng);
    auto ev = detect_events(tr.y_lat);
    if (!ev) continue;
    EXPECT_LT(ev->start_idx, ev->end_idx);
    EXPECT_GE(std::abs(tr.y_lat[ev->end_idx] - tr.y_lat[ev->start_idx]), 0.5 * kLaneWidthM);
  }
}

TEST(DurationStats, DegenerateDurations) {
  std::vector<LcEvent> events(5);
  for (auto& e : events) e.duration = 5.0;
  auto stats = duration_stats(events);
  EXPECT_NEAR(stats.mu, std::log(5.0), 1e-12);
  EXPECT_NEAR(stats.sigma, 0.0, 1e-12);
}

TEST(DurationStats, RecoversSampledLognormal) {
  Rng rng = make_rng(99);
  std::vector<LcEvent> events(1000);
  for (auto& e : events) e.duration = std::exp(gaussian(rng, 1.6, 0.35));
  auto stats = duration_stats(events);
  EXPECT_NEAR(stats.mu, 1.6, 0.03);
  EXPECT_NEAR(stats.sigma, 0.35, 0.03);
}
