#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "lanecoop/filters.hpp"
#include "lanecoop/stats.hpp"
#include "lanecoop/trajectory.hpp"

namespace lanecoop {

struct LcEvent {
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  std::size_t peak_idx = 0;  // frame of max |lateral speed|
  double duration = 0.0;     // (end - start) * 0.1 s
};

struct DetectConfig {
  double delta = 0.05;            // lateral-speed lower threshold, m/s
  double lane_width = kLaneWidthM;
  std::size_t max_rejected_peaks = 5;
  double settle_dv = 0.02;        // |dv| at which the lateral motion counts as settled, m/s
  // The boundary threshold also scales with the peak: a logistic transition
  // passes 1% / 99% of its amplitude where |v| is 4% of the peak speed, so
  // the effective threshold is max(delta, peak_fraction * |v_peak|).
  double peak_fraction = 0.04;
  // Boundary refinement: once a bracket is accepted, locate the inner
  // (10% / 90%) amplitude crossings, where the transition is steep and
  // noise barely moves the crossing, and extrapolate outward to the
  // amplitude_fraction boundary assuming a logistic transition profile.
  bool refine_boundaries = true;
  double amplitude_fraction = 0.01;
  double inner_fraction = 0.10;
};

// v[i] = (y[i+1] - y[i]) / 0.1, length n-1.
inline Vec lateral_speed(const Vec& y_lat) {
  if (y_lat.size() < 2) throw ConfigError("lateral_speed: need at least 2 samples");
  Vec v(y_lat.size() - 1);
  for (std::size_t i = 0; i + 1 < y_lat.size(); ++i) v[i] = (y_lat[i + 1] - y_lat[i]) / kDt;
  return v;
}

namespace detail {

inline int sgn_pos(double x) { return x >= 0.0 ? 1 : -1; }

// Any lane line (non-negative multiple of lane_width) within [lo, hi], inclusive.
inline bool lane_line_in_range(double lo, double hi, double lane_width) {
  if (lo > hi) std::swap(lo, hi);
  const double k_lo = std::ceil(lo / lane_width - 1e-12);
  const double k_hi = std::floor(hi / lane_width + 1e-12);
  return k_hi >= k_lo && k_hi >= 0.0;
}

inline bool lane_line_in_segment(const Vec& y, std::size_t i, std::size_t j, double lane_width) {
  if (i > j) std::swap(i, j);
  double lo = y[i], hi = y[i];
  for (std::size_t k = i; k <= j && k < y.size(); ++k) {
    lo = std::min(lo, y[k]);
    hi = std::max(hi, y[k]);
  }
  return lane_line_in_range(lo, hi, lane_width);
}

}  // namespace detail

struct BoundarySearchResult {
  std::size_t idx = 0;
  bool crossed_lane_line = false;
  bool settled = false;  // false when the walk exhausted the array
};

// Walk outward from start_idx until the lateral speed has both dropped to
// the threshold and settled (slope sign flip, or |dv| below settle_dv; the
// slope test alone never fires on a noise-free transition). The crossed
// flag reports whether the walked segment spans a lane line.
inline BoundarySearchResult search_boundary(const Vec& v, const Vec& y, std::size_t start_idx,
                                            double delta, LaneChangeDirection direction,
                                            double lane_width, double settle_dv = 0.02) {
  if (v.empty() || start_idx >= v.size())
    throw ConfigError("search_boundary: start index out of range");
  const int dir = direction == LaneChangeDirection::left ? -1 : 1;
  const std::size_t n = v.size();

  auto segment_crossed = [&](std::size_t t) {
    const std::size_t a = std::min(t, start_idx);
    const std::size_t b = std::max(t, start_idx) + 1;  // pairs (i, i+1) map to y[i..i+1]
    return detail::lane_line_in_segment(y, a, std::min(b, y.size() - 1), lane_width);
  };

  std::size_t t = start_idx;
  bool was_in_bump = false;  // |dv|-settling only applies once a real bump was left
  while ((dir < 0 && t >= 1) || (dir > 0 && t + 1 < n)) {
    if (std::abs(v[t]) > delta) was_in_bump = true;
    const bool speed_low = std::abs(v[t]) <= delta;
    bool settled = false;
    if (t >= 1) {
      const double dv = v[t] - v[t - 1];
      if (was_in_bump && std::abs(dv) <= settle_dv) settled = true;
      if (!settled && t >= 2) {
        const double dv_prev = v[t - 1] - v[t - 2];
        settled = detail::sgn_pos(dv) != detail::sgn_pos(dv_prev) && (dv != 0.0 || dv_prev != 0.0);
      }
    }
    if (speed_low && settled) return {t, segment_crossed(t), true};
    t = static_cast<std::size_t>(static_cast<long long>(t) + dir);
  }
  const std::size_t fallback = dir < 0 ? 0 : n - 1;
  return {fallback, false, false};
}

namespace detail {

inline double median_of(const Vec& y, std::size_t lo, std::size_t hi) {
  Vec buf(y.begin() + lo, y.begin() + hi + 1);
  std::sort(buf.begin(), buf.end());
  const std::size_t m = buf.size();
  return m % 2 == 1 ? buf[m / 2] : 0.5 * (buf[m / 2 - 1] + buf[m / 2]);
}

}  // namespace detail

// Snaps a bracket to the amplitude_fraction crossings of the plateau-to-
// plateau transition. Plateau levels come from the segments outside the
// bracket (median-robust); the inner 10% / 90% crossings pin the logistic's
// midpoint and rate, and the outer boundaries follow analytically. Noise
// barely moves the inner crossings because the transition is steep there.
inline std::pair<std::size_t, std::size_t> refine_event_boundaries(
    const Vec& y, std::size_t start, std::size_t end, std::size_t peak, const DetectConfig& cfg) {
  const std::size_t n = y.size();
  const double level_start = detail::median_of(y, 0, start);
  const double level_end = detail::median_of(y, end, n - 1);
  const double amplitude = level_end - level_start;
  if (std::abs(amplitude) < 1e-9) return {start, end};

  const double q_in = cfg.inner_fraction;
  auto fraction = [&](std::size_t k) { return (y[k] - level_start) / amplitude; };

  // first touch of the 10% level walking left from the peak, with linear
  // interpolation between frames
  double t10 = -1.0, t90 = -1.0;
  for (std::size_t k = std::min(peak, n - 1);; --k) {
    if (fraction(k) <= q_in) {
      const double f0 = fraction(k);
      const double f1 = k + 1 < n ? fraction(k + 1) : f0;
      const double frac = f1 > f0 ? (q_in - f0) / (f1 - f0) : 0.0;
      t10 = static_cast<double>(k) + std::clamp(frac, 0.0, 1.0);
      break;
    }
    if (k == 0) break;
  }
  for (std::size_t k = std::min(peak, n - 1); k < n; ++k) {
    if (fraction(k) >= 1.0 - q_in) {
      const double f1 = fraction(k);
      const double f0 = k > 0 ? fraction(k - 1) : f1;
      const double frac = f1 > f0 ? (1.0 - q_in - f0) / (f1 - f0) : 1.0;
      t90 = static_cast<double>(k) - 1.0 + std::clamp(frac, 0.0, 1.0);
      break;
    }
  }
  if (t10 < 0.0 || t90 <= t10) return {start, end};

  // logistic geometry: inner crossings are ln((1-q)/q)/k_rate from the
  // midpoint; scale out to the amplitude_fraction boundary
  const double inner_half = std::log((1.0 - q_in) / q_in);
  const double outer_half = std::log((1.0 - cfg.amplitude_fraction) / cfg.amplitude_fraction);
  const double mid = 0.5 * (t10 + t90);
  const double half_frames = 0.5 * (t90 - t10) * outer_half / inner_half;
  const auto s = static_cast<long long>(std::llround(mid - half_frames));
  const auto e = static_cast<long long>(std::llround(mid + half_frames));
  const std::size_t s_cl = static_cast<std::size_t>(std::max(0ll, s));
  const std::size_t e_cl = static_cast<std::size_t>(std::min<long long>(e, static_cast<long long>(n) - 1));
  if (s_cl >= e_cl) return {start, end};
  return {s_cl, e_cl};
}

// Iterative peak search: take the strongest remaining lateral-speed peak,
// bracket it, and accept only if the motion direction is consistent with the
// trajectory's net displacement, the bracket spans a lane line, and the
// amplitude is at least half a lane. Rejected peaks drop their whole
// above-threshold run so the next-best candidate is a distinct bump.
inline std::optional<LcEvent> detect_events(const Vec& y_lat, const DetectConfig& cfg = {}) {
  if (y_lat.size() < 3) return std::nullopt;
  const Vec v = lateral_speed(y_lat);
  std::vector<bool> rejected(v.size(), false);

  std::size_t rejections = 0;
  while (rejections < cfg.max_rejected_peaks) {
    std::size_t i_max = v.size();
    double best = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (rejected[i]) continue;
      if (std::abs(v[i]) > best) {
        best = std::abs(v[i]);
        i_max = i;
      }
    }
    if (i_max == v.size() || best <= cfg.delta) return std::nullopt;  // nothing moves laterally

    const double delta_eff = std::max(cfg.delta, cfg.peak_fraction * best);
    const double settle_eff = std::max(cfg.settle_dv, 0.3 * delta_eff);
    const auto left = search_boundary(v, y_lat, i_max, delta_eff, LaneChangeDirection::left,
                                      cfg.lane_width, settle_eff);
    const auto right = search_boundary(v, y_lat, i_max, delta_eff, LaneChangeDirection::right,
                                       cfg.lane_width, settle_eff);

    // v[i] covers the step i -> i+1, so boundary index i on the right maps to
    // frame i + 1.
    const std::size_t start = left.idx;
    const std::size_t end = std::min(right.idx + 1, y_lat.size() - 1);
    const bool sign_ok =
        detail::sgn_pos(v[i_max]) == detail::sgn_pos(y_lat.back() - y_lat.front());
    const bool lines_ok = detail::lane_line_in_segment(y_lat, start, end, cfg.lane_width);
    const bool amplitude_ok =
        std::abs(y_lat[end] - y_lat[start]) >= 0.5 * cfg.lane_width;

    if (sign_ok && lines_ok && amplitude_ok && start < end) {
      LcEvent ev;
      ev.start_idx = start;
      ev.end_idx = end;
      ev.peak_idx = i_max;
      if (cfg.refine_boundaries) {
        const auto [rs, re] = refine_event_boundaries(y_lat, start, end, i_max, cfg);
        ev.start_idx = rs;
        ev.end_idx = re;
        ev.peak_idx = std::clamp(i_max, rs, re);
      }
      ev.duration = static_cast<double>(ev.end_idx - ev.start_idx) * kDt;
      return ev;
    }

    // reject the contiguous above-threshold run around this peak
    std::size_t lo = i_max, hi = i_max;
    while (lo > 0 && std::abs(v[lo - 1]) > cfg.delta) --lo;
    while (hi + 1 < v.size() && std::abs(v[hi + 1]) > cfg.delta) ++hi;
    for (std::size_t i = lo; i <= hi; ++i) rejected[i] = true;
    ++rejections;
  }
  return std::nullopt;
}

struct DurationStats {
  double mu = 0.0;
  double sigma = 0.0;
  std::vector<double> residuals;  // empirical - fitted CDF at each sorted duration
};

inline DurationStats duration_stats(const std::vector<LcEvent>& events) {
  if (events.size() < 2) throw ConfigError("duration_stats: need at least 2 events");
  std::vector<double> durations;
  durations.reserve(events.size());
  for (const auto& e : events) durations.push_back(e.duration);
  const LognormalFit fit = lognormal_fit(durations);
  DurationStats out;
  out.mu = fit.mu;
  out.sigma = fit.sigma;
  out.residuals = cdf_residuals(durations, fit);
  return out;
}

}  // namespace lanecoop
