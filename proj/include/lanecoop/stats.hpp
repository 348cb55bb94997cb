#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lanecoop/common.hpp"

namespace lanecoop {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Population (1/n) standard deviation.
inline double stddev(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct LognormalFit {
  double mu = 0.0;
  double sigma = 0.0;
};

// Maximum-likelihood fit of ln(s) ~ Normal(mu, sigma).
inline LognormalFit lognormal_fit(const std::vector<double>& samples) {
  if (samples.size() < 2) throw ConfigError("lognormal_fit: need at least 2 samples");
  std::vector<double> logs;
  logs.reserve(samples.size());
  for (double s : samples) {
    if (!(s > 0.0)) throw NumericError("lognormal_fit: non-positive sample");
    logs.push_back(std::log(s));
  }
  LognormalFit f;
  f.mu = mean(logs);
  f.sigma = stddev(logs);
  return f;
}

inline double lognormal_cdf(double x, const LognormalFit& f) {
  if (x <= 0.0) return 0.0;
  if (f.sigma == 0.0) return std::log(x) < f.mu ? 0.0 : 1.0;
  return normal_cdf((std::log(x) - f.mu) / f.sigma);
}

// Empirical-minus-fitted CDF deviations at each sorted sample.
inline std::vector<double> cdf_residuals(std::vector<double> samples, const LognormalFit& f) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  std::vector<double> res(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double empirical = (static_cast<double>(i) + 1.0) / n;
    res[i] = empirical - lognormal_cdf(samples[i], f);
  }
  return res;
}

}  // namespace lanecoop
