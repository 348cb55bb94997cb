#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lanecoop/matrix.hpp"

namespace lanecoop {

namespace detail {

// Solve A x = b in place, partial pivoting. Small systems only.
inline Vec solve_linear(Matrix a, Vec b) {
  const std::size_t n = a.rows;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-300) throw NumericError("solve_linear: singular system");
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a(col, k), a(piv, k));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a(r, k) -= f * a(col, k);
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a(i, k) * x[k];
    x[i] = acc / a(i, i);
  }
  return x;
}

// Least-squares polynomial fit over offsets, evaluated at offset 0.
// offsets[k] is the sample position relative to the point being filtered.
inline double polyfit_eval_at_zero(const std::vector<double>& offsets, const Vec& values,
                                   std::size_t order) {
  const std::size_t m = order + 1;
  Matrix ata(m, m);
  Vec atb(m, 0.0);
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    double pw = 1.0;
    std::vector<double> basis(m);
    for (std::size_t j = 0; j < m; ++j) {
      basis[j] = pw;
      pw *= offsets[k];
    }
    for (std::size_t r = 0; r < m; ++r) {
      atb[r] += basis[r] * values[k];
      for (std::size_t c = 0; c < m; ++c) ata(r, c) += basis[r] * basis[c];
    }
  }
  Vec coef = solve_linear(std::move(ata), std::move(atb));
  return coef[0];
}

}  // namespace detail

// Savitzky-Golay smoothing. Interior points use the shared center-point
// coefficients; edge points are fit on the truncated window so polynomials
// up to poly_order are reproduced exactly everywhere.
inline Vec savgol_filter(const Vec& signal, std::size_t window, std::size_t poly_order) {
  if (window % 2 == 0) throw ConfigError("savgol_filter: window must be odd");
  if (poly_order >= window) throw ConfigError("savgol_filter: poly_order must be < window");
  if (window > signal.size()) throw ConfigError("savgol_filter: window exceeds signal length");

  const std::size_t n = signal.size();
  const std::size_t half = window / 2;

  // center coefficients: out[i] = sum_k coef[k] * s[i - half + k]
  Vec center_coef(window, 0.0);
  {
    const std::size_t m = poly_order + 1;
    Matrix ata(m, m);
    for (std::size_t k = 0; k < window; ++k) {
      const double x = static_cast<double>(k) - static_cast<double>(half);
      double pw = 1.0;
      std::vector<double> basis(m);
      for (std::size_t j = 0; j < m; ++j) {
        basis[j] = pw;
        pw *= x;
      }
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) ata(r, c) += basis[r] * basis[c];
    }
    // coef_k = e0^T (A^T A)^-1 a_k
    Vec e0(m, 0.0);
    e0[0] = 1.0;
    Vec w0 = detail::solve_linear(ata, e0);
    for (std::size_t k = 0; k < window; ++k) {
      const double x = static_cast<double>(k) - static_cast<double>(half);
      double pw = 1.0, acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        acc += w0[j] * pw;
        pw *= x;
      }
      center_coef[k] = acc;
    }
  }

  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= half && i + half < n) {
      double acc = 0.0;
      for (std::size_t k = 0; k < window; ++k) acc += center_coef[k] * signal[i - half + k];
      out[i] = acc;
    } else {
      const std::size_t lo = i >= half ? i - half : 0;
      const std::size_t hi = std::min(n - 1, i + half);
      std::vector<double> offsets;
      Vec values;
      offsets.reserve(hi - lo + 1);
      values.reserve(hi - lo + 1);
      for (std::size_t k = lo; k <= hi; ++k) {
        offsets.push_back(static_cast<double>(k) - static_cast<double>(i));
        values.push_back(signal[k]);
      }
      const std::size_t fit_order = std::min<std::size_t>(poly_order, offsets.size() - 1);
      out[i] = detail::polyfit_eval_at_zero(offsets, values, fit_order);
    }
  }
  return out;
}

// Centered rolling median. For odd windows the window shrinks symmetrically
// near the edges (stays odd, so monotone runs pass through unchanged); even
// windows clamp to the signal bounds.
inline Vec rolling_median(const Vec& signal, std::size_t window) {
  if (window < 1) throw ConfigError("rolling_median: window must be >= 1");
  const std::size_t n = signal.size();
  Vec out(n);
  Vec buf;
  buf.reserve(window);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo, hi;
    if (window % 2 == 1) {
      const std::size_t k = std::min({window / 2, i, n - 1 - i});
      lo = i - k;
      hi = i + k;
    } else {
      const std::size_t half_lo = (window - 1) / 2;
      lo = i >= half_lo ? i - half_lo : 0;
      hi = std::min(n - 1, i + window / 2);
    }
    buf.assign(signal.begin() + lo, signal.begin() + hi + 1);
    std::sort(buf.begin(), buf.end());
    const std::size_t m = buf.size();
    out[i] = m % 2 == 1 ? buf[m / 2] : 0.5 * (buf[m / 2 - 1] + buf[m / 2]);
  }
  return out;
}

}  // namespace lanecoop
