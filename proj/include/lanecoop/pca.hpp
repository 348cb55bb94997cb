#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lanecoop/matrix.hpp"

namespace lanecoop {

// Cyclic Jacobi rotations for a symmetric matrix. Returns eigenvalues and
// the matrix whose ROWS are the corresponding eigenvectors, sorted by
// descending eigenvalue.
inline void jacobi_eigen_symmetric(Matrix a, Vec& eigenvalues, Matrix& eigenvectors,
                                   double tol = 1e-12, std::size_t max_sweeps = 100) {
  const std::size_t n = a.rows;
  if (a.cols != n) throw ShapeError("jacobi: matrix not square");
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (std::size_t sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= tol * 1e-4) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  eigenvalues.assign(n, 0.0);
  eigenvectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    eigenvalues[r] = a(order[r], order[r]);
    // canonical sign: largest-magnitude entry positive
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double mag = std::abs(v(k, order[r]));
      if (mag > best) {
        best = mag;
        arg = k;
      }
    }
    const double sign = v(arg, order[r]) >= 0.0 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) eigenvectors(r, k) = sign * v(k, order[r]);
  }
}

struct PcaModel {
  Vec mean;
  Matrix components;        // n_components x dim, orthonormal rows
  Vec explained_variance;   // non-increasing
};

inline PcaModel pca_fit(const Matrix& data, std::size_t n_components) {
  const std::size_t n = data.rows, d = data.cols;
  if (n_components < 1 || n_components > d)
    throw ConfigError("pca_fit: n_components must be in [1, cols]");
  if (n < n_components) throw ConfigError("pca_fit: need rows >= n_components");

  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += data(i, j);
  for (double& m : model.mean) m /= static_cast<double>(n);

  Matrix cov(d, d);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double xj = data(i, j) - model.mean[j];
      for (std::size_t k = j; k < d; ++k)
        cov(j, k) += xj * (data(i, k) - model.mean[k]) / denom;
    }
  }
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < j; ++k) cov(j, k) = cov(k, j);

  Vec eigvals;
  Matrix eigvecs;
  jacobi_eigen_symmetric(cov, eigvals, eigvecs);

  model.components = Matrix(n_components, d);
  model.explained_variance.assign(n_components, 0.0);
  for (std::size_t r = 0; r < n_components; ++r) {
    model.explained_variance[r] = eigvals[r];
    for (std::size_t k = 0; k < d; ++k) model.components(r, k) = eigvecs(r, k);
  }
  return model;
}

inline Vec pca_project(const PcaModel& m, const Vec& x) {
  Vec centered(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) centered[i] = x[i] - m.mean[i];
  return matvec(m.components, centered);
}

inline Vec pca_reconstruct(const PcaModel& m, const Vec& z) {
  Vec x = matvec_transposed(m.components, z);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += m.mean[i];
  return x;
}

}  // namespace lanecoop
