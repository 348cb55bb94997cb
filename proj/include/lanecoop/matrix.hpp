#pragma once

#include <cstddef>
#include <vector>

#include "lanecoop/common.hpp"

namespace lanecoop {

using Vec = std::vector<double>;

// Dense row-major matrix. Kept deliberately small: the models in this
// project are a few thousand parameters at most.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  std::size_t size() const { return data.size(); }
};

// y = W x
inline Vec matvec(const Matrix& w, const Vec& x) {
  if (x.size() != w.cols) throw ShapeError("matvec: vector length does not match matrix cols");
  Vec y(w.rows, 0.0);
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double* wi = w.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.cols; ++j) acc += wi[j] * x[j];
    y[i] = acc;
  }
  return y;
}

// y += W x
inline void matvec_add(const Matrix& w, const Vec& x, Vec& y) {
  if (x.size() != w.cols || y.size() != w.rows)
    throw ShapeError("matvec_add: dimension mismatch");
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double* wi = w.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.cols; ++j) acc += wi[j] * x[j];
    y[i] += acc;
  }
}

// y = W^T x  (W is rows x cols, x has rows entries, result has cols entries)
inline Vec matvec_transposed(const Matrix& w, const Vec& x) {
  if (x.size() != w.rows)
    throw ShapeError("matvec_transposed: vector length does not match matrix rows");
  Vec y(w.cols, 0.0);
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double* wi = w.row(i);
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < w.cols; ++j) y[j] += wi[j] * xi;
  }
  return y;
}

inline void matvec_transposed_add(const Matrix& w, const Vec& x, Vec& y) {
  if (x.size() != w.rows || y.size() != w.cols)
    throw ShapeError("matvec_transposed_add: dimension mismatch");
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double* wi = w.row(i);
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < w.cols; ++j) y[j] += wi[j] * xi;
  }
}

// W += a b^T
inline void add_outer(Matrix& w, const Vec& a, const Vec& b) {
  if (a.size() != w.rows || b.size() != w.cols)
    throw ShapeError("add_outer: dimension mismatch");
  for (std::size_t i = 0; i < w.rows; ++i) {
    double* wi = w.row(i);
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < w.cols; ++j) wi[j] += ai * b[j];
  }
}

inline void axpy(double alpha, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw ShapeError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline Vec concat(const Vec& a, const Vec& b) {
  Vec out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace lanecoop
