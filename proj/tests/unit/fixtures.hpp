#pragma once

#include <cmath>
#include <vector>

#include "broadcastlab/operators.hpp"

namespace fx {

using broadcastlab::Complex;
using broadcastlab::Matrix;

inline Matrix sx() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix sy() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline Matrix sz() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline Matrix ket_proj(Eigen::Index d, Eigen::Index k) {
  Matrix m = Matrix::Zero(d, d);
  m(k, k) = 1.0;
  return m;
}
inline Matrix plus() {
  Matrix m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  return m;
}
inline Matrix minus() {
  Matrix m(2, 2);
  m << 0.5, -0.5, -0.5, 0.5;
  return m;
}
inline Matrix diag(std::vector<double> v) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

}  // namespace fx
