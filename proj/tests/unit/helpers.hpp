#pragma once

#include <cmath>
#include <initializer_list>

#include <gtest/gtest.h>

#include "cosea/cosea.hpp"

namespace th {

using namespace cosea;

inline Matrix diag(std::initializer_list<double> values) {
  RealVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v.cast<Complex>().asDiagonal();
}

inline Matrix real(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline RealVector vec(std::initializer_list<double> values) {
  RealVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v(k++) = x;
  return v;
}

inline Effect H(const Matrix& m) { return make_hilbertian_effect(static_cast<std::size_t>(m.rows()), m); }
inline Effect C(const RealVector& v) { return make_classical_effect(static_cast<std::size_t>(v.size()), v); }

/// P(v) for a real unit vector.
inline Effect projector(std::initializer_list<double> v) {
  CVector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double c : v) x(k++) = c;
  x /= x.norm();
  return H(x * x.adjoint());
}

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

/// Expects `fn` to throw cosea::Error with `code`.
template <typename F>
void expect_code(F&& fn, ErrorCode code) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace th
