#pragma once

// The backend-independent effect-algebra interface: orthogonal sum,
// complement, difference, scalar multiple, order and sequential product.

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "cosea/algebra.hpp"

namespace cosea {

namespace detail {

inline Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

inline void check_component(const Summand& s, const Component& c, std::size_t i) {
  const bool ok = s.backend == Backend::classical
                      ? std::holds_alternative<RealVector>(c) && std::get<RealVector>(c).size() == idx(s.dim)
                      : std::holds_alternative<Matrix>(c) && std::get<Matrix>(c).rows() == idx(s.dim) &&
                            std::get<Matrix>(c).cols() == idx(s.dim);
  if (!ok) fail(ErrorCode::backend_mismatch, "component " + std::to_string(i) + " does not match summand");
}

/// Applies `fc` (classical) or `fh` (Hilbertian) to matching components of
/// several effects and collects the results into a new effect.
template <typename FC, typename FH, typename... Es>
Effect map_components(const Algebra& E, FC&& fc, FH&& fh, const Es&... es) {
  std::vector<Component> out;
  out.reserve(E.arity());
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::classical) {
      out.emplace_back(RealVector(fc(std::get<RealVector>(es[i])...)));
    } else {
      out.emplace_back(Matrix(fh(std::get<Matrix>(es[i])...)));
    }
  }
  return Effect(std::move(out));
}

}  // namespace detail

/// Throws BackendMismatch unless `a` has one payload per summand of the right shape.
inline void check_shape(const Algebra& E, const Effect& a) {
  if (a.arity() != E.arity()) {
    fail(ErrorCode::backend_mismatch, "effect has " + std::to_string(a.arity()) + " components, algebra has " +
                                          std::to_string(E.arity()));
  }
  for (std::size_t i = 0; i < E.arity(); ++i) detail::check_component(E.summand(i), a[i], i);
}

inline Effect constant(const Algebra& E, double value) {
  std::vector<Component> out;
  for (const Summand& s : E.summands()) {
    const auto n = detail::idx(s.dim);
    if (s.backend == Backend::classical) {
      out.emplace_back(RealVector(RealVector::Constant(n, value)));
    } else {
      out.emplace_back(Matrix(Matrix::Identity(n, n) * value));
    }
  }
  return Effect(std::move(out));
}

inline Effect zero(const Algebra& E) { return constant(E, 0.0); }
inline Effect unit(const Algebra& E) { return constant(E, 1.0); }

/// Unvalidated linear arithmetic on payloads. Results need not be effects.
namespace raw {

inline Effect lincomb(const Algebra& E, double alpha, const Effect& a, double beta, const Effect& b) {
  return detail::map_components(
      E, [&](const RealVector& x, const RealVector& y) { return RealVector(alpha * x + beta * y); },
      [&](const Matrix& x, const Matrix& y) { return Matrix(alpha * x + beta * y); }, a, b);
}

inline Effect add(const Algebra& E, const Effect& a, const Effect& b) { return lincomb(E, 1.0, a, 1.0, b); }
inline Effect sub(const Algebra& E, const Effect& a, const Effect& b) { return lincomb(E, 1.0, a, -1.0, b); }
inline Effect scale(const Algebra& E, double lambda, const Effect& a) { return lincomb(E, lambda, a, 0.0, a); }

}  // namespace raw

/// Max over summands of the max-abs (classical) or Frobenius (Hilbertian)
/// distance.
inline double distance(const Algebra& E, const Effect& a, const Effect& b) {
  check_shape(E, a);
  check_shape(E, b);
  double d = 0.0;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::classical) {
      d = std::max(d, (a.vec(i) - b.vec(i)).cwiseAbs().maxCoeff());
    } else {
      d = std::max(d, (a.mat(i) - b.mat(i)).norm());
    }
  }
  return d;
}

inline double norm_of(const Algebra& E, const Effect& a) { return distance(E, a, zero(E)); }

inline bool equal(const Algebra& E, const Effect& a, const Effect& b) { return distance(E, a, b) <= E.tol().eq; }

/// How far `a <= b` fails: the largest negative part of b - a (0 when it holds).
inline double order_violation(const Algebra& E, const Effect& a, const Effect& b) {
  check_shape(E, a);
  check_shape(E, b);
  double v = 0.0;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::classical) {
      v = std::max(v, -(b.vec(i) - a.vec(i)).minCoeff());
    } else {
      v = std::max(v, -linalg::min_eigenvalue(b.mat(i) - a.mat(i)));
    }
  }
  return v;
}

/// a <= b: pointwise within eq (classical), PSD difference within psd (Hilbertian).
inline bool le(const Algebra& E, const Effect& a, const Effect& b) {
  check_shape(E, a);
  check_shape(E, b);
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::classical) {
      if ((b.vec(i) - a.vec(i)).minCoeff() < -E.tol().eq) return false;
    } else {
      if (linalg::min_eigenvalue(b.mat(i) - a.mat(i)) < -E.tol().psd) return false;
    }
  }
  return true;
}

/// Validates that a raw value lies in the unit interval (within tolerance)
/// and clamps it there. Throws NotHermitian or OutOfInterval.
inline Effect settle(const Algebra& E, const Effect& a, const std::string& what = "result") {
  check_shape(E, a);
  const Tolerances& tol = E.tol();
  std::vector<Component> out;
  double clamped = a.clamped();
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::classical) {
      const RealVector& v = a.vec(i);
      if (v.size() > 0 && (v.minCoeff() < -tol.eq || v.maxCoeff() > 1.0 + tol.eq)) {
        fail(ErrorCode::out_of_interval, what + " has entries outside [0,1]");
      }
      RealVector c = v.cwiseMax(0.0).cwiseMin(1.0);
      clamped = std::max(clamped, (c - v).cwiseAbs().maxCoeff());
      out.emplace_back(std::move(c));
    } else {
      const Matrix& m = a.mat(i);
      if ((m - m.adjoint()).norm() > tol.eq) fail(ErrorCode::not_hermitian, what + " is not Hermitian");
      const linalg::Eigh e = linalg::eigh(m);
      const double lo = e.values.minCoeff();
      const double hi = e.values.maxCoeff();
      if (lo < -tol.psd || hi > 1.0 + tol.psd) {
        fail(ErrorCode::out_of_interval, what + " has eigenvalues outside [0,1] (" + std::to_string(lo) + ", " +
                                             std::to_string(hi) + ")");
      }
      if (lo < 0.0 || hi > 1.0) {
        clamped = std::max({clamped, -lo, hi - 1.0});
        out.emplace_back(linalg::apply(e, [](double x) { return std::clamp(x, 0.0, 1.0); }));
      } else {
        out.emplace_back(linalg::hermitize(m));
      }
    }
  }
  return Effect(std::move(out), clamped);
}

inline Effect complement(const Algebra& E, const Effect& a) {
  check_shape(E, a);
  return settle(E, raw::sub(E, unit(E), a), "complement");
}

/// a is orthogonal to b when a <= b'.
inline bool orthogonal(const Algebra& E, const Effect& a, const Effect& b) {
  return le(E, a, raw::sub(E, unit(E), b));
}

/// a + b, defined when a is orthogonal to b. Throws NotOrthogonal.
inline Effect oplus(const Algebra& E, const Effect& a, const Effect& b) {
  check_shape(E, a);
  check_shape(E, b);
  if (!orthogonal(E, a, b)) fail(ErrorCode::not_orthogonal, "a + b exceeds the unit");
  return settle(E, raw::add(E, a, b), "orthogonal sum");
}

/// b - c computed as (c + b')', defined when c <= b. Throws NotDominated.
inline Effect ominus(const Algebra& E, const Effect& b, const Effect& c) {
  check_shape(E, b);
  check_shape(E, c);
  if (!le(E, c, b)) fail(ErrorCode::not_dominated, "subtrahend is not below the minuend");
  return complement(E, oplus(E, c, complement(E, b)));
}

inline Effect scalar(const Algebra& E, double lambda, const Effect& a) {
  check_shape(E, a);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    fail(ErrorCode::scalar_out_of_range, "scalar " + std::to_string(lambda) + " is outside [0,1]");
  }
  return settle(E, raw::scale(E, lambda, a), "scalar multiple");
}

/// Raw sequential product: pointwise product (classical), A^{1/2} B A^{1/2}
/// (Hilbertian), componentwise for sums.
inline Effect seq_raw(const Algebra& E, const Effect& a, const Effect& b) {
  check_shape(E, a);
  check_shape(E, b);
  return detail::map_components(
      E, [](const RealVector& x, const RealVector& y) { return RealVector(x.cwiseProduct(y)); },
      [](const Matrix& x, const Matrix& y) {
        const Matrix r = linalg::psd_sqrt(x);
        return Matrix(linalg::hermitize(r * y * r));
      },
      a, b);
}

inline Effect seq(const Algebra& E, const Effect& a, const Effect& b) {
  return settle(E, seq_raw(E, a, b), "sequential product");
}

/// Largest operator norm of AB - BA over Hilbertian summands (0 for classical).
inline double commutator_norm(const Algebra& E, const Effect& a, const Effect& b) {
  check_shape(E, a);
  check_shape(E, b);
  double r = 0.0;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::hilbertian) {
      r = std::max(r, linalg::spectral_norm(a.mat(i) * b.mat(i) - b.mat(i) * a.mat(i)));
    }
  }
  return r;
}

/// a | b via the commutator criterion.
inline bool commutes(const Algebra& E, const Effect& a, const Effect& b) {
  return commutator_norm(E, a, b) <= E.tol().eq;
}

/// a | b via a o b = b o a; slower cross-check of `commutes`.
inline bool commutes_by_product(const Algebra& E, const Effect& a, const Effect& b) {
  return distance(E, seq_raw(E, a, b), seq_raw(E, b, a)) <= E.tol().eq;
}

/// Block-diagonal matrix of dimension E.total_dim(); classical payloads go on the diagonal.
inline Matrix embed(const Algebra& E, const Effect& a) {
  check_shape(E, a);
  const auto n = detail::idx(E.total_dim());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const auto off = detail::idx(E.offset(i));
    const auto d = detail::idx(E.summand(i).dim);
    if (E.summand(i).backend == Backend::classical) {
      m.block(off, off, d, d) = a.vec(i).cast<Complex>().asDiagonal();
    } else {
      m.block(off, off, d, d) = a.mat(i);
    }
  }
  return m;
}

/// Inverse of `embed`: keeps the diagonal blocks (the diagonal for classical summands).
inline Effect extract(const Algebra& E, const Matrix& m) {
  std::vector<Component> out;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const auto off = detail::idx(E.offset(i));
    const auto d = detail::idx(E.summand(i).dim);
    if (E.summand(i).backend == Backend::classical) {
      out.emplace_back(RealVector(m.block(off, off, d, d).diagonal().real()));
    } else {
      out.emplace_back(linalg::hermitize(m.block(off, off, d, d)));
    }
  }
  return Effect(std::move(out));
}

}  // namespace cosea
