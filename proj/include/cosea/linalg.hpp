#pragma once

// Dense Hermitian helpers on top of Eigen. Everything here works on small
// matrices (dimension well below 100), so clarity wins over blocking.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace cosea {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

namespace linalg {

inline Matrix hermitize(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

struct Eigh {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns
};

inline Eigh eigh(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

inline double min_eigenvalue(const Matrix& m) {
  return m.size() == 0 ? 0.0 : eigenvalues(m).minCoeff();
}

inline double max_eigenvalue(const Matrix& m) {
  return m.size() == 0 ? 0.0 : eigenvalues(m).maxCoeff();
}

/// f(M) for Hermitian M through its eigendecomposition.
template <typename F>
Matrix apply(const Eigh& e, F&& f) {
  RealVector mapped = e.values.unaryExpr([&](double x) { return static_cast<double>(f(x)); });
  return e.vectors * mapped.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

template <typename F>
Matrix apply(const Matrix& m, F&& f) {
  return apply(eigh(m), std::forward<F>(f));
}

/// Eigenvalues below the backward-error level of the eigensolver are treated
/// as zero; otherwise a 1e-16 roundoff eigenvalue would contribute 1e-8.
inline Matrix psd_sqrt(const Matrix& m) {
  if (m.size() == 0) return m;
  const Eigh e = eigh(m);
  const double scale = e.values.cwiseAbs().maxCoeff();
  const double cutoff = 16.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(m.rows()) * scale;
  RealVector f(e.values.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = e.values(k) > cutoff ? std::sqrt(e.values(k)) : 0.0;
  return hermitize(e.vectors * f.cast<Complex>().asDiagonal() * e.vectors.adjoint());
}

/// Largest singular value.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

inline Matrix projector(const CVector& v) { return v * v.adjoint(); }

/// Rotates the phase of `v` so its first component of modulus above `tol`
/// is real and positive. Rays have no phase; this fixes a representative.
inline CVector canonical_phase(CVector v, double tol = 1e-8) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mod = std::abs(v(i));
    if (mod > tol) {
      v *= std::conj(v(i)) / mod;
      v(i) = Complex(mod, 0.0);
      break;
    }
  }
  return v;
}

/// Half-open index range [begin, end) into an ascending sequence.
struct Cluster {
  std::size_t begin = 0;
  std::size_t end = 0;
  double value = 0.0;  // mean of the clustered entries
  std::size_t size() const { return end - begin; }
};

/// Single-linkage clustering of an ascending sequence: a new cluster starts
/// whenever consecutive entries differ by more than `gap`.
inline std::vector<Cluster> cluster_sorted(const std::vector<double>& ascending, double gap) {
  std::vector<Cluster> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= ascending.size(); ++i) {
    if (i == ascending.size() || ascending[i] - ascending[i - 1] > gap) {
      Cluster c{start, i, 0.0};
      for (std::size_t k = start; k < i; ++k) c.value += ascending[k];
      c.value /= static_cast<double>(i - start);
      out.push_back(c);
      start = i;
    }
  }
  return out;
}

/// Nearest unitary in Frobenius norm (the unitary polar factor).
inline Matrix polar_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline double unitarity_defect(const Matrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

/// Frobenius-orthonormal basis of the real space of d x d Hermitian matrices.
inline std::vector<Matrix> hermitian_basis(std::size_t d) {
  std::vector<Matrix> out;
  out.reserve(d * d);
  const auto n = static_cast<Eigen::Index>(d);
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Matrix m = Matrix::Zero(n, n);
    m(i, i) = 1.0;
    out.push_back(m);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Matrix re = Matrix::Zero(n, n);
      re(i, j) = r;
      re(j, i) = r;
      out.push_back(re);
      Matrix im = Matrix::Zero(n, n);
      im(i, j) = Complex(0.0, -r);
      im(j, i) = Complex(0.0, r);
      out.push_back(im);
    }
  }
  return out;
}

/// Orthonormal basis (columns) of the numerical kernel of `a`; singular values
/// at or below `cutoff * max(1, largest)` count as zero.
inline RealMatrix kernel(const RealMatrix& a, double cutoff) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return RealMatrix::Identity(n, n);
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff * scale) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

/// Orthonormal basis (columns) of the column span of `a`.
inline RealMatrix range(const RealMatrix& a, double cutoff) {
  if (a.cols() == 0) return RealMatrix(a.rows(), 0);
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullU);
  const RealVector& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff * scale) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

/// Real coordinates of a (Hermitian part of a) matrix in `basis`.
inline RealVector coordinates(const Matrix& m, const std::vector<Matrix>& basis) {
  RealVector c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    c(static_cast<Eigen::Index>(k)) = (basis[k].adjoint() * m).trace().real();
  }
  return c;
}

inline Matrix combine(const RealVector& coeffs, const std::vector<Matrix>& basis) {
  Matrix out = Matrix::Zero(basis.front().rows(), basis.front().cols());
  for (std::size_t k = 0; k < basis.size(); ++k) out += coeffs(static_cast<Eigen::Index>(k)) * basis[k];
  return out;
}

/// Orthonormal complex basis of the unital algebra generated by `gens`
/// (closure of span{I, gens} under multiplication).
inline std::vector<Matrix> generated_algebra(const std::vector<Matrix>& gens, std::size_t d,
                                             double cutoff = 1e-9) {
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<Matrix> basis;
  auto try_add = [&](Matrix m) {
    const double norm0 = m.norm();
    if (norm0 <= cutoff) return false;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Matrix& b : basis) m -= (b.adjoint() * m).trace() * b;
    }
    const double norm = m.norm();
    if (norm <= cutoff * std::max(1.0, norm0)) return false;
    basis.push_back(m / norm);
    return true;
  };
  try_add(Matrix::Identity(n, n));
  for (const Matrix& g : gens) try_add(g);
  for (std::size_t i = 0; i < basis.size() && basis.size() < d * d; ++i) {
    for (const Matrix& g : gens) {
      try_add(basis[i] * g);
      try_add(g * basis[i]);
    }
  }
  return basis;
}

/// Orthonormal basis of the Hermitian matrices in the real span of
/// {X, iX : X in complex_basis}; the input should be closed under adjoint.
inline std::vector<Matrix> hermitian_part(const std::vector<Matrix>& complex_basis, std::size_t d,
                                          double cutoff = 1e-9) {
  const std::vector<Matrix> herm = hermitian_basis(d);
  RealMatrix coords(static_cast<Eigen::Index>(herm.size()),
                    static_cast<Eigen::Index>(2 * complex_basis.size()));
  for (std::size_t k = 0; k < complex_basis.size(); ++k) {
    const Matrix& x = complex_basis[k];
    coords.col(static_cast<Eigen::Index>(2 * k)) = coordinates(hermitize(x), herm);
    coords.col(static_cast<Eigen::Index>(2 * k + 1)) = coordinates(hermitize(Complex(0, 1) * x), herm);
  }
  const RealMatrix span = range(coords, cutoff);
  std::vector<Matrix> out;
  for (Eigen::Index c = 0; c < span.cols(); ++c) out.push_back(combine(span.col(c), herm));
  return out;
}

}  // namespace linalg
}  // namespace cosea
