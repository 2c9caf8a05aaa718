#pragma once

// Seeded random effects, sharps, contexts and states for every backend.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "cosea/spectral.hpp"

namespace cosea {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : label) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return mix_seed(mix_seed(seed ^ h) + index);
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix, with the phases
/// of R's diagonal moved into Q.
inline Matrix haar_unitary(std::size_t d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(d);
  Matrix z(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mod = std::abs(r(k, k));
    if (mod > 0.0) q.col(k) *= r(k, k) / mod;
  }
  return q;
}

/// Draws random elements of one fixed algebra.
class Sampler {
 public:
  Sampler(Algebra E, std::uint64_t seed) : E_(std::move(E)), rng_(seed) {
    for (const Summand& s : E_.summands()) {
      if (s.full()) {
        bases_.emplace_back();
      } else {
        bases_.push_back(linalg::hermitian_part(linalg::generated_algebra(s.generators, s.dim), s.dim));
      }
    }
  }

  const Algebra& algebra() const { return E_; }
  Rng& rng() { return rng_; }
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  double scalar() { return uniform(); }
  bool coin(double p = 0.5) { return uniform() < p; }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  /// Random effect: U diag(uniform) U* (Hilbertian), i.i.d. uniform entries
  /// (classical), and a random function of a generic element for generated
  /// subalgebras.
  Effect effect() {
    return build([&](std::size_t) { return uniform(); });
  }

  /// Random sharp effect (each eigenvalue 0 or 1 with probability 1/2).
  Effect sharp() {
    return build([&](std::size_t) { return coin() ? 1.0 : 0.0; });
  }

  /// Random effect with each eigenvalue 0 with probability `p_zero`, else uniform.
  Effect sparse_effect(double p_zero) {
    return build([&](std::size_t) { return coin(p_zero) ? 0.0 : uniform(); });
  }

  /// Random effect with every eigenvalue uniform in [lo, hi].
  Effect effect_in(double lo, double hi) {
    return build([&](std::size_t) { return lo + (hi - lo) * uniform(); });
  }

  /// Random effect whose eigenvalues are drawn from `values`.
  Effect effect_with_values(const std::vector<double>& values) {
    return build([&](std::size_t) { return values[index(values.size())]; });
  }

  /// Random context: an independent eigenbasis per summand.
  Context context() {
    std::vector<Ray> rays;
    for (std::size_t i = 0; i < E_.arity(); ++i) {
      for (const CVector& v : block_basis(i)) rays.push_back({i, v});
    }
    return make_context(E_, std::move(rays));
  }

  /// Random one-dimensional sharp effect (summand chosen proportional to dimension).
  Effect one_dimensional() { return ray_effect(E_, ray()); }

  Ray ray() {
    std::size_t k = index(E_.total_dim());
    std::size_t block = 0;
    while (k >= E_.summand(block).dim) k -= E_.summand(block++).dim;
    return {block, block_basis(block)[k]};
  }

  /// Random state: Wishart-type densities and exponential weights per summand,
  /// normalized to total mass 1.
  State state() {
    std::exponential_distribution<double> ex(1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Component> parts;
    double total = 0.0;
    for (const Summand& s : E_.summands()) {
      const auto n = detail::idx(s.dim);
      if (s.backend == Backend::classical) {
        RealVector p(n);
        for (Eigen::Index k = 0; k < n; ++k) p(k) = ex(rng_);
        total += p.sum();
        parts.emplace_back(std::move(p));
      } else {
        Matrix z(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < n; ++j) z(i, j) = Complex(g(rng_), g(rng_));
        }
        Matrix rho = linalg::hermitize(z * z.adjoint());
        total += rho.trace().real();
        parts.emplace_back(std::move(rho));
      }
    }
    for (Component& c : parts) {
      if (auto* v = std::get_if<RealVector>(&c)) {
        *v /= total;
      } else {
        std::get<Matrix>(c) /= total;
      }
    }
    return State(std::move(parts));
  }

  /// A random function of `x` (constant on each eigenvalue cluster), so the
  /// result commutes with `x`.
  Effect function_of(const Effect& x) {
    const SpectralForm f = spectral_form(E_, x);
    Effect out = zero(E_);
    for (const SpectralTerm& t : f.terms) out = raw::lincomb(E_, 1.0, out, uniform(), t.eigeneffect);
    return settle(E_, out, "sampled function");
  }

 private:
  /// Orthonormal eigenbasis of one summand: a Haar basis for full Hilbertian
  /// summands, the standard basis for classical ones, and the eigenbasis of a
  /// generic element for generated subalgebras.
  std::vector<CVector> block_basis(std::size_t i) {
    const Summand& s = E_.summand(i);
    const auto n = detail::idx(s.dim);
    std::vector<CVector> out;
    if (s.backend == Backend::classical) {
      for (Eigen::Index k = 0; k < n; ++k) out.push_back(CVector::Unit(n, k));
      return out;
    }
    const Matrix u = s.full() ? haar_unitary(s.dim, rng_) : linalg::eigh(generic_element(i)).vectors;
    for (Eigen::Index k = 0; k < n; ++k) out.push_back(linalg::canonical_phase(u.col(k)));
    return out;
  }

  Matrix generic_element(std::size_t i) {
    std::normal_distribution<double> g(0.0, 1.0);
    RealVector c(static_cast<Eigen::Index>(bases_[i].size()));
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = g(rng_);
    return linalg::hermitize(linalg::combine(c, bases_[i]));
  }

  template <typename Draw>
  Effect build(Draw&& draw) {
    std::vector<Component> out;
    for (std::size_t i = 0; i < E_.arity(); ++i) {
      const Summand& s = E_.summand(i);
      const auto n = detail::idx(s.dim);
      if (s.backend == Backend::classical) {
        RealVector v(n);
        for (Eigen::Index k = 0; k < n; ++k) v(k) = draw(i);
        out.emplace_back(std::move(v));
      } else if (s.full()) {
        const Matrix u = haar_unitary(s.dim, rng_);
        RealVector ev(n);
        for (Eigen::Index k = 0; k < n; ++k) ev(k) = draw(i);
        out.emplace_back(Matrix(linalg::hermitize(u * ev.cast<Complex>().asDiagonal() * u.adjoint())));
      } else {
        // Assign one value per eigenvalue cluster of a generic element.
        const linalg::Eigh e = linalg::eigh(generic_element(i));
        RealVector ev(n);
        for (Eigen::Index k = 0; k < n; ++k) {
          ev(k) = (k > 0 && e.values(k) - e.values(k - 1) <= E_.tol().cluster) ? ev(k - 1) : draw(i);
        }
        out.emplace_back(Matrix(linalg::hermitize(e.vectors * ev.cast<Complex>().asDiagonal() * e.vectors.adjoint())));
      }
    }
    return settle(E_, Effect(std::move(out)), "sampled effect");
  }

  Algebra E_;
  Rng rng_;
  std::vector<std::vector<Matrix>> bases_;
};

}  // namespace cosea
