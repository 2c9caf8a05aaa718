#pragma once

// Spectral forms, spectra and norms, ceilings, pseudo-inverses and the
// inverse-preservation auditor.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "cosea/backends.hpp"

namespace cosea {

/// An eigenvalue together with one eigenvector (ray) of an effect.
struct EigenRay {
  double value = 0.0;
  Ray ray;
};

/// Every eigenpair of `b`: classical entries with point rays, Hilbertian
/// eigenvectors with canonical phase, concatenated over summands.
inline std::vector<EigenRay> eigen_rays(const Algebra& E, const Effect& b) {
  check_shape(E, b);
  std::vector<EigenRay> out;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const auto d = detail::idx(E.summand(i).dim);
    if (E.summand(i).backend == Backend::classical) {
      for (Eigen::Index k = 0; k < d; ++k) out.push_back({b.vec(i)(k), Ray{i, CVector::Unit(d, k)}});
    } else {
      const linalg::Eigh e = linalg::eigh(b.mat(i));
      for (Eigen::Index k = 0; k < d; ++k) {
        out.push_back({e.values(k), Ray{i, linalg::canonical_phase(e.vectors.col(k))}});
      }
    }
  }
  return out;
}

namespace detail {

/// Position of the first component of largest modulus (up to 1e-9).
inline Eigen::Index leading_index(const CVector& v) {
  const double top = v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) >= top - 1e-9) return k;
  }
  return 0;
}

/// Orders eigenpairs by summand, then by leading coordinate, then by
/// descending value. Diagonal inputs keep their natural order.
inline void order_rays(std::vector<EigenRay>& rays) {
  std::stable_sort(rays.begin(), rays.end(), [](const EigenRay& x, const EigenRay& y) {
    if (x.ray.block != y.ray.block) return x.ray.block < y.ray.block;
    const auto ix = leading_index(x.ray.vector);
    const auto iy = leading_index(y.ray.vector);
    if (ix != iy) return ix < iy;
    return x.value > y.value;
  });
}

inline Effect sum_of_rays(const Algebra& E, const std::vector<const Ray*>& rays) {
  Effect out = zero(E);
  for (const Ray* r : rays) out = raw::add(E, out, ray_effect(E, *r));
  return out;
}

}  // namespace detail

/// One cluster of the spectral form: value, sharp eigeneffect, rays spanning it.
struct SpectralTerm {
  double value = 0.0;
  Effect eigeneffect;
  std::vector<Ray> rays;
  std::size_t multiplicity() const { return rays.size(); }
};

struct SpectralForm {
  std::vector<SpectralTerm> terms;  // strictly descending values
  Context context;                  // refinement of the eigeneffects
  std::vector<double> coefficients; // eigenvalue of each context member
  double lambda = 0.0;              // smallest nonzero eigenvalue (0 for the zero effect)
  double min_value = 0.0;
  double max_value = 0.0;

  bool has_zero(double gap) const { return !terms.empty() && terms.back().value <= gap; }
};

/// b = sum_i lambda_i c_i with distinct lambda_i (eigenvalue 0 included),
/// clustered with the gap `tol().cluster`.
inline SpectralForm spectral_form(const Algebra& E, const Effect& b) {
  std::vector<EigenRay> pairs = eigen_rays(E, b);
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const EigenRay& x, const EigenRay& y) { return x.value < y.value; });
  std::vector<double> values;
  for (const EigenRay& p : pairs) values.push_back(p.value);
  const double gap = E.tol().cluster;
  const std::vector<linalg::Cluster> clusters = linalg::cluster_sorted(values, gap);

  SpectralForm f;
  for (auto it = clusters.rbegin(); it != clusters.rend(); ++it) {
    SpectralTerm t;
    t.value = it->value;
    std::vector<const Ray*> members;
    for (std::size_t k = it->begin; k < it->end; ++k) {
      t.rays.push_back(pairs[k].ray);
      members.push_back(&pairs[k].ray);
    }
    t.eigeneffect = settle(E, detail::sum_of_rays(E, members), "eigeneffect");
    f.terms.push_back(std::move(t));
  }
  f.max_value = f.terms.front().value;
  f.min_value = f.terms.back().value;
  for (const SpectralTerm& t : f.terms) {
    if (t.value > gap) f.lambda = t.value;
  }

  std::vector<EigenRay> ordered;
  for (const SpectralTerm& t : f.terms) {
    for (const Ray& r : t.rays) ordered.push_back({t.value, r});
  }
  detail::order_rays(ordered);
  std::vector<Ray> rays;
  for (const EigenRay& p : ordered) {
    rays.push_back(p.ray);
    f.coefficients.push_back(p.value);
  }
  f.context = make_context(E, std::move(rays));
  return f;
}

/// Sum of value * eigeneffect; raw, for reconstruction checks.
inline Effect reconstruct(const Algebra& E, const SpectralForm& f) {
  Effect out = zero(E);
  for (const SpectralTerm& t : f.terms) out = raw::lincomb(E, 1.0, out, t.value, t.eigeneffect);
  return out;
}

/// Sum of coefficient_k * member_k over a context; raw.
inline Effect combine_context(const Algebra& E, const Context& A, const std::vector<double>& coefficients) {
  if (coefficients.size() != A.size()) fail(ErrorCode::arity_mismatch, "one coefficient per context member");
  Effect out = zero(E);
  for (std::size_t k = 0; k < A.size(); ++k) out = raw::lincomb(E, 1.0, out, coefficients[k], A.members()[k]);
  return out;
}

struct ContextRepresentation {
  Context context;
  std::vector<double> coefficients;
};

inline ContextRepresentation context_representation(const Algebra& E, const Effect& b) {
  SpectralForm f = spectral_form(E, b);
  return {std::move(f.context), std::move(f.coefficients)};
}

struct SpectrumStats {
  std::vector<double> spectrum;  // distinct eigenvalues, ascending
  double min = 0.0;              // m(b)
  double max = 0.0;              // M(b)
  double norm = 0.0;             // equals M(b)
};

inline SpectrumStats spectrum_stats(const Algebra& E, const Effect& b) {
  const SpectralForm f = spectral_form(E, b);
  SpectrumStats s;
  for (auto it = f.terms.rbegin(); it != f.terms.rend(); ++it) s.spectrum.push_back(it->value);
  s.min = f.min_value;
  s.max = f.max_value;
  s.norm = f.max_value;
  return s;
}

inline double effect_norm(const Algebra& E, const Effect& b) { return spectrum_stats(E, b).norm; }

struct EigeneffectTest {
  bool holds = false;
  double value = 0.0;     // a-hat(b)
  double residual = 0.0;  // distance between b o a and a-hat(b) a
};

/// Whether the one-dimensional `a` is an eigeneffect of `b`: b o a = a-hat(b) a.
inline EigeneffectTest is_eigeneffect(const Algebra& E, const Effect& a, const Effect& b) {
  const State h = hat_state(E, a);
  EigeneffectTest t;
  t.value = evaluate(E, h, b);
  t.residual = distance(E, seq_raw(E, b, a), raw::scale(E, t.value, a));
  t.holds = t.residual <= E.tol().eq;
  return t;
}

/// Support projection: sum of the eigeneffects with nonzero eigenvalue.
inline Effect ceiling(const Algebra& E, const Effect& a) {
  const SpectralForm f = spectral_form(E, a);
  std::vector<const Ray*> rays;
  for (const SpectralTerm& t : f.terms) {
    if (t.value <= E.tol().cluster) continue;
    for (const Ray& r : t.rays) rays.push_back(&r);
  }
  return settle(E, detail::sum_of_rays(E, rays), "ceiling");
}

struct PseudoInverse {
  Effect inverse;
  double lambda = 0.0;
};

/// b = lambda(a) sum_k (1/mu_k) P_k over eigenvectors with nonzero eigenvalue
/// mu_k, where lambda(a) is the smallest of those eigenvalues. Throws ZeroEffect.
inline PseudoInverse pseudo_inverse(const Algebra& E, const Effect& a) {
  const std::vector<EigenRay> pairs = eigen_rays(E, a);
  const double gap = E.tol().cluster;
  std::vector<EigenRay> support;
  for (const EigenRay& p : pairs) {
    if (p.value > gap) support.push_back(p);
  }
  if (support.empty()) fail(ErrorCode::zero_effect, "the zero effect has no pseudo-inverse");
  double lambda = 1.0;
  for (const EigenRay& p : support) lambda = std::min(lambda, p.value);
  Effect out = zero(E);
  for (const EigenRay& p : support) {
    out = raw::lincomb(E, 1.0, out, lambda / p.value, ray_effect(E, p.ray));
  }
  return {settle(E, out, "pseudo-inverse"), lambda};
}

/// Smallest nonzero eigenvalue; 0 for the zero effect.
inline double smallest_nonzero_eigenvalue(const Algebra& E, const Effect& a) {
  double lambda = 0.0;
  for (const EigenRay& p : eigen_rays(E, a)) {
    if (p.value > E.tol().cluster && (lambda == 0.0 || p.value < lambda)) lambda = p.value;
  }
  return lambda;
}

inline double min_eigenvalue(const Algebra& E, const Effect& a) {
  double m = INFINITY;
  for (const EigenRay& p : eigen_rays(E, a)) m = std::min(m, p.value);
  return m;
}

inline bool is_invertible(const Algebra& E, const Effect& a) { return min_eigenvalue(E, a) > E.tol().cluster; }

struct InverseAudit {
  bool exact = false;
  bool proportional = false;
  double scalar = 0.0;  // lambda(a) lambda(b) / lambda(a o b)
  double lambda_a = 0.0;
  double lambda_b = 0.0;
  double lambda_ab = 0.0;
  double exact_residual = 0.0;         // distance((a o b)^-1, a^-1 o b^-1)
  double proportional_residual = 0.0;  // same after normalizing both to norm 1
  Effect lhs;                          // (a o b)^-1
  Effect rhs;                          // a^-1 o b^-1
};

/// Compares (a o b)^-1 with a^-1 o b^-1. Disagreement is reported, never thrown.
inline InverseAudit audit_inverse_preserving(const Algebra& E, const Effect& a, const Effect& b) {
  if (!is_invertible(E, a)) fail(ErrorCode::not_invertible, "first argument is not invertible");
  if (!is_invertible(E, b)) fail(ErrorCode::not_invertible, "second argument is not invertible");
  const Effect ab = seq(E, a, b);
  const PseudoInverse ia = pseudo_inverse(E, a);
  const PseudoInverse ib = pseudo_inverse(E, b);
  const PseudoInverse iab = pseudo_inverse(E, ab);
  InverseAudit r;
  r.lambda_a = ia.lambda;
  r.lambda_b = ib.lambda;
  r.lambda_ab = iab.lambda;
  r.lhs = iab.inverse;
  r.rhs = seq(E, ia.inverse, ib.inverse);
  r.exact_residual = distance(E, r.lhs, r.rhs);
  r.exact = r.exact_residual <= E.tol().eq;
  const double nl = effect_norm(E, r.lhs);
  const double nr = effect_norm(E, r.rhs);
  r.proportional_residual =
      distance(E, raw::scale(E, 1.0 / nl, r.lhs), raw::scale(E, 1.0 / nr, r.rhs));
  r.proportional = r.proportional_residual <= E.tol().eq;
  r.scalar = r.lambda_a * r.lambda_b / r.lambda_ab;
  return r;
}

}  // namespace cosea
