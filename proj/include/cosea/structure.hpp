#pragma once

// Commutants, the center, central splits, factor decomposition, joint
// contexts and atoms of commuting families.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "cosea/sampling.hpp"
#include "cosea/spectral.hpp"

namespace cosea {

/// Linearly independent self-adjoint elements spanning a commutant. Elements
/// are raw payloads (not necessarily effects), Frobenius-orthonormal within
/// each Hilbertian summand.
struct CommutantBasis {
  std::vector<Effect> elements;
  /// Classical summands: the outcome blocks (one per element supported there).
  std::vector<std::vector<std::size_t>> partition;
  std::size_t generator_count = 0;
  double rank_cutoff = 0.0;

  std::size_t size() const { return elements.size(); }
};

inline bool in_commutant(const Algebra& E, const Effect& b, const std::vector<Effect>& F) {
  check_shape(E, b);
  return std::all_of(F.begin(), F.end(), [&](const Effect& a) { return commutes(E, b, a); });
}

namespace detail {

/// Frobenius-orthonormal Hermitian basis of the real span of summand `i`.
inline std::vector<Matrix> summand_span(const Summand& s) {
  if (s.full()) return linalg::hermitian_basis(s.dim);
  return linalg::hermitian_part(linalg::generated_algebra(s.generators, s.dim), s.dim);
}

/// Elements X of span(basis) with XA = AX for every A in `mats`.
inline std::vector<Matrix> commuting_span(const std::vector<Matrix>& basis, const std::vector<Matrix>& mats,
                                          std::size_t d, double cutoff) {
  const std::vector<Matrix> herm = linalg::hermitian_basis(d);
  const auto unknowns = static_cast<Eigen::Index>(basis.size());
  const auto rows_per = static_cast<Eigen::Index>(herm.size());
  RealMatrix system(rows_per * static_cast<Eigen::Index>(mats.size()), unknowns);
  for (std::size_t m = 0; m < mats.size(); ++m) {
    for (Eigen::Index k = 0; k < unknowns; ++k) {
      const Matrix& x = basis[static_cast<std::size_t>(k)];
      // i[X, A] is Hermitian, so its coordinates in `herm` are real.
      const Matrix c = Complex(0.0, 1.0) * (x * mats[m] - mats[m] * x);
      system.block(rows_per * static_cast<Eigen::Index>(m), k, rows_per, 1) = linalg::coordinates(c, herm);
    }
  }
  const RealMatrix ker = linalg::kernel(system, cutoff);
  std::vector<Matrix> out;
  for (Eigen::Index c = 0; c < ker.cols(); ++c) out.push_back(linalg::hermitize(linalg::combine(ker.col(c), basis)));
  return out;
}

inline Effect embed_component(const Algebra& E, std::size_t i, Component c) {
  Effect out = zero(E);
  out[i] = std::move(c);
  return out;
}

}  // namespace detail

/// Basis of {X in E : XA = AX for all A in F}, summand by summand. Classical
/// summands contribute their outcome indicators.
inline CommutantBasis commutant_basis(const Algebra& E, const std::vector<Effect>& F) {
  for (const Effect& a : F) check_shape(E, a);
  CommutantBasis out;
  out.generator_count = F.size();
  out.rank_cutoff = E.tol().rank;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const Summand& s = E.summand(i);
    const auto n = detail::idx(s.dim);
    if (s.backend == Backend::classical) {
      for (Eigen::Index k = 0; k < n; ++k) {
        out.elements.push_back(detail::embed_component(E, i, RealVector(RealVector::Unit(n, k))));
        out.partition.push_back({E.offset(i) + static_cast<std::size_t>(k)});
      }
      continue;
    }
    std::vector<Matrix> mats;
    for (const Effect& a : F) mats.push_back(a.mat(i));
    for (Matrix& x : detail::commuting_span(detail::summand_span(s), mats, s.dim, E.tol().rank)) {
      out.elements.push_back(detail::embed_component(E, i, std::move(x)));
    }
  }
  return out;
}

/// Self-adjoint generators of each summand as effects of E (the spanning
/// panel for full summands, the generator list otherwise).
inline std::vector<Effect> generating_panel(const Algebra& E) {
  std::vector<Effect> out;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const Summand& s = E.summand(i);
    if (s.backend == Backend::classical) continue;
    const std::vector<Matrix> mats = s.full() ? linalg::hermitian_basis(s.dim) : s.generators;
    for (const Matrix& m : mats) out.push_back(detail::embed_component(E, i, Matrix(m)));
  }
  return out;
}

/// Basis of the center: elements of E commuting with all of E.
inline CommutantBasis center_basis(const Algebra& E) {
  CommutantBasis c = commutant_basis(E, generating_panel(E));
  c.generator_count = generating_panel(E).size();
  return c;
}

inline bool is_factor(const Algebra& E) { return center_basis(E).size() == 1; }

/// Distance from `a` to the real span of E (nonzero only for generated subalgebras).
inline double membership_residual(const Algebra& E, const Effect& a) {
  check_shape(E, a);
  double r = 0.0;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const Summand& s = E.summand(i);
    if (s.full()) continue;
    const std::vector<Matrix> span = detail::summand_span(s);
    r = std::max(r, (a.mat(i) - linalg::combine(linalg::coordinates(a.mat(i), span), span)).norm());
  }
  return r;
}

/// Central: a lies in E and commutes with every generator of E.
inline bool is_central(const Algebra& E, const Effect& a) {
  return membership_residual(E, a) <= E.tol().eq && in_commutant(E, a, generating_panel(E));
}

namespace detail {

/// Rays spanning the range of a sharp effect (eigenvectors above 1/2).
inline std::vector<Ray> range_rays(const Algebra& E, const Effect& p) {
  std::vector<Ray> out;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const auto d = idx(E.summand(i).dim);
    if (E.summand(i).backend == Backend::classical) {
      for (Eigen::Index k = 0; k < d; ++k) {
        if (p.vec(i)(k) > 0.5) out.push_back({i, CVector::Unit(d, k)});
      }
    } else {
      const linalg::Eigh e = linalg::eigh(p.mat(i));
      for (Eigen::Index k = 0; k < d; ++k) {
        if (e.values(k) > 0.5) out.push_back({i, e.vectors.col(k)});
      }
    }
  }
  return out;
}

/// The exact projection onto the range of an approximately sharp effect.
inline Effect sharpen(const Algebra& E, const Effect& p) {
  const std::vector<Ray> rays = range_rays(E, p);
  std::vector<const Ray*> ptrs;
  for (const Ray& r : rays) ptrs.push_back(&r);
  return settle(E, sum_of_rays(E, ptrs), "projection");
}

/// Position of the first outcome (in the block-diagonal embedding) that `p` charges.
inline std::size_t first_position(const Algebra& E, const Effect& p) {
  const Matrix m = embed(E, p);
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    if (m(k, k).real() > 1e-6) return static_cast<std::size_t>(k);
  }
  return static_cast<std::size_t>(m.rows());
}

inline void sort_projections(const Algebra& E, std::vector<Effect>& ps) {
  std::stable_sort(ps.begin(), ps.end(), [&](const Effect& x, const Effect& y) {
    return first_position(E, x) < first_position(E, y);
  });
}

/// Trace pairing <x, y> summed over summands.
inline double pairing(const Algebra& E, const Effect& x, const Effect& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::classical) {
      s += x.vec(i).dot(y.vec(i));
    } else {
      s += (x.mat(i) * y.mat(i)).trace().real();
    }
  }
  return s;
}

}  // namespace detail

/// Minimal projections of the center, found as the spectral projections of a
/// random combination of the center basis. Retries with fresh coefficients up
/// to five times; throws DegenerateGeneric if every draw is degenerate.
inline std::vector<Effect> minimal_central_sharps(const Algebra& E, std::uint64_t seed = 0x5eedULL) {
  const CommutantBasis center = center_basis(E);
  Rng rng(mix_seed(seed, "central", 0));
  std::normal_distribution<double> g(0.0, 1.0);
  constexpr int kAttempts = 5;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Effect x = zero(E);
    for (const Effect& z : center.elements) x = raw::lincomb(E, 1.0, x, g(rng), z);
    std::vector<EigenRay> pairs = eigen_rays(E, x);
    std::stable_sort(pairs.begin(), pairs.end(), [](const EigenRay& p, const EigenRay& q) { return p.value < q.value; });
    std::vector<double> values;
    for (const EigenRay& p : pairs) values.push_back(p.value);
    std::vector<Effect> out;
    for (const linalg::Cluster& c : linalg::cluster_sorted(values, E.tol().cluster)) {
      std::vector<const Ray*> rays;
      for (std::size_t k = c.begin; k < c.end; ++k) rays.push_back(&pairs[k].ray);
      out.push_back(settle(E, detail::sum_of_rays(E, rays), "central projection"));
    }
    // Minimality: every center element must act as a scalar on each projection.
    bool minimal = true;
    for (const Effect& p : out) {
      const double rank = detail::pairing(E, p, p);
      for (const Effect& z : center.elements) {
        const Effect pz = seq_raw(E, p, z);
        const double coeff = detail::pairing(E, p, z) / rank;
        if (distance(E, pz, raw::scale(E, coeff, p)) > 10.0 * E.tol().cluster) minimal = false;
      }
    }
    if (minimal) {
      detail::sort_projections(E, out);
      return out;
    }
  }
  fail(ErrorCode::degenerate_generic, "random central element had coinciding eigenvalue clusters");
}

/// The part of E cut out by a central projection z, realized as a concrete
/// algebra on the range of z.
struct Carving {
  Effect unit;      // z, as an effect of the original algebra
  Algebra algebra;  // carved algebra with unit carve(1)
  std::vector<std::size_t> source;               // original summand per carved summand
  std::vector<Matrix> isometry;                  // Hilbertian: columns span range(z) in that summand
  std::vector<std::vector<Eigen::Index>> support;  // classical: outcomes in range(z)

  Carving(Effect u, Algebra a) : unit(std::move(u)), algebra(std::move(a)) {}
};

inline Carving make_carving(const Algebra& E, const Effect& z) {
  std::vector<Summand> parts;
  std::vector<std::size_t> source;
  std::vector<Matrix> iso;
  std::vector<std::vector<Eigen::Index>> support;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const Summand& s = E.summand(i);
    const auto d = detail::idx(s.dim);
    if (s.backend == Backend::classical) {
      std::vector<Eigen::Index> sup;
      for (Eigen::Index k = 0; k < d; ++k) {
        if (z.vec(i)(k) > 0.5) sup.push_back(k);
      }
      if (sup.empty()) continue;
      parts.push_back(Summand{Backend::classical, sup.size(), {}});
      source.push_back(i);
      iso.emplace_back();
      support.push_back(std::move(sup));
      continue;
    }
    const linalg::Eigh e = linalg::eigh(z.mat(i));
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (e.values(k) > 0.5) cols.push_back(k);
    }
    if (cols.empty()) continue;
    const auto r = static_cast<Eigen::Index>(cols.size());
    Matrix v(d, r);
    for (Eigen::Index k = 0; k < r; ++k) v.col(k) = e.vectors.col(cols[static_cast<std::size_t>(k)]);
    std::vector<Matrix> gens;
    if (!s.full()) {
      for (const Matrix& g : s.generators) gens.push_back(linalg::hermitize(v.adjoint() * g * v));
      if (linalg::generated_algebra(gens, cols.size()).size() == cols.size() * cols.size()) gens.clear();
    }
    parts.push_back(Summand{Backend::hilbertian, cols.size(), std::move(gens)});
    source.push_back(i);
    iso.push_back(std::move(v));
    support.emplace_back();
  }
  if (parts.empty()) fail(ErrorCode::trivial_split, "cannot carve with the zero projection");
  Carving c(z, Algebra::from_summands(std::move(parts), E.tol()));
  c.source = std::move(source);
  c.isometry = std::move(iso);
  c.support = std::move(support);
  return c;
}

/// z o b compressed to the range of z, as an effect of the carved algebra.
inline Effect carve(const Algebra& E, const Carving& c, const Effect& b) {
  check_shape(E, b);
  std::vector<Component> out;
  for (std::size_t j = 0; j < c.source.size(); ++j) {
    const std::size_t i = c.source[j];
    if (E.summand(i).backend == Backend::classical) {
      RealVector v(static_cast<Eigen::Index>(c.support[j].size()));
      for (std::size_t k = 0; k < c.support[j].size(); ++k) v(detail::idx(k)) = b.vec(i)(c.support[j][k]);
      out.emplace_back(std::move(v));
    } else {
      out.emplace_back(Matrix(linalg::hermitize(c.isometry[j].adjoint() * b.mat(i) * c.isometry[j])));
    }
  }
  return Effect(std::move(out));
}

/// Inverse of `carve`: places an element of the carved algebra back inside E.
inline Effect lift(const Algebra& E, const Carving& c, const Effect& x) {
  Effect out = zero(E);
  for (std::size_t j = 0; j < c.source.size(); ++j) {
    const std::size_t i = c.source[j];
    if (E.summand(i).backend == Backend::classical) {
      RealVector v = RealVector::Zero(detail::idx(E.summand(i).dim));
      for (std::size_t k = 0; k < c.support[j].size(); ++k) v(c.support[j][k]) = x.vec(j)(detail::idx(k));
      out[i] = std::move(v);
    } else {
      out[i] = Matrix(linalg::hermitize(c.isometry[j] * x.mat(j) * c.isometry[j].adjoint()));
    }
  }
  return out;
}

struct CentralSplit {
  Carving first;   // carved by a
  Carving second;  // carved by a'
};

/// Splits E along a sharp central a into the parts with units a and a'.
/// Throws NotSharp, NotCentral or TrivialSplit.
inline CentralSplit central_split(const Algebra& E, const Effect& a) {
  check_shape(E, a);
  if (!is_sharp(E, a)) fail(ErrorCode::not_sharp, "split element is not sharp");
  if (equal(E, a, zero(E)) || equal(E, a, unit(E))) fail(ErrorCode::trivial_split, "split element is 0 or 1");
  if (!is_central(E, a)) fail(ErrorCode::not_central, "split element is not central");
  const Effect z = detail::sharpen(E, a);
  return {make_carving(E, z), make_carving(E, complement(E, z))};
}

/// b = (a o b) + (a' o b); the residual of that identity.
inline double split_reconstruction_residual(const Algebra& E, const Effect& a, const Effect& b) {
  const Effect left = seq(E, a, b);
  const Effect right = seq(E, complement(E, a), b);
  return distance(E, b, raw::add(E, left, right));
}

struct FactorDecomposition {
  std::vector<Carving> factors;
  bool all_factors = false;
  double reconstruction_residual = 0.0;  // max ||b - sum_k lift(carve_k(b))||
  double additivity_residual = 0.0;      // carve(b1 + b2) vs carve(b1) + carve(b2)
  double unit_residual = 0.0;            // carve(1) vs the factor unit
  double injectivity_margin = 0.0;       // min distance between images of distinct panel members

  std::vector<std::size_t> dimensions() const {
    std::vector<std::size_t> out;
    for (const Carving& c : factors) out.push_back(c.algebra.total_dim());
    return out;
  }
};

/// Decomposes E into factors carved by its minimal central projections and
/// audits the carving map on a sampled panel.
inline FactorDecomposition factorize(const Algebra& E, std::uint64_t seed = 0x5eedULL, std::size_t panel = 8) {
  FactorDecomposition out;
  for (const Effect& z : minimal_central_sharps(E, seed)) out.factors.push_back(make_carving(E, z));
  out.all_factors = std::all_of(out.factors.begin(), out.factors.end(),
                                [](const Carving& c) { return is_factor(c.algebra); });

  for (const Carving& c : out.factors) {
    out.unit_residual = std::max(out.unit_residual, distance(c.algebra, carve(E, c, unit(E)), unit(c.algebra)));
  }
  Sampler sampler(E, mix_seed(seed, "factorize", 0));
  std::vector<Effect> samples;
  for (std::size_t n = 0; n < panel; ++n) samples.push_back(sampler.effect());
  for (const Effect& b : samples) {
    Effect rebuilt = zero(E);
    for (const Carving& c : out.factors) rebuilt = raw::add(E, rebuilt, lift(E, c, carve(E, c, b)));
    out.reconstruction_residual = std::max(out.reconstruction_residual, distance(E, b, rebuilt));

    const Effect other = seq(E, complement(E, b), sampler.effect());
    const Effect sum = oplus(E, b, other);
    for (const Carving& c : out.factors) {
      const Effect lhs = carve(E, c, sum);
      const Effect rhs = raw::add(c.algebra, carve(E, c, b), carve(E, c, other));
      out.additivity_residual = std::max(out.additivity_residual, distance(c.algebra, lhs, rhs));
    }
  }
  out.injectivity_margin = INFINITY;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      double d = 0.0;
      for (const Carving& c : out.factors) {
        d = std::max(d, distance(c.algebra, carve(E, c, samples[i]), carve(E, c, samples[j])));
      }
      out.injectivity_margin = std::min(out.injectivity_margin, d);
    }
  }
  return out;
}

struct JointContext {
  Context context;
  std::vector<double> coefficients_a;
  std::vector<double> coefficients_b;
  double residual_a = 0.0;  // ||a - sum coefficients_a[k] member_k||
  double residual_b = 0.0;
};

namespace detail {

/// Turns a family of pairwise orthogonal sharp effects summing to 1 into a
/// context: range rays of each, orthonormalized per Hilbertian summand.
inline Context refine_to_context(const Algebra& E, const std::vector<Effect>& atoms) {
  std::vector<std::vector<CVector>> per_block(E.arity());
  std::vector<EigenRay> rays;
  for (const Effect& p : atoms) {
    for (const Ray& r : range_rays(E, p)) per_block[r.block].push_back(r.vector);
  }
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const auto d = idx(E.summand(i).dim);
    if (static_cast<Eigen::Index>(per_block[i].size()) != d) {
      fail(ErrorCode::invalid_context, "atoms do not resolve the unit");
    }
    Matrix v(d, d);
    for (Eigen::Index k = 0; k < d; ++k) v.col(k) = per_block[i][static_cast<std::size_t>(k)];
    if (E.summand(i).backend == Backend::hilbertian) v = linalg::polar_unitary(v);
    for (Eigen::Index k = 0; k < d; ++k) rays.push_back({0.0, Ray{i, linalg::canonical_phase(v.col(k))}});
  }
  order_rays(rays);
  std::vector<Ray> out;
  for (EigenRay& r : rays) out.push_back(std::move(r.ray));
  return make_context(E, std::move(out));
}

inline std::vector<double> context_coefficients(const Algebra& E, const Context& A, const Effect& b) {
  std::vector<double> out;
  for (const Ray& r : A.rays()) out.push_back(evaluate(E, pure_state(E, r), b));
  return out;
}

}  // namespace detail

/// A context in which both commuting effects are diagonal. Throws NotCommuting.
inline JointContext joint_context(const Algebra& E, const Effect& a, const Effect& b) {
  check_shape(E, a);
  check_shape(E, b);
  if (!commutes(E, a, b)) fail(ErrorCode::not_commuting, "effects do not commute");
  const SpectralForm fa = spectral_form(E, a);
  const SpectralForm fb = spectral_form(E, b);
  std::vector<Effect> atoms;
  for (const SpectralTerm& s : fa.terms) {
    for (const SpectralTerm& t : fb.terms) {
      const Effect e = seq_raw(E, s.eigeneffect, t.eigeneffect);
      if (!detail::range_rays(E, e).empty()) atoms.push_back(e);
    }
  }
  JointContext out;
  out.context = detail::refine_to_context(E, atoms);
  out.coefficients_a = detail::context_coefficients(E, out.context, a);
  out.coefficients_b = detail::context_coefficients(E, out.context, b);
  out.residual_a = distance(E, a, combine_context(E, out.context, out.coefficients_a));
  out.residual_b = distance(E, b, combine_context(E, out.context, out.coefficients_b));
  return out;
}

/// Minimal sharp elements of the commutative algebra generated by F (its
/// joint spectral projections), ordered by first charged outcome.
inline std::vector<Effect> simultaneous_atoms(const Algebra& E, const std::vector<Effect>& F) {
  for (std::size_t i = 0; i < F.size(); ++i) {
    check_shape(E, F[i]);
    for (std::size_t j = i + 1; j < F.size(); ++j) {
      if (!commutes(E, F[i], F[j])) fail(ErrorCode::not_commuting, "family is not pairwise commuting");
    }
  }
  std::vector<Effect> atoms{unit(E)};
  for (const Effect& f : F) {
    const SpectralForm sf = spectral_form(E, f);
    std::vector<Effect> next;
    for (const Effect& p : atoms) {
      for (const SpectralTerm& t : sf.terms) {
        const Effect e = seq_raw(E, p, t.eigeneffect);
        if (!detail::range_rays(E, e).empty()) next.push_back(detail::sharpen(E, e));
      }
    }
    atoms = std::move(next);
  }
  detail::sort_projections(E, atoms);
  return atoms;
}

/// Coefficient of f on each atom: tr(p f) / tr(p).
inline std::vector<double> atom_coefficients(const Algebra& E, const std::vector<Effect>& atoms, const Effect& f) {
  std::vector<double> out;
  for (const Effect& p : atoms) out.push_back(detail::pairing(E, p, f) / detail::pairing(E, p, p));
  return out;
}

struct AtomWitness {
  bool commutes = false;
  double residual = 0.0;  // commutator norm on refusal, reconstruction residual otherwise
  std::optional<Context> context;
  std::vector<double> coefficients;
  std::size_t atom_index = 0;  // position of a in the context
};

/// For one-dimensional a: either a context containing a in which b is
/// diagonal, or a refusal carrying the commutator norm. Throws NotOneDimensional.
inline AtomWitness atom_commutant_witness(const Algebra& E, const Effect& a, const Effect& b) {
  check_shape(E, b);
  if (!is_one_dimensional(E, a)) fail(ErrorCode::not_one_dimensional, "witness needs a one-dimensional effect");
  AtomWitness w;
  if (!commutes(E, a, b)) {
    w.residual = commutator_norm(E, a, b);
    return w;
  }
  JointContext jc = joint_context(E, a, b);
  w.commutes = true;
  w.residual = jc.residual_b;
  for (std::size_t k = 0; k < jc.context.size(); ++k) {
    if (distance(E, jc.context.members()[k], a) <= std::sqrt(E.tol().eq)) w.atom_index = k;
  }
  w.coefficients = std::move(jc.coefficients_b);
  w.context = std::move(jc.context);
  return w;
}

}  // namespace cosea
