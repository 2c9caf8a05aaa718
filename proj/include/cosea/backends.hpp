#pragma once

// Concrete constructors: classical and Hilbertian effects, direct sums,
// sharp and one-dimensional tests, contexts, states and hat states.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cosea/core.hpp"

namespace cosea {

// ---------------------------------------------------------------- effects

inline Effect make_hilbertian_effect(std::size_t d, const Matrix& m, const Tolerances& tol = {}) {
  const auto n = detail::idx(d);
  if (m.rows() != n || m.cols() != n) {
    fail(ErrorCode::backend_mismatch, "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                          ", expected " + std::to_string(d) + "x" + std::to_string(d));
  }
  return settle(Algebra::hilbertian(d, {}, tol), Effect({m}), "matrix");
}

inline Effect make_classical_effect(std::size_t n, const RealVector& v, const Tolerances& tol = {}) {
  if (v.size() != detail::idx(n)) {
    fail(ErrorCode::backend_mismatch, "vector has " + std::to_string(v.size()) + " entries, expected " +
                                          std::to_string(n));
  }
  return settle(Algebra::classical(n, tol), Effect({v}), "vector");
}

/// Validated effect of E from raw payloads (one per summand).
inline Effect make_effect(const Algebra& E, std::vector<Component> components) {
  if (components.size() != E.arity()) {
    fail(ErrorCode::arity_mismatch, "expected " + std::to_string(E.arity()) + " components, got " +
                                        std::to_string(components.size()));
  }
  return settle(E, Effect(std::move(components)), "effect");
}

// ---------------------------------------------------------------- direct sums

inline Algebra direct_sum(const std::vector<Algebra>& parts) { return Algebra::direct_sum(parts); }

/// The algebra of summand `i` on its own.
inline Algebra summand_algebra(const Algebra& E, std::size_t i) {
  return Algebra::from_summands({E.summand(i)}, E.tol());
}

/// Concatenates per-part effects into an effect of the (flattened) sum.
inline Effect ds_effect(const Algebra& E, const std::vector<Effect>& parts) {
  std::vector<Component> comps;
  for (const Effect& p : parts) comps.insert(comps.end(), p.components().begin(), p.components().end());
  if (comps.size() != E.arity()) {
    fail(ErrorCode::arity_mismatch, "direct-sum effect needs " + std::to_string(E.arity()) + " components");
  }
  return settle(E, Effect(std::move(comps)), "direct-sum effect");
}

inline Effect ds_project(const Algebra& E, const Effect& a, std::size_t index) {
  check_shape(E, a);
  if (index >= E.arity()) fail(ErrorCode::arity_mismatch, "summand index out of range");
  return Effect({a[index]});
}

// ---------------------------------------------------------------- sharpness

namespace detail {

/// Eigenvalues (or entries) of every component, flattened.
inline std::vector<double> spectrum_values(const Algebra& E, const Effect& a) {
  std::vector<double> out;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::classical) {
      for (double x : a.vec(i)) out.push_back(x);
    } else {
      const RealVector ev = linalg::eigenvalues(a.mat(i));
      for (double x : ev) out.push_back(x);
    }
  }
  return out;
}

}  // namespace detail

/// Sharp: every eigenvalue (entry) lies within the cluster gap of 0 or 1.
inline bool is_sharp(const Algebra& E, const Effect& a) {
  check_shape(E, a);
  const double gap = E.tol().cluster;
  for (double x : detail::spectrum_values(E, a)) {
    if (std::abs(x) > gap && std::abs(x - 1.0) > gap) return false;
  }
  return true;
}

/// Number of eigenvalues above 1/2; equals the rank for sharp effects.
inline std::size_t sharp_rank(const Algebra& E, const Effect& a) {
  std::size_t r = 0;
  for (double x : detail::spectrum_values(E, a)) r += x > 0.5 ? 1 : 0;
  return r;
}

inline bool is_one_dimensional(const Algebra& E, const Effect& a) {
  return is_sharp(E, a) && sharp_rank(E, a) == 1;
}

/// Projection (indicator) onto a ray.
inline Effect ray_effect(const Algebra& E, const Ray& r) {
  Effect out = zero(E);
  if (r.block >= E.arity()) fail(ErrorCode::arity_mismatch, "ray refers to a missing summand");
  if (E.summand(r.block).backend == Backend::classical) {
    out[r.block] = RealVector(r.vector.cwiseAbs2());
  } else {
    out[r.block] = linalg::projector(r.vector);
  }
  return out;
}

/// The ray of a one-dimensional effect, with the canonical phase.
inline Ray ray_of(const Algebra& E, const Effect& a) {
  check_shape(E, a);
  if (!is_one_dimensional(E, a)) fail(ErrorCode::not_one_dimensional, "effect is not a rank-one projection");
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const auto d = detail::idx(E.summand(i).dim);
    if (E.summand(i).backend == Backend::classical) {
      Eigen::Index k = 0;
      if (a.vec(i).maxCoeff(&k) > 0.5) {
        CVector v = CVector::Zero(d);
        v(k) = 1.0;
        return {i, v};
      }
    } else {
      const linalg::Eigh e = linalg::eigh(a.mat(i));
      if (e.values(d - 1) > 0.5) return {i, linalg::canonical_phase(e.vectors.col(d - 1))};
    }
  }
  fail(ErrorCode::not_one_dimensional, "no unit eigenvalue found");
}

// ---------------------------------------------------------------- contexts

/// An ordered finest sharp measurement: one-dimensional projections summing to 1.
class Context {
 public:
  Context() = default;

  const std::vector<Ray>& rays() const { return rays_; }
  const std::vector<Effect>& members() const { return members_; }
  std::size_t size() const { return rays_.size(); }

  /// Unitary whose columns are the representative vectors (single Hilbertian summand).
  Matrix unitary() const {
    if (rays_.empty()) return Matrix();
    Matrix u(rays_.front().vector.size(), detail::idx(rays_.size()));
    for (std::size_t k = 0; k < rays_.size(); ++k) {
      if (rays_[k].block != 0) fail(ErrorCode::invalid_context, "context spans several summands");
      u.col(detail::idx(k)) = rays_[k].vector;
    }
    return u;
  }

  friend Context make_context(const Algebra& E, std::vector<Ray> rays);

 private:
  std::vector<Ray> rays_;
  std::vector<Effect> members_;
};

/// Builds a context from rays, checking orthonormality and completeness.
inline Context make_context(const Algebra& E, std::vector<Ray> rays) {
  const double eq = E.tol().eq;
  if (rays.size() != E.total_dim()) {
    fail(ErrorCode::invalid_context, "context has " + std::to_string(rays.size()) + " members, expected " +
                                         std::to_string(E.total_dim()));
  }
  for (Ray& r : rays) {
    if (r.block >= E.arity() || r.vector.size() != detail::idx(E.summand(r.block).dim)) {
      fail(ErrorCode::invalid_context, "ray does not fit its summand");
    }
    const double n = r.vector.norm();
    if (std::abs(n - 1.0) > 1e-6) fail(ErrorCode::invalid_context, "ray is not a unit vector");
    r.vector = linalg::canonical_phase(r.vector / n);
    if (E.summand(r.block).backend == Backend::classical &&
        std::abs(r.vector.cwiseAbs2().maxCoeff() - 1.0) > eq) {
      fail(ErrorCode::invalid_context, "classical rays must be outcome indicators");
    }
  }
  for (std::size_t i = 0; i < rays.size(); ++i) {
    for (std::size_t j = i + 1; j < rays.size(); ++j) {
      if (rays[i].block == rays[j].block &&
          std::norm(rays[i].vector.dot(rays[j].vector)) > eq) {
        fail(ErrorCode::invalid_context, "members " + std::to_string(i) + " and " + std::to_string(j) +
                                             " are not orthogonal");
      }
    }
  }
  Context c;
  c.rays_ = std::move(rays);
  for (const Ray& r : c.rays_) c.members_.push_back(ray_effect(E, r));
  return c;
}

/// Builds a context from effects; each must be one-dimensional and they must sum to 1.
inline Context make_context_from_effects(const Algebra& E, const std::vector<Effect>& members) {
  std::vector<Ray> rays;
  for (std::size_t k = 0; k < members.size(); ++k) {
    check_shape(E, members[k]);
    if (!is_one_dimensional(E, members[k])) {
      fail(ErrorCode::invalid_context, "member " + std::to_string(k) + " is not one-dimensional");
    }
    rays.push_back(ray_of(E, members[k]));
  }
  Effect sum = zero(E);
  for (const Effect& m : members) sum = raw::add(E, sum, m);
  if (distance(E, sum, unit(E)) > E.tol().eq * std::max<double>(1.0, static_cast<double>(members.size())) &&
      distance(E, sum, unit(E)) > 1e-8) {
    fail(ErrorCode::invalid_context, "members do not sum to the unit");
  }
  return make_context(E, std::move(rays));
}

/// Standard basis of every summand, in summand order.
inline Context standard_context(const Algebra& E) {
  std::vector<Ray> rays;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const auto d = detail::idx(E.summand(i).dim);
    for (Eigen::Index k = 0; k < d; ++k) rays.push_back({i, CVector::Unit(d, k)});
  }
  return make_context(E, std::move(rays));
}

/// The context of a Hilbertian algebra given by the columns of a unitary.
inline Context context_from_unitary(const Algebra& E, const Matrix& u) {
  if (!E.is_hilbertian()) fail(ErrorCode::backend_mismatch, "context_from_unitary needs a Hilbertian algebra");
  const auto d = detail::idx(E.summand(0).dim);
  if (u.rows() != d || u.cols() != d) fail(ErrorCode::not_unitary, "unitary has the wrong shape");
  if (linalg::unitarity_defect(u) > E.tol().eq) fail(ErrorCode::not_unitary, "matrix is not unitary");
  std::vector<Ray> rays;
  for (Eigen::Index k = 0; k < d; ++k) rays.push_back({0, u.col(k)});
  return make_context(E, std::move(rays));
}

/// Context of a direct sum assembled from one context per summand.
inline Context ds_contexts(const Algebra& E, const std::vector<Context>& parts) {
  if (parts.size() != E.arity()) fail(ErrorCode::invalid_context, "need one context per summand");
  std::vector<Ray> rays;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() != E.summand(i).dim) fail(ErrorCode::invalid_context, "part context has the wrong size");
    for (const Ray& r : parts[i].rays()) {
      if (r.block != 0) fail(ErrorCode::invalid_context, "part contexts must live in a single summand");
      rays.push_back({i, r.vector});
    }
  }
  return make_context(E, std::move(rays));
}

// ---------------------------------------------------------------- states

/// A positive functional on E: one unnormalized piece per summand (a weight
/// vector or a PSD matrix). Probability states have total mass 1; the zero
/// functional has mass 0.
class State {
 public:
  State() = default;
  explicit State(std::vector<Component> parts) : parts_(std::move(parts)) {}

  const std::vector<Component>& parts() const { return parts_; }
  std::size_t arity() const { return parts_.size(); }

  double part_mass(std::size_t i) const {
    const Component& c = parts_.at(i);
    if (const auto* v = std::get_if<RealVector>(&c)) return v->sum();
    return std::get<Matrix>(c).trace().real();
  }

  double mass() const {
    double m = 0.0;
    for (std::size_t i = 0; i < parts_.size(); ++i) m += part_mass(i);
    return m;
  }

  bool is_zero(double tol) const { return mass() <= tol; }

 private:
  std::vector<Component> parts_;
};

inline void check_state_shape(const Algebra& E, const State& w) {
  if (w.arity() != E.arity()) fail(ErrorCode::backend_mismatch, "state does not match the algebra");
  for (std::size_t i = 0; i < E.arity(); ++i) detail::check_component(E.summand(i), w.parts()[i], i);
}

/// Probability of `b` in state `w`: dot product, trace pairing, or their sum over summands.
inline double evaluate(const Algebra& E, const State& w, const Effect& b) {
  check_state_shape(E, w);
  check_shape(E, b);
  double p = 0.0;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::classical) {
      p += std::get<RealVector>(w.parts()[i]).dot(b.vec(i));
    } else {
      p += (std::get<Matrix>(w.parts()[i]) * b.mat(i)).trace().real();
    }
  }
  return p;
}

inline State zero_state(const Algebra& E) {
  std::vector<Component> parts;
  for (const Summand& s : E.summands()) {
    const auto n = detail::idx(s.dim);
    if (s.backend == Backend::classical) {
      parts.emplace_back(RealVector(RealVector::Zero(n)));
    } else {
      parts.emplace_back(Matrix(Matrix::Zero(n, n)));
    }
  }
  return State(std::move(parts));
}

/// Validates a state from per-summand pieces; `allow_zero` admits the zero functional.
inline State make_state(const Algebra& E, std::vector<Component> parts, bool allow_zero = false) {
  State w(std::move(parts));
  check_state_shape(E, w);
  const Tolerances& tol = E.tol();
  std::vector<Component> clean;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const Component& c = w.parts()[i];
    if (const auto* v = std::get_if<RealVector>(&c)) {
      if (v->size() > 0 && v->minCoeff() < -tol.eq) fail(ErrorCode::invalid_state, "negative probability");
      clean.emplace_back(RealVector(v->cwiseMax(0.0)));
    } else {
      const Matrix& m = std::get<Matrix>(c);
      if ((m - m.adjoint()).norm() > tol.eq) fail(ErrorCode::not_hermitian, "density matrix is not Hermitian");
      const linalg::Eigh e = linalg::eigh(m);
      if (e.values.minCoeff() < -tol.psd) fail(ErrorCode::invalid_state, "density matrix is not positive");
      clean.emplace_back(e.values.minCoeff() < 0.0 ? linalg::apply(e, [](double x) { return std::max(x, 0.0); })
                                                   : linalg::hermitize(m));
    }
  }
  State out(std::move(clean));
  const double m = out.mass();
  if (!(std::abs(m - 1.0) <= tol.eq || (allow_zero && std::abs(m) <= tol.eq))) {
    fail(ErrorCode::invalid_state, "state has total mass " + std::to_string(m));
  }
  return out;
}

inline State classical_state(const RealVector& p, const Tolerances& tol = {}) {
  return make_state(Algebra::classical(static_cast<std::size_t>(p.size()), tol), {p});
}

inline State density_state(const Matrix& rho, const Tolerances& tol = {}) {
  return make_state(Algebra::hilbertian(static_cast<std::size_t>(rho.rows()), {}, tol), {rho});
}

/// Vector state of a ray.
inline State pure_state(const Algebra& E, const Ray& r) {
  State z = zero_state(E);
  std::vector<Component> parts = z.parts();
  const CVector v = r.vector / r.vector.norm();
  if (E.summand(r.block).backend == Backend::classical) {
    parts[r.block] = RealVector(v.cwiseAbs2());
  } else {
    parts[r.block] = linalg::projector(v);
  }
  return State(std::move(parts));
}

/// The unique state assigning probability 1 to a one-dimensional effect.
inline State hat_state(const Algebra& E, const Effect& a) {
  check_shape(E, a);
  if (!is_one_dimensional(E, a)) fail(ErrorCode::not_one_dimensional, "hat state needs a one-dimensional effect");
  return pure_state(E, ray_of(E, a));
}

inline double transition_probability(const Algebra& E, const Effect& a, const Effect& b) {
  check_shape(E, b);
  if (!is_one_dimensional(E, b)) fail(ErrorCode::not_one_dimensional, "target is not one-dimensional");
  return evaluate(E, hat_state(E, a), b);
}

/// Distance between two states (max over summands of max-abs / Frobenius).
inline double state_distance(const Algebra& E, const State& x, const State& y) {
  check_state_shape(E, x);
  check_state_shape(E, y);
  double d = 0.0;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::classical) {
      d = std::max(d, (std::get<RealVector>(x.parts()[i]) - std::get<RealVector>(y.parts()[i])).cwiseAbs().maxCoeff());
    } else {
      d = std::max(d, (std::get<Matrix>(x.parts()[i]) - std::get<Matrix>(y.parts()[i])).norm());
    }
  }
  return d;
}

/// Convex combination of part states: w(a_1,...,a_k) = sum_i weights_i w_i(a_i).
inline State ds_state(const Algebra& E, const std::vector<double>& weights, const std::vector<State>& parts) {
  if (weights.size() != parts.size()) fail(ErrorCode::arity_mismatch, "one weight per part state is required");
  const double eq = E.tol().eq;
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= -eq)) fail(ErrorCode::not_convex, "negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > eq) fail(ErrorCode::not_convex, "weights do not sum to 1");
  std::vector<Component> out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (std::abs(parts[k].mass() - 1.0) > eq) fail(ErrorCode::invalid_state, "part state is not normalized");
    const double w = std::max(weights[k], 0.0);
    for (const Component& c : parts[k].parts()) {
      if (const auto* v = std::get_if<RealVector>(&c)) {
        out.emplace_back(RealVector(w * *v));
      } else {
        out.emplace_back(Matrix(w * std::get<Matrix>(c)));
      }
    }
  }
  State s(std::move(out));
  check_state_shape(E, s);
  return s;
}

struct StateDecomposition {
  std::vector<double> weights;
  /// Renormalized part states; empty where the weight vanishes.
  std::vector<std::optional<State>> parts;
};

/// Splits a state of a direct sum into summand weights w(0,..,1_i,..,0) and
/// renormalized summand states.
inline StateDecomposition ds_state_decompose(const Algebra& E, const State& w) {
  check_state_shape(E, w);
  StateDecomposition out;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    const double m = w.part_mass(i);
    out.weights.push_back(m);
    if (m <= E.tol().eq) {
      out.parts.emplace_back(std::nullopt);
      continue;
    }
    const Component& c = w.parts()[i];
    if (const auto* v = std::get_if<RealVector>(&c)) {
      out.parts.emplace_back(State({RealVector(*v / m)}));
    } else {
      out.parts.emplace_back(State({Matrix(std::get<Matrix>(c) / m)}));
    }
  }
  return out;
}

}  // namespace cosea
