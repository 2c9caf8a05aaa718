#pragma once

// Randomized audits of the derived results: transition symmetry, state
// uniqueness, spectral forms, joint contexts, conditioning identities,
// dispersion, norm calculus and pseudo-inverses. Same runner as the axioms.

#include <cmath>
#include <string>
#include <vector>

#include "cosea/audit.hpp"
#include "cosea/conditioning.hpp"

namespace cosea {

namespace audit {

/// A random unit vector inside the range of the sharp effect `p`. In a
/// classical block only the outcome indicators are rays, so one is picked.
inline Ray ray_in(Sampler& s, const Effect& p) {
  const Algebra& E = s.algebra();
  const std::vector<Ray> rays = detail::range_rays(E, p);
  if (rays.empty()) fail(ErrorCode::zero_effect, "sharp effect has an empty range");
  const Ray& pick = rays[s.index(rays.size())];
  if (E.summand(pick.block).backend == Backend::classical) return pick;
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v = CVector::Zero(pick.vector.size());
  for (const Ray& r : rays) {
    if (r.block == pick.block) v += Complex(g(s.rng()), g(s.rng())) * r.vector;
  }
  return {pick.block, linalg::canonical_phase(v / v.norm())};
}

/// True when every pair of generating effects commutes.
inline bool is_commutative(const Algebra& E) {
  const std::vector<Effect> panel = generating_panel(E);
  for (std::size_t i = 0; i < panel.size(); ++i) {
    for (std::size_t j = i + 1; j < panel.size(); ++j) {
      if (!commutes(E, panel[i], panel[j])) return false;
    }
  }
  return true;
}

inline std::vector<Effect> panel(Sampler& s, std::size_t n) {
  std::vector<Effect> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(s.effect());
  return out;
}

/// Lower bound for invertible draws, so products stay clear of the cluster gap.
inline constexpr double kInvertibleFloor = 0.05;

}  // namespace audit

inline std::vector<CheckSpec> theorem_checks(const Algebra& E) {
  const double eq = E.tol().eq;
  const double psd = E.tol().psd;
  const bool commutative = audit::is_commutative(E);
  std::vector<CheckSpec> c;

  c.push_back({"transition_symmetry", [&E](Sampler& s) {
                 const Effect a = s.one_dimensional();
                 const Effect b = s.one_dimensional();
                 const double r = std::abs(transition_probability(E, a, b) - transition_probability(E, b, a));
                 return Outcome::within(r, 1e-12, {{"a", a}, {"b", b}});
               }});
  c.push_back({"state_uniqueness", [&E, eq](Sampler& s) {
                 // A state certain of a: condition a random state on a, then
                 // mix in a random state with weight below eq.
                 const Effect a = s.one_dimensional();
                 const State w0 = s.state();
                 if (evaluate(E, w0, a) <= eq) return Outcome::skip("conditioning event has probability zero");
                 const double t = 0.5 * eq * s.uniform();
                 const State cw = condition(E, w0, a);
                 const State noise = s.state();
                 std::vector<Component> parts;
                 for (std::size_t i = 0; i < E.arity(); ++i) {
                   if (E.summand(i).backend == Backend::classical) {
                     parts.emplace_back(RealVector((1 - t) * std::get<RealVector>(cw.parts()[i]) +
                                                   t * std::get<RealVector>(noise.parts()[i])));
                   } else {
                     parts.emplace_back(Matrix((1 - t) * std::get<Matrix>(cw.parts()[i]) +
                                               t * std::get<Matrix>(noise.parts()[i])));
                   }
                 }
                 const State w(std::move(parts));
                 if (evaluate(E, w, a) < 1.0 - eq) return Outcome::skip("state is not certain of a");
                 const State h = hat_state(E, a);
                 double r = 0.0;
                 for (const Effect& b : audit::panel(s, 5)) r = std::max(r, std::abs(evaluate(E, w, b) - evaluate(E, h, b)));
                 return Outcome::within(r, 1e-6, {{"a", a}, {"w", w}});
               }});
  c.push_back({"context_cardinality", [&E](Sampler& s) {
                 const std::size_t n1 = s.context().size();
                 const std::size_t n2 = context_representation(E, s.effect()).context.size();
                 const bool ok = n1 == E.total_dim() && n2 == E.total_dim();
                 return Outcome::verdict(ok, ok ? 0.0 : 1.0, "contexts of different sizes");
               }});
  c.push_back({"spectral_reconstruction", [&E, eq](Sampler& s) {
                 const Effect b = s.coin() ? s.effect() : s.effect_with_values({0.0, 0.3, 0.3, 0.8, 1.0});
                 const SpectralForm f = spectral_form(E, b);
                 double r = distance(E, b, reconstruct(E, f));
                 // Re-decomposing the reconstruction returns the same clusters.
                 const SpectralForm g = spectral_form(E, settle(E, reconstruct(E, f)));
                 if (g.terms.size() != f.terms.size()) {
                   return Outcome::verdict(false, 1.0, "re-decomposition changed the cluster count", {{"b", b}});
                 }
                 Effect total = zero(E);
                 for (std::size_t k = 0; k < f.terms.size(); ++k) {
                   r = std::max({r, std::abs(f.terms[k].value - g.terms[k].value),
                                 distance(E, f.terms[k].eigeneffect, g.terms[k].eigeneffect),
                                 commutator_norm(E, f.terms[k].eigeneffect, b),
                                 distance(E, seq_raw(E, f.terms[k].eigeneffect, f.terms[k].eigeneffect),
                                          f.terms[k].eigeneffect)});
                   total = raw::add(E, total, f.terms[k].eigeneffect);
                 }
                 r = std::max(r, distance(E, total, unit(E)));
                 return Outcome::within(r, eq, {{"b", b}});
               }});
  c.push_back({"joint_context", [&E, eq](Sampler& s) {
                 const Effect x = s.effect();
                 const Effect a = s.coin() ? x : s.function_of(x);
                 const Effect b = s.function_of(x);
                 const JointContext jc = joint_context(E, a, b);
                 return Outcome::within(std::max(jc.residual_a, jc.residual_b), eq, {{"a", a}, {"b", b}});
               }});
  c.push_back({"noncommuting_detected", [&E, commutative](Sampler& s) {
                 if (commutative) return Outcome::skip("every pair commutes in this algebra");
                 const Effect a = s.effect();
                 const Effect b = s.effect();
                 const double r = commutator_norm(E, a, b);
                 return Outcome::verdict(!commutes(E, a, b), r, "generic pair reported as commuting",
                                         {{"a", a}, {"b", b}});
               }});
  c.push_back({"atom_commutation", [&E, eq](Sampler& s) {
                 // For one-dimensional a and sharp b: a | b iff a o b = 0 or a <= b.
                 const Effect b = s.sharp();
                 const int mode = static_cast<int>(s.index(3));
                 Effect a = s.one_dimensional();
                 if (mode == 0 && norm_of(E, b) > 0.5) a = ray_effect(E, audit::ray_in(s, b));
                 const Effect bc = complement(E, b);
                 if (mode == 1 && norm_of(E, bc) > 0.5) a = ray_effect(E, audit::ray_in(s, bc));
                 const bool lhs = commutes(E, a, b);
                 const bool rhs = norm_of(E, seq(E, a, b)) <= eq || le(E, a, b);
                 return Outcome::verdict(lhs == rhs, commutator_norm(E, a, b), "commutation and order disagree",
                                         {{"a", a}, {"b", b}});
               }});
  c.push_back({"gamma_identities", [&E, eq](Sampler& s) {
                 const int mode = static_cast<int>(s.index(4));
                 Effect a = s.effect(), b = s.effect(), cc = s.effect();
                 State w = s.state();
                 if (mode == 1) {
                   // Functions of common projections; half the time a and b have disjoint supports.
                   const std::vector<Effect> ps = audit::random_projections(s);
                   std::vector<double> wa(ps.size(), 0.0), wb(ps.size(), 0.0);
                   const bool disjoint = s.coin();
                   for (std::size_t k = 0; k < ps.size(); ++k) {
                     if (disjoint) {
                       (s.coin() ? wa : wb)[k] = s.uniform();
                     } else {
                       wa[k] = s.uniform();
                       wb[k] = s.uniform();
                     }
                   }
                   a = settle(E, audit::combination(E, ps, wa));
                   b = settle(E, audit::combination(E, ps, wb));
                   cc = settle(E, audit::combination(E, ps, audit::uniforms(s, ps.size())));
                 } else if (mode == 2) {
                   // w(a) = 0: w is pure on a ray killed by a.
                   const Effect r = s.one_dimensional();
                   a = seq(E, complement(E, r), s.effect());
                   if (s.coin()) b = seq(E, complement(E, r), s.effect());
                   w = hat_state(E, r);
                 } else if (mode == 3) {
                   w = zero_state(E);
                 }
                 const ConditionReport rep = verify_gamma_identities(E, a, b, cc, w);
                 Outcome o = Outcome::within(rep.max_residual(), eq, {{"a", a}, {"b", b}, {"c", cc}, {"w", w}});
                 if (mode == 2 && rep.zero_branch.empty()) {
                   o = Outcome::verdict(false, 1.0, "zero denominator was not flagged", o.inputs);
                 }
                 return o;
               }});
  c.push_back({"gamma_fixed_point", [&E, eq](Sampler& s) {
                 const Effect a = s.one_dimensional();
                 const State h = hat_state(E, a);
                 double r = state_distance(E, gamma_apply(E, a, h), h);
                 const State w = s.state();
                 if (evaluate(E, w, a) > eq) {
                   State x = w;
                   for (int k = 0; k < 3; ++k) x = gamma_apply(E, a, x);
                   r = std::max(r, state_distance(E, x, h));
                 }
                 return Outcome::within(r, eq, {{"a", a}, {"w", w}});
               }});
  c.push_back({"condition_validity", [&E, eq, psd](Sampler& s) {
                 const State w = s.state();
                 const Effect b = s.effect();
                 if (evaluate(E, w, b) <= eq) return Outcome::skip("conditioning event has probability zero");
                 const State cw = condition(E, w, b);
                 double r = std::abs(cw.mass() - 1.0);
                 for (const Component& p : cw.parts()) {
                   if (const auto* v = std::get_if<RealVector>(&p)) {
                     r = std::max(r, std::max(0.0, -v->minCoeff()) > psd ? 1.0 : 0.0);
                   } else {
                     r = std::max(r, std::max(0.0, -linalg::min_eigenvalue(std::get<Matrix>(p))) > psd ? 1.0 : 0.0);
                   }
                 }
                 const Effect x = s.effect();
                 const Effect y = audit::orthogonal_to(E, s, x);
                 r = std::max(r, std::abs(evaluate(E, cw, oplus(E, x, y)) - evaluate(E, cw, x) - evaluate(E, cw, y)));
                 return Outcome::within(r, eq, {{"w", w}, {"b", b}});
               }});
  c.push_back({"hat_state_laws", [&E, eq](Sampler& s) {
                 const Effect a = s.one_dimensional();
                 std::vector<State> states;
                 for (int k = 0; k < 4; ++k) states.push_back(s.state());
                 const HatLawReport h = verify_hat_state_laws(E, a, audit::panel(s, 5), states);
                 return Outcome::within(std::max({h.product, h.absorption, h.universality}), eq, {{"a", a}});
               }});
  c.push_back({"certainty_of_sharps", [&E](Sampler& s) {
                 const Effect a = s.coin() ? s.one_dimensional() : s.sharp();
                 const CertaintyVerdict v = unique_certainty_state(E, a);
                 const bool ok = (v.kind == Certainty::unique) == is_one_dimensional(E, a);
                 return Outcome::verdict(ok, ok ? 0.0 : 1.0, std::string("verdict ") + to_string(v.kind), {{"a", a}});
               }});
  c.push_back({"dispersion_verdict", [&E, eq](Sampler& s) {
                 const Effect b = s.coin() ? s.effect_with_values({0.2, 0.5, 0.9}) : s.effect();
                 State w = s.state();
                 if (s.coin()) {
                   // Mixture of pure states inside one eigenspace: dispersion free.
                   const SpectralForm f = spectral_form(E, b);
                   const Effect& p = f.terms[s.index(f.terms.size())].eigeneffect;
                   const State h1 = pure_state(E, audit::ray_in(s, p));
                   const State h2 = pure_state(E, audit::ray_in(s, p));
                   const double t = s.uniform();
                   std::vector<Component> parts;
                   for (std::size_t i = 0; i < E.arity(); ++i) {
                     if (E.summand(i).backend == Backend::classical) {
                       parts.emplace_back(RealVector(t * std::get<RealVector>(h1.parts()[i]) +
                                                     (1 - t) * std::get<RealVector>(h2.parts()[i])));
                     } else {
                       parts.emplace_back(Matrix(t * std::get<Matrix>(h1.parts()[i]) +
                                                 (1 - t) * std::get<Matrix>(h2.parts()[i])));
                     }
                   }
                   w = State(std::move(parts));
                 }
                 const DispersionReport d = dispersion_analysis(E, w, b);
                 if (d.dispersion_free != d.constant_ae) {
                   return Outcome::verdict(false, std::abs(d.dispersion), "variance test and decomposition disagree",
                                           {{"w", w}, {"b", b}});
                 }
                 double r = 0.0;
                 if (d.decomposition) {
                   const ConstantDecomposition& k = *d.decomposition;
                   r = std::max({k.orthogonality_residual, k.reconstruction_residual, std::max(0.0, 1.0 - eq - k.mass)});
                   if (!k.a_sharp) r = std::max(r, 1.0);
                 }
                 return Outcome::within(r, eq, {{"w", w}, {"b", b}});
               }});
  c.push_back({"range_endpoints", [&E, eq](Sampler& s) {
                 const Effect b = s.effect();
                 const SpectralForm f = spectral_form(E, b);
                 const State w = s.state();
                 const double v = evaluate(E, w, b);
                 double r = std::max({0.0, f.min_value - v - eq, v - f.max_value - eq});
                 r = std::max(r, std::abs(evaluate(E, pure_state(E, f.terms.front().rays.front()), b) - f.max_value));
                 r = std::max(r, std::abs(evaluate(E, pure_state(E, f.terms.back().rays.front()), b) - f.min_value));
                 return Outcome::within(r, eq, {{"b", b}, {"w", w}});
               }});
  c.push_back({"norm_is_max_state", [&E, eq](Sampler& s) {
                 const Effect b = s.effect();
                 double best = 0.0;
                 for (const EigenRay& p : eigen_rays(E, b)) best = std::max(best, evaluate(E, pure_state(E, p.ray), b));
                 double r = std::abs(best - effect_norm(E, b));
                 for (int k = 0; k < 5; ++k) r = std::max(r, evaluate(E, s.state(), b) - effect_norm(E, b) - eq);
                 return Outcome::within(std::max(r, 0.0), eq, {{"b", b}});
               }});
  c.push_back({"norm_subadditive", [&E, eq](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect b = audit::orthogonal_to(E, s, a);
                 const double r = effect_norm(E, oplus(E, a, b)) - effect_norm(E, a) - effect_norm(E, b);
                 return Outcome::within(std::max(r, 0.0), eq, {{"a", a}, {"b", b}});
               }});
  c.push_back({"norm_faithful", [&E, eq](Sampler& s) {
                 const Effect b = s.coin() ? zero(E) : s.sparse_effect(0.5);
                 const bool zero_norm = effect_norm(E, b) <= eq;
                 const bool is_zero = norm_of(E, b) <= eq;
                 return Outcome::verdict(zero_norm == is_zero, effect_norm(E, b), "norm zero on a nonzero effect",
                                         {{"b", b}});
               }});
  c.push_back({"norm_monotone", [&E, eq, psd](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect b = oplus(E, a, audit::orthogonal_to(E, s, a));
                 const double na = effect_norm(E, a);
                 const double r = std::max({0.0, na - effect_norm(E, b) - eq,
                                            order_violation(E, a, constant(E, na)) - psd});
                 return Outcome::within(r, 0.0, {{"a", a}, {"b", b}});
               }});
  c.push_back({"norm_submultiplicative", [&E, eq](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect b = s.effect();
                 const double r = effect_norm(E, seq(E, a, b)) - effect_norm(E, a) * effect_norm(E, b);
                 return Outcome::within(std::max(r, 0.0), eq, {{"a", a}, {"b", b}});
               }});
  c.push_back({"spectrum_scaling", [&E, eq](Sampler& s) {
                 const Effect b = s.effect();
                 const double l = s.scalar();
                 const SpectrumStats x = spectrum_stats(E, b);
                 const SpectrumStats y = spectrum_stats(E, scalar(E, l, b));
                 double r = std::abs(y.norm - l * x.norm);
                 if (l > 1e-3) {
                   if (x.spectrum.size() != y.spectrum.size()) {
                     return Outcome::verdict(false, 1.0, "scaling changed the spectrum size", {{"b", b}, {"lambda", l}});
                   }
                   for (std::size_t k = 0; k < x.spectrum.size(); ++k) r = std::max(r, std::abs(y.spectrum[k] - l * x.spectrum[k]));
                 }
                 return Outcome::within(r, eq, {{"b", b}, {"lambda", l}});
               }});
  c.push_back({"pseudo_inverse_equations", [&E, eq](Sampler& s) {
                 const Effect a = s.coin() ? s.effect() : s.sparse_effect(0.4);
                 if (norm_of(E, a) <= eq) return Outcome::skip("zero effect");
                 const PseudoInverse p = pseudo_inverse(E, a);
                 const Effect target = raw::scale(E, p.lambda, ceiling(E, a));
                 double r = std::max({distance(E, ceiling(E, p.inverse), ceiling(E, a)),
                                      std::abs(effect_norm(E, p.inverse) - 1.0),
                                      distance(E, seq_raw(E, a, p.inverse), target),
                                      distance(E, seq_raw(E, p.inverse, a), target)});
                 const double mu = 0.05 + 0.95 * s.uniform();
                 r = std::max(r, distance(E, pseudo_inverse(E, scalar(E, mu, a)).inverse, p.inverse));
                 return Outcome::within(r, eq, {{"a", a}, {"mu", mu}});
               }});
  c.push_back({"inverse_audit_law", [&E](Sampler& s) {
                 const Effect a = s.effect_in(audit::kInvertibleFloor, 1.0);
                 const Effect b = s.effect_in(audit::kInvertibleFloor, 1.0);
                 const InverseAudit r = audit_inverse_preserving(E, a, b);
                 const double gap = std::max(0.0, r.lambda_a * r.lambda_b - r.lambda_ab - 1e-12);
                 return Outcome::verdict(r.proportional && gap == 0.0, std::max(r.proportional_residual, gap),
                                         "inverse audit law violated", {{"a", a}, {"b", b}});
               }});
  c.push_back({"invertible_sum", [&E](Sampler& s) {
                 const Effect a = s.effect_in(audit::kInvertibleFloor, 1.0);
                 const Effect b = audit::orthogonal_to(E, s, a);
                 const double m = min_eigenvalue(E, oplus(E, a, b));
                 return Outcome::verdict(is_invertible(E, oplus(E, a, b)), m, "sum lost invertibility",
                                         {{"a", a}, {"b", b}});
               }});
  return c;
}

inline AxiomReport check_theorems(const Algebra& E, std::size_t samples, std::uint64_t seed) {
  return run_checks(E, theorem_checks(E), samples, seed);
}

}  // namespace cosea
