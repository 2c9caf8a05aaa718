#pragma once

// Randomized audit harness: sampled instances of the effect-algebra, convex
// and sequential-product axioms plus derived order properties. The product
// under test is a parameter so alternative products can be audited.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "cosea/sampling.hpp"
#include "cosea/structure.hpp"

namespace cosea {

/// A named input of a failed instance.
struct Input {
  std::string name;
  std::variant<double, Effect, State> value;
};

struct Witness {
  std::size_t index = 0;
  std::uint64_t seed = 0;  // sampler seed of this instance
  double residual = 0.0;
  std::string note;
  std::vector<Input> inputs;
};

struct CheckResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t passed = 0;
  std::size_t skipped = 0;  // hypothesis not met
  double max_residual = 0.0;
  std::vector<Witness> witnesses;  // at most kMaxWitnesses

  std::size_t failed() const { return instances - passed - skipped; }
  bool ok() const { return failed() == 0; }
};

struct AxiomReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::string algebra;
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const CheckResult& c : checks) {
      if (!c.ok()) return false;
    }
    return true;
  }

  const CheckResult* find(const std::string& name) const {
    for (const CheckResult& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

/// Result of one sampled instance.
struct Outcome {
  enum class Status { pass, fail, skip } status = Status::pass;
  double residual = 0.0;
  std::string note;
  std::vector<Input> inputs;

  static Outcome skip(std::string why = {}) {
    Outcome o;
    o.status = Status::skip;
    o.note = std::move(why);
    return o;
  }

  /// Pass iff `residual <= tol`.
  static Outcome within(double residual, double tol, std::vector<Input> inputs = {}) {
    Outcome o;
    o.residual = residual;
    o.status = residual <= tol ? Status::pass : Status::fail;
    o.inputs = std::move(inputs);
    return o;
  }

  static Outcome verdict(bool ok, double residual, std::string note, std::vector<Input> inputs = {}) {
    Outcome o;
    o.residual = residual;
    o.status = ok ? Status::pass : Status::fail;
    o.note = std::move(note);
    o.inputs = std::move(inputs);
    return o;
  }
};

struct CheckSpec {
  std::string name;
  std::function<Outcome(Sampler&)> run;
};

inline constexpr std::size_t kMaxWitnesses = 5;

/// Runs every check on `samples` instances. Instance i of check `name` draws
/// from a sampler seeded with mix_seed(seed, name, i), so any witness can be
/// replayed on its own.
inline AxiomReport run_checks(const Algebra& E, const std::vector<CheckSpec>& checks, std::size_t samples,
                              std::uint64_t seed) {
  AxiomReport report;
  report.seed = seed;
  report.samples = samples;
  report.algebra = E.describe();
  Sampler sampler(E, seed);
  for (const CheckSpec& spec : checks) {
    CheckResult res;
    res.name = spec.name;
    for (std::size_t i = 0; i < samples; ++i) {
      const std::uint64_t s = mix_seed(seed, spec.name, i);
      sampler.reseed(s);
      Outcome o;
      try {
        o = spec.run(sampler);
      } catch (const std::exception& e) {
        o = Outcome::verdict(false, std::numeric_limits<double>::infinity(), e.what());
      }
      ++res.instances;
      if (o.status == Outcome::Status::skip) {
        ++res.skipped;
        continue;
      }
      if (std::isfinite(o.residual)) res.max_residual = std::max(res.max_residual, o.residual);
      if (o.status == Outcome::Status::pass) {
        ++res.passed;
      } else {
        if (!std::isfinite(o.residual)) res.max_residual = o.residual;
        if (res.witnesses.size() < kMaxWitnesses) {
          res.witnesses.push_back({i, s, o.residual, std::move(o.note), std::move(o.inputs)});
        }
      }
    }
    report.checks.push_back(std::move(res));
  }
  return report;
}

/// Raw product under test: Effect(const Algebra&, const Effect&, const Effect&).
using ProductFn = std::function<Effect(const Algebra&, const Effect&, const Effect&)>;

inline ProductFn standard_product() { return [](const Algebra& E, const Effect& a, const Effect& b) { return seq_raw(E, a, b); }; }

/// (AB + BA)/2: additive and unital but not order preserving.
inline ProductFn jordan_product() {
  return [](const Algebra& E, const Effect& a, const Effect& b) {
    return detail::map_components(
        E, [](const RealVector& x, const RealVector& y) { return RealVector(x.cwiseProduct(y)); },
        [](const Matrix& x, const Matrix& y) { return Matrix(0.5 * (x * y + y * x)); }, a, b);
  };
}

namespace audit {

/// Spectral projections of a random effect; functions of them commute.
inline std::vector<Effect> random_projections(Sampler& s) {
  const Algebra& E = s.algebra();
  std::vector<Effect> out;
  for (const SpectralTerm& t : spectral_form(E, s.effect()).terms) out.push_back(t.eigeneffect);
  return out;
}

/// sum_k w_k p_k (raw).
inline Effect combination(const Algebra& E, const std::vector<Effect>& ps, const std::vector<double>& w) {
  Effect out = zero(E);
  for (std::size_t k = 0; k < ps.size(); ++k) out = raw::lincomb(E, 1.0, out, w[k], ps[k]);
  return out;
}

inline std::vector<double> uniforms(Sampler& s, std::size_t n) {
  std::vector<double> w;
  for (std::size_t k = 0; k < n; ++k) w.push_back(s.uniform());
  return w;
}

/// An effect orthogonal to `a`: a' o x with the backend product.
inline Effect orthogonal_to(const Algebra& E, Sampler& s, const Effect& a) {
  return seq(E, complement(E, a), s.effect());
}

/// Group projections: a random partition of the spectral projections of a
/// random effect into (up to) two groups.
inline std::vector<Effect> random_groups(Sampler& s) {
  const Algebra& E = s.algebra();
  const std::vector<Effect> ps = random_projections(s);
  std::vector<Effect> groups{zero(E), zero(E)};
  for (const Effect& p : ps) {
    Effect& g = groups[s.index(2)];
    g = raw::add(E, g, p);
  }
  std::vector<Effect> out;
  for (Effect& g : groups) {
    if (norm_of(E, g) > 0.5) out.push_back(settle(E, g, "group"));
  }
  return out;
}

/// sum_g Q_g x Q_g: the block-diagonal part of x with respect to the groups.
inline Effect pinch(const Algebra& E, const std::vector<Effect>& groups, const Effect& x) {
  Effect out = zero(E);
  for (const Effect& q : groups) out = raw::add(E, out, seq_raw(E, q, x));
  return settle(E, out, "pinched effect");
}

}  // namespace audit

/// The fourteen axiom checks (EA1-EA4, CO1-CO4, S1-S6).
inline std::vector<CheckSpec> axiom_checks(const Algebra& E, ProductFn P) {
  const double eq = E.tol().eq;
  std::vector<CheckSpec> c;
  auto P_commutes = [P, &E](const Effect& a, const Effect& b) { return distance(E, P(E, a, b), P(E, b, a)); };

  c.push_back({"EA1", [&E, eq](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect b = audit::orthogonal_to(E, s, a);
                 const double r = std::max(order_violation(E, b, complement(E, a)),
                                           distance(E, oplus(E, a, b), oplus(E, b, a)));
                 return Outcome::within(r, eq, {{"a", a}, {"b", b}});
               }});
  c.push_back({"EA2", [&E, eq](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect b = audit::orthogonal_to(E, s, a);
                 const Effect ab = oplus(E, a, b);
                 const Effect cc = audit::orthogonal_to(E, s, ab);
                 const double r = std::max({order_violation(E, b, complement(E, cc)),
                                            order_violation(E, a, complement(E, oplus(E, b, cc))),
                                            distance(E, oplus(E, a, oplus(E, b, cc)), oplus(E, ab, cc))});
                 return Outcome::within(r, eq, {{"a", a}, {"b", b}, {"c", cc}});
               }});
  c.push_back({"EA3", [&E, eq](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect ac = complement(E, a);
                 // Uniqueness: the solution of a + x = 1 obtained by subtraction is a' again.
                 const double r = std::max({order_violation(E, a, complement(E, ac)),
                                            distance(E, oplus(E, a, ac), unit(E)),
                                            distance(E, ominus(E, unit(E), a), ac)});
                 return Outcome::within(r, eq, {{"a", a}});
               }});
  c.push_back({"EA4", [&E, eq](Sampler& s) {
                 const int mode = static_cast<int>(s.index(3));
                 const Effect a = mode == 0 ? zero(E) : mode == 1 ? raw::scale(E, 1e-13, s.effect()) : s.effect();
                 if (!orthogonal(E, a, unit(E))) return Outcome::within(0.0, eq, {{"a", a}});
                 return Outcome::within(norm_of(E, a), eq, {{"a", a}});
               }});
  c.push_back({"CO1", [&E, eq](Sampler& s) {
                 const Effect a = s.effect();
                 const double al = s.scalar(), be = s.scalar();
                 const double r = distance(E, scalar(E, al, scalar(E, be, a)), scalar(E, al * be, a));
                 return Outcome::within(r, eq, {{"a", a}, {"alpha", al}, {"beta", be}});
               }});
  c.push_back({"CO2", [&E, eq](Sampler& s) {
                 const Effect a = s.effect();
                 const double al = s.scalar();
                 const double be = (1.0 - al) * s.scalar();
                 const Effect x = scalar(E, al, a), y = scalar(E, be, a);
                 const double r = std::max(order_violation(E, x, complement(E, y)),
                                           distance(E, scalar(E, al + be, a), oplus(E, x, y)));
                 return Outcome::within(r, eq, {{"a", a}, {"alpha", al}, {"beta", be}});
               }});
  c.push_back({"CO3", [&E, eq](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect b = audit::orthogonal_to(E, s, a);
                 const double l = s.scalar();
                 const Effect x = scalar(E, l, a), y = scalar(E, l, b);
                 const double r = std::max(order_violation(E, x, complement(E, y)),
                                           distance(E, scalar(E, l, oplus(E, a, b)), oplus(E, x, y)));
                 return Outcome::within(r, eq, {{"a", a}, {"b", b}, {"lambda", l}});
               }});
  c.push_back({"CO4", [&E, eq](Sampler& s) {
                 const Effect a = s.effect();
                 return Outcome::within(distance(E, scalar(E, 1.0, a), a), eq, {{"a", a}});
               }});
  c.push_back({"S1", [&E, eq, P](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect b = s.effect();
                 const Effect d = audit::orthogonal_to(E, s, b);
                 const double r = distance(E, P(E, a, oplus(E, b, d)), raw::add(E, P(E, a, b), P(E, a, d)));
                 return Outcome::within(r, eq, {{"a", a}, {"b", b}, {"c", d}});
               }});
  c.push_back({"S2", [&E, eq, P](Sampler& s) {
                 const Effect a = s.effect();
                 return Outcome::within(distance(E, P(E, unit(E), a), a), eq, {{"a", a}});
               }});
  c.push_back({"S3", [&E, eq, P, P_commutes](Sampler& s) {
                 // Functions on disjoint sets of spectral projections multiply to zero.
                 const std::vector<Effect> ps = audit::random_projections(s);
                 std::vector<double> wa(ps.size(), 0.0), wb(ps.size(), 0.0);
                 for (std::size_t k = 0; k < ps.size(); ++k) (s.coin() ? wa : wb)[k] = s.uniform();
                 const Effect a = settle(E, audit::combination(E, ps, wa));
                 const Effect b = settle(E, audit::combination(E, ps, wb));
                 if (norm_of(E, P(E, a, b)) > eq) return Outcome::skip("a o b is not zero");
                 return Outcome::within(P_commutes(a, b), eq, {{"a", a}, {"b", b}});
               }});
  c.push_back({"S4", [&E, eq, P, P_commutes](Sampler& s) {
                 const std::vector<Effect> ps = audit::random_projections(s);
                 const Effect a = settle(E, audit::combination(E, ps, audit::uniforms(s, ps.size())));
                 const Effect b = settle(E, audit::combination(E, ps, audit::uniforms(s, ps.size())));
                 const Effect cc = s.effect();
                 if (P_commutes(a, b) > eq) return Outcome::skip("a and b do not commute");
                 const double r = std::max(P_commutes(a, complement(E, b)),
                                           distance(E, P(E, a, P(E, b, cc)), P(E, P(E, a, b), cc)));
                 return Outcome::within(r, eq, {{"a", a}, {"b", b}, {"c", cc}});
               }});
  c.push_back({"S5", [&E, eq, P, P_commutes](Sampler& s) {
                 // c is constant on groups; a and b are block diagonal for them.
                 const std::vector<Effect> groups = audit::random_groups(s);
                 const Effect cc = settle(E, audit::combination(E, groups, audit::uniforms(s, groups.size())));
                 const Effect a = audit::pinch(E, groups, s.effect());
                 const Effect b = seq(E, complement(E, a), audit::pinch(E, groups, s.effect()));
                 if (P_commutes(cc, a) > eq || P_commutes(cc, b) > eq) return Outcome::skip("c does not commute");
                 const double r = std::max(P_commutes(cc, P(E, a, b)), P_commutes(cc, oplus(E, a, b)));
                 return Outcome::within(r, eq, {{"a", a}, {"b", b}, {"c", cc}});
               }});
  c.push_back({"S6", [&E, eq, P](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect b = s.effect();
                 const double l = s.scalar();
                 const Effect ref = raw::scale(E, l, P(E, a, b));
                 const double r = std::max(distance(E, P(E, scalar(E, l, a), b), ref),
                                           distance(E, P(E, a, scalar(E, l, b)), ref));
                 return Outcome::within(r, eq, {{"a", a}, {"b", b}, {"lambda", l}});
               }});
  return c;
}

/// Order-theoretic consequences of the axioms: a o b <= a, monotonicity,
/// sharpness as idempotence, orthogonality to sharps, order against sharps,
/// and the commutation rules for sums and differences.
inline std::vector<CheckSpec> product_property_checks(const Algebra& E, ProductFn P) {
  const double eq = E.tol().eq;
  const double psd = E.tol().psd;
  std::vector<CheckSpec> c;
  auto P_commutes = [P, &E](const Effect& a, const Effect& b) { return distance(E, P(E, a, b), P(E, b, a)); };

  c.push_back({"product_below_first", [&E, psd, P](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect b = s.effect();
                 return Outcome::within(order_violation(E, P(E, a, b), a), psd, {{"a", a}, {"b", b}});
               }});
  c.push_back({"product_monotone", [&E, psd, P](Sampler& s) {
                 const Effect a = s.effect();
                 const Effect b = oplus(E, a, audit::orthogonal_to(E, s, a));
                 const Effect cc = s.effect();
                 return Outcome::within(order_violation(E, P(E, cc, a), P(E, cc, b)), psd,
                                        {{"a", a}, {"b", b}, {"c", cc}});
               }});
  c.push_back({"sharp_iff_idempotent", [&E, eq, P](Sampler& s) {
                 const Effect a = s.coin() ? s.sharp() : s.effect();
                 const double d = distance(E, P(E, a, a), a);
                 const bool sharp = is_sharp(E, a);
                 const bool idempotent = d <= eq;
                 return Outcome::verdict(sharp == idempotent, sharp ? d : 0.0, "sharpness and idempotence disagree",
                                         {{"a", a}});
               }});
  c.push_back({"sharp_orthogonality", [&E, eq, P](Sampler& s) {
                 const Effect b = s.sharp();
                 const Effect a = s.coin() ? seq(E, complement(E, b), s.effect()) : s.effect();
                 const double z = norm_of(E, P(E, a, b));
                 const bool zero_product = z <= eq;
                 const bool orth = orthogonal(E, a, b);
                 return Outcome::verdict(zero_product == orth, orth ? z : 0.0, "a o b = 0 and a perp b disagree",
                                         {{"a", a}, {"b", b}});
               }});
  c.push_back({"sharp_order", [&E, eq, P](Sampler& s) {
                 const Effect b = s.sharp();
                 const int mode = static_cast<int>(s.index(3));
                 const Effect a = mode == 0   ? seq(E, b, s.effect())
                                  : mode == 1 ? oplus(E, b, seq(E, complement(E, b), s.effect()))
                                              : s.effect();
                 const double da = std::max(distance(E, P(E, a, b), a), distance(E, P(E, b, a), a));
                 const double db = std::max(distance(E, P(E, a, b), b), distance(E, P(E, b, a), b));
                 const bool below = le(E, a, b), above = le(E, b, a);
                 const bool ok = below == (da <= eq) && above == (db <= eq);
                 return Outcome::verdict(ok, std::max(below ? da : 0.0, above ? db : 0.0),
                                         "order against a sharp effect disagrees with the products",
                                         {{"a", a}, {"b", b}});
               }});
  c.push_back({"commute_remainder", [&E, eq, P_commutes](Sampler& s) {
                 const std::vector<Effect> groups = audit::random_groups(s);
                 const Effect a = settle(E, audit::combination(E, groups, audit::uniforms(s, groups.size())));
                 const Effect cc = audit::pinch(E, groups, s.effect());
                 const Effect d = seq(E, complement(E, cc), audit::pinch(E, groups, s.effect()));
                 if (P_commutes(a, cc) > eq || P_commutes(a, oplus(E, cc, d)) > eq) return Outcome::skip("hypothesis");
                 return Outcome::within(P_commutes(a, d), eq, {{"a", a}, {"c", cc}, {"d", d}});
               }});
  c.push_back({"commute_difference", [&E, eq, P_commutes](Sampler& s) {
                 const std::vector<Effect> groups = audit::random_groups(s);
                 const Effect a = settle(E, audit::combination(E, groups, audit::uniforms(s, groups.size())));
                 const Effect cc = audit::pinch(E, groups, s.effect());
                 const Effect b = oplus(E, cc, seq(E, complement(E, cc), audit::pinch(E, groups, s.effect())));
                 if (P_commutes(a, cc) > eq || P_commutes(a, b) > eq) return Outcome::skip("hypothesis");
                 return Outcome::within(P_commutes(a, ominus(E, b, cc)), eq, {{"a", a}, {"b", b}, {"c", cc}});
               }});
  c.push_back({"difference_closure", [&E, eq](Sampler& s) {
                 const Effect cc = s.effect();
                 const Effect b = oplus(E, cc, audit::orthogonal_to(E, s, cc));
                 return Outcome::within(membership_residual(E, ominus(E, b, cc)), eq, {{"b", b}, {"c", cc}});
               }});
  return c;
}

/// Axioms followed by the derived product properties, for any product.
inline AxiomReport check_axioms(const Algebra& E, std::size_t samples, std::uint64_t seed,
                                ProductFn P = standard_product(), bool include_derived = true) {
  std::vector<CheckSpec> checks = axiom_checks(E, P);
  if (include_derived) {
    std::vector<CheckSpec> more = product_property_checks(E, P);
    checks.insert(checks.end(), more.begin(), more.end());
  }
  return run_checks(E, checks, samples, seed);
}

}  // namespace cosea
