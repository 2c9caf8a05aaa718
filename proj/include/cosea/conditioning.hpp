#pragma once

// Conditional states, the maps gamma_a on states extended by the zero
// functional, certainty states and dispersion.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cosea/spectral.hpp"

namespace cosea {

/// Unnormalized conditional functional c -> w(b o c).
inline State condition_unnormalized(const Algebra& E, const State& w, const Effect& b) {
  check_state_shape(E, w);
  check_shape(E, b);
  std::vector<Component> parts;
  for (std::size_t i = 0; i < E.arity(); ++i) {
    if (E.summand(i).backend == Backend::classical) {
      parts.emplace_back(RealVector(std::get<RealVector>(w.parts()[i]).cwiseProduct(b.vec(i))));
    } else {
      const Matrix r = linalg::psd_sqrt(b.mat(i));
      parts.emplace_back(Matrix(linalg::hermitize(r * std::get<Matrix>(w.parts()[i]) * r)));
    }
  }
  return State(std::move(parts));
}

inline State scale_state(const State& w, double s) {
  std::vector<Component> parts;
  for (const Component& c : w.parts()) {
    if (const auto* v = std::get_if<RealVector>(&c)) {
      parts.emplace_back(RealVector(s * *v));
    } else {
      parts.emplace_back(Matrix(s * std::get<Matrix>(c)));
    }
  }
  return State(std::move(parts));
}

/// The state c -> w(b o c) / w(b). Throws ZeroProbability when w(b) <= eq.
inline State condition(const Algebra& E, const State& w, const Effect& b) {
  const double p = evaluate(E, w, b);
  if (p <= E.tol().eq) fail(ErrorCode::zero_probability, "conditioning event has probability " + std::to_string(p));
  return scale_state(condition_unnormalized(E, w, b), 1.0 / p);
}

/// gamma_a: the zero functional when w = 0 or w(a) = 0, else w(. | a).
inline State gamma_apply(const Algebra& E, const Effect& a, const State& w) {
  check_state_shape(E, w);
  if (w.is_zero(E.tol().eq) || evaluate(E, w, a) <= E.tol().eq) return zero_state(E);
  return condition(E, w, a);
}

/// Residuals of the four conditional-probability identities and the
/// composition law; identities whose hypotheses fail are skipped and named.
struct ConditionReport {
  std::optional<double> additivity;      // w(a+b) g_{a+b}(w)(c) = w(a) g_a(w)(c) + w(b) g_b(w)(c)
  std::optional<double> complement;      // w(a') g_{a'}(w)(b) = w(b) - w(a) g_a(w)(b)
  std::optional<double> product;         // w(a o b) g_{a o b}(w)(c) = w((a o b) o c)
  std::optional<double> iterated;        // w(a o b) [g_b g_a (w)](c) = w(a o (b o c))
  std::optional<double> composition;     // g_b g_a = g_a g_b = g_{a o b} when a | b
  std::vector<std::string> skipped;      // identities whose hypotheses failed
  std::vector<std::string> zero_branch;  // denominators that vanished

  double max_residual() const {
    double m = 0.0;
    for (const auto& r : {additivity, complement, product, iterated, composition}) {
      if (r) m = std::max(m, *r);
    }
    return m;
  }
};

inline ConditionReport verify_gamma_identities(const Algebra& E, const Effect& a, const Effect& b, const Effect& c,
                                               const State& w) {
  ConditionReport r;
  const double eq = E.tol().eq;
  auto ev = [&](const State& s, const Effect& x) { return evaluate(E, s, x); };
  auto note_zero = [&](const std::string& name, double p) {
    if (p <= eq) r.zero_branch.push_back(name);
  };
  note_zero("w", w.mass());
  note_zero("w(a)", ev(w, a));
  note_zero("w(b)", ev(w, b));

  if (orthogonal(E, a, b) && commutes(E, c, a) && commutes(E, c, b)) {
    const Effect ab = oplus(E, a, b);
    note_zero("w(a+b)", ev(w, ab));
    const double lhs = ev(w, ab) * ev(gamma_apply(E, ab, w), c);
    const double rhs = ev(w, a) * ev(gamma_apply(E, a, w), c) + ev(w, b) * ev(gamma_apply(E, b, w), c);
    r.additivity = std::abs(lhs - rhs);
  } else {
    r.skipped.push_back("additivity");
  }

  if (commutes(E, a, b)) {
    const Effect ac = complement(E, a);
    note_zero("w(a')", ev(w, ac));
    const double lhs = ev(w, ac) * ev(gamma_apply(E, ac, w), b);
    const double rhs = ev(w, b) - ev(w, a) * ev(gamma_apply(E, a, w), b);
    r.complement = std::abs(lhs - rhs);
  } else {
    r.skipped.push_back("complement");
  }

  const Effect ab = seq(E, a, b);
  note_zero("w(a o b)", ev(w, ab));
  r.product = std::abs(ev(w, ab) * ev(gamma_apply(E, ab, w), c) - ev(w, seq(E, ab, c)));
  const State gba = gamma_apply(E, b, gamma_apply(E, a, w));
  r.iterated = std::abs(ev(w, ab) * ev(gba, c) - ev(w, seq(E, a, seq(E, b, c))));

  if (commutes(E, a, b)) {
    const State gab = gamma_apply(E, b, gamma_apply(E, a, w));
    const State gba2 = gamma_apply(E, a, gamma_apply(E, b, w));
    const State gprod = gamma_apply(E, ab, w);
    r.composition = std::max(state_distance(E, gab, gprod), state_distance(E, gba2, gprod));
  } else {
    r.skipped.push_back("composition");
  }
  return r;
}

enum class Certainty { none, unique, many };

inline const char* to_string(Certainty c) {
  switch (c) {
    case Certainty::none: return "none";
    case Certainty::unique: return "unique";
    case Certainty::many: return "many";
  }
  return "?";
}

struct CertaintyVerdict {
  Certainty kind = Certainty::none;
  std::optional<State> state;  // set for `unique`
  std::optional<Ray> atom;     // the eigenvector carrying eigenvalue 1
};

/// Whether exactly one state gives `a` probability 1. Eigenvalues within the
/// cluster gap of 1 count as 1, so boundary cases report `many`.
inline CertaintyVerdict unique_certainty_state(const Algebra& E, const Effect& a) {
  std::vector<Ray> top;
  for (const EigenRay& p : eigen_rays(E, a)) {
    if (p.value >= 1.0 - E.tol().cluster) top.push_back(p.ray);
  }
  CertaintyVerdict v;
  if (top.empty()) return v;
  if (top.size() > 1) {
    v.kind = Certainty::many;
    return v;
  }
  v.kind = Certainty::unique;
  v.atom = top.front();
  v.state = pure_state(E, top.front());
  return v;
}

/// b = lambda a + c with a sharp, a o c = 0 and w(a) = 1.
struct ConstantDecomposition {
  double lambda = 0.0;
  Effect a;
  Effect c;
  double mass = 0.0;                     // w(a)
  bool a_sharp = false;
  double orthogonality_residual = 0.0;   // ||a o c||
  double reconstruction_residual = 0.0;  // ||b - (lambda a + c)||
};

struct DispersionReport {
  double dispersion = 0.0;  // w(b o b) - w(b)^2
  bool dispersion_free = false;
  bool constant_ae = false;  // decomposition with w(a) >= 1 - eq exists
  std::optional<ConstantDecomposition> decomposition;
};

/// Variance test together with the constant-almost-everywhere decomposition
/// read off a diagonalizing context of b.
inline DispersionReport dispersion_analysis(const Algebra& E, const State& w, const Effect& b) {
  const double eq = E.tol().eq;
  DispersionReport r;
  const double mean = evaluate(E, w, b);
  r.dispersion = evaluate(E, w, seq(E, b, b)) - mean * mean;
  r.dispersion_free = std::abs(r.dispersion) <= eq;

  const ContextRepresentation rep = context_representation(E, b);
  ConstantDecomposition d;
  d.lambda = mean;
  d.a = zero(E);
  d.c = zero(E);
  for (std::size_t k = 0; k < rep.context.size(); ++k) {
    const Effect& m = rep.context.members()[k];
    const bool level = std::abs(rep.coefficients[k] - mean) <= E.tol().cluster;
    if (level && evaluate(E, w, m) > eq) {
      d.a = raw::add(E, d.a, m);
    } else {
      d.c = raw::lincomb(E, 1.0, d.c, rep.coefficients[k], m);
    }
  }
  d.a = settle(E, d.a, "support");
  d.c = settle(E, d.c, "remainder");
  d.mass = evaluate(E, w, d.a);
  d.a_sharp = is_sharp(E, d.a);
  d.orthogonality_residual = norm_of(E, seq_raw(E, d.a, d.c));
  d.reconstruction_residual = distance(E, b, raw::lincomb(E, d.lambda, d.a, 1.0, d.c));
  r.constant_ae = d.mass >= 1.0 - eq;
  if (r.constant_ae) r.decomposition = std::move(d);
  return r;
}

struct HatLawReport {
  double product = 0.0;      // ||a o b - a-hat(b) a||
  double absorption = 0.0;   // |a-hat(b) - a-hat(a o b)|
  double universality = 0.0; // |condition(w, a)(b) - a-hat(b)| over states with w(a) > eq
  std::size_t states_used = 0;
};

inline HatLawReport verify_hat_state_laws(const Algebra& E, const Effect& a, const std::vector<Effect>& panel,
                                          const std::vector<State>& states) {
  const State h = hat_state(E, a);
  HatLawReport r;
  for (const Effect& b : panel) {
    const double hb = evaluate(E, h, b);
    const Effect ab = seq_raw(E, a, b);
    r.product = std::max(r.product, distance(E, ab, raw::scale(E, hb, a)));
    r.absorption = std::max(r.absorption, std::abs(hb - evaluate(E, h, ab)));
  }
  for (const State& w : states) {
    if (evaluate(E, w, a) <= E.tol().eq) continue;
    ++r.states_used;
    const State cw = condition(E, w, a);
    for (const Effect& b : panel) r.universality = std::max(r.universality, std::abs(evaluate(E, cw, b) - evaluate(E, h, b)));
  }
  return r;
}

}  // namespace cosea
