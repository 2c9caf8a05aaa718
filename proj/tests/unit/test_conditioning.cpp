#include "helpers.hpp"

using namespace th;

namespace {

const Algebra H2 = Algebra::hilbertian(2);
const Algebra H3 = Algebra::hilbertian(3);
const State kMixed2 = density_state(Matrix::Identity(2, 2) / 2.0);

TEST(Condition, Examples) {
  Sampler s(H3, 6);
  const State w = s.state();
  EXPECT_LE(state_distance(H3, condition(H3, w, unit(H3)), w), 1e-12);
  const State c = condition(H2, kMixed2, projector({1, 0}));
  EXPECT_NEAR(evaluate(H2, c, projector({1, 1})), 0.5, 1e-12);
  const Algebra C2 = Algebra::classical(2);
  const State point = condition(C2, classical_state(vec({0.5, 0.5})), C(vec({1, 0})));
  EXPECT_LE(state_distance(C2, point, classical_state(vec({1, 0}))), 1e-15);
  expect_code([&] { condition(C2, classical_state(vec({0, 1})), C(vec({1, 0}))); }, ErrorCode::zero_probability);
}

TEST(Condition, ProducesStates) {
  const Algebra E = direct_sum({H3, Algebra::classical(2)});
  Sampler s(E, 7);
  for (int k = 0; k < 40; ++k) {
    const State w = condition(E, s.state(), s.effect());
    EXPECT_NEAR(evaluate(E, w, unit(E)), 1.0, 1e-12);
    const Effect a = s.effect(), b = audit::orthogonal_to(E, s, a);
    EXPECT_NEAR(evaluate(E, w, oplus(E, a, b)), evaluate(E, w, a) + evaluate(E, w, b), 1e-12);
    EXPECT_GE(evaluate(E, w, a), -1e-12);
  }
}

TEST(Gamma, Examples) {
  Sampler s(H2, 8);
  const State w = s.state();
  EXPECT_TRUE(gamma_apply(H2, zero(H2), w).is_zero(1e-15));
  EXPECT_LE(state_distance(H2, gamma_apply(H2, unit(H2), w), w), 1e-12);
  const Effect a = projector({1, 1});
  EXPECT_LE(state_distance(H2, gamma_apply(H2, a, hat_state(H2, a)), hat_state(H2, a)), 1e-12);
  EXPECT_TRUE(gamma_apply(H2, projector({1, 0}), pure_state(H2, {0, CVector::Unit(2, 1)})).is_zero(1e-15));
  EXPECT_TRUE(gamma_apply(H2, a, zero_state(H2)).is_zero(1e-15));
  EXPECT_NEAR(evaluate(H2, zero_state(H2), unit(H2)), 0.0, 0.0);
}

TEST(GammaIdentities, ZeroFunctional) {
  Sampler s(H3, 9);
  const ConditionReport r = verify_gamma_identities(H3, s.effect(), s.effect(), s.effect(), zero_state(H3));
  EXPECT_EQ(r.max_residual(), 0.0);
}

TEST(GammaIdentities, CommutingDiagonal) {
  const Effect a = H(diag({0.2, 0.0, 0.5}));
  const Effect b = H(diag({0.3, 0.6, 0.1}));
  const Effect c = H(diag({0.9, 0.4, 0.7}));
  const ConditionReport r = verify_gamma_identities(H3, a, b, c, density_state(Matrix::Identity(3, 3) / 3.0));
  ASSERT_TRUE(r.additivity && r.complement && r.product && r.iterated && r.composition);
  EXPECT_LT(r.max_residual(), 1e-12);
}

TEST(GammaIdentities, RandomHilbertian) {
  Sampler s(H3, 10);
  for (int k = 0; k < 30; ++k) {
    const ConditionReport r = verify_gamma_identities(H3, s.effect(), s.effect(), s.effect(), s.state());
    ASSERT_TRUE(r.product && r.iterated);
    EXPECT_FALSE(r.complement.has_value());
    EXPECT_LT(*r.product, 1e-9);
    EXPECT_LT(*r.iterated, 1e-9);
    EXPECT_FALSE(r.skipped.empty());
  }
}

TEST(GammaIdentities, FlagsVanishingDenominators) {
  const Effect a = projector({1, 0});
  const State w = pure_state(H2, {0, CVector::Unit(2, 1)});
  const ConditionReport r = verify_gamma_identities(H2, a, H(diag({0.5, 0.5})), unit(H2), w);
  EXPECT_FALSE(r.zero_branch.empty());
  EXPECT_LT(r.max_residual(), 1e-12);
}

TEST(GammaFixedPoint, IterationConvergesToHatState) {
  const Algebra E = direct_sum({H3, Algebra::classical(2)});
  Sampler s(E, 11);
  for (int k = 0; k < 20; ++k) {
    const Effect a = s.one_dimensional();
    State w = s.state();
    for (int it = 0; it < 3 && !w.is_zero(1e-12); ++it) w = gamma_apply(E, a, w);
    if (w.is_zero(1e-12)) continue;
    EXPECT_LE(state_distance(E, w, hat_state(E, a)), 1e-9);
  }
}

TEST(UniqueCertainty, Examples) {
  const CertaintyVerdict u = unique_certainty_state(H2, H(diag({1, 0.3})));
  ASSERT_EQ(u.kind, Certainty::unique);
  ASSERT_TRUE(u.state);
  EXPECT_NEAR(evaluate(H2, *u.state, projector({1, 0})), 1.0, 1e-12);
  EXPECT_EQ(unique_certainty_state(H3, H(diag({1, 1, 0.3}))).kind, Certainty::many);
  EXPECT_EQ(unique_certainty_state(H2, H(diag({0.9, 0.3}))).kind, Certainty::none);
  EXPECT_EQ(unique_certainty_state(H2, H(diag({1, 1 - 1e-9}))).kind, Certainty::many);
}

TEST(UniqueCertainty, SharpsAreUniqueExactlyWhenOneDimensional) {
  const Algebra E = direct_sum({H3, Algebra::classical(2)});
  Sampler s(E, 12);
  for (int k = 0; k < 60; ++k) {
    const Effect a = k % 2 ? s.one_dimensional() : s.sharp();
    const CertaintyVerdict v = unique_certainty_state(E, a);
    EXPECT_EQ(v.kind == Certainty::unique, is_one_dimensional(E, a));
  }
}

TEST(Dispersion, Examples) {
  Sampler s(H2, 13);
  const DispersionReport scalar = dispersion_analysis(H2, s.state(), constant(H2, 0.35));
  EXPECT_TRUE(scalar.dispersion_free);
  ASSERT_TRUE(scalar.decomposition);
  EXPECT_NEAR(scalar.decomposition->lambda, 0.35, 1e-12);

  const DispersionReport point = dispersion_analysis(H2, pure_state(H2, {0, CVector::Unit(2, 0)}), H(diag({0.7, 0.2})));
  EXPECT_TRUE(point.dispersion_free);
  EXPECT_TRUE(point.constant_ae);
  ASSERT_TRUE(point.decomposition);
  EXPECT_NEAR(point.decomposition->lambda, 0.7, 1e-12);
  EXPECT_TRUE(equal(H2, point.decomposition->a, H(diag({1, 0}))));
  EXPECT_TRUE(equal(H2, point.decomposition->c, H(diag({0, 0.2}))));

  const DispersionReport mixed = dispersion_analysis(H2, kMixed2, H(diag({1, 0})));
  EXPECT_FALSE(mixed.dispersion_free);
  EXPECT_NEAR(mixed.dispersion, 0.25, 1e-12);
}

TEST(Dispersion, VerdictMatchesDecomposition) {
  const Algebra E = direct_sum({H3, Algebra::classical(2)});
  Sampler s(E, 14);
  for (int k = 0; k < 60; ++k) {
    const Effect b = s.effect_with_values({0.2, 0.5, 0.9});
    const SpectralForm f = spectral_form(E, b);
    const Effect& p = f.terms[s.index(f.terms.size())].eigeneffect;
    const State w = k % 2 ? condition(E, s.state(), p) : s.state();
    const DispersionReport r = dispersion_analysis(E, w, b);
    EXPECT_EQ(r.dispersion_free, r.constant_ae);
    if (r.decomposition) {
      EXPECT_TRUE(r.decomposition->a_sharp);
      EXPECT_LE(r.decomposition->orthogonality_residual, E.tol().eq);
      EXPECT_LE(r.decomposition->reconstruction_residual, E.tol().eq);
    }
    if (k % 2) {
      EXPECT_TRUE(r.dispersion_free);
    }
  }
}

TEST(HatLaws, Examples) {
  const std::vector<State> states{kMixed2};
  const HatLawReport unitr = verify_hat_state_laws(H2, projector({1, 0}), {unit(H2)}, states);
  EXPECT_EQ(unitr.product, 0.0);
  EXPECT_LE(unitr.absorption, 1e-15);
  EXPECT_LE(unitr.universality, 1e-15);
  EXPECT_TRUE(equal(H2, seq(H2, projector({1, 0}), H(diag({0.3, 0.9}))), H(diag({0.3, 0}))));
  Sampler s(H2, 15);
  const HatLawReport r = verify_hat_state_laws(H2, projector({1, 1}), {s.effect(), s.effect(), s.effect()}, states);
  EXPECT_LT(r.product, 1e-9);
  EXPECT_LT(r.absorption, 1e-9);
  EXPECT_LT(r.universality, 1e-9);
  EXPECT_EQ(r.states_used, 1u);
  expect_code([] { verify_hat_state_laws(H2, unit(H2), {}, {}); }, ErrorCode::not_one_dimensional);
}

TEST(HatLaws, ConditioningForgetsTheState) {
  const Algebra E = direct_sum({H3, Algebra::classical(2)});
  Sampler s(E, 16);
  for (int k = 0; k < 20; ++k) {
    const Effect a = s.one_dimensional();
    const State x = condition(E, s.state(), a), y = condition(E, s.state(), a);
    EXPECT_LE(state_distance(E, x, y), 1e-6);
  }
}

TEST(Order, AgreesWithContextHatStates) {
  const Algebra E = direct_sum({H2, Algebra::classical(2)});
  Sampler s(E, 17);
  std::vector<State> panel;
  for (int c = 0; c < 6; ++c) {
    const Context A = s.context();
    for (const Effect& m : A.members()) panel.push_back(hat_state(E, m));
  }
  for (int k = 0; k < 100; ++k) {
    const Effect a = s.effect();
    const double t = s.uniform();
    // a + t a' dominates a; a + t a' - 0.2 a pushes below it wherever a is large.
    const Effect above = oplus(E, a, scalar(E, t, complement(E, a)));
    const Effect mixed = raw::lincomb(E, 0.8, a, t, complement(E, a));
    // Both candidates are functions of a, so an eigencontext of a resolves the order.
    std::vector<State> states = panel;
    const Context eigen = context_representation(E, a).context;
    for (const Effect& m : eigen.members()) states.push_back(hat_state(E, m));
    for (const Effect* b : {&above, &mixed}) {
      bool below = true;
      for (const State& w : states) below = below && evaluate(E, w, a) <= evaluate(E, w, *b) + E.tol().eq;
      EXPECT_EQ(below, le(E, a, *b));
    }
  }
}

}  // namespace
