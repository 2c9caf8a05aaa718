#include <algorithm>

#include "helpers.hpp"

using namespace th;

namespace {

const Algebra H2 = Algebra::hilbertian(2);
const Algebra H3 = Algebra::hilbertian(3);

/// M2 + C on C^3, presented by generators.
Algebra block_algebra() {
  Matrix plus = Matrix::Zero(3, 3);
  plus.topLeftCorner(2, 2) = real({{0.5, 0.5}, {0.5, 0.5}});
  return Algebra::hilbertian(3, {diag({1, 0, 0}), plus, diag({0, 0, 1})});
}

TEST(Commutant, Membership) {
  const std::vector<Effect> F{projector({1, 0}), H(diag({0.3, 0.6}))};
  EXPECT_TRUE(in_commutant(H2, constant(H2, 0.4), F));
  EXPECT_TRUE(in_commutant(H2, projector({1, 0}), {projector({1, 0})}));
  EXPECT_FALSE(in_commutant(H2, projector({1, 1}), {projector({1, 0})}));
}

TEST(Commutant, BasisSizes) {
  EXPECT_EQ(commutant_basis(H2, {unit(H2)}).size(), 4u);
  EXPECT_EQ(commutant_basis(H3, {unit(H3)}).size(), 9u);
  EXPECT_EQ(commutant_basis(H2, {H(diag({0.2, 0.7}))}).size(), 2u);
  EXPECT_EQ(commutant_basis(H2, {projector({1, 0}), projector({1, 1})}).size(), 1u);
}

TEST(Commutant, MembersCommuteWithTheFamily) {
  Sampler s(H3, 17);
  const std::vector<Effect> F{s.effect(), s.function_of(s.effect())};
  const CommutantBasis B = commutant_basis(H3, {F[0]});
  for (const Effect& x : B.elements) EXPECT_LE(commutator_norm(H3, x, F[0]), H3.tol().eq);
  // Enlarging the family shrinks the commutant.
  EXPECT_LE(commutant_basis(H3, F).size(), B.size());
  // F is contained in its double commutant.
  for (const Effect& f : F) EXPECT_TRUE(in_commutant(H3, f, commutant_basis(H3, F).elements));
}

TEST(Center, FactorsAndNonFactors) {
  EXPECT_TRUE(is_factor(H3));
  EXPECT_TRUE(is_factor(Algebra::classical(1)));
  EXPECT_FALSE(is_factor(Algebra::classical(3)));
  EXPECT_EQ(center_basis(Algebra::classical(3)).size(), 3u);
  const Algebra E = direct_sum({H2, Algebra::classical(1)});
  EXPECT_FALSE(is_factor(E));
  const CommutantBasis Z = center_basis(E);
  ASSERT_EQ(Z.size(), 2u);
  for (const Effect& z : Z.elements) EXPECT_TRUE(is_central(E, z));
  EXPECT_FALSE(is_factor(block_algebra()));
  EXPECT_EQ(center_basis(block_algebra()).size(), 2u);
}

TEST(MinimalCentralSharps, Examples) {
  const std::vector<Effect> one = minimal_central_sharps(H3);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(equal(H3, one[0], unit(H3)));

  const Algebra C3 = Algebra::classical(3);
  const std::vector<Effect> pts = minimal_central_sharps(C3);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_TRUE(equal(C3, pts[0], C(vec({1, 0, 0}))));
  EXPECT_TRUE(equal(C3, pts[1], C(vec({0, 1, 0}))));
  EXPECT_TRUE(equal(C3, pts[2], C(vec({0, 0, 1}))));

  const Algebra E = direct_sum({H2, H3});
  const std::vector<Effect> z = minimal_central_sharps(E);
  ASSERT_EQ(z.size(), 2u);
  EXPECT_TRUE(equal(E, z[0], ds_effect(E, {unit(H2), zero(H3)})));
  EXPECT_TRUE(equal(E, z[1], ds_effect(E, {zero(H2), unit(H3)})));
}

TEST(MinimalCentralSharps, PartitionTheUnit) {
  const Algebra E = direct_sum({H2, Algebra::classical(2), block_algebra()});
  const std::vector<Effect> z = minimal_central_sharps(E, 99);
  ASSERT_EQ(z.size(), 5u);
  Effect sum = zero(E);
  for (std::size_t i = 0; i < z.size(); ++i) {
    EXPECT_TRUE(is_sharp(E, z[i]));
    EXPECT_TRUE(is_central(E, z[i]));
    for (std::size_t j = i + 1; j < z.size(); ++j) EXPECT_TRUE(equal(E, seq(E, z[i], z[j]), zero(E)));
    sum = raw::add(E, sum, z[i]);
  }
  EXPECT_TRUE(equal(E, sum, unit(E)));
}

TEST(CentralSplit, BlockAlgebra) {
  const Algebra E = block_algebra();
  const CentralSplit sp = central_split(E, H(diag({1, 1, 0})));
  EXPECT_EQ(sp.first.algebra.total_dim(), 2u);
  EXPECT_EQ(sp.second.algebra.total_dim(), 1u);
  Sampler s(E, 5);
  for (int k = 0; k < 20; ++k) {
    const Effect b = s.effect();
    EXPECT_LE(split_reconstruction_residual(E, H(diag({1, 1, 0})), b), E.tol().eq);
    const Effect back = raw::add(E, lift(E, sp.first, carve(E, sp.first, b)), lift(E, sp.second, carve(E, sp.second, b)));
    EXPECT_LE(distance(E, back, b), E.tol().eq);
  }
}

TEST(CentralSplit, Errors) {
  const Algebra E = block_algebra();
  expect_code([&] { central_split(E, unit(E)); }, ErrorCode::trivial_split);
  expect_code([&] { central_split(E, zero(E)); }, ErrorCode::trivial_split);
  expect_code([&] { central_split(E, H(diag({0.5, 0.5, 0}))); }, ErrorCode::not_sharp);
  expect_code([&] { central_split(E, H(diag({1, 0, 0}))); }, ErrorCode::not_central);
}

TEST(CentralSplit, NoneOnFactors) {
  // A factor has no admissible split among its minimal central sharps.
  for (const Algebra& E : {H2, H3, Algebra::classical(1)}) {
    for (const Effect& z : minimal_central_sharps(E)) {
      expect_code([&] { central_split(E, z); }, ErrorCode::trivial_split);
    }
  }
  const Algebra E = direct_sum({H2, Algebra::classical(1)});
  for (const Effect& z : minimal_central_sharps(E)) EXPECT_NO_THROW(central_split(E, z));
}

TEST(Factorize, RecoversBlockDimensions) {
  const Algebra E = direct_sum({H2, Algebra::hilbertian(1), H3});
  const FactorDecomposition f = factorize(E);
  std::vector<std::size_t> dims = f.dimensions();
  std::sort(dims.begin(), dims.end());
  EXPECT_EQ(dims, (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_TRUE(f.all_factors);
  EXPECT_LE(f.reconstruction_residual, E.tol().eq);
  EXPECT_LE(f.additivity_residual, E.tol().eq);
  EXPECT_LE(f.unit_residual, E.tol().eq);
  EXPECT_GT(f.injectivity_margin, 0.0);
  for (const Carving& c : f.factors) EXPECT_TRUE(is_factor(c.algebra));
}

TEST(Factorize, FactorAndClassicalInputs) {
  const FactorDecomposition one = factorize(H3);
  ASSERT_EQ(one.factors.size(), 1u);
  EXPECT_EQ(one.factors[0].algebra.total_dim(), 3u);
  const FactorDecomposition four = factorize(Algebra::classical(4));
  EXPECT_EQ(four.dimensions(), (std::vector<std::size_t>{1, 1, 1, 1}));
  const FactorDecomposition blocks = factorize(block_algebra());
  std::vector<std::size_t> dims = blocks.dimensions();
  std::sort(dims.begin(), dims.end());
  EXPECT_EQ(dims, (std::vector<std::size_t>{1, 2}));
}

TEST(JointContext, DiagonalPair) {
  const Effect a = H(diag({0.2, 0.2, 0.9}));
  const Effect b = H(diag({0.5, 0.7, 0.7}));
  const JointContext jc = joint_context(H3, a, b);
  ASSERT_EQ(jc.context.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    RealVector e = RealVector::Zero(3);
    e(static_cast<Eigen::Index>(k)) = 1.0;
    EXPECT_TRUE(equal(H3, jc.context.members()[k], H(e.cast<Complex>().asDiagonal())));
  }
  const std::vector<double> ea{0.2, 0.2, 0.9}, eb{0.5, 0.7, 0.7};
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(jc.coefficients_a[k], ea[k], 1e-12);
    EXPECT_NEAR(jc.coefficients_b[k], eb[k], 1e-12);
  }
  EXPECT_LE(jc.residual_a, 1e-9);
  EXPECT_LE(jc.residual_b, 1e-9);
}

TEST(JointContext, SelfAndRefusal) {
  Sampler s(H3, 31);
  const Effect a = s.effect();
  const JointContext jc = joint_context(H3, a, a);
  for (std::size_t k = 0; k < jc.context.size(); ++k) EXPECT_NEAR(jc.coefficients_a[k], jc.coefficients_b[k], 1e-12);
  expect_code([] { joint_context(H2, projector({1, 0}), projector({1, 1})); }, ErrorCode::not_commuting);
}

TEST(JointContext, ReproducesSampledCommutingPairs) {
  const Algebra E = direct_sum({H3, Algebra::classical(2)});
  Sampler s(E, 8);
  for (int k = 0; k < 30; ++k) {
    const Effect x = k % 2 ? s.effect() : s.effect_with_values({0.0, 0.5, 1.0});
    const Effect a = s.coin() ? x : s.function_of(x);
    const Effect c = s.function_of(x);
    const JointContext jc = joint_context(E, a, c);
    EXPECT_EQ(jc.context.size(), E.total_dim());
    EXPECT_LE(jc.residual_a, 1e-9);
    EXPECT_LE(jc.residual_b, 1e-9);
  }
}

TEST(SimultaneousAtoms, Examples) {
  const std::vector<Effect> u = simultaneous_atoms(H3, {unit(H3)});
  ASSERT_EQ(u.size(), 1u);
  EXPECT_TRUE(equal(H3, u[0], unit(H3)));

  const std::vector<Effect> two = simultaneous_atoms(H3, {H(diag({0.2, 0.7, 0.7}))});
  ASSERT_EQ(two.size(), 2u);
  EXPECT_TRUE(equal(H3, two[0], H(diag({1, 0, 0}))));
  EXPECT_TRUE(equal(H3, two[1], H(diag({0, 1, 1}))));

  const std::vector<Effect> three = simultaneous_atoms(H3, {H(diag({0.2, 0.7, 0.7})), H(diag({0.5, 0.5, 0.9}))});
  ASSERT_EQ(three.size(), 3u);
  EXPECT_TRUE(equal(H3, three[0], H(diag({1, 0, 0}))));
  EXPECT_TRUE(equal(H3, three[1], H(diag({0, 1, 0}))));
  EXPECT_TRUE(equal(H3, three[2], H(diag({0, 0, 1}))));

  expect_code([] { simultaneous_atoms(H2, {projector({1, 0}), projector({1, 1})}); }, ErrorCode::not_commuting);
}

TEST(AtomWitness, Examples) {
  const Effect a = H(diag({1, 0, 0}));
  const AtomWitness scalar = atom_commutant_witness(H3, a, constant(H3, 0.3));
  ASSERT_TRUE(scalar.commutes);
  for (double c : scalar.coefficients) EXPECT_NEAR(c, 0.3, 1e-12);

  const AtomWitness w = atom_commutant_witness(H3, a, H(diag({0.4, 0.6, 0.6})));
  ASSERT_TRUE(w.commutes);
  ASSERT_TRUE(w.context.has_value());
  EXPECT_TRUE(equal(H3, w.context->members()[w.atom_index], a));
  EXPECT_NEAR(w.coefficients[w.atom_index], 0.4, 1e-12);
  double rest = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (k != w.atom_index) rest += w.coefficients[k];
  }
  EXPECT_NEAR(rest, 1.2, 1e-12);
  EXPECT_LE(w.residual, 1e-9);

  const AtomWitness no = atom_commutant_witness(H2, projector({1, 0}), projector({1, 1}));
  EXPECT_FALSE(no.commutes);
  EXPECT_NEAR(no.residual, 0.5, 1e-12);
  expect_code([] { atom_commutant_witness(H2, unit(H2), unit(H2)); }, ErrorCode::not_one_dimensional);
}

TEST(AtomWitness, CommutationWithSharpsMatchesOrderOrOrthogonality) {
  const Algebra E = direct_sum({H3, Algebra::classical(2)});
  Sampler s(E, 44);
  int commuting = 0;
  for (int k = 0; k < 300; ++k) {
    const Effect a = s.one_dimensional();
    Effect b = s.sharp();
    if (k % 3 == 0) b = s.function_of(oplus(E, scalar(E, 0.5, a), scalar(E, 0.25, complement(E, a))));
    if (!is_sharp(E, b)) b = ceiling(E, b);
    const bool by_order = equal(E, seq(E, a, b), zero(E)) || le(E, a, b);
    EXPECT_EQ(commutes(E, a, b), by_order);
    commuting += commutes(E, a, b) ? 1 : 0;
  }
  EXPECT_GT(commuting, 20);
}

}  // namespace
