#include "helpers.hpp"

using namespace th;

namespace {

const Algebra H2 = Algebra::hilbertian(2);
const Algebra C2 = Algebra::classical(2);

TEST(Oplus, ZeroIsIdentity) {
  const Effect a = H(real({{0.3, 0.1}, {0.1, 0.6}}));
  EXPECT_TRUE(equal(H2, oplus(H2, zero(H2), a), a));
}

TEST(Oplus, ClassicalPointwise) {
  EXPECT_TRUE(equal(C2, oplus(C2, C(vec({0.3, 0.5})), C(vec({0.4, 0.2}))), C(vec({0.7, 0.7}))));
}

TEST(Oplus, DiagonalMatrices) {
  EXPECT_TRUE(equal(H2, oplus(H2, H(diag({0.5, 0.2})), H(diag({0.4, 0.1}))), H(diag({0.9, 0.3}))));
}

TEST(Oplus, RejectsNonOrthogonal) {
  expect_code([] { oplus(H2, H(diag({0.7, 0.2})), H(diag({0.4, 0.1}))); }, ErrorCode::not_orthogonal);
}

TEST(Oplus, AcceptsAndClampsBoundaryExcess) {
  const Effect a = H(diag({0.6, 0.0}));
  const Effect b = H(diag({0.4 + 5e-10, 0.0}));
  const Effect s = oplus(H2, a, b);
  EXPECT_LE(linalg::max_eigenvalue(s.mat()), 1.0);
  EXPECT_GT(s.clamped(), 0.0);
}

TEST(Oplus, RejectsMismatchedAlgebra) {
  expect_code([] { oplus(H2, H(diag({0.1, 0.1})), C(vec({0.1, 0.1}))); }, ErrorCode::backend_mismatch);
}

TEST(Ominus, SelfIsZero) {
  const Effect b = H(real({{0.5, 0.2}, {0.2, 0.4}}));
  EXPECT_TRUE(equal(H2, ominus(H2, b, b), zero(H2)));
}

TEST(Ominus, ComplementOfDiagonal) {
  EXPECT_TRUE(equal(H2, ominus(H2, unit(H2), H(diag({0.2, 0.9}))), H(diag({0.8, 0.1}))));
  EXPECT_TRUE(equal(H2, complement(H2, H(diag({0.2, 0.9}))), H(diag({0.8, 0.1}))));
}

TEST(Ominus, ClassicalPointwise) {
  EXPECT_TRUE(equal(C2, ominus(C2, C(vec({0.7, 0.7})), C(vec({0.3, 0.5}))), C(vec({0.4, 0.2}))));
}

TEST(Ominus, RejectsUndominated) {
  expect_code([] { ominus(C2, C(vec({0.3, 0.7})), C(vec({0.4, 0.2}))); }, ErrorCode::not_dominated);
}

TEST(Scalar, UnitAndZeroAndHalf) {
  const Effect a = H(diag({0.8, 0.4}));
  EXPECT_TRUE(equal(H2, scalar(H2, 1.0, a), a));
  EXPECT_TRUE(equal(H2, scalar(H2, 0.0, a), zero(H2)));
  EXPECT_TRUE(equal(H2, scalar(H2, 0.5, a), H(diag({0.4, 0.2}))));
}

TEST(Scalar, RejectsOutOfRange) {
  expect_code([] { scalar(H2, 1.5, unit(H2)); }, ErrorCode::scalar_out_of_range);
  expect_code([] { scalar(H2, -0.1, unit(H2)); }, ErrorCode::scalar_out_of_range);
}

TEST(Order, Examples) {
  EXPECT_TRUE(le(H2, H(diag({0.3, 0.7})), unit(H2)));
  EXPECT_TRUE(le(H2, H(diag({0.3, 0.3})), H(diag({0.3, 0.9}))));
  // P(e1) - P(e+) has eigenvalues +-1/sqrt(2).
  EXPECT_FALSE(le(H2, projector({1, 0}), projector({1, 1})));
  EXPECT_NEAR(order_violation(H2, projector({1, 0}), projector({1, 1})), kInvSqrt2, 1e-12);
}

TEST(Seq, UnitOnTheLeft) {
  const Effect a = H(real({{0.5, 0.25}, {0.25, 0.5}}));
  EXPECT_TRUE(equal(H2, seq(H2, unit(H2), a), a));
}

TEST(Seq, DiagonalProduct) {
  EXPECT_TRUE(equal(H2, seq(H2, H(diag({0.25, 1.0})), H(diag({0.4, 0.8}))), H(diag({0.1, 0.8}))));
}

TEST(Seq, ProjectorSandwich) {
  EXPECT_TRUE(equal(H2, seq(H2, projector({1, 0}), projector({1, 1})), H(diag({0.5, 0.0}))));
}

TEST(Seq, ProductIsBelowFirstFactor) {
  Sampler s(Algebra::hilbertian(3), 42);
  const Algebra& E = s.algebra();
  for (int k = 0; k < 50; ++k) {
    const Effect a = s.effect(), b = s.effect();
    EXPECT_TRUE(le(E, seq(E, a, b), a));
  }
}

TEST(Commutes, Examples) {
  const Effect b = H(real({{0.5, 0.25}, {0.25, 0.5}}));
  EXPECT_TRUE(commutes(H2, b, b));
  EXPECT_TRUE(commutes(H2, unit(H2), b));
  EXPECT_FALSE(commutes(H2, projector({1, 0}), projector({1, 1})));
  EXPECT_NEAR(commutator_norm(H2, projector({1, 0}), projector({1, 1})), 0.5, 1e-12);
}

TEST(Commutes, AgreesWithProductCriterion) {
  Sampler s(Algebra::hilbertian(3), 5);
  const Algebra& E = s.algebra();
  for (int k = 0; k < 30; ++k) {
    const Effect x = s.effect();
    const Effect a = s.function_of(x), b = s.coin() ? s.function_of(x) : s.effect();
    EXPECT_EQ(commutes(E, a, b), commutes_by_product(E, a, b));
  }
}

TEST(Settle, RecordsClampMagnitude) {
  const Effect a = H(diag({1.0 + 4e-10, 0.5}));
  EXPECT_NEAR(a.clamped(), 4e-10, 1e-15);
  EXPECT_DOUBLE_EQ(linalg::max_eigenvalue(a.mat()), 1.0);
}

}  // namespace
