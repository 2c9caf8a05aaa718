#include "helpers.hpp"

using namespace th;

namespace {

double worst(const AxiomReport& r) {
  double m = 0.0;
  for (const CheckResult& c : r.checks) m = std::max(m, c.max_residual);
  return m;
}

TEST(Audit, ClassicalIsExactToRoundoff) {
  const AxiomReport r = check_axioms(Algebra::classical(3), 200, 1, standard_product(), false);
  EXPECT_TRUE(r.all_passed());
  EXPECT_EQ(r.checks.size(), 14u);
  EXPECT_LT(worst(r), 1e-12);
}

TEST(Audit, QubitPassesEverything) {
  const AxiomReport r = check_axioms(Algebra::hilbertian(2), 200, 2);
  EXPECT_TRUE(r.all_passed());
  EXPECT_LE(worst(r), 1e-9);
  for (const CheckResult& c : r.checks) EXPECT_EQ(c.instances, 200u) << c.name;
}

TEST(Audit, DimensionOneAlgebras) {
  for (const Algebra& E : {Algebra::classical(1), Algebra::hilbertian(1)}) {
    EXPECT_TRUE(check_axioms(E, 100, 3).all_passed());
    EXPECT_TRUE(check_theorems(E, 20, 3).all_passed());
  }
}

TEST(Audit, JordanProductIsCaught) {
  const Algebra E = Algebra::hilbertian(3);
  const AxiomReport r = check_axioms(E, 200, 4, jordan_product());
  ASSERT_NE(r.find("S1"), nullptr);
  EXPECT_TRUE(r.find("S1")->ok());
  const CheckResult* below = r.find("product_below_first");
  ASSERT_NE(below, nullptr);
  EXPECT_FALSE(below->ok());
  ASSERT_FALSE(below->witnesses.empty());
  EXPECT_LE(below->witnesses.size(), kMaxWitnesses);
  const Witness& w = below->witnesses.front();
  EXPECT_GT(w.residual, E.tol().psd);
  // The witness replays: same seed, same failing instance.
  Sampler s(E, w.seed);
  const Effect a = s.effect(), b = s.effect();
  EXPECT_NEAR(order_violation(E, jordan_product()(E, a, b), a), w.residual, 1e-12);
}

TEST(Audit, SeedsReproduceReports) {
  const Algebra E = direct_sum({Algebra::hilbertian(2), Algebra::classical(2)});
  const AxiomReport x = check_axioms(E, 50, 77), y = check_axioms(E, 50, 77), z = check_axioms(E, 50, 78);
  ASSERT_EQ(x.checks.size(), y.checks.size());
  bool differs = false;
  for (std::size_t i = 0; i < x.checks.size(); ++i) {
    EXPECT_EQ(x.checks[i].max_residual, y.checks[i].max_residual);
    differs = differs || x.checks[i].max_residual != z.checks[i].max_residual;
  }
  EXPECT_TRUE(differs);
}

TEST(Audit, TheoremSuiteOnBlocks) {
  const Algebra E = direct_sum({Algebra::hilbertian(2), Algebra::hilbertian(1), Algebra::hilbertian(3)});
  const AxiomReport r = check_theorems(E, 30, 5);
  for (const CheckResult& c : r.checks) EXPECT_TRUE(c.ok()) << c.name << " max residual " << c.max_residual;
}

TEST(Audit, CommutativeAlgebrasSkipTheNoncommutingCheck) {
  const AxiomReport r = check_theorems(Algebra::classical(3), 10, 6);
  const CheckResult* c = r.find("noncommuting_detected");
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->skipped, c->instances);
  EXPECT_TRUE(r.all_passed());
}

TEST(Audit, FailingCustomCheckKeepsBoundedWitnesses) {
  const Algebra E = Algebra::hilbertian(2);
  const std::vector<CheckSpec> checks{
      {"always_off", [](Sampler& s) { return Outcome::within(1.0 + s.uniform(), 1e-9); }}};
  const AxiomReport r = run_checks(E, checks, 20, 9);
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_EQ(r.checks[0].failed(), 20u);
  EXPECT_EQ(r.checks[0].witnesses.size(), kMaxWitnesses);
  EXPECT_GE(r.checks[0].max_residual, 1.0);
}

}  // namespace
