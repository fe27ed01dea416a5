#include <gtest/gtest.h>

#include "amfg/equilibrium.hpp"
#include "amfg/error.hpp"
#include "amfg/linalg.hpp"
#include "amfg/riccati.hpp"
#include "amfg/verification.hpp"
#include "instances.hpp"

namespace amfg {
namespace {

using testing::S2Options;
using testing::s2_spec;

constexpr double kTol = 1e-12;

double at(const MatrixSeq& seq, std::size_t t) { return seq[t](0, 0); }

TEST(Validity, ScalarMarginAndPHat) {
  const ValidationRiccati v = solve_validation_riccati(s2_spec());
  EXPECT_NEAR(at(v.P_hat, 1), 1.0, kTol);
  EXPECT_NEAR(at(v.P_hat, 0), 2.5, kTol);
  ASSERT_EQ(v.margins.size(), 1u);
  EXPECT_NEAR(v.margins[0], 2.0, kTol);
}

TEST(Validity, ScalarFailureReportsStepAndMargin) {
  S2Options o;
  o.S = 0.5;
  try {
    solve_validation_riccati(s2_spec(o));
    FAIL() << "expected ValidityConditionError";
  } catch (const ValidityConditionError& e) {
    EXPECT_EQ(e.step(), 0);
    EXPECT_NEAR(e.margin(), -0.5, kTol);
  }
  const ValidityReport r = evaluate_validity(s2_spec(o));
  EXPECT_FALSE(r.valid());
  EXPECT_EQ(*r.failed_step, 0);
  EXPECT_NEAR(r.failed_margin, -0.5, kTol);
}

TEST(Validity, MarginAtThresholdFails) {
  S2Options o;
  o.S = 1.0;  // margin exactly 0
  EXPECT_FALSE(evaluate_validity(s2_spec(o)).valid());
}

TEST(Validity, FirstFailureIsLatestInTime) {
  // Horizon 2: P_hat_2 = 1, margin_1 = S - 1 > 0; P_hat_1 = 1 + 1 + 1/(S-1)
  // and margin_0 = S - P_hat_1 < 0 for S = 2.5.
  S2Options o;
  o.S = 2.5;
  o.horizon = 2;
  const ValidityReport r = evaluate_validity(s2_spec(o));
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(*r.failed_step, 0);
  EXPECT_NEAR(r.riccati.margins[1], 1.5, kTol);
  EXPECT_NEAR(r.failed_margin, 2.5 - (2.0 + 1.0 / 1.5), kTol);
}

TEST(GlobalRiccati, ScalarS2) {
  const GlobalRiccati g = solve_global_riccati(s2_spec());
  EXPECT_NEAR(at(g.P_bar, 1), 1.0, kTol);
  EXPECT_NEAR(at(g.E, 0), 5.0 / 3.0, kTol);
  EXPECT_NEAR(at(g.F_bar, 0), 0.6, kTol);
  EXPECT_NEAR(at(g.P_bar, 0), 1.6, kTol);
}

TEST(GlobalRiccati, ScalarWithoutAdversary) {
  S2Options o;
  o.C = 0.0;
  const GlobalRiccati g = solve_global_riccati(s2_spec(o));
  EXPECT_NEAR(at(g.E, 0), 2.0, kTol);
  EXPECT_NEAR(at(g.F_bar, 0), 0.5, kTol);
  EXPECT_NEAR(at(g.P_bar, 0), 1.5, kTol);
}

TEST(LocalRiccati, ScalarWithGlobalConsensus) {
  S2Options o;
  o.C = 0.0;
  o.Qbar = 1.0;
  const LocalRiccati l = solve_local_riccati(s2_spec(o));
  EXPECT_NEAR(at(l.P_tilde, 1), 2.0, kTol);
  EXPECT_NEAR(at(l.E_tilde, 0), 3.0, kTol);
  EXPECT_NEAR(at(l.F1_tilde, 0), 1.0 / 3.0, kTol);
  EXPECT_NEAR(at(l.P_tilde, 0), 8.0 / 3.0, kTol);
  EXPECT_NEAR(at(l.H_tilde, 0), 1.0 / 3.0, kTol);
}

TEST(LocalRiccati, WithoutGlobalConsensusMatchesGlobal) {
  testing::RandomSpecOptions opts;
  opts.zero_qbar = true;
  for (const GameSpec& spec : testing::random_valid_specs(20, 100, opts)) {
    const GlobalRiccati g = solve_global_riccati(spec);
    const LocalRiccati l = solve_local_riccati(spec);
    EXPECT_LE(linalg::max_deviation(g.F_bar, l.F1_tilde), 1e-12);
    EXPECT_LE(linalg::max_deviation(g.P_bar, l.P_tilde), 1e-12);
  }
}

TEST(Augmented, ScalarStructureAndGain) {
  const GameSpec spec = s2_spec();
  const Equilibrium eq = solve_equilibrium(spec);
  const Matrix& A = eq.solution.augmented.A_aug[0];
  Matrix expected(3, 3);
  expected << 1, 0, 0.2, 0, 0.6, 0, 0, 0, 0.6;
  EXPECT_LT((A - expected).norm(), kTol);
  const Matrix& K = eq.solution.agent.K[0];
  EXPECT_NEAR(K(0, 0), 0.5, kTol);
  EXPECT_NEAR(K(0, 1), 0.0, kTol);
  EXPECT_NEAR(K(0, 2), 0.1, kTol);
}

TEST(Augmented, CostWeightsArePsd) {
  for (const GameSpec& spec : testing::random_valid_specs(30, 200)) {
    const Equilibrium eq = solve_equilibrium(spec);
    for (const Matrix& W : eq.solution.augmented.Q_aug) {
      EXPECT_GE(linalg::min_eigenvalue(W), -1e-12 * (1.0 + W.norm()));
    }
  }
}

// Textbook Riccati with explicit inverses, kept separate from the library's
// Joseph-form update.
MatrixSeq naive_lqr_gains(const AugmentedSystem& aug, const MatrixSeq& R) {
  const std::size_t T = aug.A_aug.size();
  Matrix P = aug.Q_aug[T];
  MatrixSeq K(T);
  for (std::size_t k = T; k-- > 0;) {
    const Matrix& A = aug.A_aug[k];
    const Matrix& B = aug.B_aug;
    const Matrix G = (R[k] + B.transpose() * P * B).inverse();
    K[k] = G * B.transpose() * P * A;
    P = aug.Q_aug[k] + A.transpose() * P * A -
        A.transpose() * P * B * G * B.transpose() * P * A;
  }
  return K;
}

TEST(AgentLqr, MatchesNaiveAndBatchSolutions) {
  for (const GameSpec& spec : testing::random_valid_specs(30, 300)) {
    const Equilibrium eq = solve_equilibrium(spec);
    const MatrixSeq naive = naive_lqr_gains(eq.solution.augmented, spec.R);
    const MatrixSeq batch = batch_lqr_gains(eq.solution.augmented, spec.R);
    for (std::size_t t = 0; t < naive.size(); ++t) {
      const double scale = std::max(1.0, naive[t].norm());
      EXPECT_LE((eq.solution.agent.K[t] - naive[t]).norm() / scale, 1e-9);
      EXPECT_LE((eq.solution.agent.K[t] - batch[t]).norm() / scale, 1e-9);
    }
  }
}

TEST(AgentLqr, ValueMatricesSymmetric) {
  const GameSpec spec = testing::random_valid_spec(7);
  const Equilibrium eq = solve_equilibrium(spec);
  for (const Matrix& P : eq.solution.agent.P_star) {
    EXPECT_EQ((P - P.transpose()).norm(), 0.0);
  }
}

TEST(Coupling, ScalarValue) {
  EXPECT_NEAR(coupling_matrix(s2_spec(), 0)(0, 0), 2.0 / 3.0, kTol);
}

}  // namespace
}  // namespace amfg
