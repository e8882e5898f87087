#include "bryc/params.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bryc;

namespace {

const FieldParams kGaussian{0.5, 0.16, 0.32, 0.6, 0.0};

}  // namespace

TEST(Validate, AcceptsGaussianPoint) { EXPECT_TRUE(validate(kGaussian, 1e-12).ok); }

TEST(Validate, RejectsZeroRho) {
  const auto v = validate({0.0, 0.0, 0.0, 1.0, 0.0});
  EXPECT_FALSE(v.ok);
  EXPECT_NE(v.violation.find("rho=0 excluded"), std::string::npos);
}

TEST(Validate, RejectsUnitRho) {
  EXPECT_FALSE(validate({1.0, 0.0, 0.0, 1.0, 0.0}).ok);
  EXPECT_FALSE(validate({-1.0, 0.0, 0.0, 1.0, 0.0}).ok);
}

TEST(Validate, RejectsCMismatch) {
  const auto v = validate({0.5, 0.5, 0.0, 0.3, 0.0});
  EXPECT_FALSE(v.ok);
  EXPECT_NE(v.violation.find("C mismatch"), std::string::npos);
}

TEST(Derive, RegressionWeight) { EXPECT_NEAR(derive(kGaussian).a, 0.4, 1e-15); }

TEST(Derive, GaussianPointHasQOne) {
  const auto d = derive(kGaussian);
  EXPECT_NEAR(d.R, 2.0, 1e-14);
  ASSERT_TRUE(d.q.has_value());
  EXPECT_NEAR(*d.q, 1.0, 1e-14);
  EXPECT_NEAR(d.mystic_residual, 0.0, 1e-14);
}

TEST(Derive, DegenerateB1HasNoQ) {
  const auto d = derive({0.5, 0.8, -2.4, 0.0, 0.0});
  EXPECT_NEAR(d.R, -15.0, 1e-12);
  EXPECT_FALSE(d.q.has_value());
}

TEST(BOfQ, Examples) {
  EXPECT_NEAR(b_of_q(0.5, 1.0), 0.32, 1e-15);
  EXPECT_NEAR(b_of_q(0.5, -1.0), 0.0, 1e-15);
  EXPECT_NEAR(b_of_q(0.5, 0.0625), 0.16, 1e-15);
}

TEST(BOfQ, ThrowsWhenQRho4IsOne) { EXPECT_THROW(b_of_q(0.5, 16.0), std::domain_error); }

TEST(BOfQ, RoundTrip) {
  for (double rho : {0.3, -0.3, 0.5, -0.5, 0.9, -0.9}) {
    for (int i = -99; i <= 100; i += 3) {
      const double q = i == 100 ? 1.0 : i / 100.0;
      const auto d = derive(mystic_params(rho, b_of_q(rho, q)));
      ASSERT_TRUE(d.q.has_value());
      EXPECT_NEAR(*d.q, q, 1e-12) << "rho=" << rho;
    }
  }
}

TEST(Derive, QIncreasingInBOffB1) {
  for (double rho : {0.3, 0.5, 0.8}) {
    const double B1 = boundary_values(rho, 1).B1;
    double prev = -INFINITY;
    for (int i = 1; i < 400; ++i) {
      const double B = B1 + (1.0 - B1) * i / 400.0;  // right of B1
      const auto q = derive(mystic_params(rho, B)).q;
      ASSERT_TRUE(q.has_value());
      EXPECT_GT(*q, prev);
      prev = *q;
    }
  }
}

TEST(Derive, DegeneracyEquivalence) {
  for (double rho : {0.2, 0.4, 0.6, -0.7, 0.9}) {
    const double B1 = boundary_values(rho, 1).B1;
    for (double B : {B1, B1 + 1e-3, B1 - 1e-3, 0.1}) {
      const FieldParams p = mystic_params(rho, B);
      const bool undefined = !derive(p).q.has_value();
      const bool a_degenerate = std::abs(p.A - 1.0 / (1.0 + rho * rho)) <= 1e-9;
      const bool at_b1 = std::abs(B - B1) <= 1e-12;
      EXPECT_EQ(undefined, a_degenerate) << rho << " " << B;
      EXPECT_EQ(undefined, at_b1) << rho << " " << B;
    }
  }
}

TEST(Boundaries, Examples) {
  const auto b = boundary_values(0.5, 3);
  EXPECT_NEAR(b.B1, -2.4, 1e-14);
  EXPECT_NEAR(b.B2_sup, 0.32, 1e-15);
  ASSERT_EQ(b.B3.size(), 3u);
  for (double rho : {0.3, 0.5, 0.8, -0.5}) {
    EXPECT_NEAR(boundary_values(rho, 1).B3[0], 1.0, 1e-13) << rho;
  }
}

TEST(Boundaries, LatticeDecreasesTowardB2Sup) {
  const auto b = boundary_values(0.6, 40);
  for (std::size_t m = 1; m < b.B3.size(); ++m) EXPECT_LT(b.B3[m], b.B3[m - 1]);
  EXPECT_GT(b.B3.back(), b.B2_sup);
}

TEST(Classify, GaussianPoint) {
  EXPECT_TRUE(std::holds_alternative<verdict::ExistsGaussian>(classify(kGaussian)));
  EXPECT_EQ(verdict_name(classify(kGaussian)), "ExistsGaussian");
}

TEST(Classify, QGaussianAtRIsOne) {
  // A = (1 - B) rho^2 / (1 + rho^4); C from the standardization constraint
  const double A = 0.84 * 0.25 / 1.0625;
  const FieldParams p{0.5, A, 0.16, 1.0 - 2.0 * A - 0.04, 0.0};
  const auto c = classify(p);
  ASSERT_TRUE(std::holds_alternative<verdict::ExistsQGaussian>(c));
  EXPECT_NEAR(std::get<verdict::ExistsQGaussian>(c).q, 0.0625, 1e-12);
}

TEST(Classify, DegenerateB1CarriesCaveat) {
  const auto c = classify({0.5, 0.8, -2.4, 0.0, 0.0});
  ASSERT_TRUE(std::holds_alternative<verdict::NonexistentDegenerateB1>(c));
  EXPECT_NE(std::get<verdict::NonexistentDegenerateB1>(c).caveat.find("uniform integrab"),
            std::string::npos);
}

TEST(Classify, LatticeM1) {
  const auto c = classify({0.5, 0.0, 1.0, 0.75, 0.0});
  ASSERT_TRUE(std::holds_alternative<verdict::OpenLatticeB3>(c));
  EXPECT_EQ(std::get<verdict::OpenLatticeB3>(c).m, 1);
}

TEST(Classify, LatticeOrdersOneToFive) {
  for (double rho : {0.3, 0.5, 0.8}) {
    const auto b = boundary_values(rho, 5);
    for (int m = 1; m <= 5; ++m) {
      const auto c = classify(mystic_params(rho, b.B3[static_cast<std::size_t>(m - 1)]));
      ASSERT_TRUE(std::holds_alternative<verdict::OpenLatticeB3>(c)) << describe(c);
      EXPECT_EQ(std::get<verdict::OpenLatticeB3>(c).m, m);
    }
  }
}

TEST(Classify, TwoPointOverlapWins) {
  const auto c = classify(mystic_params(0.5, 0.0));
  ASSERT_TRUE(std::holds_alternative<verdict::ExistsTwoPointSymmetric>(c));
}

TEST(Classify, ScaledTwoPointNotesNonUniqueness) {
  const auto c = classify({0.5, 0.5, 0.0, 0.0, 0.0});
  ASSERT_TRUE(std::holds_alternative<verdict::ExistsScaledTwoPoint>(c));
  const auto& note = std::get<verdict::ExistsScaledTwoPoint>(c).note;
  EXPECT_NE(note.find("not unique"), std::string::npos);
  EXPECT_NE(note.find("atom at zero"), std::string::npos);
}

TEST(Classify, NonexistentBranches) {
  EXPECT_TRUE(std::holds_alternative<verdict::Nonexistent>(
      classify({0.5, 0.16, 0.32, 0.6, 0.1})));  // D != 0
  EXPECT_TRUE(std::holds_alternative<verdict::Nonexistent>(
      classify({0.5, 0.3, 0.1, 0.375, 0.0})));  // mystic fails
  EXPECT_TRUE(std::holds_alternative<verdict::Nonexistent>(classify(mystic_params(0.5, -1.0))));
  EXPECT_TRUE(std::holds_alternative<verdict::Nonexistent>(classify(mystic_params(0.5, 0.35))));
}

TEST(Classify, InvalidIsReported) {
  EXPECT_TRUE(std::holds_alternative<verdict::InvalidParams>(classify({0.5, 0.5, 0.0, 0.3, 0.0})));
}

TEST(Classify, TotalAndSignInvariant) {
  for (double rho : {0.2, 0.45, 0.7, 0.95}) {
    for (int i = 0; i <= 60; ++i) {
      const double B = -3.0 + 4.5 * i / 60.0;
      const FieldParams p = mystic_params(rho, B);
      FieldParams n = p;
      n.rho = -rho;
      const auto cp = classify(p);
      const auto cn = classify(n);
      EXPECT_EQ(cp.index(), cn.index()) << rho << " " << B;
      EXPECT_EQ(describe(cp), describe(cn));
    }
  }
}

TEST(RegressionCoeffs, GaussianPoint) {
  const auto c = regression_coeffs(kGaussian);
  EXPECT_NEAR(c.alpha1, 0.25, 1e-15);
  EXPECT_NEAR(c.gamma1, 0.75, 1e-15);
  EXPECT_EQ(c.beta1, 0.0);
  EXPECT_NEAR(c.alpha2, 0.0625, 1e-15);
  EXPECT_NEAR(c.gamma2, 0.9375, 1e-15);
  EXPECT_EQ(c.beta2, 0.0);
}

TEST(RegressionCoeffs, DegenerateDenominatorThrows) {
  try {
    regression_coeffs({0.5, 0.8, -2.4, 0.0, 0.0});
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate denominator"), std::string::npos);
  }
}

TEST(ConsistencyResiduals, GaussianPointVanishes) {
  const auto r = consistency_residuals(kGaussian);
  EXPECT_NEAR(r.r1, 0.0, 1e-12);
  EXPECT_NEAR(r.r2, 0.0, 1e-12);
  EXPECT_NEAR(r.r3, 0.0, 1e-12);
  EXPECT_NEAR(r.mystic_constraint, 0.0, 1e-12);
}

TEST(ConsistencyResiduals, FlagsInconsistency) {
  EXPECT_GT(std::abs(consistency_residuals({0.5, 0.3, 0.1, 0.375, 0.0}).r1), 1e-3);
}

TEST(ConsistencyResiduals, VanishUnderMystic) {
  for (double rho : {-0.9, -0.4, 0.1, 0.5, 0.85}) {
    for (double q : {-0.9, -0.2, 0.0, 0.4, 0.99, 1.0}) {
      const auto r = consistency_residuals(mystic_params(rho, b_of_q(rho, q)));
      EXPECT_NEAR(r.r1, 0.0, 1e-10);
      EXPECT_NEAR(r.r2, 0.0, 1e-10);
      EXPECT_NEAR(r.r3, 0.0, 1e-10);
      EXPECT_NEAR(r.mystic_constraint, 0.0, 1e-10);
    }
  }
}

TEST(TwoSidedWeights, NZeroIsRegressionWeight) {
  for (double rho : {0.3, -0.6}) {
    const auto w = two_sided_weights(rho, 0);
    EXPECT_NEAR(w.left_k, rho / (1 + rho * rho), 1e-15);
    EXPECT_NEAR(w.right_k, rho / (1 + rho * rho), 1e-15);
  }
}

TEST(TwoSidedWeights, HalfOneStep) {
  const auto w = two_sided_weights(0.5, 1);
  EXPECT_NEAR(w.left_k, 10.0 / 21.0, 1e-15);
  EXPECT_NEAR(w.right_k, 4.0 / 21.0, 1e-15);
}

TEST(TwoSidedWeights, MatchGaussianProjection) {
  // projection of X_k on (X_{k-1}, X_{k+n+1}) for covariance rho^|i-j|
  for (double rho : {0.5, -0.3, 0.8}) {
    for (int n = 0; n <= 6; ++n) {
      const double r = std::pow(rho, n + 2);
      const double b1 = rho;
      const double b2 = std::pow(rho, n + 1);
      const double det = 1.0 - r * r;
      const auto w = two_sided_weights(rho, n);
      EXPECT_NEAR(w.left_k, (b1 - r * b2) / det, 1e-12);
      EXPECT_NEAR(w.right_k, (b2 - r * b1) / det, 1e-12);
    }
  }
  const double rho = 0.5;
  const auto w = two_sided_weights(rho, 1);
  EXPECT_NEAR(w.left_k, rho * (1 - std::pow(rho, 4)) / (1 - std::pow(rho, 6)), 1e-15);
  EXPECT_NEAR(w.right_k, rho * rho * (1 - rho * rho) / (1 - std::pow(rho, 6)), 1e-15);
}

TEST(GappedSquare, NOneIsTheB1Point) {
  for (double rho : {0.5, -0.3, 0.8}) {
    const auto c = gapped_square_coeffs(rho, 1);
    const double A = 1.0 / (1.0 + rho * rho);
    EXPECT_NEAR(c.left_sq, A, 1e-15);
    EXPECT_NEAR(c.right_sq, A, 1e-15);
    EXPECT_NEAR(c.cross, boundary_values(rho, 1).B1, 1e-13);
  }
  const auto c = gapped_square_coeffs(0.5, 1);
  EXPECT_NEAR(c.left_sq, 0.8, 1e-15);
  EXPECT_NEAR(c.cross, -2.4, 1e-14);
}

TEST(GappedSquare, Limits) {
  const double rho = 0.6;
  const auto c = gapped_square_coeffs(rho, 60);
  EXPECT_NEAR(c.left_sq, 1.0, 1e-12);
  EXPECT_NEAR(c.right_sq, 1.0 - rho * rho, 1e-12);
  EXPECT_NEAR(c.cross * std::pow(rho, 61) / (rho * rho - 1.0), 1.0, 1e-12);
}

TEST(GappedSquare, InductionResidual) {
  EXPECT_LE(gapped_square_induction_residual(0.5, 1), 1e-10);
  EXPECT_LE(gapped_square_induction_residual(-0.7, 10), 1e-10);
  EXPECT_LE(gapped_square_induction_residual(0.9, 40), 1e-8);
  for (double rho : {0.3, -0.3, 0.5, -0.5, 0.7, -0.7}) {
    for (int n = 1; n <= 40; ++n) EXPECT_LE(gapped_square_induction_residual(rho, n), 1e-10);
  }
}

TEST(YClosedForm, Examples) {
  EXPECT_EQ(y_closed_form_check(0.5, 1.0, 1.0, 50), 0.0);
  EXPECT_LE(y_closed_form_check(0.5, 1.0, 0.25, 50), 1e-12);
  EXPECT_LE(y_closed_form_check(0.8, 2.0, 1.0, 100), 1e-9);
}

TEST(BoundaryDistance, ZeroOnBoundaries) {
  EXPECT_NEAR(boundary_distance(kGaussian), 0.0, 1e-15);
  EXPECT_NEAR(boundary_distance(mystic_params(0.5, 0.1)), 0.1, 1e-15);
}

TEST(MysticParams, SatisfiesConstraints) {
  const FieldParams p = mystic_params(0.5, 0.32);
  EXPECT_NEAR(p.A, 0.16, 1e-15);
  EXPECT_NEAR(p.C, 0.6, 1e-15);
  EXPECT_EQ(p.D, 0.0);
  EXPECT_TRUE(validate(p).ok);
}
