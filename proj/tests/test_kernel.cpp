#include "bryc/kernel.hpp"
#include "bryc/params.hpp"
#include "bryc/qpoly.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace bryc;

TEST(GaussianAR1, Density) {
  const TransitionKernel k = GaussianAR1{0.6};
  EXPECT_NEAR(transition_density(k, 0.6, 1.0), 1.0 / std::sqrt(2.0 * std::numbers::pi * 0.64),
              1e-15);
  EXPECT_NEAR(transition_density(k, 0.6, 1.0), 0.498677, 1e-6);
}

TEST(Mehler, IndependenceLimit) {
  const MehlerKernel k(1e-6, 0.3);
  const double c = k.marginal().half_width();
  for (double x : {-0.9 * c, -0.1 * c, 0.5 * c}) {
    for (double y : {-0.7 * c, 0.0, 0.95 * c}) {
      EXPECT_NEAR(k.density(x, y), k.marginal()(x), 1e-5);
    }
  }
}

TEST(Mehler, Normalized) {
  const TransitionKernel k = MehlerKernel(0.5, 0.0);
  for (double y : {-1.5, 0.0, 1.5}) {
    EXPECT_NEAR(conditional_expectation(k, [](double) { return 1.0; }, y), 1.0, 1e-8);
    EXPECT_NEAR(eigen_residual(k, 0, y), 0.0, 1e-8);
  }
}

TEST(Mehler, SeriesMatchesProductForm) {
  for (double q : {-0.5, 0.0, 0.5}) {
    const MehlerKernel k(0.3, q);
    const double c = k.marginal().half_width();
    for (double x : {-0.8 * c, 0.1 * c, 0.6 * c}) {
      for (double y : {-0.4 * c, 0.9 * c}) {
        const auto s = k.series_density(x, y);
        EXPECT_NEAR(s.value, k.density(x, y), 1e-10) << q << " " << x << " " << y;
        EXPECT_EQ(s.clamped, 0.0);
      }
    }
  }
}

TEST(Mehler, Nonnegative) {
  for (double q : {-0.5, 0.0, 0.5, 0.9}) {
    const MehlerKernel k(0.8, q);
    const double c = k.marginal().half_width();
    for (int i = 0; i <= 60; ++i) {
      for (int j = 0; j <= 60; ++j) {
        EXPECT_GE(k.density(-c + 2 * c * i / 60.0, -c + 2 * c * j / 60.0), 0.0);
      }
    }
  }
}

TEST(Mehler, DetailedBalance) {
  for (double q : {-0.5, 0.5}) {
    const MehlerKernel k(0.7, q);
    const auto& f = k.marginal();
    const double c = f.half_width();
    for (int i = 1; i < 10; ++i) {
      for (int j = 1; j < 10; ++j) {
        const double x = -c + 2 * c * i / 10.0;
        const double y = -c + 2 * c * j / 10.0;
        EXPECT_NEAR(k.density(x, y) * f(y), k.density(y, x) * f(x), 1e-8);
      }
    }
  }
}

TEST(EigenResidual, Examples) {
  const TransitionKernel ar = GaussianAR1{0.6};
  EXPECT_NEAR(eigen_residual(ar, 1, 2.0), 0.0, 1e-12);
  const TransitionKernel mk = MehlerKernel(0.5, 0.5);
  EXPECT_LE(eigen_residual(mk, 5, 1.0), 1e-6);
}

TEST(EigenResidual, Ladder) {
  for (double rho : {0.3, 0.5, 0.8}) {
    for (double q : {-0.5, 0.0, 0.5, 0.9}) {
      const TransitionKernel k = MehlerKernel(rho, q);
      const double c = QGaussDensity(q).half_width();
      for (int i = 0; i < 9; ++i) {
        const double y = -c + 2 * c * (i + 0.5) / 9.0;
        for (int n = 0; n <= 8; ++n) EXPECT_LE(eigen_residual(k, n, y), 1e-6);
      }
    }
  }
}

TEST(EigenResidual, TwoPointUsesQMinusOne) {
  const TransitionKernel k = TwoPointChain{0.5};
  for (int n = 0; n <= 8; ++n) {
    EXPECT_NEAR(eigen_residual(k, n, 1.0), 0.0, 1e-14);
    EXPECT_NEAR(eigen_residual(k, n, -1.0), 0.0, 1e-14);
  }
  const TransitionKernel s = ScaledTwoPointChain{0.5, RadialLaw::make({{1.0, 1.0}})};
  EXPECT_THROW(eigen_residual(s, 2, 1.0), std::invalid_argument);
}

TEST(ConditionalMoments, GaussianExact) {
  const FieldParams p{0.5, 0.16, 0.32, 0.6, 0.0};
  const TransitionKernel k = GaussianAR1{0.5};
  for (double y : {-2.0, 0.0, 0.7, 3.0}) {
    const auto r = conditional_moment_residual(k, p, y);
    EXPECT_LE(r.r_mean, 1e-12);
    EXPECT_LE(r.r_var, 1e-12);
  }
}

TEST(ConditionalMoments, TwoPoint) {
  const TransitionKernel k = TwoPointChain{0.5};
  EXPECT_NEAR(conditional_expectation(k, [](double x) { return x; }, 1.0), 0.5, 1e-15);
  for (double rho : {0.3, -0.5, 0.9}) {
    const TransitionKernel t = TwoPointChain{rho};
    const FieldParams p = mystic_params(rho, 0.0);
    for (double y : {-1.0, 1.0}) {
      const auto r = conditional_moment_residual(t, p, y);
      EXPECT_NEAR(r.r_mean, 0.0, 1e-14);
      EXPECT_NEAR(r.r_var, 0.0, 1e-14);
    }
  }
}

TEST(ConditionalMoments, QGaussian) {
  for (auto [rho, q] : {std::pair{0.5, 0.0}, {0.7, 0.5}, {0.3, -0.5}}) {
    const FieldParams p = mystic_params(rho, b_of_q(rho, q));
    const TransitionKernel k = MehlerKernel(rho, q);
    const double c = QGaussDensity(q).half_width();
    for (double y : {-0.8 * c, 0.2 * c, 0.6 * c}) {
      const auto r = conditional_moment_residual(k, p, y);
      EXPECT_LE(r.r_mean, 1e-6);
      EXPECT_LE(r.r_var, 1e-6);
    }
  }
}

TEST(Stationarity, AllKernels) {
  EXPECT_EQ(stationarity_residual(TwoPointChain{0.5}, law::TwoPointSym{}, 0.0), 0.0);
  EXPECT_LE(stationarity_residual(GaussianAR1{0.5}, law::StdGaussian{}, 0.4), 1e-9);
  EXPECT_LE(stationarity_residual(MehlerKernel(0.5, 0.0), law::QGaussian{0.0}, 0.7), 1e-6);
  const auto radial = RadialLaw::make({{std::sqrt(2.0), 0.5}, {0.0, 0.5}});
  EXPECT_LE(stationarity_residual(ScaledTwoPointChain{0.5, radial}, law::ScaledTwoPoint{radial}, 0.0),
            1e-15);
}

TEST(ChapmanKolmogorov, SquaredRho) {
  for (double rho : {0.3, 0.5, 0.8}) {
    for (double q : {-0.5, 0.0, 0.5, 0.9}) {
      const MehlerKernel k(rho, q);
      const double c = k.marginal().half_width();
      for (double x : {-0.7 * c, 0.05 * c, 0.9 * c}) {
        for (double y : {-0.3 * c, 0.6 * c}) {
          EXPECT_LE(chapman_kolmogorov_residual(k, x, y), 1e-6);
        }
      }
    }
  }
}

TEST(TwoPointMatrix, Examples) {
  auto m = two_point_matrix(0.5);
  EXPECT_DOUBLE_EQ(m[1][1], 0.75);
  EXPECT_DOUBLE_EQ(m[1][0], 0.25);
  m = two_point_matrix(0.0);
  EXPECT_DOUBLE_EQ(m[0][0], 0.5);
  m = two_point_matrix(-0.5);
  EXPECT_DOUBLE_EQ(m[0][0], 0.25);
  EXPECT_DOUBLE_EQ(m[0][0] + m[0][1], 1.0);
}

TEST(Kernel, StationaryLaw) {
  EXPECT_TRUE(std::holds_alternative<law::StdGaussian>(stationary_law(GaussianAR1{0.5})));
  EXPECT_TRUE(std::holds_alternative<law::TwoPointSym>(stationary_law(TwoPointChain{0.5})));
  EXPECT_DOUBLE_EQ(kernel_rho(MehlerKernel(0.4, 0.1)), 0.4);
}
