#pragma once

// Parameter algebra for stationary fields with linear regressions and
// quadratic conditional variances:
//
//   E(X_k | X_j, j != k)   = a (X_{k-1} + X_{k+1})
//   E(X_k^2 | X_j, j != k) = A (x^2 + y^2) + B x y + D (x + y) + C
//
// with E X_k = 0, E X_k^2 = 1 and corr(X_0, X_1) = rho.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bryc {

struct FieldParams {
  double rho = 0.0;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
};

struct Tolerances {
  double validation = 1e-9;
  double lattice = 1e-6;
};

struct ValidationResult {
  bool ok = true;
  std::string violation;

  explicit operator bool() const { return ok; }
};

ValidationResult validate(const FieldParams& p, double tol = 1e-9);

struct DerivedParams {
  double a = 0.0;  ///< regression weight rho / (1 + rho^2)
  double R = 0.0;  ///< B (rho + 1/rho)^2
  /// Empty when 1 + rho^4 (R - 1) vanishes (the degenerate point B = B1).
  std::optional<double> q;
  double q_denominator = 0.0;
  double mystic_residual = 0.0;  ///< |A (rho^2 + 1/rho^2) + B - 1|
};

DerivedParams derive(const FieldParams& p, double tol = 1e-9);

/// B such that derive() returns the given q. Throws std::domain_error when
/// q rho^4 = 1.
double b_of_q(double rho, double q, double tol = 1e-12);

/// Fills A and C from (rho, B) using the mystic constraint
/// A (rho^2 + 1/rho^2) + B = 1 and D = 0.
FieldParams mystic_params(double rho, double B);

struct Boundaries {
  double B1 = 0.0;
  double B2_sup = 0.0;
  std::vector<double> B3;  ///< B3[m - 1] for m = 1..m_max
};

Boundaries boundary_values(double rho, int m_max);

namespace verdict {

struct InvalidParams {
  std::string reason;
};
struct Nonexistent {
  std::string reason;
};
struct NonexistentDegenerateB1 {
  std::string caveat;
};
struct ExistsScaledTwoPoint {
  std::string note;
};
struct ExistsTwoPointSymmetric {
  std::string note;
};
struct ExistsQGaussian {
  double q = 0.0;
};
struct ExistsGaussian {};
struct OpenLatticeB3 {
  int m = 1;
};

}  // namespace verdict

using Classification =
    std::variant<verdict::InvalidParams, verdict::Nonexistent, verdict::NonexistentDegenerateB1,
                 verdict::ExistsScaledTwoPoint, verdict::ExistsTwoPointSymmetric,
                 verdict::ExistsQGaussian, verdict::ExistsGaussian, verdict::OpenLatticeB3>;

Classification classify(const FieldParams& p, const Tolerances& tol = {});

std::string_view verdict_name(const Classification& c);

/// Human-readable verdict including its payload (q, m, reason or caveat).
std::string describe(const Classification& c);

bool exists(const Classification& c);

/// Smallest |B - b| over b in {0, B1, B2_sup, B3[1..m_max]}.
double boundary_distance(const FieldParams& p, int m_max = 16);

struct RegressionCoeffs {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

/// Coefficients of E(X_{k+1}^2 | past) = alpha1 X_k^2 + beta1 X_k + gamma1 and
/// E(X_{k+2}^2 | past) = alpha2 X_k^2 + beta2 X_k + gamma2.
/// Throws std::domain_error("degenerate denominator") when A = 1/(1+rho^2).
RegressionCoeffs regression_coeffs(const FieldParams& p, double tol = 1e-9);

struct ConsistencyResiduals {
  double r1 = 0.0;  ///< alpha1^2 - alpha2
  double r2 = 0.0;  ///< beta1 (alpha1 + rho) - beta2
  double r3 = 0.0;  ///< gamma1 (alpha1 + 1) - gamma2
  double drift_constraint = 0.0;   ///< D {C - (1 - rho) rho [1 - A (1 + rho^2)]}
  double mystic_constraint = 0.0;  ///< C [A (rho^2 + 1/rho^2) + B - 1]
};

ConsistencyResiduals consistency_residuals(const FieldParams& p, double tol = 1e-9);

/// Weights of E(X_k | G) and E(X_{k+1} | G) on X_{k-1} and X_{k+n+1}, where
/// G is generated by the field outside the window k..k+n.
struct TwoSidedWeights {
  double left_k = 0.0;
  double right_k = 0.0;
  double left_k1 = 0.0;
  double right_k1 = 0.0;
};

TwoSidedWeights two_sided_weights(double rho, int n);

/// Coefficients of E(X_k^2 | X_{k-1}, X_{k+n}, ...) on X_{k-1}^2, X_{k+n}^2 and
/// X_{k-1} X_{k+n} at the degenerate point B = B1.
struct GappedSquareCoeffs {
  double left_sq = 0.0;
  double right_sq = 0.0;
  double cross = 0.0;
};

GappedSquareCoeffs gapped_square_coeffs(double rho, int n);

/// Runs one induction step n -> n+1 of the gapped-square formula through the
/// tower property and returns the max deviation from gapped_square_coeffs(n+1).
double gapped_square_induction_residual(double rho, int n);

/// Iterates Y_{n+1} = (1 + rho^2) Y_n - rho^2 Y_{n-1} and returns the largest
/// deviation from the closed form C1 + C2 rho^{2n} over n <= n_max.
double y_closed_form_check(double rho, double y0, double y1, int n_max);

}  // namespace bryc
