#pragma once

// One-step Markov transition kernels for every existing case of the
// classification, with numeric certificates of the eigen-relation
// E[Q_n(X_k) | X_{k-1} = y] = rho^n Q_n(y), conditional moments and stationarity.

#include "bryc/measure.hpp"
#include "bryc/params.hpp"

#include <array>
#include <functional>
#include <stdexcept>
#include <variant>

namespace bryc {

class KernelPositivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KernelOptions {
  int truncation = 64;  ///< series order, at most kMaxDegree
  double tol = 1e-14;   ///< truncation of the infinite products
  double tol_neg = 1e-9;
};

struct SeriesValue {
  double value = 0.0;
  double clamped = 0.0;  ///< magnitude of a negative partial sum set to zero
};

/// Mehler-type kernel of the q-Gaussian chain:
///   f(x|y) = f_q(x) sum_n rho^n Q_n(x) Q_n(y) / [n]_q!.
/// density() evaluates the sum through its product form (x = c cos a, y = c cos b)
///   (rho^2; q)_inf / prod_k |1 - rho q^k e^{i(a+b)}|^2 |1 - rho q^k e^{i(a-b)}|^2,
/// which is positive and exact; series_density() is the truncated sum.
class MehlerKernel {
 public:
  MehlerKernel(double rho, double q, KernelOptions opt = {});

  double rho() const { return rho_; }
  double q() const { return q_; }
  const QGaussDensity& marginal() const { return f_; }
  const KernelOptions& options() const { return opt_; }
  int product_terms() const { return static_cast<int>(rho_qk_.size()); }

  double density(double x, double y) const;
  /// Density at x = c cos(a) given y = c cos(b).
  double density_theta(double a, double b) const;
  /// Ratio f(x|y) / f_q(x) in angle coordinates.
  double ratio_theta(double a, double b) const;

  /// Truncated series of order N (defaults to options().truncation). Negative
  /// sums above -tol_neg are clamped to zero; below, KernelPositivityError.
  SeriesValue series_density(double x, double y, int N = -1) const;

 private:
  double rho_;
  double q_;
  KernelOptions opt_;
  QGaussDensity f_;
  double numerator_;            // (rho^2; q)_inf
  std::vector<double> rho_qk_;  // rho q^k, k = 0, 1, ...
};

struct GaussianAR1 {
  double rho = 0.0;
};
struct TwoPointChain {
  double rho = 0.0;
};
struct ScaledTwoPointChain {
  double rho = 0.0;
  RadialLaw radial;
};

using TransitionKernel = std::variant<MehlerKernel, GaussianAR1, TwoPointChain, ScaledTwoPointChain>;

double kernel_rho(const TransitionKernel& k);

/// The law the kernel leaves invariant.
MeasureSpec stationary_law(const TransitionKernel& k);

/// Requires MehlerKernel or GaussianAR1.
double transition_density(const TransitionKernel& k, double x, double y);

/// E[g(X') | X = y]; quadrature for continuous kernels, finite sums otherwise.
double conditional_expectation(const TransitionKernel& k, const std::function<double(double)>& g,
                               double y, const QuadratureOptions& opt = {});

/// |E[Q_n(X') | X = y] - rho^n Q_n(y)| with the q of the kernel (1 for AR(1),
/// -1 for the two-point chain). Requires n <= 12. Not defined for the scaled chain.
double eigen_residual(const TransitionKernel& k, int n, double y);

struct MomentResidual {
  double r_mean = 0.0;
  double r_var = 0.0;
};

/// Compares E[X'|y] with rho y and E[X'^2|y] with alpha1 y^2 + gamma1.
MomentResidual conditional_moment_residual(const TransitionKernel& k, const FieldParams& p,
                                           double y);

/// |int f(x|y) dnu(y) - f_nu(x)| for continuous kernels; total variation
/// distance between pi P and pi for atomic ones (x ignored).
double stationarity_residual(const TransitionKernel& k, const MeasureSpec& spec, double x);

/// P(s -> s) = (1 + rho)/2, P(s -> -s) = (1 - rho)/2; states ordered (-1, +1).
std::array<std::array<double, 2>, 2> two_point_matrix(double rho);

/// |int f(x|z) f(z|y) dz - f_{rho^2}(x|y)|.
double chapman_kolmogorov_residual(const MehlerKernel& k, double x, double y);

}  // namespace bryc
