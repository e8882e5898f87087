#pragma once

// Stationary one-dimensional laws of the field: the q-Gaussian family rescaled
// to unit variance, the standard Gaussian, the symmetric two-point law and
// scaled two-point laws X = R Y.

#include "bryc/quadrature.hpp"
#include "bryc/rng.hpp"

#include <functional>
#include <memory>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace bryc {

/// Finite law of R >= 0 with E R^2 = 1.
class RadialLaw {
 public:
  /// Validates nonnegative values, probabilities summing to 1 and E R^2 = 1,
  /// each within tol. Throws std::invalid_argument.
  static RadialLaw make(std::vector<std::pair<double, double>> atoms, double tol = 1e-9);

  /// Parses "v1:p1,v2:p2,...".
  static RadialLaw parse(std::string_view text, double tol = 1e-9);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probabilities() const { return probs_; }
  bool has_zero_atom() const;

  /// Categorical draw by inversion of the cumulative probabilities.
  double draw(double u) const;

 private:
  RadialLaw() = default;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

namespace law {

struct QGaussian {
  double q = 0.0;
};
struct StdGaussian {};
struct TwoPointSym {};
struct ScaledTwoPoint {
  RadialLaw radial;
};

}  // namespace law

using MeasureSpec = std::variant<law::QGaussian, law::StdGaussian, law::TwoPointSym,
                                 law::ScaledTwoPoint>;

bool is_continuous(const MeasureSpec& spec);

/// Density of the unit-variance q-Gaussian law, -1 < q < 1, with the infinite
/// products precomputed. With x = c cos(theta), c = 2/sqrt(1-q):
///   f(x) = sqrt(1-q)/pi sin(theta) prod_k (1-q^k) [(1-q^k)^2 + 4 q^k sin^2(theta)].
class QGaussDensity {
 public:
  explicit QGaussDensity(double q, double tol = 1e-16);

  double q() const { return q_; }
  double half_width() const { return c_; }
  int product_terms() const { return static_cast<int>(qk_.size()); }

  double operator()(double x) const;
  double at_theta(double theta) const;
  /// f(c cos theta) c sin theta, the density of theta itself.
  double theta_weight(double theta) const;

 private:
  double q_;
  double c_;
  double log_scale_;
  std::vector<double> qk_;
};

/// (a; q)_inf truncated once |q|^k < tol / (10 k).
double q_pochhammer_inf(double a, double q, double tol = 1e-16);

/// Throws std::invalid_argument for atomic specs.
double density(const MeasureSpec& spec, double x, double tol = 1e-16);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
struct AtomSet {
  std::vector<double> atoms;
  std::vector<double> probabilities;
};
using Support = std::variant<Interval, AtomSet>;

Support support(const MeasureSpec& spec);

/// E g(X) by adaptive quadrature (continuous) or a finite sum (atomic).
double expectation(const MeasureSpec& spec, const std::function<double(double)>& g,
                   const QuadratureOptions& opt = {});

/// E X^k; odd k returns exactly 0. Requires k <= 16.
double moment(const MeasureSpec& spec, int k, double tol = 1e-12);

/// Monotone CDF table on a cosine-spaced grid x_i = -c cos(t_i), t_i uniform in
/// [0, pi]. CDF values come from adaptive quadrature per cell; the interpolant is
/// the cubic Hermite in t through the exact slopes dF/dt, made monotone by the
/// Fritsch-Carlson limiter.
class CdfTable {
 public:
  /// theta_density(t) = f(-c cos t) c sin t. lower_mass is F(-c).
  CdfTable(double half_width, const std::function<double(double)>& theta_density, int n_points,
           double tol, double lower_mass = 0.0);

  double cdf(double x) const;
  double quantile(double u) const;

  double half_width() const { return c_; }
  int size() const { return static_cast<int>(F_.size()); }
  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& values() const { return F_; }

 private:
  double eval_cell(std::size_t i, double s) const;

  double c_;
  double h_;
  std::vector<double> x_;
  std::vector<double> F_;
  std::vector<double> slope_;  // dF/dt after limiting
};

/// Requires a continuous spec and n_points >= 129. Gaussian tables cover [-10, 10].
CdfTable cdf_table(const MeasureSpec& spec, int n_points = 4097, double tol = 1e-12);

/// Draws from a stationary law; the CDF table of a q-Gaussian is built on first
/// use and shared between copies.
class MarginalSampler {
 public:
  explicit MarginalSampler(MeasureSpec spec, int table_points = 4097);

  const MeasureSpec& spec() const { return spec_; }
  double draw(CounterStream& stream) const;
  const CdfTable& table() const;

 private:
  struct Lazy;
  MeasureSpec spec_;
  int table_points_;
  std::shared_ptr<Lazy> lazy_;
};

std::vector<double> sample(const MeasureSpec& spec, CounterStream& stream, std::size_t n);

}  // namespace bryc
