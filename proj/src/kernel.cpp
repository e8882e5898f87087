#include "bryc/kernel.hpp"

#include "bryc/qpoly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace bryc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kGaussianWindow = 12.0;

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double angle_of(double x, double c) { return std::acos(std::clamp(x / c, -1.0, 1.0)); }

// E[g(X')|y] for the +-1 chain and its scaled version: X' = y w.p. (1+rho)/2, else -y.
double two_point_expectation(double rho, const std::function<double(double)>& g, double y) {
  const double stay = 0.5 * (1.0 + rho);
  return stay * g(y) + (1.0 - stay) * g(-y);
}

}  // namespace

// ---------------------------------------------------------------------------
// MehlerKernel

MehlerKernel::MehlerKernel(double rho, double q, KernelOptions opt)
    : rho_(rho), q_(q), opt_(opt), f_(q) {
  if (!(std::abs(rho) < 1.0) || rho == 0.0) {
    throw std::invalid_argument("MehlerKernel: need 0 < |rho| < 1");
  }
  if (opt_.truncation < 0 || opt_.truncation > kMaxDegree) {
    throw std::invalid_argument("MehlerKernel: truncation must be in 0..64");
  }
  numerator_ = q_pochhammer_inf(rho * rho, q, opt_.tol);
  double t = rho;
  for (int k = 0;; ++k) {
    rho_qk_.push_back(t);
    t *= q;
    if (t == 0.0 || std::abs(t) < opt_.tol / (10.0 * (k + 1))) break;
  }
}

double MehlerKernel::ratio_theta(double a, double b) const {
  const double cp = std::cos(a + b);
  const double cm = std::cos(a - b);
  double den = 1.0;
  for (double t : rho_qk_) {
    const double t2 = t * t;
    den *= (1.0 - 2.0 * t * cp + t2) * (1.0 - 2.0 * t * cm + t2);
  }
  return numerator_ / den;
}

double MehlerKernel::density_theta(double a, double b) const {
  return f_.at_theta(a) * ratio_theta(a, b);
}

double MehlerKernel::density(double x, double y) const {
  const double c = f_.half_width();
  if (!(std::abs(x) < c)) return 0.0;
  return density_theta(std::acos(x / c), angle_of(y, c));
}

SeriesValue MehlerKernel::series_density(double x, double y, int N) const {
  if (N < 0) N = opt_.truncation;
  const auto qx = qhermite_all(x, q_, N);
  const auto qy = qhermite_all(y, q_, N);
  long double sum = 0.0L;
  long double weight = 1.0L;  // rho^n / [n]_q!
  long double bracket = 0.0L;
  for (int n = 0; n <= N; ++n) {
    if (n > 0) {
      bracket = bracket * q_ + 1.0L;
      weight *= rho_ / bracket;
    }
    sum += weight * qx[static_cast<std::size_t>(n)] * qy[static_cast<std::size_t>(n)];
  }
  SeriesValue out;
  out.value = f_(x) * static_cast<double>(sum);
  if (out.value < 0.0) {
    if (out.value < -opt_.tol_neg) {
      std::ostringstream os;
      os << "kernel positivity violation: truncated series " << out.value << " at x=" << x
         << ", y=" << y << " (rho=" << rho_ << ", q=" << q_ << ", N=" << N << ")";
      throw KernelPositivityError(os.str());
    }
    out.clamped = -out.value;
    out.value = 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kernel-level operations

double kernel_rho(const TransitionKernel& k) {
  return std::visit(overloaded{
                        [](const MehlerKernel& m) { return m.rho(); },
                        [](const auto& s) { return s.rho; },
                    },
                    k);
}

MeasureSpec stationary_law(const TransitionKernel& k) {
  return std::visit(overloaded{
                        [](const MehlerKernel& m) -> MeasureSpec { return law::QGaussian{m.q()}; },
                        [](const GaussianAR1&) -> MeasureSpec { return law::StdGaussian{}; },
                        [](const TwoPointChain&) -> MeasureSpec { return law::TwoPointSym{}; },
                        [](const ScaledTwoPointChain& s) -> MeasureSpec {
                          return law::ScaledTwoPoint{s.radial};
                        },
                    },
                    k);
}

double transition_density(const TransitionKernel& k, double x, double y) {
  return std::visit(
      overloaded{
          [&](const MehlerKernel& m) { return m.density(x, y); },
          [&](const GaussianAR1& g) {
            return normal_pdf(x, g.rho * y, std::sqrt(1.0 - g.rho * g.rho));
          },
          [](const auto&) -> double {
            throw std::invalid_argument("transition_density: atomic kernel has no density");
          },
      },
      k);
}

double conditional_expectation(const TransitionKernel& k, const std::function<double(double)>& g,
                               double y, const QuadratureOptions& opt) {
  return std::visit(
      overloaded{
          [&](const MehlerKernel& m) {
            const auto& f = m.marginal();
            const double c = f.half_width();
            const double b = angle_of(y, c);
            auto integrand = [&](double a) {
              return g(c * std::cos(a)) * f.theta_weight(a) * m.ratio_theta(a, b);
            };
            return integrate(integrand, 0.0, b, opt) + integrate(integrand, b, std::numbers::pi, opt);
          },
          [&](const GaussianAR1& ar) {
            const double mean = ar.rho * y;
            const double sd = std::sqrt(1.0 - ar.rho * ar.rho);
            auto integrand = [&](double x) { return g(x) * normal_pdf(x, mean, sd); };
            return integrate(integrand, mean - kGaussianWindow * sd, mean, opt) +
                   integrate(integrand, mean, mean + kGaussianWindow * sd, opt);
          },
          [&](const TwoPointChain& t) { return two_point_expectation(t.rho, g, y); },
          [&](const ScaledTwoPointChain& s) { return two_point_expectation(s.rho, g, y); },
      },
      k);
}

double eigen_residual(const TransitionKernel& k, int n, double y) {
  if (n < 0 || n > 12) {
    throw std::invalid_argument("eigen_residual: degree must be in 0..12");
  }
  const double q = std::visit(overloaded{
                                  [](const MehlerKernel& m) { return m.q(); },
                                  [](const GaussianAR1&) { return 1.0; },
                                  [](const TwoPointChain&) { return -1.0; },
                                  [](const ScaledTwoPointChain&) -> double {
                                    throw std::invalid_argument(
                                        "eigen_residual: scaled two-point chain has no "
                                        "q-Hermite eigenbasis");
                                  },
                              },
                              k);
  if (n == 0) {
    // the kernel integrates to one; report that residual directly
    return std::abs(conditional_expectation(k, [](double) { return 1.0; }, y) - 1.0);
  }
  const double lhs =
      conditional_expectation(k, [&](double x) { return qhermite_all(x, q, n).back(); }, y);
  const double rhs = std::pow(kernel_rho(k), n) * qhermite_all(y, q, n).back();
  return std::abs(lhs - rhs);
}

MomentResidual conditional_moment_residual(const TransitionKernel& k, const FieldParams& p,
                                           double y) {
  const RegressionCoeffs rc = regression_coeffs(p);
  const double rho = kernel_rho(k);
  MomentResidual r;
  r.r_mean = std::abs(conditional_expectation(k, [](double x) { return x; }, y) - rho * y);
  r.r_var = std::abs(conditional_expectation(k, [](double x) { return x * x; }, y) -
                     (rc.alpha1 * y * y + rc.beta1 * y + rc.gamma1));
  return r;
}

double stationarity_residual(const TransitionKernel& k, const MeasureSpec& spec, double x) {
  if (is_continuous(spec)) {
    QuadratureOptions opt;
    opt.rel_tol = 1e-13;
    const double pushed =
        expectation(spec, [&](double y) { return transition_density(k, x, y); }, opt);
    return std::abs(pushed - density(spec, x));
  }
  const auto atoms = std::get<AtomSet>(support(spec));
  const double rho = kernel_rho(k);
  const double stay = 0.5 * (1.0 + rho);
  std::map<double, double> pushed;
  std::map<double, double> base;
  for (std::size_t i = 0; i < atoms.atoms.size(); ++i) {
    const double s = atoms.atoms[i];
    const double p = atoms.probabilities[i];
    base[s] += p;
    pushed[s] += stay * p;
    pushed[-s] += (1.0 - stay) * p;
  }
  double tv = 0.0;
  for (const auto& [s, p] : pushed) {
    const auto it = base.find(s);
    tv += std::abs(p - (it == base.end() ? 0.0 : it->second));
  }
  for (const auto& [s, p] : base) {
    if (!pushed.contains(s)) tv += p;
  }
  return 0.5 * tv;
}

std::array<std::array<double, 2>, 2> two_point_matrix(double rho) {
  if (!(std::abs(rho) < 1.0)) {
    throw std::invalid_argument("two_point_matrix: need |rho| < 1");
  }
  const double stay = 0.5 * (1.0 + rho);
  const double flip = 0.5 * (1.0 - rho);
  return {{{stay, flip}, {flip, stay}}};
}

double chapman_kolmogorov_residual(const MehlerKernel& k, double x, double y) {
  const auto& f = k.marginal();
  const double c = f.half_width();
  const double a = angle_of(x, c);
  const double b = angle_of(y, c);
  auto integrand = [&](double s) { return k.ratio_theta(a, s) * k.ratio_theta(s, b) * f.theta_weight(s); };
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  QuadratureOptions opt;
  opt.rel_tol = 1e-13;
  const double composed = f.at_theta(a) * (integrate(integrand, 0.0, lo, opt) +
                                           integrate(integrand, lo, hi, opt) +
                                           integrate(integrand, hi, std::numbers::pi, opt));
  const MehlerKernel two_step(k.rho() * k.rho(), k.q(), k.options());
  return std::abs(composed - two_step.density_theta(a, b));
}

}  // namespace bryc
