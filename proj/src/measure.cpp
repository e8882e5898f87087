#include "bryc/measure.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bryc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kGaussianTableHalfWidth = 10.0;
constexpr double kGaussianQuadratureHalfWidth = 12.0;

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("radial law: cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

// ---------------------------------------------------------------------------
// RadialLaw

RadialLaw RadialLaw::make(std::vector<std::pair<double, double>> atoms, double tol) {
  if (atoms.empty()) {
    throw std::invalid_argument("radial law: no atoms");
  }
  RadialLaw law;
  double total = 0.0;
  double second = 0.0;
  for (const auto& [v, p] : atoms) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("radial law: values must be finite and >= 0");
    }
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("radial law: probabilities must be finite and >= 0");
    }
    law.values_.push_back(v);
    law.probs_.push_back(p);
    total += p;
    second += p * v * v;
    law.cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > tol) {
    throw std::invalid_argument("radial law: probabilities sum to " + std::to_string(total));
  }
  if (std::abs(second - 1.0) > tol) {
    throw std::invalid_argument("radial law: E R^2 = " + std::to_string(second) + " != 1");
  }
  return law;
}

RadialLaw RadialLaw::parse(std::string_view text, double tol) {
  std::vector<std::pair<double, double>> atoms;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("radial law: expected value:probability, got '" +
                                  std::string(item) + "'");
    }
    atoms.emplace_back(parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return make(std::move(atoms), tol);
}

bool RadialLaw::has_zero_atom() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == 0.0 && probs_[i] > 0.0) return true;
  }
  return false;
}

double RadialLaw::draw(double u) const {
  const double scaled = u * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), scaled);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                       values_.size() - 1);
  return values_[i];
}

// ---------------------------------------------------------------------------
// q-Gaussian density

double q_pochhammer_inf(double a, double q, double tol) {
  double prod = 1.0;
  double qk = 1.0;
  for (int k = 0;; ++k) {
    prod *= 1.0 - a * qk;
    qk *= q;
    if (std::abs(qk) < tol / (10.0 * (k + 1)) || qk == 0.0) break;
  }
  return prod;
}

QGaussDensity::QGaussDensity(double q, double tol) : q_(q) {
  if (!(q > -1.0 && q < 1.0)) {
    throw std::invalid_argument("q-Gaussian requires -1 < q < 1");
  }
  c_ = 2.0 / std::sqrt(1.0 - q);
  double qk = q;
  // (q; q)_inf underflows for q near 1, so the constant is kept as a logarithm
  double log_poch = 0.0;
  for (int k = 1; qk != 0.0; ++k) {
    qk_.push_back(qk);
    log_poch += std::log1p(-qk);
    if (std::abs(qk) < tol / (10.0 * k)) break;
    qk *= q;
  }
  log_scale_ = std::log(std::sqrt(1.0 - q) / std::numbers::pi) + log_poch;
}

double QGaussDensity::at_theta(double theta) const {
  const double s = std::sin(theta);
  const double s2 = 4.0 * s * s;
  double prod = 1.0;
  int exponent = 0;
  std::size_t k = 0;
  for (double qk : qk_) {
    const double d = 1.0 - qk;
    prod *= d * d + qk * s2;
    if (++k % 16 == 0) {
      int e = 0;
      prod = std::frexp(prod, &e);
      exponent += e;
    }
  }
  const double value =
      std::exp(log_scale_ + std::log(prod) + exponent * std::numbers::ln2) * s;
  return std::max(0.0, value);
}

double QGaussDensity::operator()(double x) const {
  const double t = x / c_;
  if (!(std::abs(t) < 1.0)) return 0.0;
  return at_theta(std::acos(t));
}

double QGaussDensity::theta_weight(double theta) const {
  return at_theta(theta) * c_ * std::sin(theta);
}

// ---------------------------------------------------------------------------
// Spec-level operations

bool is_continuous(const MeasureSpec& spec) {
  return std::holds_alternative<law::QGaussian>(spec) ||
         std::holds_alternative<law::StdGaussian>(spec);
}

double density(const MeasureSpec& spec, double x, double tol) {
  return std::visit(
      overloaded{
          [&](const law::QGaussian& s) { return QGaussDensity(s.q, tol)(x); },
          [&](const law::StdGaussian&) { return std_normal_pdf(x); },
          [](const auto&) -> double {
            throw std::invalid_argument("density: atomic law has no density");
          },
      },
      spec);
}

Support support(const MeasureSpec& spec) {
  return std::visit(
      overloaded{
          [](const law::QGaussian& s) -> Support {
            const double c = 2.0 / std::sqrt(1.0 - s.q);
            return Interval{-c, c};
          },
          [](const law::StdGaussian&) -> Support {
            return Interval{-std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity()};
          },
          [](const law::TwoPointSym&) -> Support { return AtomSet{{-1.0, 1.0}, {0.5, 0.5}}; },
          [](const law::ScaledTwoPoint& s) -> Support {
            AtomSet set;
            const auto& v = s.radial.values();
            const auto& p = s.radial.probabilities();
            for (std::size_t i = 0; i < v.size(); ++i) {
              if (v[i] == 0.0) {
                set.atoms.push_back(0.0);
                set.probabilities.push_back(p[i]);
              } else {
                set.atoms.push_back(-v[i]);
                set.probabilities.push_back(0.5 * p[i]);
                set.atoms.push_back(v[i]);
                set.probabilities.push_back(0.5 * p[i]);
              }
            }
            return set;
          },
      },
      spec);
}

double expectation(const MeasureSpec& spec, const std::function<double(double)>& g,
                   const QuadratureOptions& opt) {
  return std::visit(
      overloaded{
          [&](const law::QGaussian& s) {
            const QGaussDensity f(s.q);
            const double c = f.half_width();
            return integrate([&](double t) { return g(c * std::cos(t)) * f.theta_weight(t); },
                             0.0, std::numbers::pi, opt);
          },
          [&](const law::StdGaussian&) {
            auto h = [&](double x) { return g(x) * std_normal_pdf(x); };
            return integrate(h, -kGaussianQuadratureHalfWidth, 0.0, opt) +
                   integrate(h, 0.0, kGaussianQuadratureHalfWidth, opt);
          },
          [&](const auto&) {
            const auto atoms = std::get<AtomSet>(support(spec));
            double sum = 0.0;
            for (std::size_t i = 0; i < atoms.atoms.size(); ++i) {
              sum += atoms.probabilities[i] * g(atoms.atoms[i]);
            }
            return sum;
          },
      },
      spec);
}

double moment(const MeasureSpec& spec, int k, double tol) {
  if (k < 0 || k > 16) {
    throw std::invalid_argument("moment: order must be in 0..16");
  }
  if (k % 2 == 1) return 0.0;
  if (k == 0) return 1.0;
  QuadratureOptions opt;
  opt.rel_tol = tol;
  return expectation(spec, [k](double x) { return std::pow(x, k); }, opt);
}

// ---------------------------------------------------------------------------
// CdfTable

CdfTable::CdfTable(double half_width, const std::function<double(double)>& theta_density,
                   int n_points, double tol, double lower_mass)
    : c_(half_width) {
  if (n_points < 3) {
    throw std::invalid_argument("CdfTable: need at least 3 points");
  }
  const auto n = static_cast<std::size_t>(n_points);
  h_ = std::numbers::pi / static_cast<double>(n - 1);
  x_.resize(n);
  F_.resize(n);
  slope_.resize(n);

  QuadratureOptions opt;
  opt.rel_tol = tol;
  opt.abs_tol = tol * 1e-3;
  F_[0] = lower_mass;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * h_;
    x_[i] = -c_ * std::cos(t);
    slope_[i] = theta_density(t);
    if (i > 0) {
      F_[i] = F_[i - 1] + integrate(theta_density, t - h_, t, opt);
    }
  }
  x_.front() = -c_;
  x_.back() = c_;

  // absorb the upper tail mass and quadrature drift so F ends at exactly 1
  const double total = F_.back() + lower_mass;
  for (std::size_t i = 0; i < n; ++i) {
    F_[i] /= total;
    slope_[i] /= total;
  }
  F_.back() = 1.0 - lower_mass / total;
  for (std::size_t i = 1; i < n; ++i) {
    F_[i] = std::max(F_[i], F_[i - 1]);
  }

  // Fritsch-Carlson limiter on the Hermite slopes
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double secant = (F_[i + 1] - F_[i]) / h_;
    if (secant <= 0.0) {
      slope_[i] = 0.0;
      slope_[i + 1] = 0.0;
      continue;
    }
    const double a = slope_[i] / secant;
    const double b = slope_[i + 1] / secant;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      slope_[i] = tau * a * secant;
      slope_[i + 1] = tau * b * secant;
    }
  }
}

double CdfTable::eval_cell(std::size_t i, double s) const {
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * F_[i] + h10 * h_ * slope_[i] + h01 * F_[i + 1] + h11 * h_ * slope_[i + 1];
}

double CdfTable::cdf(double x) const {
  if (x <= -c_) return F_.front();
  if (x >= c_) return F_.back();
  const double t = std::acos(-x / c_);
  const double pos = t / h_;
  const auto i = std::min(static_cast<std::size_t>(pos), F_.size() - 2);
  return eval_cell(i, pos - static_cast<double>(i));
}

double CdfTable::quantile(double u) const {
  if (u <= F_.front()) return -c_;
  if (u >= F_.back()) return c_;
  const auto it = std::upper_bound(F_.begin(), F_.end(), u);
  const auto i = static_cast<std::size_t>(it - F_.begin()) - 1;
  // safeguarded Newton on the monotone cubic over s in [0, 1]
  double lo = 0.0;
  double hi = 1.0;
  const double span = F_[i + 1] - F_[i];
  double s = span > 0.0 ? (u - F_[i]) / span : 0.5;
  for (int iter = 0; iter < 60; ++iter) {
    const double val = eval_cell(i, s) - u;
    if (val > 0.0) {
      hi = s;
    } else {
      lo = s;
    }
    const double s2 = s * s;
    const double deriv = (6.0 * s2 - 6.0 * s) * F_[i] + (3.0 * s2 - 4.0 * s + 1.0) * h_ * slope_[i] +
                         (-6.0 * s2 + 6.0 * s) * F_[i + 1] + (3.0 * s2 - 2.0 * s) * h_ * slope_[i + 1];
    double next = deriv > 0.0 ? s - val / deriv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) < 1e-15 || hi - lo < 1e-15) {
      s = next;
      break;
    }
    s = next;
  }
  const double t = (static_cast<double>(i) + s) * h_;
  return -c_ * std::cos(t);
}

CdfTable cdf_table(const MeasureSpec& spec, int n_points, double tol) {
  if (n_points < 129) {
    throw std::invalid_argument("cdf_table: n_points must be >= 129");
  }
  return std::visit(
      overloaded{
          [&](const law::QGaussian& s) {
            const QGaussDensity f(s.q);
            return CdfTable(f.half_width(), [&](double t) { return f.theta_weight(t); }, n_points,
                            tol);
          },
          [&](const law::StdGaussian&) {
            const double L = kGaussianTableHalfWidth;
            return CdfTable(
                L, [L](double t) { return std_normal_pdf(-L * std::cos(t)) * L * std::sin(t); },
                n_points, tol, std_normal_cdf(-L));
          },
          [](const auto&) -> CdfTable {
            throw std::invalid_argument("cdf_table: atomic law");
          },
      },
      spec);
}

// ---------------------------------------------------------------------------
// Sampling

struct MarginalSampler::Lazy {
  std::once_flag once;
  std::unique_ptr<CdfTable> table;
};

MarginalSampler::MarginalSampler(MeasureSpec spec, int table_points)
    : spec_(std::move(spec)), table_points_(table_points), lazy_(std::make_shared<Lazy>()) {}

const CdfTable& MarginalSampler::table() const {
  std::call_once(lazy_->once, [this] {
    lazy_->table = std::make_unique<CdfTable>(cdf_table(spec_, table_points_));
  });
  return *lazy_->table;
}

double MarginalSampler::draw(CounterStream& stream) const {
  return std::visit(
      overloaded{
          [&](const law::QGaussian&) { return table().quantile(stream.uniform()); },
          [&](const law::StdGaussian&) { return stream.normal(); },
          [&](const law::TwoPointSym&) { return stream.uniform() < 0.5 ? -1.0 : 1.0; },
          [&](const law::ScaledTwoPoint& s) {
            const double r = s.radial.draw(stream.uniform());
            return stream.uniform() < 0.5 ? -r : r;
          },
      },
      spec_);
}

std::vector<double> sample(const MeasureSpec& spec, CounterStream& stream, std::size_t n) {
  const MarginalSampler sampler(spec);
  std::vector<double> out(n);
  for (auto& v : out) v = sampler.draw(stream);
  return out;
}

}  // namespace bryc
