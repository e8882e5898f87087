#include "bryc/params.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bryc {

namespace {

constexpr std::string_view kB1Caveat =
    "nonexistent under uniform integrability of (X_k^2) and Pr(X_{k-1}=0)<1; "
    "unconditional status unresolved";

constexpr std::string_view kScaledNote =
    "X_k = R Y_k with R >= 0 independent of a symmetric +-1 chain; finite-dimensional "
    "distributions are not unique; the representation assumes no atom at zero";

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

ValidationResult validate(const FieldParams& p, double tol) {
  if (!std::isfinite(p.rho) || !std::isfinite(p.A) || !std::isfinite(p.B) ||
      !std::isfinite(p.C) || !std::isfinite(p.D)) {
    return {false, "non-finite parameter"};
  }
  if (p.rho == 0.0) {
    return {false, "rho=0 excluded"};
  }
  if (std::abs(p.rho) >= 1.0) {
    return {false, "|rho|<1 required"};
  }
  const double expected_c = 1.0 - 2.0 * p.A - p.B * p.rho * p.rho;
  if (std::abs(p.C - expected_c) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << "C mismatch: C=" << p.C << " but 1-2A-B*rho^2=" << expected_c;
    return {false, os.str()};
  }
  return {};
}

DerivedParams derive(const FieldParams& p, double tol) {
  const double r2 = p.rho * p.rho;
  const double r4 = r2 * r2;
  const double s = p.rho + 1.0 / p.rho;

  DerivedParams d;
  d.a = p.rho / (1.0 + r2);
  d.R = p.B * s * s;
  d.q_denominator = 1.0 + r4 * (d.R - 1.0);
  if (std::abs(d.q_denominator) > tol) {
    d.q = (r4 + d.R - 1.0) / d.q_denominator;
  }
  d.mystic_residual = std::abs(p.A * (r2 + 1.0 / r2) + p.B - 1.0);
  return d;
}

double b_of_q(double rho, double q, double tol) {
  const double r2 = rho * rho;
  const double r4 = r2 * r2;
  const double den = 1.0 - q * r4;
  if (std::abs(den) <= tol) {
    throw std::domain_error("b_of_q: q*rho^4 = 1 has no finite B");
  }
  const double R = (1.0 + q) * (1.0 - r4) / den;
  return R * r2 / ((1.0 + r2) * (1.0 + r2));
}

FieldParams mystic_params(double rho, double B) {
  const double r2 = rho * rho;
  FieldParams p;
  p.rho = rho;
  p.B = B;
  p.A = (1.0 - B) * r2 / (1.0 + r2 * r2);
  p.C = 1.0 - 2.0 * p.A - B * r2;
  p.D = 0.0;
  return p;
}

Boundaries boundary_values(double rho, int m_max) {
  const double r2 = rho * rho;
  const double r4 = r2 * r2;
  Boundaries b;
  b.B1 = (r2 - 1.0) / (r2 * (1.0 + r2));
  b.B2_sup = 2.0 * r2 / ((1.0 + r2) * (1.0 + r2));
  b.B3.reserve(static_cast<std::size_t>(std::max(m_max, 0)));
  for (int m = 1; m <= m_max; ++m) {
    // rho^(2/m) taken as (rho^2)^(1/m) so negative rho stays real
    const double root = std::pow(r2, 1.0 / m);
    b.B3.push_back(b.B2_sup * (1.0 - r4) * (1.0 + root) / (2.0 * (root - r4)));
  }
  return b;
}

Classification classify(const FieldParams& p, const Tolerances& tol) {
  if (auto v = validate(p, tol.validation); !v) {
    return verdict::InvalidParams{v.violation};
  }
  if (std::abs(p.D) > tol.validation) {
    return verdict::Nonexistent{"D != 0"};
  }
  if (std::abs(p.B) <= tol.validation) {
    if (std::abs(p.A - 0.5) <= tol.validation) {
      return verdict::ExistsScaledTwoPoint{std::string(kScaledNote)};
    }
    const DerivedParams d = derive(p, tol.validation);
    std::string note = "values +-1 with equal probability";
    if (d.mystic_residual <= tol.validation) {
      note += "; mystic formula also holds (q = -1)";
    }
    return verdict::ExistsTwoPointSymmetric{std::move(note)};
  }

  const DerivedParams d = derive(p, tol.validation);
  if (d.mystic_residual > tol.validation) {
    return verdict::Nonexistent{"mystic formula A(rho^2+1/rho^2)+B=1 violated with B != 0"};
  }
  if (!d.q) {
    return verdict::NonexistentDegenerateB1{std::string(kB1Caveat)};
  }
  // B < B1 also lands here: its q exceeds rho^-4 > 1 but the B < 0 verdict applies.
  if (p.B < 0.0) {
    return verdict::Nonexistent{"B < 0 (q < -1)"};
  }
  const double q = *d.q;
  if (std::abs(q - 1.0) <= tol.validation) {
    return verdict::ExistsGaussian{};
  }
  if (q < 1.0) {
    return verdict::ExistsQGaussian{q};
  }
  const double m_star = -2.0 * std::log(std::abs(p.rho)) / std::log(q);
  const double m_round = std::round(m_star);
  if (std::abs(m_star - m_round) <= tol.lattice && m_round >= 1.0) {
    return verdict::OpenLatticeB3{static_cast<int>(m_round)};
  }
  std::ostringstream os;
  os.precision(10);
  os << "q > 1 off the lattice q = rho^(-2/m) (m* = " << m_star << ")";
  return verdict::Nonexistent{os.str()};
}

std::string_view verdict_name(const Classification& c) {
  return std::visit(
      overloaded{
          [](const verdict::InvalidParams&) -> std::string_view { return "InvalidParams"; },
          [](const verdict::Nonexistent&) -> std::string_view { return "Nonexistent"; },
          [](const verdict::NonexistentDegenerateB1&) -> std::string_view {
            return "NonexistentDegenerateB1";
          },
          [](const verdict::ExistsScaledTwoPoint&) -> std::string_view {
            return "ExistsScaledTwoPoint";
          },
          [](const verdict::ExistsTwoPointSymmetric&) -> std::string_view {
            return "ExistsTwoPointSymmetric";
          },
          [](const verdict::ExistsQGaussian&) -> std::string_view { return "ExistsQGaussian"; },
          [](const verdict::ExistsGaussian&) -> std::string_view { return "ExistsGaussian"; },
          [](const verdict::OpenLatticeB3&) -> std::string_view { return "OpenLatticeB3"; },
      },
      c);
}

std::string describe(const Classification& c) {
  std::ostringstream os;
  os.precision(17);
  os << verdict_name(c);
  std::visit(overloaded{
                 [&](const verdict::InvalidParams& v) { os << " (" << v.reason << ")"; },
                 [&](const verdict::Nonexistent& v) { os << " (" << v.reason << ")"; },
                 [&](const verdict::NonexistentDegenerateB1& v) { os << " (" << v.caveat << ")"; },
                 [&](const verdict::ExistsScaledTwoPoint& v) { os << " (" << v.note << ")"; },
                 [&](const verdict::ExistsTwoPointSymmetric& v) { os << " (" << v.note << ")"; },
                 [&](const verdict::ExistsQGaussian& v) { os << " q=" << v.q; },
                 [&](const verdict::ExistsGaussian&) {},
                 [&](const verdict::OpenLatticeB3& v) {
                   os << " m=" << v.m << " (existence open)";
                 },
             },
             c);
  return os.str();
}

bool exists(const Classification& c) {
  return std::holds_alternative<verdict::ExistsScaledTwoPoint>(c) ||
         std::holds_alternative<verdict::ExistsTwoPointSymmetric>(c) ||
         std::holds_alternative<verdict::ExistsQGaussian>(c) ||
         std::holds_alternative<verdict::ExistsGaussian>(c);
}

double boundary_distance(const FieldParams& p, int m_max) {
  const Boundaries b = boundary_values(p.rho, m_max);
  double best = std::min({std::abs(p.B), std::abs(p.B - b.B1), std::abs(p.B - b.B2_sup)});
  for (double v : b.B3) {
    best = std::min(best, std::abs(p.B - v));
  }
  return best;
}

RegressionCoeffs regression_coeffs(const FieldParams& p, double tol) {
  const double r2 = p.rho * p.rho;
  const double den = 1.0 - p.A * (1.0 + r2);
  if (std::abs(den) <= tol) {
    throw std::domain_error("degenerate denominator: A = 1/(1+rho^2)");
  }
  RegressionCoeffs c;
  c.alpha1 = (p.A * (1.0 - r2) + p.B * r2) / den;
  c.alpha2 = ((1.0 + r2) * (p.A + p.B * r2) - r2) / den;
  c.beta1 = p.D * (1.0 + r2) / den;
  c.beta2 = p.D * (1.0 + r2) * (1.0 + r2) / den;
  c.gamma1 = p.C / den;
  c.gamma2 = p.C * (1.0 + r2) / den;
  return c;
}

ConsistencyResiduals consistency_residuals(const FieldParams& p, double tol) {
  const RegressionCoeffs c = regression_coeffs(p, tol);
  const double r2 = p.rho * p.rho;
  ConsistencyResiduals r;
  r.r1 = c.alpha1 * c.alpha1 - c.alpha2;
  r.r2 = c.beta1 * (c.alpha1 + p.rho) - c.beta2;
  r.r3 = c.gamma1 * (c.alpha1 + 1.0) - c.gamma2;
  r.drift_constraint = p.D * (p.C - (1.0 - p.rho) * p.rho * (1.0 - p.A * (1.0 + r2)));
  r.mystic_constraint = p.C * (p.A * (r2 + 1.0 / r2) + p.B - 1.0);
  return r;
}

namespace {

template <class Real>
struct Weights {
  Real left_k, right_k, left_k1, right_k1;
};

template <class Real>
struct Gapped {
  Real left_sq, right_sq, cross;
};

template <class Real>
Real ipow(const Real& x, int k) {
  Real r = 1;
  const Real base = k < 0 ? Real(1) / x : x;
  for (int i = 0; i < std::abs(k); ++i) r *= base;
  return r;
}

template <class Real>
Weights<Real> weights_t(const Real& rho, int n) {
  const Real den = ipow(rho, n + 2) - ipow(rho, -2 - n);
  return {(ipow(rho, n + 1) - ipow(rho, -n - 1)) / den, (rho - 1 / rho) / den,
          (ipow(rho, n) - ipow(rho, -n)) / den, (rho * rho - 1 / (rho * rho)) / den};
}

template <class Real>
Gapped<Real> gapped_t(const Real& rho, int n) {
  const Real r2 = rho * rho;
  const Real r2n = ipow(r2, n);
  const Real den = 1 - r2n * r2;
  return {(1 - r2n) / den, (1 - r2) / den, (r2 - 1) * (1 - r2n) / (ipow(rho, n + 1) * den)};
}

// 50 significant digits: the coefficients grow like rho^(-n-1), so the
// identity cannot be checked to an absolute 1e-10 in binary64
using Wide = boost::multiprecision::cpp_bin_float_50;

}  // namespace

TwoSidedWeights two_sided_weights(double rho, int n) {
  const auto w = weights_t<Wide>(Wide(rho), n);
  return {static_cast<double>(w.left_k), static_cast<double>(w.right_k),
          static_cast<double>(w.left_k1), static_cast<double>(w.right_k1)};
}

GappedSquareCoeffs gapped_square_coeffs(double rho, int n) {
  const auto c = gapped_t<Wide>(Wide(rho), n);
  return {static_cast<double>(c.left_sq), static_cast<double>(c.right_sq),
          static_cast<double>(c.cross)};
}

double gapped_square_induction_residual(double rho, int n) {
  const Wide r(rho);
  const Wide r2 = r * r;
  const Wide A = 1 / (1 + r2);
  const Wide B = (r2 - 1) / (r2 * (1 + r2));

  // With u = X_{k-1}, v = X_{k+n+1} and S = E(X_k^2 | G_{n+1}):
  //   S = A u^2 + A E(X_{k+1}^2 | G_{n+1}) + B u E(X_{k+1} | G_{n+1})
  //   E(X_{k+1}^2 | G_{n+1}) = c1 S + c2 v^2 + c3 v E(X_k | G_{n+1})
  const auto c = gapped_t(r, n);
  const auto w = weights_t(r, n);
  const Wide lhs = 1 - A * c.left_sq;
  const Wide s_uu = (A + B * w.left_k1) / lhs;
  const Wide s_vv = (A * c.right_sq + A * c.cross * w.right_k) / lhs;
  const Wide s_uv = (A * c.cross * w.left_k + B * w.right_k1) / lhs;

  const auto next = gapped_t(r, n + 1);
  const Wide d1 = abs(s_uu - next.left_sq);
  const Wide d2 = abs(s_vv - next.right_sq);
  const Wide d3 = abs(s_uv - next.cross);
  const Wide worst = d1 > d2 ? (d1 > d3 ? d1 : d3) : (d2 > d3 ? d2 : d3);
  return static_cast<double>(worst);
}

double y_closed_form_check(double rho, double y0, double y1, int n_max) {
  const double r2 = rho * rho;
  const double c2 = (y0 - y1) / (1.0 - r2);
  const double c1 = -(r2 * y0 - y1) / (1.0 - r2);

  double prev = y0;
  double cur = y1;
  double worst = std::abs(prev - (c1 + c2));
  double r2n = r2;
  worst = std::max(worst, std::abs(cur - (c1 + c2 * r2n)));
  for (int n = 1; n < n_max; ++n) {
    const double next = (1.0 + r2) * cur - r2 * prev;
    prev = cur;
    cur = next;
    r2n *= r2;
    worst = std::max(worst, std::abs(cur - (c1 + c2 * r2n)));
  }
  return worst;
}

}  // namespace bryc
