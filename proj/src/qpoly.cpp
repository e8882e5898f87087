#include "bryc/qpoly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bryc {

namespace {

void check_degree(int N) {
  if (N < 0 || N > kMaxDegree) {
    throw std::invalid_argument("polynomial degree " + std::to_string(N) +
                                " outside 0.." + std::to_string(kMaxDegree));
  }
}

}  // namespace

double q_bracket(int n, double q) {
  if (n < 0) {
    throw std::invalid_argument("q_bracket: negative n");
  }
  double value = 0.0;
  for (int j = 0; j < n; ++j) {
    value = value * q + 1.0;
  }
  return value;
}

double q_factorial(int n, double q) {
  double value = 1.0;
  for (int j = 1; j <= n; ++j) {
    value *= q_bracket(j, q);
  }
  return value;
}

QBracketTable::QBracketTable(double q, int N) : q_(q) {
  if (N < 0) {
    throw std::invalid_argument("QBracketTable: negative size");
  }
  values_.resize(static_cast<std::size_t>(N) + 1);
  values_[0] = 0.0;
  for (std::size_t n = 1; n < values_.size(); ++n) {
    values_[n] = values_[n - 1] * q + 1.0;
  }
}

std::vector<double> qhermite_all(double x, double q, int N) {
  check_degree(N);
  std::vector<double> out(static_cast<std::size_t>(N) + 1);
  long double prev = 1.0L;
  long double cur = x;
  long double bracket = 1.0L;  // [1]_q
  out[0] = 1.0;
  if (N >= 1) out[1] = x;
  for (int n = 1; n < N; ++n) {
    const long double next = static_cast<long double>(x) * cur - bracket * prev;
    prev = cur;
    cur = next;
    bracket = bracket * q + 1.0L;
    out[static_cast<std::size_t>(n) + 1] = static_cast<double>(cur);
  }
  return out;
}

std::vector<double> asc_all(double x, double y, double rho, double q, int N) {
  check_degree(N);
  std::vector<double> out(static_cast<std::size_t>(N) + 1);
  const long double lx = x;
  const long double shift = static_cast<long double>(rho) * y;
  const long double r2 = static_cast<long double>(rho) * rho;
  long double prev = 1.0L;
  long double cur = lx - shift;
  long double qn = q;         // q^n
  long double qn1 = 1.0L;     // q^(n-1)
  long double bracket = 1.0L; // [n]_q
  out[0] = 1.0;
  if (N >= 1) out[1] = static_cast<double>(cur);
  for (int n = 1; n < N; ++n) {
    const long double next = (lx - shift * qn) * cur - (1.0L - r2 * qn1) * bracket * prev;
    prev = cur;
    cur = next;
    qn1 = qn;
    qn *= q;
    bracket = bracket * q + 1.0L;
    out[static_cast<std::size_t>(n) + 1] = static_cast<double>(cur);
  }
  return out;
}

double asc_coefficient(int n, double rho, double q) {
  if (n < 1) {
    throw std::invalid_argument("asc_coefficient: n must be positive");
  }
  return (1.0 - rho * rho * std::pow(q, n - 1)) * q_bracket(n, q);
}

FavardVerdict favard_scan(double rho, double q, int n_max, double tol) {
  const double r2 = rho * rho;
  for (int n = 1; n <= n_max; ++n) {
    const double c = asc_coefficient(n, rho, q);
    if (std::abs(c) <= tol) {
      favard::TerminatesAt t{n, std::nullopt};
      if (n >= 2) {
        const int m = n - 1;
        const double lattice_q = std::pow(r2, -1.0 / m);
        if (std::abs(q - lattice_q) <= 1e-8 * lattice_q) {
          t.m = m;
        }
      }
      return t;
    }
    if (c < -tol) {
      return favard::FailsAt{n};
    }
  }
  return favard::AllPositive{};
}

}  // namespace bryc
