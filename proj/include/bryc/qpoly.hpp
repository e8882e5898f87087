#pragma once

// q-deformed integers and the three-term recurrences built on them.

#include <optional>
#include <variant>
#include <vector>

namespace bryc {

/// Highest polynomial degree evaluated by the recurrences below.
inline constexpr int kMaxDegree = 64;

/// [n]_q = 1 + q + ... + q^(n-1); 0 for n = 0.
double q_bracket(int n, double q);

/// [n]_q! = [1]_q [2]_q ... [n]_q; 1 for n = 0.
double q_factorial(int n, double q);

/// Immutable table of [n]_q for n = 0..N, filled by [n]_q = q [n-1]_q + 1.
class QBracketTable {
 public:
  QBracketTable(double q, int N);

  double q() const { return q_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int n) const { return values_[static_cast<std::size_t>(n)]; }
  const std::vector<double>& values() const { return values_; }

 private:
  double q_;
  std::vector<double> values_;
};

/// Monic q-Hermite polynomials Q_0..Q_N at x:
///   Q_0 = 1, Q_1 = x, Q_{n+1} = x Q_n - [n]_q Q_{n-1}.
/// q = 1 gives the probabilists' Hermite polynomials. Throws for N > kMaxDegree.
std::vector<double> qhermite_all(double x, double q, int N);

/// Monic Al-Salam-Chihara polynomials p_0..p_N of the conditional law given y:
///   p_0 = 1, p_1 = x - rho y,
///   p_{n+1} = (x - rho y q^n) p_n - (1 - rho^2 q^(n-1)) [n]_q p_{n-1}.
std::vector<double> asc_all(double x, double y, double rho, double q, int N);

/// c_n = (1 - rho^2 q^(n-1)) [n]_q, the product coefficient of the recurrence above.
double asc_coefficient(int n, double rho, double q);

namespace favard {

struct AllPositive {};
struct TerminatesAt {
  int n0 = 0;
  std::optional<int> m;  ///< lattice order when q = rho^(-2/m), m = n0 - 1
};
struct FailsAt {
  int n0 = 0;
};

}  // namespace favard

using FavardVerdict = std::variant<favard::AllPositive, favard::TerminatesAt, favard::FailsAt>;

/// Scans c_1..c_{n_max} in order and reports the first vanishing or negative
/// coefficient.
FavardVerdict favard_scan(double rho, double q, int n_max, double tol = 1e-10);

}  // namespace bryc
