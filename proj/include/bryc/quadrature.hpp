#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace bryc {

/// Raised when adaptive quadrature stops above its requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double requested)
      : std::runtime_error(what), estimate_(estimate), requested_(requested) {}

  double estimate() const { return estimate_; }
  double requested() const { return requested_; }

 private:
  double estimate_;
  double requested_;
};

struct QuadratureOptions {
  double rel_tol = 1e-12;
  /// Absolute floor on the accepted error, so integrals that cancel to zero converge.
  double abs_tol = 1e-14;
  unsigned max_depth = 20;
};

/// Adaptive Gauss-Kronrod (G15/K31) integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt = {});

}  // namespace bryc
