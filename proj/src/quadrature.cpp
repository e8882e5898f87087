#include "bryc/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <sstream>

namespace bryc {

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt) {
  if (a == b) {
    return 0.0;
  }
  // Boost reports its error estimate in the units of [-1, 1] without the
  // interval scale factor, so integrate over [-1, 1] explicitly.
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto unit = [&](double u) { return f(mid + half * u) * half; };
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      unit, -1.0, 1.0, opt.max_depth, opt.rel_tol, &error, &l1);
  // boost stops on error <= rel_tol * L1; allow the documented slack of its estimate
  const double allowed = std::max(10.0 * opt.rel_tol * l1, opt.abs_tol);
  if (!(error <= allowed)) {
    std::ostringstream os;
    os << "adaptive quadrature did not converge on [" << a << ", " << b
       << "]: error estimate " << error << " > " << allowed;
    throw QuadratureError(os.str(), error, allowed);
  }
  return value;
}

}  // namespace bryc
