#include "photonpol/numerics.hpp"

#include <gsl/gsl_integration.h>

#include <memory>

#include "photonpol/error.hpp"
#include "photonpol/linalg.hpp"

namespace photonpol {

QuadratureRule gauss_legendre(int n, double lo, double hi) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs n >= 1");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(static_cast<size_t>(n)),
            &gsl_integration_glfixed_table_free);
  if (!table) throw Error(ErrorCode::InvalidArgument, "cannot allocate Gauss-Legendre table");

  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(lo, hi, static_cast<size_t>(i), &rule.nodes[i], &rule.weights[i],
                                  table.get());
  }
  return rule;
}

QuadratureRule periodic_trapezoid(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "trapezoid rule needs n >= 1");
  QuadratureRule rule;
  const double h = 2.0 * kPi / n;
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(h * i);
    rule.weights.push_back(h);
  }
  return rule;
}

}  // namespace photonpol
