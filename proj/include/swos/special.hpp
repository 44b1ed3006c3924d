#pragma once

#include <functional>
#include <stdexcept>

#include "swos/rng.hpp"

namespace swos {

// Raised when a quadrature fails to reach its tolerance; carries the residual.
class NumericError : public std::runtime_error {
public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_ = 0.0;
};

// log Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
// Relative error below 1e-13 over the positive axis.
double log_gamma(double x);

// Gamma(x) = exp(log_gamma(x)) with reflection for negative non-integer x.
double gamma_fn(double x);

// Regularized incomplete beta I(x; a, b), continued-fraction evaluation.
// a, b > 0, x in [0,1]; absolute error below 1e-12.
double reg_inc_beta(double x, double a, double b);

double log_beta(double a, double b);

// Gamma(shape, 1) variate, Marsaglia-Tsang. shape >= 1.
double gamma_sample(double shape, RngStream& rng);

// log of a Gamma(shape, 1) variate, valid for any shape > 0. Shapes below 1
// use the boost G(a) = G(a+1) * U^{1/a} in log space, so tiny shapes cannot
// underflow to zero.
double log_gamma_sample(double shape, RngStream& rng);

// Beta(a, b) variate as a ratio of two Gamma variates combined in log space;
// valid over the whole shape range including a, b < 1. Returns t in (0,1),
// endpoints redrawn.
double beta_sample(double a, double b, RngStream& rng);

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0; // error estimate
  long evals = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod (G7, K15) on [a, b] to absolute tolerance.
QuadResult integrate_gk(const std::function<double(double)>& f, double a,
                        double b, double abs_tol = 1e-10, int max_depth = 52);

// Same, but pre-splits geometrically toward both endpoints before adapting;
// for integrable endpoint singularities.
QuadResult integrate_gk_endpoints(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol = 1e-10);

} // namespace swos
