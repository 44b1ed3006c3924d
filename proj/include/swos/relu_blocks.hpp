#pragma once

#include "swos/geometry.hpp"
#include "swos/relu_net.hpp"

namespace swos {

// Piecewise-linear interpolant through strictly increasing knots, realized
// exactly by one hidden layer; linear extension outside the knot range.
ReluNet pwl_net(const std::vector<double>& xs, const std::vector<double>& ys);

// Product block: 2-input net with sup_{|a|,|b|<=kappa} |ab - R(a,b)| <= delta,
// built from three squaring chains (sawtooth refinements of the chord
// interpolant of t^2). Carries a verified certificate.
ReluNet product_net(double kappa, double delta);

// evaluates the underlying squaring-chain deficit E(z) = SQ(z) - z^2 without
// building matrices; exposed so tests can certify the 2-d sup error cheaply
double product_net_square_deficit(double kappa, double delta, double z);
int product_net_levels(double kappa, double delta);

// x^alpha on [0, upper] for alpha in (1,2): graded-knot PWL interpolant,
// sup error <= delta verified on a 10x finer grid. Realized function is
// Lipschitz; the measured constant is recorded on the certificate.
ReluNet power_net(double alpha, double upper, double delta);

// sqrt(t) on [0, upper], graded-knot PWL, sup error <= delta (verified).
ReluNet sqrt_net(double upper, double delta);

// Signed distance network. Hyperrectangles are exact (pairwise min tree,
// delta ignored); balls use d parallel squaring chains, a sqrt block and an
// affine head with total certified error <= delta on the closed ball.
ReluNet dist_net(const Domain& dom, double delta);

// 1-d approximation of an arbitrary sampled function on [lo, hi]: knot count
// doubles until the verification grid (10x finer) meets delta.
ReluNet approx_from_samples(const std::function<double(double)>& fn, double lo,
                            double hi, double delta, int max_knots = 1 << 20);

// Re-verifies a carried certificate against its reference function in one
// call; returns the re-measured sup error. Supported kinds: product, power,
// sqrt, dist_exact, dist_ball. (Sampled PWL nets need their source function
// and cannot be rechecked standalone.)
double recheck_certificate(const ReluNet& net);

} // namespace swos
