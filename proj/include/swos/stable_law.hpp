#pragma once

#include <vector>

#include "swos/rng.hpp"
#include "swos/special.hpp"

namespace swos {

using Vec = std::vector<double>;

// Index and dimension of the isotropic stable process. Samplers accept the
// full range alpha in (0,2); the solver and compiler additionally restrict to
// alpha in (1,2), d >= 2 at their own boundaries.
struct StableParams {
  double alpha;
  int d;

  StableParams(double alpha_, int d_) : alpha(alpha_), d(d_) {
    if (!(alpha > 0.0 && alpha < 2.0))
      throw std::domain_error("StableParams: alpha must lie in (0,2)");
    if (d_ < 1) throw std::domain_error("StableParams: d must be >= 1");
  }
};

// K(alpha, beta) = E_0 |X_{sigma_B(0,1)}|^beta
//               = sin(pi alpha/2)/pi * G(1-a/2) G((a-b)/2) / G(1-b/2),
// finite exactly for beta < alpha. Dimension-free.
double moment_K(double alpha, double beta);

// Mean exit time of the unit ball started at the center,
//   kappa = G(d/2) / (2^alpha G(1+alpha/2) G((d+alpha)/2)).
double kappa_closed_form(const StableParams& p);

// Same constant through the radial reduction of the occupation measure:
//   kappa = 2^{1-a} B((d-a)/2, a/2) / G(a/2)^2
//           * int_0^1 r^{a-1} (1 - I(r^2; (d-a)/2, a/2)) dr.
// Requires d > alpha. Throws NumericError if the quadrature cannot converge.
double kappa_quadrature(const StableParams& p, double abs_tol = 1e-10);

// Unit-sphere direction times the exit radius r = T^{-1/2},
// T ~ Beta(alpha/2, 1 - alpha/2). Always |y| > 1.
Vec sample_exit_unit_ball(const StableParams& p, RngStream& rng);

// Normalized occupation measure mu on B(0,1): radial inverse-CDF table plus
// both kappa evaluations (closed form is what downstream consumers use).
class OccupationLaw {
public:
  OccupationLaw(const StableParams& p, int table_size = 4096);

  const StableParams& params() const { return params_; }
  double kappa() const { return kappa_; }            // closed form
  double kappa_quad() const { return kappa_quad_; }  // radial quadrature
  double kappa_gap() const { return kappa_gap_; }    // relative discrepancy

  // radial CDF F(r) on [0,1] (monotone cubic through the table)
  double radial_cdf(double r) const;
  // quantile F^{-1}(u), u in (0,1)
  double radial_quantile(double u) const;
  // normalized radial density
  double radial_pdf(double r) const;

  Vec sample(RngStream& rng) const; // point in the open unit ball

  const std::vector<double>& table_r() const { return r_; }
  const std::vector<double>& table_F() const { return F_; }

  // max quantile displacement against a 2x refined table, measured on a
  // dense probe grid at construction
  double refinement_error() const { return refinement_error_; }

private:
  double unnorm_density(double r) const;
  double quantile_impl(double u) const;
  void cell_coeffs(std::size_t j, double& y0, double& y1, double& m0,
                   double& m1) const;

  StableParams params_;
  double kappa_ = 0.0;
  double kappa_quad_ = 0.0;
  double kappa_gap_ = 0.0;
  double normalizer_ = 0.0; // int_0^1 unnorm_density
  std::vector<double> r_, F_, G_, pdf_; // nodes, CDF, tail 1-F, density
  double refinement_error_ = 0.0;

  OccupationLaw(const StableParams& p, int table_size, bool probe);
  friend OccupationLaw build_occupation_law(const StableParams&, int);
};

OccupationLaw build_occupation_law(const StableParams& p, int table_size = 4096);

// uniform direction on S^{d-1}
Vec sample_direction(int d, RngStream& rng);

} // namespace swos
