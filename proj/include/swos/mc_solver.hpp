#pragma once

#include "swos/wos.hpp"

namespace swos {

// Exterior data g with its declared Lipschitz constant and growth envelope
// |g(y)| <= B d^p (1+|y|)^p.
struct BoundaryData {
  std::function<double(const Vec&)> g;
  double lipschitz = 1.0;
  double growth_B = 1.0;
  double growth_p = 1.0;

  // spot-samples the envelope at random exterior points (shell around D)
  void check_envelope(const Domain& dom, RngStream rng,
                      int n_points = 1000) const;
};

// Source f on D with declared Lipschitz constant and sup bound.
struct SourceData {
  std::function<double(const Vec&)> f;
  double lipschitz = 1.0;
  double sup_bound = 1.0;

  void check_bound(const Domain& dom, RngStream rng, int n_points = 1000) const;
};

enum class EstimatorKind { mean, median_of_means };

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  EstimatorKind kind = EstimatorKind::mean;
  int blocks = 0;          // median-of-means block count when used
  bool tail_warning = false; // mean-kind std_error may be unreliable
  bool shared_paths = false; // g-term and f-term used the same paths
};

struct McOptions {
  EstimatorKind kind = EstimatorKind::mean;
  int mom_blocks = 24; // ceil(8 ln(1/0.05))
  long max_steps = 100000;
  int n_threads = 1;
};

// u_g(x) = E_x[g(rho_N)] by M independent paths.
Estimate estimate_homogeneous(const Domain& dom, const Vec& x,
                              const BoundaryData& g, const StableParams& params,
                              long M, RngStream base, const McOptions& opts = {});

// u_f(x) = E_x[sum_n r_n^alpha kappa E_mu f(rho_{n-1} + r_n .)], outer M1
// paths, inner M2 occupation draws per step.
Estimate estimate_source(const Domain& dom, const Vec& x, const SourceData& f,
                         const StableParams& params, const OccupationLaw& law,
                         long M1, long M2, RngStream base,
                         const McOptions& opts = {});

// Both terms on shared paths; errors add in quadrature.
Estimate solve(const Domain& dom, const Vec& x, const BoundaryData& g,
               const SourceData& f, const StableParams& params,
               const OccupationLaw& law, long M, long M2, RngStream base,
               const McOptions& opts = {});

struct LqResult {
  double value = 0.0;
  double std_error = 0.0; // first-order propagated MC integration error
  long n_eval = 0;
};

// (|D|/n * sum |cand - ref|^q)^{1/q} over uniform interior points.
LqResult lq_error(const std::function<double(const Vec&)>& candidate,
                  const std::function<double(const Vec&)>& reference,
                  const Domain& dom, double q, long n_eval, RngStream base,
                  int n_threads = 1);

// A priori L^q Monte Carlo bound Theta_{q,s} moment_q^{1/q} / M^{1-1/s}.
double mc_error_bound(double q, double s, double theta_qs, long M,
                      double moment_q);

// mean / std-error / median-of-means over a slot vector (exposed for reuse)
Estimate reduce_samples(const std::vector<double>& samples, EstimatorKind kind,
                        int mom_blocks);

} // namespace swos
