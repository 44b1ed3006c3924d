#pragma once

#include "swos/geometry.hpp"

namespace swos {

struct WosStep {
  Vec center;    // rho_{n-1}
  double radius; // r_n = dist(rho_{n-1})
  Vec jump;      // Y_n, |Y_n| > 1
};

// One realization of the embedded chain rho_n = rho_{n-1} + r_n Y_n.
struct WosPath {
  Vec start;
  std::vector<WosStep> steps;
  Vec exit_point;
  int n_steps() const { return int(steps.size()); }
};

class NonTerminationError : public std::runtime_error {
public:
  NonTerminationError(std::string what, WosPath partial)
      : std::runtime_error(std::move(what)), partial_(std::move(partial)) {}
  const WosPath& partial() const { return partial_; }

private:
  WosPath partial_;
};

// Runs the chain from x until the first center outside D. Termination is
// almost sure, so exhausting max_steps is treated as a configuration error.
WosPath run_wos(const Domain& dom, Vec x, const StableParams& params,
                RngStream& rng, long max_steps = 100000);

// Empirical lower-bound proxy for the geometric domination parameter: fits
// log P(N > n) ~ n * log(1 - p) by least squares over the levels with at
// least 30 tail observations, starts drawn uniformly in D. Clamped to (0,1].
double estimate_p_tilde(const Domain& dom, const StableParams& params,
                        long n_paths, RngStream base, long max_steps = 100000);

// Least-squares affine fit diagnostics for the log tail, exposed for tests
// and the validate subcommand.
struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_levels = 0;
};

TailFit fit_log_tail(const std::vector<int>& step_counts, int min_obs = 30);

} // namespace swos
