#include "swos/wos.hpp"

#include <cmath>

namespace swos {

WosPath run_wos(const Domain& dom, Vec x, const StableParams& params,
                RngStream& rng, long max_steps) {
  if (int(x.size()) != dom.dim())
    throw std::invalid_argument("run_wos: start dimension mismatch");
  if (params.d != dom.dim())
    throw std::invalid_argument("run_wos: params dimension mismatch");
  if (!dom.contains(x))
    throw std::invalid_argument("run_wos: start point not inside the domain");
  if (max_steps < 1) throw std::invalid_argument("run_wos: max_steps < 1");

  WosPath path;
  path.start = x;
  Vec z = std::move(x);
  for (long n = 0; n < max_steps; ++n) {
    double r = dom.dist_to_boundary(z);
    if (r <= 1e-300) {
      // boundary to floating-point resolution: treat as exited
      path.exit_point = z;
      return path;
    }
    Vec y = sample_exit_unit_ball(params, rng);
    WosStep step;
    step.center = z;
    step.radius = r;
    step.jump = y;
    for (int i = 0; i < dom.dim(); ++i) z[i] += r * y[i];
    path.steps.push_back(std::move(step));
    if (!dom.contains(z)) {
      path.exit_point = z;
      return path;
    }
  }
  path.exit_point = z;
  throw NonTerminationError("run_wos: max_steps exhausted before exit", path);
}

TailFit fit_log_tail(const std::vector<int>& step_counts, int min_obs) {
  TailFit fit;
  long n_paths = long(step_counts.size());
  if (n_paths == 0) return fit;
  int n_max = 0;
  for (int c : step_counts) n_max = std::max(n_max, c);
  // tail counts T(n) = #{N > n}
  std::vector<long> tail(n_max + 1, 0);
  for (int c : step_counts)
    for (int n = 0; n < c && n <= n_max; ++n) ++tail[n];
  std::vector<double> xs, ys;
  for (int n = 1; n <= n_max; ++n) {
    if (tail[n] < min_obs) break;
    xs.push_back(double(n));
    ys.push_back(std::log(double(tail[n]) / double(n_paths)));
  }
  fit.n_levels = int(xs.size());
  if (xs.size() < 2) return fit;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(xs.size());
  my /= double(xs.size());
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

double estimate_p_tilde(const Domain& dom, const StableParams& params,
                        long n_paths, RngStream base, long max_steps) {
  if (n_paths < 100)
    throw std::invalid_argument("estimate_p_tilde: need at least 100 paths");
  std::vector<int> counts;
  counts.reserve(n_paths);
  for (long i = 0; i < n_paths; ++i) {
    RngStream start_rng = substream(base, std::uint64_t(i), 0xFFFFFFFFu);
    Vec x = dom.sample_interior(start_rng);
    RngStream rng = substream(base, std::uint64_t(i), 0);
    counts.push_back(run_wos(dom, std::move(x), params, rng, max_steps).n_steps());
  }
  bool all_one = true;
  for (int c : counts)
    if (c > 1) all_one = false;
  if (all_one) return 1.0;
  TailFit fit = fit_log_tail(counts);
  if (fit.n_levels < 2) {
    // tail too short for a fit; fall back to the one-step exit frequency
    long ones = 0;
    for (int c : counts)
      if (c == 1) ++ones;
    return std::min(1.0, std::max(1e-12, double(ones) / double(n_paths)));
  }
  double p = 1.0 - std::exp(fit.slope);
  return std::min(1.0, std::max(1e-12, p));
}

} // namespace swos
