#include "swos/mc_solver.hpp"

#include <algorithm>
#include <cmath>

#include "swos/parallel.hpp"

namespace swos {

void BoundaryData::check_envelope(const Domain& dom, RngStream rng,
                                  int n_points) const {
  int d = dom.dim();
  double diam = dom.diameter();
  Vec ref = dom.reference_point();
  for (int k = 0; k < n_points; ++k) {
    // exterior shell point: direction from the reference, radius beyond D
    Vec w = sample_direction(d, rng);
    double rad = diam * (1.0 + 3.0 * rng.next_unit());
    Vec y(d);
    for (int i = 0; i < d; ++i) y[i] = ref[i] + rad * w[i];
    if (dom.contains(y)) continue;
    double bound =
        growth_B * std::pow(double(d), growth_p) * std::pow(1.0 + norm2(y), growth_p);
    if (std::fabs(g(y)) > bound)
      throw std::domain_error(
          "BoundaryData: declared growth envelope violated at a sampled point");
  }
}

void SourceData::check_bound(const Domain& dom, RngStream rng,
                             int n_points) const {
  for (int k = 0; k < n_points; ++k) {
    Vec x = dom.sample_interior(rng);
    if (std::fabs(f(x)) > sup_bound + 1e-12)
      throw std::domain_error(
          "SourceData: declared sup bound violated at a sampled point");
  }
}

Estimate reduce_samples(const std::vector<double>& samples, EstimatorKind kind,
                        int mom_blocks) {
  Estimate est;
  est.n_samples = long(samples.size());
  est.kind = kind;
  long M = est.n_samples;
  if (M == 0) return est;
  double mean = pairwise_sum(samples) / double(M);
  if (kind == EstimatorKind::mean) {
    est.value = mean;
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double d = samples[i] - mean;
      sq[i] = d * d;
    }
    double var = M > 1 ? pairwise_sum(sq) / double(M - 1) : 0.0;
    est.std_error = std::sqrt(var / double(M));
    return est;
  }
  // median of means
  int K = std::min<long>(std::max(1, mom_blocks), M);
  est.blocks = K;
  std::vector<double> block_means(K, 0.0);
  for (int b = 0; b < K; ++b) {
    std::size_t lo = std::size_t(double(b) * M / K);
    std::size_t hi = std::size_t(double(b + 1) * M / K);
    block_means[b] = pairwise_sum(samples, lo, hi) / double(hi - lo);
  }
  std::vector<double> sorted = block_means;
  std::sort(sorted.begin(), sorted.end());
  double med = (K % 2 == 1) ? sorted[K / 2]
                            : 0.5 * (sorted[K / 2 - 1] + sorted[K / 2]);
  est.value = med;
  double bm = pairwise_sum(block_means) / K;
  double v = 0.0;
  for (double m : block_means) v += (m - bm) * (m - bm);
  v = K > 1 ? v / (K - 1) : 0.0;
  // scaled spread of the block means; 1.2533 = asymptotic median efficiency
  est.std_error = 1.2533 * std::sqrt(v / K);
  return est;
}

namespace {

// one path sampled on the substreams of index i; evaluates the g term and
// optionally the f term on the same walk
struct PathFunctional {
  double g_term = 0.0;
  double f_term = 0.0;
};

PathFunctional eval_path(const Domain& dom, const Vec& x,
                         const StableParams& params, const OccupationLaw* law,
                         const std::function<double(const Vec&)>* g,
                         const std::function<double(const Vec&)>* f, long M2,
                         RngStream base, long i, long max_steps) {
  RngStream jump_rng = substream(base, std::uint64_t(i), 0);
  WosPath path = run_wos(dom, x, params, jump_rng, max_steps);
  PathFunctional out;
  if (g) {
    try {
      out.g_term = (*g)(path.exit_point);
    } catch (const std::exception& e) {
      std::string pt = "(";
      for (std::size_t c = 0; c < path.exit_point.size(); ++c) {
        if (c) pt += ", ";
        pt += std::to_string(path.exit_point[c]);
      }
      pt += ")";
      throw std::runtime_error("g evaluation failed at exit point " + pt +
                               ": " + e.what());
    }
  }
  if (f) {
    double acc = 0.0;
    int d = dom.dim();
    for (int n = 1; n <= path.n_steps(); ++n) {
      const WosStep& st = path.steps[std::size_t(n - 1)];
      RngStream mu_rng = substream(base, std::uint64_t(i), std::uint32_t(n));
      double inner = 0.0;
      Vec y(d);
      for (long j = 0; j < M2; ++j) {
        Vec v = law->sample(mu_rng);
        for (int c = 0; c < d; ++c) y[c] = st.center[c] + st.radius * v[c];
        inner += (*f)(y);
      }
      inner /= double(M2);
      acc += std::pow(st.radius, params.alpha) * inner;
    }
    out.f_term = law->kappa() * acc;
  }
  return out;
}

} // namespace

Estimate estimate_homogeneous(const Domain& dom, const Vec& x,
                              const BoundaryData& g, const StableParams& params,
                              long M, RngStream base, const McOptions& opts) {
  if (M < 1) throw std::invalid_argument("estimate_homogeneous: M < 1");
  if (!dom.contains(x))
    throw std::invalid_argument("estimate_homogeneous: x not inside D");
  std::vector<double> slots(std::size_t(M), 0.0);
  parallel_for(M, opts.n_threads, [&](long i) {
    slots[std::size_t(i)] = eval_path(dom, x, params, nullptr, &g.g, nullptr, 0,
                                      base, i, opts.max_steps)
                                .g_term;
  });
  Estimate est = reduce_samples(slots, opts.kind, opts.mom_blocks);
  if (2.0 * g.growth_p >= params.alpha && est.kind == EstimatorKind::mean)
    est.tail_warning = true; // second moment may not exist
  return est;
}

Estimate estimate_source(const Domain& dom, const Vec& x, const SourceData& f,
                         const StableParams& params, const OccupationLaw& law,
                         long M1, long M2, RngStream base,
                         const McOptions& opts) {
  if (M1 < 1 || M2 < 1)
    throw std::invalid_argument("estimate_source: M1, M2 must be >= 1");
  if (!dom.contains(x))
    throw std::invalid_argument("estimate_source: x not inside D");
  std::vector<double> slots(std::size_t(M1), 0.0);
  parallel_for(M1, opts.n_threads, [&](long i) {
    slots[std::size_t(i)] = eval_path(dom, x, params, &law, nullptr, &f.f, M2,
                                      base, i, opts.max_steps)
                                .f_term;
  });
  return reduce_samples(slots, opts.kind, opts.mom_blocks);
}

Estimate solve(const Domain& dom, const Vec& x, const BoundaryData& g,
               const SourceData& f, const StableParams& params,
               const OccupationLaw& law, long M, long M2, RngStream base,
               const McOptions& opts) {
  if (M < 1 || M2 < 1) throw std::invalid_argument("solve: M, M2 must be >= 1");
  if (!dom.contains(x)) throw std::invalid_argument("solve: x not inside D");
  std::vector<double> gs(std::size_t(M), 0.0), fs(std::size_t(M), 0.0);
  parallel_for(M, opts.n_threads, [&](long i) {
    PathFunctional pf =
        eval_path(dom, x, params, &law, &g.g, &f.f, M2, base, i, opts.max_steps);
    gs[std::size_t(i)] = pf.g_term;
    fs[std::size_t(i)] = pf.f_term;
  });
  Estimate eg = reduce_samples(gs, opts.kind, opts.mom_blocks);
  Estimate ef = reduce_samples(fs, opts.kind, opts.mom_blocks);
  Estimate out;
  out.value = eg.value + ef.value;
  out.std_error = std::hypot(eg.std_error, ef.std_error);
  out.n_samples = M;
  out.kind = opts.kind;
  out.blocks = eg.blocks;
  out.shared_paths = true;
  if (2.0 * g.growth_p >= params.alpha && opts.kind == EstimatorKind::mean)
    out.tail_warning = true;
  return out;
}

LqResult lq_error(const std::function<double(const Vec&)>& candidate,
                  const std::function<double(const Vec&)>& reference,
                  const Domain& dom, double q, long n_eval, RngStream base,
                  int n_threads) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_error: q must be >= 1");
  if (n_eval < 10) throw std::invalid_argument("lq_error: n_eval must be >= 10");
  std::vector<double> pw(std::size_t(n_eval), 0.0);
  parallel_for(n_eval, n_threads, [&](long j) {
    RngStream rng = substream(base, std::uint64_t(j), 0x10u);
    Vec x = dom.sample_interior(rng);
    pw[std::size_t(j)] = std::pow(std::fabs(candidate(x) - reference(x)), q);
  });
  double mean = pairwise_sum(pw) / double(n_eval);
  double var = 0.0;
  for (double v : pw) var += (v - mean) * (v - mean);
  var = n_eval > 1 ? var / double(n_eval - 1) : 0.0;
  double integral = dom.volume() * mean; // int |gap|^q
  double se_integral = dom.volume() * std::sqrt(var / double(n_eval));
  LqResult out;
  out.n_eval = n_eval;
  out.value = std::pow(integral, 1.0 / q);
  // d(I^{1/q}) = I^{1/q-1}/q dI
  out.std_error = integral > 0.0
                      ? std::pow(integral, 1.0 / q - 1.0) / q * se_integral
                      : std::pow(se_integral, 1.0 / q);
  return out;
}

double mc_error_bound(double q, double s, double theta_qs, long M,
                      double moment_q) {
  if (!(s > 1.0 && s <= 2.0))
    throw std::domain_error(
        "mc_error_bound: s must lie in (1,2]; the bound is vacuous at s <= 1");
  if (!(q >= s)) throw std::domain_error("mc_error_bound: q must be >= s");
  if (M < 1) throw std::domain_error("mc_error_bound: M must be >= 1");
  return theta_qs * std::pow(moment_q, 1.0 / q) /
         std::pow(double(M), 1.0 - 1.0 / s);
}

} // namespace swos
