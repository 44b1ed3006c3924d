// Acceptance suite: one criterion per function, one pass/fail line each.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "swos/compiler.hpp"
#include "swos/parallel.hpp"
#include "swos/relu_blocks.hpp"

using namespace swos;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::function<bool(std::string&)> run;
};

double slope_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (sxy - sx * sy / double(n)) / (sxx - sx * sx / double(n));
}

// ---------------------------------------------------------------------- 1
bool crit_moment_oracle(std::string& detail) {
  bool pass = true;
  std::ostringstream msg;
  for (double alpha : {1.2, 1.5, 1.8}) {
    if (std::fabs(moment_K(alpha, 0.0) - 1.0) > 1e-12) {
      pass = false;
      msg << "K(alpha,0) != 1 at alpha=" << alpha << "; ";
    }
    for (int d : {2, 3}) {
      StableParams p(alpha, d);
      const long n = 1000000;
      RngStream rng(2024, std::uint64_t(d));
      std::vector<double> betas{0.0, 0.5, alpha / 2.0};
      std::vector<double> s(betas.size(), 0.0), s2(betas.size(), 0.0);
      for (long i = 0; i < n; ++i) {
        double r = norm2(sample_exit_unit_ball(p, rng));
        for (std::size_t b = 0; b < betas.size(); ++b) {
          double v = std::pow(r, betas[b]);
          s[b] += v;
          s2[b] += v * v;
        }
      }
      for (std::size_t b = 0; b < betas.size(); ++b) {
        double mean = s[b] / n;
        double sd = std::sqrt(std::max(0.0, s2[b] / n - mean * mean));
        double truth = moment_K(alpha, betas[b]);
        double tol = 4.0 * sd / std::sqrt(double(n)) + 1e-12;
        if (std::fabs(mean - truth) > tol) {
          pass = false;
          msg << "alpha=" << alpha << " d=" << d << " beta=" << betas[b]
              << " gap=" << std::fabs(mean - truth) << " tol=" << tol << "; ";
        }
      }
    }
  }
  detail = msg.str();
  return pass;
}

// ---------------------------------------------------------------------- 2
bool crit_kappa(std::string& detail) {
  bool pass = true;
  double worst = 0.0;
  for (int d : {2, 3, 5})
    for (double alpha : {1.2, 1.5, 1.8}) {
      StableParams p(alpha, d);
      double closed = kappa_closed_form(p);
      double quad = kappa_quadrature(p);
      double rel = std::fabs(quad - closed) / closed;
      worst = std::max(worst, rel);
      if (rel > 1e-6) pass = false;
    }
  detail = "worst relative gap " + std::to_string(worst);
  return pass;
}

// ---------------------------------------------------------------------- 3
bool crit_exit_time(std::string& detail) {
  StableParams p(1.5, 2);
  Domain dom = Domain::ball({0.0, 0.0}, 1.0);
  OccupationLaw law = build_occupation_law(p, 1024);
  BoundaryData g;
  g.g = [](const Vec&) { return 0.0; };
  g.growth_B = 1.0;
  g.growth_p = 1.0;
  SourceData f;
  f.f = [](const Vec&) { return 1.0; };
  f.sup_bound = 1.0;
  McOptions opts;
  opts.n_threads = 4;
  bool pass = true;
  std::ostringstream msg;
  for (Vec x : {Vec{0.0, 0.0}, Vec{0.5, 0.0}, Vec{0.9, 0.0}}) {
    Estimate est =
        solve(dom, x, g, f, p, law, 100000, 2, RngStream(7, 0), opts);
    double truth =
        std::pow(1.0 - x[0] * x[0] - x[1] * x[1], p.alpha / 2.0) * law.kappa();
    double tol = 3.0 * est.std_error + 1e-12;
    msg << "x=(" << x[0] << "," << x[1] << "): " << est.value << " vs "
        << truth << " +- " << est.std_error << "; ";
    if (std::fabs(est.value - truth) > tol) pass = false;
  }
  detail = msg.str();
  return pass;
}

// ---------------------------------------------------------------------- 4
bool crit_harmonicity(std::string& detail) {
  StableParams p(1.5, 2);
  Domain dom = Domain::ball({0.0, 0.0}, 1.0);
  BoundaryData one;
  one.g = [](const Vec&) { return 1.0; };
  one.growth_B = 1.0;
  one.growth_p = 1.0;
  Estimate est =
      estimate_homogeneous(dom, {0.3, -0.4}, one, p, 5000, RngStream(9, 0));
  bool pass = est.value == 1.0 && est.std_error == 0.0;
  // center-start radial oracle: quadrature of the exit density
  double norm = 0.5 * std::exp(log_beta(p.alpha / 2.0, 1.0 - p.alpha / 2.0));
  auto expect = [&](const std::function<double(double)>& gr) {
    double acc = 0.0;
    for (int k = 0; k < 70; ++k)
      acc += integrate_gk(
                 [&](double v) {
                   double u = std::exp(v);
                   double r = 1.0 + u;
                   double dens =
                       std::pow(2.0 * u + u * u, -p.alpha / 2.0) / r / norm;
                   return gr(r) * dens * u;
                 },
                 -10.0 * (k + 1), -10.0 * k, 1e-12)
                 .value;
    acc += integrate_gk(
               [&](double v) {
                 double u = std::exp(v);
                 double r = 1.0 + u;
                 double dens =
                     std::pow(2.0 * u + u * u, -p.alpha / 2.0) / r / norm;
                 return gr(r) * dens * u;
               },
               0.0, std::log(1e8), 5e-11)
               .value;
    return acc;
  };
  double truth = expect([](double r) { return 1.0 / (1.0 + r); });
  BoundaryData g;
  g.g = [](const Vec& y) { return 1.0 / (1.0 + norm2(y)); };
  g.growth_B = 1.0;
  g.growth_p = 1.0;
  Estimate est2 =
      estimate_homogeneous(dom, {0.0, 0.0}, g, p, 100000, RngStream(10, 0));
  bool pass2 = std::fabs(est2.value - truth) <= 3.0 * est2.std_error;
  detail = "constant:" + std::to_string(est.value) +
           " radial gap:" + std::to_string(std::fabs(est2.value - truth)) +
           " se:" + std::to_string(est2.std_error);
  return pass && pass2;
}

// ---------------------------------------------------------------------- 5
bool crit_tail(std::string& detail) {
  StableParams p(1.5, 2);
  Domain dom = Domain::ball({0.0, 0.0}, 1.0);
  std::vector<int> counts(100000);
  RngStream base(13, 0);
  parallel_for(100000, 4, [&](long i) {
    RngStream srng = substream(base, std::uint64_t(i), 0xFFFFFFFFu);
    Vec x = dom.sample_interior(srng);
    RngStream rng = substream(base, std::uint64_t(i), 0);
    counts[std::size_t(i)] = run_wos(dom, x, p, rng).n_steps();
  });
  TailFit fit = fit_log_tail(counts);
  detail = "slope " + std::to_string(fit.slope) + ", R^2 " +
           std::to_string(fit.r_squared) + ", levels " +
           std::to_string(fit.n_levels);
  return fit.slope < 0.0 && fit.r_squared >= 0.98;
}

// ---------------------------------------------------------------------- 6
bool crit_algebra(std::string& detail) {
  RngStream rng(17, 0);
  auto rand_net = [&](const std::vector<long>& dims) {
    ReluNet net;
    for (std::size_t l = 1; l < dims.size(); ++l) {
      Layer L;
      L.W = Matrix(int(dims[l]), int(dims[l - 1]));
      L.B.assign(std::size_t(dims[l]), 0.0);
      for (double& w : L.W.a) w = rng.next_normal();
      for (double& b : L.B) b = 0.3 * rng.next_normal();
      net.layers.push_back(std::move(L));
    }
    return net;
  };
  auto rand_dims = [&](long din, long dout, int H) {
    std::vector<long> dims(std::size_t(H) + 2);
    dims.front() = din;
    dims.back() = dout;
    for (int i = 1; i <= H; ++i) dims[std::size_t(i)] = 1 + long(rng.next_u64() % 8);
    return dims;
  };
  auto rand_x = [&](long d) {
    Vec x(std::size_t(d), 0.0);
    for (double& c : x) c = 2.0 * rng.next_normal();
    return x;
  };
  auto close = [](double a, double b) {
    return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
  };
  long fails = 0;
  for (int t = 0; t < 1000; ++t) {
    int H = 1 + int(rng.next_u64() % 4);
    long d1 = 1 + long(rng.next_u64() % 4), d2 = 1 + long(rng.next_u64() % 4),
         d3 = 1 + long(rng.next_u64() % 4);
    // compose
    ReluNet g = rand_net(rand_dims(d1, d2, H));
    ReluNet f = rand_net(rand_dims(d2, d3, 1 + int(rng.next_u64() % 4)));
    ReluNet fg = compose(f, g);
    if (!(fg.dims() == dims_compose(f.dims(), g.dims()))) ++fails;
    Vec x = rand_x(d1);
    Vec direct = f.realize(g.realize(x));
    Vec through = fg.realize(x);
    for (std::size_t i = 0; i < direct.size(); ++i)
      if (!close(direct[i], through[i])) ++fails;
    // sum
    ReluNet s1 = rand_net(rand_dims(d1, d3, H));
    ReluNet s2 = rand_net(rand_dims(d1, d3, H));
    double h1 = rng.next_normal(), h2 = rng.next_normal();
    ReluNet sum = sum_nets({s1, s2}, {h1, h2});
    if (!(sum.dims() == dims_sum(s1.dims(), s2.dims()))) ++fails;
    for (long j = 0; j < d3; ++j) {
      double a = h1 * s1.realize(x)[std::size_t(j)] + h2 * s2.realize(x)[std::size_t(j)];
      if (!close(a, sum.realize(x)[std::size_t(j)])) ++fails;
    }
    // parallel
    ReluNet par = parallelize(s1, s2);
    if (!(par.dims() == dims_parallel(s1.dims(), s2.dims()))) ++fails;
    Vec pv = par.realize(x);
    for (long j = 0; j < d3; ++j) {
      if (!close(pv[std::size_t(j)], s1.realize(x)[std::size_t(j)])) ++fails;
      if (!close(pv[std::size_t(d3 + j)], s2.realize(x)[std::size_t(j)])) ++fails;
    }
    // matmul
    Matrix A(2, int(d3));
    for (double& w : A.a) w = rng.next_normal();
    ReluNet Af = left_matmul(A, s1);
    Vec want = A.apply(s1.realize(x));
    for (int j = 0; j < 2; ++j)
      if (!close(want[std::size_t(j)], Af.realize(x)[std::size_t(j)])) ++fails;
    // identity + pad
    ReluNet id = identity_net(int(d1), H);
    if (id.realize(x) != x) ++fails;
    ReluNet padded = depth_pad(s1, H + 1 + int(rng.next_u64() % 3));
    for (long j = 0; j < d3; ++j)
      if (!close(s1.realize(x)[std::size_t(j)], padded.realize(x)[std::size_t(j)])) ++fails;
  }
  detail = "failing checks: " + std::to_string(fails);
  return fails == 0;
}

// ---------------------------------------------------------------------- 7
bool crit_product(std::string& detail) {
  bool pass = true;
  std::ostringstream msg;
  for (double kappa : {1.0, 10.0}) {
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      ReluNet ups = product_net(kappa, delta);
      if (!(ups.cert.verified_sup_err <= delta &&
            ups.cert.grid_step == delta / 10.0)) {
        pass = false;
        msg << "certificate miss at kappa=" << kappa << " delta=" << delta
            << "; ";
      }
      // direct spot checks through the materialized block
      RngStream rng(19, std::uint64_t(delta * 1e6));
      for (int t = 0; t < 2000; ++t) {
        double a = kappa * (2.0 * rng.next_unit() - 1.0);
        double b = kappa * (2.0 * rng.next_unit() - 1.0);
        if (std::fabs(ups.realize({a, b})[0] - a * b) > delta) {
          pass = false;
          msg << "pointwise miss at kappa=" << kappa << "; ";
          break;
        }
      }
    }
  }
  // size law: affine in log2(kappa/delta), relative RMS below 5%
  for (double kappa : {1.0, 10.0}) {
    std::vector<double> Ls, Ps;
    for (double delta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
      ReluNet ups = product_net(kappa, delta);
      Ls.push_back(std::log2(std::max(kappa, 1.0) / delta));
      Ps.push_back(double(ups.param_count()));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < Ls.size(); ++i) {
      sx += Ls[i];
      sy += Ps[i];
      sxx += Ls[i] * Ls[i];
      sxy += Ls[i] * Ps[i];
    }
    double n = double(Ls.size());
    double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    double inter = sy / n - slope * sx / n;
    double ss = 0;
    for (std::size_t i = 0; i < Ls.size(); ++i) {
      double e = Ps[i] - (inter + slope * Ls[i]);
      ss += e * e;
    }
    double rel = std::sqrt(ss / n) / (sy / n);
    msg << "kappa=" << kappa << " fit residual " << rel << "; ";
    if (!(rel < 0.05)) pass = false;
  }
  detail = msg.str();
  return pass;
}

// ---------------------------------------------------------------------- 8
bool crit_power_dist(std::string& detail) {
  bool pass = true;
  std::ostringstream msg;
  { // power block at delta 1e-3 on [0,2]
    ReluNet pw = power_net(1.5, 2.0, 1e-3);
    double worst = 0.0;
    RngStream rng(23, 0);
    for (int t = 0; t < 50000; ++t) {
      double x = 2.0 * rng.next_unit();
      worst = std::max(worst, std::fabs(pw.realize1(x) - std::pow(x, 1.5)));
    }
    msg << "power sup err " << worst << "; ";
    if (!(worst <= 1e-3 && pw.cert.verified_sup_err <= 1e-3)) pass = false;
  }
  for (int d : {2, 5}) {
    Vec zero(std::size_t(d), 0.0);
    Domain ball = Domain::ball(zero, 1.0);
    ReluNet bn = dist_net(ball, 1e-3);
    double worst = 0.0;
    RngStream rng(29, std::uint64_t(d));
    for (int t = 0; t < 10000; ++t) {
      Vec x = ball.sample_interior(rng);
      worst = std::max(worst, std::fabs(bn.realize(x)[0] - ball.dist_to_boundary(x)));
    }
    msg << "ball d=" << d << " err " << worst << "; ";
    if (!(worst <= 1e-3)) pass = false;

    Vec hi(std::size_t(d), 1.0);
    Domain rect = Domain::hyperrectangle(zero, hi);
    ReluNet rn = dist_net(rect, 1e-3);
    double worst_r = 0.0;
    for (int t = 0; t < 10000; ++t) {
      Vec x = rect.sample_interior(rng);
      worst_r = std::max(worst_r, std::fabs(rn.realize(x)[0] - rect.dist_to_boundary(x)));
    }
    msg << "rect d=" << d << " err " << worst_r << "; ";
    if (!(worst_r <= 1e-12)) pass = false;
  }
  detail = msg.str();
  return pass;
}

// ---------------------------------------------------------------------- 9
bool crit_compiler_equiv(std::string& detail) {
  StableParams p(1.5, 2);
  Domain dom = Domain::hyperrectangle({0.0, 0.0}, {1.0, 1.0});
  OccupationLaw law = build_occupation_law(p, 512);
  ReluNet dnet = dist_net(dom, 0.0);
  // affine g and f with exact network forms
  auto affine_net = [&](double a0, double a1, double b) {
    ReluNet net;
    Layer h;
    h.W = Matrix(2, 2);
    h.B.assign(2, 0.0);
    h.W(0, 0) = a0;
    h.W(0, 1) = a1;
    h.W(1, 0) = -a0;
    h.W(1, 1) = -a1;
    Layer o;
    o.W = Matrix(1, 2);
    o.W(0, 0) = 1.0;
    o.W(0, 1) = -1.0;
    o.B.assign(1, b);
    net.layers = {h, o};
    return net;
  };
  ReluNet gnet = affine_net(0.4, -0.3, 0.7);
  ReluNet fnet = affine_net(0.2, 0.1, 0.8);
  ReluNet anet = power_net(p.alpha, dom.diameter(), 1e-3);
  ToleranceBudget budget;
  budget.M = 16;
  budget.M2 = 4;
  budget.delta_upsilon = 1e-2;
  CompiledFull full = compile_full(dom, gnet, fnet, dnet, anet, law, budget,
                                   RngStream(31, 0));

  // rebuild the frozen sets the compile used, for the replay oracle
  FrozenSampleSet frozen1 = freeze_samples(
      dom, true, p, law, budget.M, budget.M2, substream(RngStream(31, 0), 1, 1));
  FrozenSampleSet frozen2 = freeze_samples(
      dom, true, p, law, budget.M, budget.M2, substream(RngStream(31, 0), 2, 2));

  auto dist_fn = [&](const Vec& z) { return dnet.realize1(z); };
  auto g_fn = [&](const Vec& z) { return gnet.realize1(z); };
  auto alpha_fn = [&](double r) { return anet.realize1(r); };
  auto f_fn = [&](const Vec& z) { return fnet.realize1(z); };

  ReluNet psi1_dense = full.psi1->materialize();
  double worst1 = 0.0, worst2 = 0.0, worst3 = 0.0;
  RngStream rng(37, 0);
  double tol2 = budget.delta_upsilon * double(frozen2.total_steps()) *
                    law.kappa() / double(budget.M) +
                1e-6;
  for (int t = 0; t < 100; ++t) {
    Vec x = dom.sample_interior(rng);
    double r1 = replay_psi1(frozen1, dist_fn, g_fn, x);
    double n1 = psi1_dense.realize1(x);
    worst1 = std::max(worst1,
                      std::fabs(n1 - r1) / std::max(1.0, std::fabs(r1)));
    double r2 = replay_psi2(frozen2, dist_fn, alpha_fn, f_fn, law.kappa(), x);
    double n2 = full.psi2->eval(x)[0];
    worst2 = std::max(worst2, std::fabs(n2 - r2));
    double sum = full.net->eval(x)[0];
    worst3 = std::max(worst3,
                      std::fabs(sum - (full.psi1->eval(x)[0] + n2)));
  }
  std::ostringstream msg;
  msg << "psi1 rel " << worst1 << " (tol 1e-6); psi2 abs " << worst2
      << " (ledger tol " << tol2 << "); sum " << worst3 << " (tol 1e-9)";
  detail = msg.str();
  return worst1 <= 1e-6 && worst2 <= tol2 && worst3 <= 1e-9;
}

// --------------------------------------------------------------------- 10
bool crit_convergence(std::string& detail) {
  StableParams p(1.5, 2);
  Domain dom = Domain::ball({0.0, 0.0}, 1.0);
  OccupationLaw law = build_occupation_law(p, 2048);
  double kappa = law.kappa();
  // component networks at tight practical tolerances
  ReluNet dnet = dist_net(dom, 1e-4);
  ReluNet anet = power_net(p.alpha, dom.diameter(), 1e-4);
  ReluNet ups = product_net(2.0, 3e-4);
  ReluNet fnet = const_net(2, 1.0);
  auto dist_fn = [&](const Vec& z) { return dnet.realize1(z); };
  auto alpha_fn = [&](double r) { return anet.realize1(r); };
  auto f_fn = [&](const Vec& z) { return fnet.realize1(z); };
  auto ups_fn = [&](double a, double b) { return ups.realize({a, b})[0]; };

  auto reference = [&](const Vec& x) {
    return std::pow(1.0 - x[0] * x[0] - x[1] * x[1], p.alpha / 2.0) * kappa;
  };

  const long n_eval = 128;
  std::vector<Vec> points;
  RngStream prng(41, 0);
  for (long j = 0; j < n_eval; ++j) points.push_back(dom.sample_interior(prng));

  std::vector<long> Ms{100, 1000, 10000};
  std::vector<double> errs;
  const double q = 1.3;
  for (std::size_t mi = 0; mi < Ms.size(); ++mi) {
    long M = Ms[mi];
    std::vector<double> powq(std::size_t(n_eval), 0.0);
    parallel_for(n_eval, 4, [&](long j) {
      // per-point compile: freeze at x_j and evaluate the network there
      RngStream base(1000 + 31 * std::uint64_t(mi), std::uint64_t(j));
      FrozenSampleSet frozen =
          freeze_samples(dom, false, p, law, M, 8, base, 100000, points[std::size_t(j)]);
      double v = replay_psi2_with_product(frozen, dist_fn, alpha_fn, f_fn,
                                          ups_fn, kappa, points[std::size_t(j)]);
      powq[std::size_t(j)] =
          std::pow(std::fabs(v - reference(points[std::size_t(j)])), q);
    });
    double mean = pairwise_sum(powq) / double(n_eval);
    errs.push_back(std::pow(dom.volume() * mean, 1.0 / q));
  }
  bool monotone = errs[0] > errs[1] && errs[1] > errs[2];
  double slope = slope_loglog({100.0, 1000.0, 10000.0}, errs);
  std::ostringstream msg;
  msg << "Lq errors";
  for (double e : errs) msg << " " << e;
  msg << ", slope " << slope << " (need <= -0.33, monotone)";
  detail = msg.str();
  return monotone && slope <= -0.33;
}

// --------------------------------------------------------------------- 11
bool crit_audit(std::string& detail) {
  double alpha = 1.5;
  auto builder = [&](int d, double eps) -> long {
    StableParams p(alpha, d);
    Domain dom = Domain::ball(Vec(std::size_t(d), 0.0), 1.0);
    OccupationLaw law = build_occupation_law(p, 512);
    ToleranceBudget budget;
    budget.epsilon = eps;
    budget.M = 32;
    budget.M2 = 4;
    budget.delta_g = std::min(0.2, eps / 10.0);
    budget.delta_f = std::min(0.2, eps / 10.0);
    budget.delta_dist = std::min(0.1, eps / 50.0);
    budget.delta_alpha = std::min(0.1, eps / 50.0);
    budget.delta_upsilon = std::min(0.4, eps / 10.0);
    ReluNet gnet = const_net(d, 1.0);
    ReluNet fnet = const_net(d, 1.0);
    ReluNet dnet = dist_net(dom, budget.delta_dist);
    ReluNet anet = power_net(p.alpha, dom.diameter(), budget.delta_alpha);
    CompiledFull full = compile_full(dom, gnet, fnet, dnet, anet, law, budget,
                                     RngStream(43, 0));
    return full.report.param_count;
  };
  double eta = 40.0;
  AuditReport rep = audit_cod(builder, {2, 3, 5, 10}, {0.5, 0.25, 0.1}, eta);
  std::ostringstream msg;
  msg << "d exponent " << rep.d_exponent << " (residual " << rep.d_fit_residual
      << "), 1/eps exponent " << rep.eps_exponent << " (residual "
      << rep.eps_fit_residual << "), eta " << eta;
  detail = msg.str();
  return rep.pass && std::isfinite(rep.d_exponent) &&
         std::isfinite(rep.eps_exponent);
}

// --------------------------------------------------------------------- 12
bool crit_determinism(std::string& detail) {
  StableParams p(1.5, 2);
  Domain dom = Domain::ball({0.0, 0.0}, 1.0);
  OccupationLaw law = build_occupation_law(p, 512);
  BoundaryData g;
  g.g = [](const Vec& y) { return std::exp(-norm2(y)); };
  g.growth_B = 1.0;
  g.growth_p = 1.0;
  SourceData f;
  f.f = [](const Vec& x) { return 1.0 + 0.2 * x[0]; };
  f.sup_bound = 1.2;
  McOptions t1;
  t1.n_threads = 1;
  McOptions t4;
  t4.n_threads = 4;
  Estimate a = solve(dom, {0.4, 0.1}, g, f, p, law, 5000, 4, RngStream(47, 0), t1);
  Estimate b = solve(dom, {0.4, 0.1}, g, f, p, law, 5000, 4, RngStream(47, 0), t4);
  bool pass = a.value == b.value && a.std_error == b.std_error;

  // frozen compile evaluates identically across reruns
  ReluNet dnet = dist_net(dom, 1e-3);
  ReluNet anet = power_net(p.alpha, dom.diameter(), 1e-3);
  ToleranceBudget budget;
  budget.M = 8;
  budget.M2 = 2;
  budget.delta_upsilon = 1e-2;
  CompiledFull c1 = compile_full(dom, const_net(2, 0.5), const_net(2, 1.0),
                                 dnet, anet, law, budget, RngStream(53, 0));
  CompiledFull c2 = compile_full(dom, const_net(2, 0.5), const_net(2, 1.0),
                                 dnet, anet, law, budget, RngStream(53, 0));
  RngStream rng(59, 0);
  for (int t = 0; t < 20; ++t) {
    Vec x = dom.sample_interior(rng);
    if (c1.net->eval(x) != c2.net->eval(x)) pass = false;
  }
  // lq ladder value reruns identically under different thread counts
  auto run_lq = [&](int threads) {
    std::vector<double> powq(64, 0.0);
    std::vector<Vec> pts;
    RngStream pr(61, 0);
    for (int j = 0; j < 64; ++j) pts.push_back(dom.sample_interior(pr));
    parallel_for(64, threads, [&](long j) {
      RngStream base(63, std::uint64_t(j));
      FrozenSampleSet fr = freeze_samples(dom, false, p, law, 200, 2, base,
                                          100000, pts[std::size_t(j)]);
      auto dfn = [&](const Vec& z) { return dnet.realize1(z); };
      auto afn = [&](double r) { return anet.realize1(r); };
      auto ffn = [&](const Vec&) { return 1.0; };
      double v = replay_psi2(fr, dfn, afn, ffn, law.kappa(), pts[std::size_t(j)]);
      powq[std::size_t(j)] = std::pow(std::fabs(v), 1.3);
    });
    return pairwise_sum(powq);
  };
  double l1 = run_lq(1), l4 = run_lq(4);
  if (l1 != l4) pass = false;
  detail = pass ? "bit-identical across thread counts and reruns"
                : "mismatch detected";
  return pass;
}

} // namespace

int main() {
  std::vector<Criterion> criteria{
      {1, "exit-law moment oracle", crit_moment_oracle},
      {2, "kappa quadrature vs closed form", crit_kappa},
      {3, "exit-time solution on the disk", crit_exit_time},
      {4, "harmonicity and center kernel oracle", crit_harmonicity},
      {5, "geometric step-count tail", crit_tail},
      {6, "network algebra exactness battery", crit_algebra},
      {7, "product block certificates and size law", crit_product},
      {8, "power and distance blocks", crit_power_dist},
      {9, "compiler oracle equivalence", crit_compiler_equiv},
      {10, "end-to-end convergence ladder", crit_convergence},
      {11, "parameter-count scaling audit", crit_audit},
      {12, "determinism under thread counts", crit_determinism},
  };
  int failures = 0;
  for (auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] criterion %2d: %s (%.1fs) %s\n", ok ? "PASS" : "FAIL",
                c.id, c.title.c_str(), secs, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures)
    std::printf("%d criterion(s) FAILED\n", failures);
  else
    std::printf("all criteria passed\n");
  return failures == 0 ? 0 : 1;
}
