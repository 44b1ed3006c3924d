#include "swos/relu_blocks.hpp"

#include <cmath>

namespace swos {

ReluNet pwl_net(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::size_t n = xs.size();
  if (n < 2 || ys.size() != n)
    throw std::invalid_argument("pwl_net: need >= 2 knots with matching values");
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (!(xs[j + 1] > xs[j]))
      throw std::invalid_argument("pwl_net: knots must be strictly increasing");
  std::vector<double> slope(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j)
    slope[j] = (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]);

  // f(x) = y_0 + m_0 (x - x_0) + sum_j (m_j - m_{j-1}) relu(x - x_j),
  // with the affine part synthesized from relu(x-x_0) - relu(x_0-x)
  ReluNet net;
  Layer h;
  h.W = Matrix(int(n), 1);
  h.B.assign(n, 0.0);
  h.W(0, 0) = 1.0;
  h.B[0] = -xs[0];
  h.W(1, 0) = -1.0;
  h.B[1] = xs[0];
  for (std::size_t j = 1; j + 1 < n; ++j) {
    h.W(int(j) + 1, 0) = 1.0;
    h.B[j + 1] = -xs[j];
  }
  Layer o;
  o.W = Matrix(1, int(n));
  o.B.assign(1, ys[0]);
  o.W(0, 0) = slope[0];
  o.W(0, 1) = -slope[0];
  for (std::size_t j = 1; j + 1 < n; ++j) o.W(0, int(j) + 1) = slope[j] - slope[j - 1];
  net.layers.push_back(std::move(h));
  net.layers.push_back(std::move(o));
  return net;
}

// ---------------------------------------------------------------------------
// squaring chain / product block
// ---------------------------------------------------------------------------

int product_net_levels(double kappa, double delta) {
  if (!(kappa > 0.0)) throw std::domain_error("product_net: kappa must be > 0");
  if (!(delta > 0.0 && delta < 0.5))
    throw std::domain_error("product_net: delta must lie in (0, 1/2)");
  double k = std::max(kappa, 1.0);
  // sup error of the assembled product is k^2 2^{-2m}
  int m = int(std::ceil(0.5 * std::log2(k * k / delta)));
  return std::max(m, 1);
}

// t in [0,1]: m-level sawtooth approximant of t^2 (from above), scalar form
static double square_chain(double t, int m) {
  double g = t;   // s^{(j)}(t)
  double A = t;   // running interpolant
  double w = 1.0; // 4^{-j}
  for (int j = 1; j <= m; ++j) {
    double u = g > 0 ? g : 0.0;
    double v = g - 0.5 > 0 ? g - 0.5 : 0.0;
    g = 2.0 * u - 4.0 * v;
    w *= 0.25;
    A -= g * w;
  }
  return A;
}

double product_net_square_deficit(double kappa, double delta, double z) {
  int m = product_net_levels(kappa, delta);
  double kp = 2.0 * std::max(kappa, 1.0);
  double t = std::fabs(z) / kp;
  return kp * kp * square_chain(t, m) - z * z;
}

ReluNet product_net(double kappa, double delta) {
  int m = product_net_levels(kappa, delta);
  double kp = 2.0 * std::max(kappa, 1.0);

  ReluNet net;
  // L1: split units (a+, a-, b+, b-, s+, s-), s = a + b
  {
    Layer L;
    L.W = Matrix(6, 2);
    L.B.assign(6, 0.0);
    L.W(0, 0) = 1.0;
    L.W(1, 0) = -1.0;
    L.W(2, 1) = 1.0;
    L.W(3, 1) = -1.0;
    L.W(4, 0) = 1.0;
    L.W(4, 1) = 1.0;
    L.W(5, 0) = -1.0;
    L.W(5, 1) = -1.0;
    net.layers.push_back(std::move(L));
  }
  // branch layout per level: 3 units (u, v, w) per branch, 3 branches
  // t_0 = |z|/kp from the split pair
  {
    Layer L;
    L.W = Matrix(9, 6);
    L.B.assign(9, 0.0);
    for (int br = 0; br < 3; ++br) {
      int c0 = 2 * br; // (z+, z-) columns of this branch
      // u_1 = relu(t0), v_1 = relu(t0 - 1/2), w_1 = relu(t0)
      L.W(3 * br + 0, c0) = 1.0 / kp;
      L.W(3 * br + 0, c0 + 1) = 1.0 / kp;
      L.W(3 * br + 1, c0) = 1.0 / kp;
      L.W(3 * br + 1, c0 + 1) = 1.0 / kp;
      L.B[std::size_t(3 * br + 1)] = -0.5;
      L.W(3 * br + 2, c0) = 1.0 / kp;
      L.W(3 * br + 2, c0 + 1) = 1.0 / kp;
    }
    net.layers.push_back(std::move(L));
  }
  // levels j = 2..m: u_{j} = relu(g_{j-1}), v_j = relu(g_{j-1} - 1/2),
  // w_j = relu(A_{j-1}), with g = 2u - 4v, A = w - g/4^{j-1}
  double scale = 0.25; // 4^{-(j-1)} at j = 2
  for (int j = 2; j <= m; ++j) {
    Layer L;
    L.W = Matrix(9, 9);
    L.B.assign(9, 0.0);
    for (int br = 0; br < 3; ++br) {
      int u = 3 * br, v = 3 * br + 1, w = 3 * br + 2;
      L.W(u, u) = 2.0;
      L.W(u, v) = -4.0;
      L.W(v, u) = 2.0;
      L.W(v, v) = -4.0;
      L.B[std::size_t(v)] = -0.5;
      L.W(w, w) = 1.0;
      L.W(w, u) = -2.0 * scale;
      L.W(w, v) = 4.0 * scale;
    }
    net.layers.push_back(std::move(L));
    scale *= 0.25;
  }
  // output: (SQ_s - SQ_a - SQ_b)/2 with SQ = kp^2 (w_m - g_m/4^m)
  {
    double c = kp * kp;
    double fm = std::pow(0.25, m);
    Layer L;
    L.W = Matrix(1, 9);
    L.B.assign(1, 0.0);
    double sgn[3] = {-0.5, -0.5, 0.5}; // branches a, b, s
    for (int br = 0; br < 3; ++br) {
      int u = 3 * br, v = 3 * br + 1, w = 3 * br + 2;
      L.W(0, w) = sgn[br] * c;
      L.W(0, u) = sgn[br] * c * (-2.0 * fm);
      L.W(0, v) = sgn[br] * c * (4.0 * fm);
    }
    net.layers.push_back(std::move(L));
  }

  // certificate: 1-d deficit grids bound the 2-d sup error from above,
  //   e <= max deficit on [-k,k], -e <= max deficit on [-2k,2k] / 2
  double step = delta / 10.0;
  auto deficit_max = [&](double range) {
    long nsteps = long(std::ceil(range / step));
    nsteps = std::min<long>(nsteps, 4'000'000);
    double worst = 0.0;
    for (long i = 0; i <= nsteps; ++i) {
      double z = range * double(i) / double(nsteps);
      double t = z / kp;
      double E = kp * kp * (square_chain(t, m) - t * t);
      worst = std::max(worst, E);
    }
    return worst;
  };
  double P = deficit_max(kappa);
  double Q = deficit_max(2.0 * kappa);
  net.cert.valid = true;
  net.cert.kind = "product";
  net.cert.delta = delta;
  net.cert.verified_sup_err = std::max(P, 0.5 * Q);
  net.cert.grid_step = step;
  net.cert.box_lo = {-kappa, -kappa};
  net.cert.box_hi = {kappa, kappa};
  net.cert.c1 = double(m); // refinement levels actually built
  net.cert.c2 = kp;
  // P = 90 m + 1 exactly and m <= log2(max(kappa,1)/delta) + 1, so the
  // explicit size law P <= 90 L + 91 holds with L = log2(max(kappa,1)/delta)
  net.cert.size_c1 = 90.0;
  net.cert.size_c2 = 91.0;
  return net;
}

// ---------------------------------------------------------------------------
// graded PWL nets
// ---------------------------------------------------------------------------

namespace {

struct GradedPwl {
  std::vector<double> xs, ys;
  double sup_err = 0.0;
  double lipschitz = 0.0;
};

// interpolate fn on [0, upper] with knots upper*(j/n)^gamma; verify on a 10x
// finer per-cell grid and double n until the target is met
GradedPwl graded_fit(const std::function<double(double)>& fn, double upper,
                     double gamma, double delta, int n0, int max_knots) {
  GradedPwl out;
  for (int n = n0; n <= max_knots; n *= 2) {
    out.xs.assign(std::size_t(n) + 1, 0.0);
    out.ys.assign(std::size_t(n) + 1, 0.0);
    for (int j = 0; j <= n; ++j) {
      double x = upper * std::pow(double(j) / n, gamma);
      out.xs[std::size_t(j)] = x;
      out.ys[std::size_t(j)] = fn(x);
    }
    // enforce strict increase in the graded tail (guards tiny first cells)
    bool ok_knots = true;
    for (int j = 0; j < n; ++j)
      if (!(out.xs[std::size_t(j + 1)] > out.xs[std::size_t(j)])) ok_knots = false;
    if (!ok_knots) {
      // grading collapsed below double resolution; retry with fewer knots
      throw NumericError("graded_fit: knot collapse", double(n));
    }
    double worst = 0.0, lip = 0.0;
    for (int j = 0; j < n; ++j) {
      double x0 = out.xs[std::size_t(j)], x1 = out.xs[std::size_t(j + 1)];
      double y0 = out.ys[std::size_t(j)], y1 = out.ys[std::size_t(j + 1)];
      double m = (y1 - y0) / (x1 - x0);
      lip = std::max(lip, std::fabs(m));
      for (int t = 1; t < 10; ++t) {
        double x = x0 + (x1 - x0) * t / 10.0;
        double err = std::fabs(y0 + m * (x - x0) - fn(x));
        worst = std::max(worst, err);
      }
    }
    out.sup_err = worst;
    out.lipschitz = lip;
    if (worst <= delta) return out;
  }
  throw NumericError("graded_fit: knot budget exhausted before delta", delta);
}

} // namespace

ReluNet power_net(double alpha, double upper, double delta) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw std::domain_error("power_net: alpha must lie in (1,2)");
  if (!(upper > 0.0)) throw std::domain_error("power_net: upper must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("power_net: delta must lie in (0,1)");
  double gamma = 2.0 / (2.0 - alpha);
  int n0 = std::max(
      8, int(std::ceil(gamma * std::sqrt(std::pow(upper, alpha) * alpha *
                                         (alpha - 1.0) / (4.0 * delta)))));
  GradedPwl fit = graded_fit([&](double x) { return std::pow(x, alpha); }, upper,
                             gamma, delta, n0, 1 << 20);
  ReluNet net = pwl_net(fit.xs, fit.ys);
  net.cert.valid = true;
  net.cert.kind = "power";
  net.cert.delta = delta;
  net.cert.verified_sup_err = fit.sup_err;
  net.cert.grid_step = fit.xs[1] / 10.0;
  net.cert.box_lo = {0.0};
  net.cert.box_hi = {upper};
  net.cert.lipschitz = fit.lipschitz;
  net.cert.c1 = alpha; // exponent, for standalone rechecks
  return net;
}

ReluNet sqrt_net(double upper, double delta) {
  if (!(upper > 0.0 && delta > 0.0))
    throw std::domain_error("sqrt_net: bad parameters");
  int n0 = std::max(8, int(std::ceil(4.0 * std::sqrt(std::sqrt(upper) /
                                                     (4.0 * delta)))));
  GradedPwl fit = graded_fit([](double t) { return std::sqrt(t); }, upper, 4.0,
                             delta, n0, 1 << 20);
  ReluNet net = pwl_net(fit.xs, fit.ys);
  net.cert.valid = true;
  net.cert.kind = "sqrt";
  net.cert.delta = delta;
  net.cert.verified_sup_err = fit.sup_err;
  net.cert.grid_step = fit.xs[1] / 10.0;
  net.cert.box_lo = {0.0};
  net.cert.box_hi = {upper};
  net.cert.lipschitz = fit.lipschitz;
  return net;
}

namespace {

ReluNet dist_net_rect(const Domain& dom) {
  int d = dom.dim();
  const Vec& lo = dom.lo();
  const Vec& hi = dom.hi();
  ReluNet net;
  // current minimands as affine forms over the previous layer's units;
  // row = (coeffs over units, bias)
  struct Affine {
    Vec w;
    double b;
  };
  std::vector<Affine> cur(std::size_t(2 * d));
  for (int i = 0; i < d; ++i) {
    Affine gl;
    gl.w.assign(std::size_t(d), 0.0);
    gl.w[std::size_t(i)] = 1.0;
    gl.b = -lo[i];
    Affine gh;
    gh.w.assign(std::size_t(d), 0.0);
    gh.w[std::size_t(i)] = -1.0;
    gh.b = hi[i];
    cur[std::size_t(2 * i)] = std::move(gl);
    cur[std::size_t(2 * i + 1)] = std::move(gh);
  }
  while (cur.size() > 1) {
    std::size_t K = cur.size();
    std::size_t pairs = K / 2;
    bool odd = (K % 2) == 1;
    int width = int(3 * pairs + (odd ? 2 : 0));
    Layer L;
    L.W = Matrix(width, int(cur[0].w.size()));
    L.B.assign(std::size_t(width), 0.0);
    auto put = [&](int row, const Affine& a, double sgn) {
      for (std::size_t j = 0; j < a.w.size(); ++j) L.W(row, int(j)) = sgn * a.w[j];
      L.B[std::size_t(row)] = sgn * a.b;
    };
    for (std::size_t p = 0; p < pairs; ++p) {
      const Affine& u = cur[2 * p];
      const Affine& v = cur[2 * p + 1];
      // rows: (u - v)+, u+, (-u)+
      Affine diff;
      diff.w.resize(u.w.size());
      for (std::size_t j = 0; j < u.w.size(); ++j) diff.w[j] = u.w[j] - v.w[j];
      diff.b = u.b - v.b;
      put(int(3 * p), diff, 1.0);
      put(int(3 * p + 1), u, 1.0);
      put(int(3 * p + 2), u, -1.0);
    }
    if (odd) {
      put(int(3 * pairs), cur[K - 1], 1.0);
      put(int(3 * pairs + 1), cur[K - 1], -1.0);
    }
    net.layers.push_back(std::move(L));
    // rebuild the minimands over the new units
    std::vector<Affine> next(pairs + (odd ? 1 : 0));
    for (std::size_t p = 0; p < pairs; ++p) {
      Affine m;
      m.w.assign(std::size_t(width), 0.0);
      m.w[3 * p] = -1.0; // -(u-v)+
      m.w[3 * p + 1] = 1.0;
      m.w[3 * p + 2] = -1.0; // + u
      m.b = 0.0;
      next[p] = std::move(m);
    }
    if (odd) {
      Affine m;
      m.w.assign(std::size_t(width), 0.0);
      m.w[3 * pairs] = 1.0;
      m.w[3 * pairs + 1] = -1.0;
      m.b = 0.0;
      next[pairs] = std::move(m);
    }
    cur = std::move(next);
  }
  Layer out;
  out.W = Matrix(1, int(cur[0].w.size()));
  for (std::size_t j = 0; j < cur[0].w.size(); ++j) out.W(0, int(j)) = cur[0].w[j];
  out.B.assign(1, cur[0].b);
  net.layers.push_back(std::move(out));
  net.cert.valid = true;
  net.cert.kind = "dist_exact";
  net.cert.delta = 0.0;
  net.cert.verified_sup_err = 0.0;
  net.cert.box_lo = lo;
  net.cert.box_hi = hi;
  net.cert.lipschitz = 1.0;
  return net;
}

ReluNet dist_net_ball(const Domain& dom, double delta) {
  int d = dom.dim();
  double R = dom.radius();
  const Vec& c = dom.center();
  // squares budget (delta/2)^2, sqrt budget delta/2
  double eps_s = 0.25 * delta * delta;
  int m = std::max(1, int(std::ceil(
                       0.5 * (std::log2(double(d) * R * R / eps_s)) - 1.0)));
  while (double(d) * R * R * std::pow(2.0, -2.0 * m - 2.0) > eps_s) ++m;
  double kp = R;

  ReluNet net;
  { // split layer: (z_i+, z_i-) for z_i = x_i - c_i
    Layer L;
    L.W = Matrix(2 * d, d);
    L.B.assign(std::size_t(2 * d), 0.0);
    for (int i = 0; i < d; ++i) {
      L.W(2 * i, i) = 1.0;
      L.B[std::size_t(2 * i)] = -c[std::size_t(i)];
      L.W(2 * i + 1, i) = -1.0;
      L.B[std::size_t(2 * i + 1)] = c[std::size_t(i)];
    }
    net.layers.push_back(std::move(L));
  }
  { // chain heads per coordinate
    Layer L;
    L.W = Matrix(3 * d, 2 * d);
    L.B.assign(std::size_t(3 * d), 0.0);
    for (int i = 0; i < d; ++i) {
      L.W(3 * i, 2 * i) = 1.0 / kp;
      L.W(3 * i, 2 * i + 1) = 1.0 / kp;
      L.W(3 * i + 1, 2 * i) = 1.0 / kp;
      L.W(3 * i + 1, 2 * i + 1) = 1.0 / kp;
      L.B[std::size_t(3 * i + 1)] = -0.5;
      L.W(3 * i + 2, 2 * i) = 1.0 / kp;
      L.W(3 * i + 2, 2 * i + 1) = 1.0 / kp;
    }
    net.layers.push_back(std::move(L));
  }
  double scale = 0.25;
  for (int j = 2; j <= m; ++j) {
    Layer L;
    L.W = Matrix(3 * d, 3 * d);
    L.B.assign(std::size_t(3 * d), 0.0);
    for (int i = 0; i < d; ++i) {
      int u = 3 * i, v = 3 * i + 1, w = 3 * i + 2;
      L.W(u, u) = 2.0;
      L.W(u, v) = -4.0;
      L.W(v, u) = 2.0;
      L.W(v, v) = -4.0;
      L.B[std::size_t(v)] = -0.5;
      L.W(w, w) = 1.0;
      L.W(w, u) = -2.0 * scale;
      L.W(w, v) = 4.0 * scale;
    }
    net.layers.push_back(std::move(L));
    scale *= 0.25;
  }
  // S = sum_i kp^2 (w_i - g_i/4^m) feeds the sqrt PWL hidden layer directly;
  // the sqrt range covers the one-sided squaring overshoot
  ReluNet sq = sqrt_net(R * R * 1.02 + eps_s, 0.5 * delta);
  const Layer& sh = sq.layers.front(); // (n+1) x 1
  const Layer& so = sq.layers.back();
  {
    double cc = kp * kp;
    double fm = std::pow(0.25, m);
    Layer L;
    L.W = Matrix(sh.W.rows, 3 * d);
    L.B = sh.B;
    for (int r = 0; r < sh.W.rows; ++r) {
      double a = sh.W(r, 0);
      for (int i = 0; i < d; ++i) {
        int u = 3 * i, v = 3 * i + 1, w = 3 * i + 2;
        L.W(r, w) = a * cc;
        L.W(r, u) = a * cc * (-2.0 * fm);
        L.W(r, v) = a * cc * (4.0 * fm);
      }
    }
    net.layers.push_back(std::move(L));
  }
  { // head: R - sqrt(S)
    Layer L;
    L.W = Matrix(1, so.W.cols);
    L.B.assign(1, R - so.B[0]);
    for (int j = 0; j < so.W.cols; ++j) L.W(0, j) = -so.W(0, j);
    net.layers.push_back(std::move(L));
  }

  // verification: random interior points against the exact signed distance
  RngStream rng(20240901, 77);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    Vec x = dom.sample_interior(rng);
    double exact = dom.dist_to_boundary(x);
    double got = net.realize(x)[0];
    worst = std::max(worst, std::fabs(got - exact));
  }
  if (worst > delta)
    throw NumericError("dist_net: ball verification exceeded delta", worst);
  net.cert.valid = true;
  net.cert.kind = "dist_ball";
  net.cert.delta = delta;
  net.cert.verified_sup_err = worst;
  net.cert.grid_step = 0.0; // randomized verification
  net.cert.box_lo = dom.bb_lo();
  net.cert.box_hi = dom.bb_hi();
  net.cert.lipschitz = 1.0 + delta;
  net.cert.c1 = double(m);
  // width bound B d^b ceil(log(1/delta))^a with (a, b) = (3, 1); B recorded
  // from the built net
  double lg3 = std::pow(std::ceil(std::log(1.0 / delta)), 3.0);
  net.cert.size_c1 = double(dims_norm(net.dims())) / (double(d) * lg3);
  net.cert.size_c2 = 3.0;
  return net;
}

} // namespace

ReluNet dist_net(const Domain& dom, double delta) {
  switch (dom.kind()) {
    case Domain::Kind::hyperrectangle:
      return dist_net_rect(dom);
    case Domain::Kind::ball:
      return dist_net_ball(dom, delta);
    default:
      throw std::invalid_argument(
          "dist_net: user domains must supply their own distance network");
  }
}

double recheck_certificate(const ReluNet& net) {
  if (!net.cert.valid)
    throw std::invalid_argument("recheck_certificate: no certificate carried");
  const Certificate& c = net.cert;
  if (c.kind == "product") {
    // 1-d deficit bound, exactly as at construction
    int m = int(c.c1);
    double kp = c.c2;
    double kappa = c.box_hi[0];
    double step = std::max(c.grid_step, kappa * 1e-7);
    auto deficit_max = [&](double range) {
      long nsteps = std::min<long>(long(std::ceil(range / step)), 4'000'000);
      double worst = 0.0;
      for (long i = 0; i <= nsteps; ++i) {
        double z = range * double(i) / double(nsteps);
        double t = z / kp;
        worst = std::max(worst, kp * kp * (square_chain(t, m) - t * t));
      }
      return worst;
    };
    return std::max(deficit_max(kappa), 0.5 * deficit_max(2.0 * kappa));
  }
  if (c.kind == "power" || c.kind == "sqrt") {
    double upper = c.box_hi[0];
    double ex = c.kind == "power" ? c.c1 : 0.5;
    double worst = 0.0;
    long n = 200001;
    for (long i = 0; i <= n; ++i) {
      double x = upper * double(i) / double(n);
      worst = std::max(worst, std::fabs(net.realize1(x) - std::pow(x, ex)));
    }
    return worst;
  }
  if (c.kind == "dist_exact" || c.kind == "dist_ball") {
    int d = int(c.box_lo.size());
    Domain dom =
        c.kind == "dist_exact"
            ? Domain::hyperrectangle(c.box_lo, c.box_hi)
            : Domain::ball(
                  [&] {
                    Vec ctr(std::size_t(d), 0.0);
                    for (int i = 0; i < d; ++i)
                      ctr[std::size_t(i)] = 0.5 * (c.box_lo[std::size_t(i)] +
                                                   c.box_hi[std::size_t(i)]);
                    return ctr;
                  }(),
                  0.5 * (c.box_hi[0] - c.box_lo[0]));
    RngStream rng(97531, 0);
    double worst = 0.0;
    for (int t = 0; t < 20000; ++t) {
      Vec x = dom.sample_interior(rng);
      worst = std::max(worst,
                       std::fabs(net.realize(x)[0] - dom.dist_to_boundary(x)));
    }
    return worst;
  }
  throw std::invalid_argument("recheck_certificate: kind '" + c.kind +
                              "' needs its source function");
}

ReluNet approx_from_samples(const std::function<double(double)>& fn, double lo,
                            double hi, double delta, int max_knots) {
  if (!(hi > lo)) throw std::invalid_argument("approx_from_samples: empty box");
  for (int n = 16; n <= max_knots; n *= 2) {
    std::vector<double> xs(std::size_t(n) + 1), ys(std::size_t(n) + 1);
    for (int j = 0; j <= n; ++j) {
      xs[std::size_t(j)] = lo + (hi - lo) * double(j) / n;
      ys[std::size_t(j)] = fn(xs[std::size_t(j)]);
    }
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      double m = (ys[std::size_t(j + 1)] - ys[std::size_t(j)]) /
                 (xs[std::size_t(j + 1)] - xs[std::size_t(j)]);
      for (int t = 1; t < 10; ++t) {
        double x = xs[std::size_t(j)] + (xs[std::size_t(j + 1)] - xs[std::size_t(j)]) * t / 10.0;
        worst = std::max(worst,
                         std::fabs(ys[std::size_t(j)] + m * (x - xs[std::size_t(j)]) - fn(x)));
      }
    }
    if (worst <= delta) {
      ReluNet net = pwl_net(xs, ys);
      net.cert.valid = true;
      net.cert.kind = "pwl_sampled";
      net.cert.delta = delta;
      net.cert.verified_sup_err = worst;
      net.cert.grid_step = (hi - lo) / (10.0 * n);
      net.cert.box_lo = {lo};
      net.cert.box_hi = {hi};
      double lip = 0.0;
      for (int j = 0; j < n; ++j)
        lip = std::max(lip, std::fabs((ys[std::size_t(j + 1)] - ys[std::size_t(j)]) /
                                      (xs[std::size_t(j + 1)] - xs[std::size_t(j)])));
      net.cert.lipschitz = lip;
      return net;
    }
  }
  throw NumericError("approx_from_samples: knot budget exhausted", delta);
}

} // namespace swos
