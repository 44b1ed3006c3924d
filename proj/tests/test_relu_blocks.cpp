#include <doctest.h>

#include <cmath>

#include "swos/relu_blocks.hpp"

using namespace swos;

TEST_CASE("pwl nets reproduce knots and linear functions exactly") {
  std::vector<double> xs{0.0, 0.5, 1.0, 2.0};
  std::vector<double> ys{1.0, 0.25, 0.5, -1.0};
  ReluNet net = pwl_net(xs, ys);
  for (std::size_t j = 0; j < xs.size(); ++j)
    CHECK(std::fabs(net.realize1(xs[j]) - ys[j]) <= 1e-12);
  // midpoints sit on the chords
  CHECK(std::fabs(net.realize1(0.25) - 0.625) <= 1e-12);
  // a linear function is reproduced identically, including extrapolation
  std::vector<double> lin_y;
  for (double x : xs) lin_y.push_back(3.0 * x - 2.0);
  ReluNet lin = pwl_net(xs, lin_y);
  for (double x : {-1.0, 0.2, 1.7, 5.0})
    CHECK(std::fabs(lin.realize1(x) - (3.0 * x - 2.0)) <= 1e-12);
  CHECK_THROWS_AS(pwl_net({0.0, 0.0, 1.0}, {0.0, 1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("product net certificate and guaranteed points") {
  ReluNet ups = product_net(1.0, 1e-2);
  CHECK(ups.cert.valid);
  CHECK(ups.cert.verified_sup_err <= 1e-2);
  CHECK(std::fabs(ups.realize({0.3, -0.7})[0] - (-0.21)) <= 1e-2);
  // zero factor still only delta-accurate: check across a grid
  for (int i = -10; i <= 10; ++i) {
    double b = i / 10.0;
    CHECK(std::fabs(ups.realize({0.0, b})[0]) <= 1e-2);
  }
  CHECK_THROWS_AS(product_net(1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(product_net(0.0, 0.1), std::domain_error);
}

TEST_CASE("product net equals its squaring-chain decomposition") {
  // the assembled two-input block is algebraically
  //   ab + (E(a+b) - E(a) - E(b))/2, with E the chain deficit
  double kappa = 2.0, delta = 1e-3;
  ReluNet ups = product_net(kappa, delta);
  RngStream rng(11, 0);
  for (int t = 0; t < 10000; ++t) {
    double a = kappa * (2.0 * rng.next_unit() - 1.0);
    double b = kappa * (2.0 * rng.next_unit() - 1.0);
    double direct = ups.realize({a, b})[0];
    double decomp = a * b + 0.5 * (product_net_square_deficit(kappa, delta, a + b) -
                                   product_net_square_deficit(kappa, delta, a) -
                                   product_net_square_deficit(kappa, delta, b));
    CHECK(std::fabs(direct - decomp) <= 1e-11 * std::max(1.0, kappa * kappa));
    CHECK(std::fabs(direct - a * b) <= delta);
  }
}

TEST_CASE("product net certified over the required grid ladder") {
  for (double kappa : {1.0, 10.0}) {
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      ReluNet ups = product_net(kappa, delta);
      CHECK(ups.cert.verified_sup_err <= delta);
      CHECK(ups.cert.grid_step == delta / 10.0);
      double L = std::log2(std::max(kappa, 1.0) / delta);
      CHECK(double(ups.param_count()) <=
            ups.cert.size_c1 * L + ups.cert.size_c2);
    }
  }
}

TEST_CASE("product net size is affine in log2(kappa/delta)") {
  double kappa = 1.0;
  std::vector<double> Ls, Ps;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    ReluNet ups = product_net(kappa, delta);
    Ls.push_back(std::log2(std::max(kappa, 1.0) / delta));
    Ps.push_back(double(ups.param_count()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = Ls.size();
  for (std::size_t i = 0; i < n; ++i) {
    sx += Ls[i];
    sy += Ps[i];
    sxx += Ls[i] * Ls[i];
    sxy += Ls[i] * Ps[i];
  }
  double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  double inter = sy / n - slope * sx / n;
  double ss = 0, mean = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    double e = Ps[i] - (inter + slope * Ls[i]);
    ss += e * e;
  }
  double rel_rms = std::sqrt(ss / n) / mean;
  CHECK(slope > 0.0);
  CHECK(rel_rms < 0.05);
}

TEST_CASE("power net hits its knots and certified error") {
  double alpha = 1.5, upper = 2.0, delta = 1e-3;
  ReluNet pw = power_net(alpha, upper, delta);
  CHECK(pw.realize1(0.0) == 0.0);
  CHECK(std::fabs(pw.realize1(upper) - std::pow(upper, alpha)) <= 1e-12);
  CHECK(pw.cert.verified_sup_err <= delta);
  // fresh verification sweep, unrelated to the construction grid
  RngStream rng(3, 3);
  double worst = 0.0;
  for (int t = 0; t < 20000; ++t) {
    double x = upper * rng.next_unit();
    worst = std::max(worst, std::fabs(pw.realize1(x) - std::pow(x, alpha)));
  }
  CHECK(worst <= delta);
  // recorded Lipschitz constant is an upper bound near the analytic slope
  CHECK(pw.cert.lipschitz >= alpha * std::pow(upper, alpha - 1.0) - 0.05);
  CHECK(pw.cert.lipschitz <= alpha * std::pow(upper, alpha - 1.0) + 0.2);
  CHECK_THROWS_AS(power_net(2.1, 1.0, 1e-3), std::domain_error);
}

TEST_CASE("rectangle distance nets are exact") {
  Domain rect = Domain::hyperrectangle({0.0, 0.0}, {1.0, 1.0});
  ReluNet net = dist_net(rect, 0.0);
  CHECK(std::fabs(net.realize({0.25, 0.5})[0] - 0.25) <= 1e-12);
  CHECK(net.cert.kind == "dist_exact");
  CHECK(net.hidden() == 2); // ceil(log2(2d)) stages
  RngStream rng(4, 4);
  for (int t = 0; t < 20000; ++t) {
    Vec x{2.0 * rng.next_unit() - 0.5, 2.0 * rng.next_unit() - 0.5};
    CHECK(std::fabs(net.realize(x)[0] - rect.dist_to_boundary(x)) <= 1e-12);
  }
  Domain rect5 = Domain::hyperrectangle({0.0, 0.0, 0.0, 0.0, 0.0},
                                        {1.0, 2.0, 1.0, 3.0, 1.0});
  ReluNet net5 = dist_net(rect5, 0.0);
  CHECK(net5.hidden() == 4); // ceil(log2(10))
  for (int t = 0; t < 5000; ++t) {
    Vec x(5);
    for (int i = 0; i < 5; ++i) x[std::size_t(i)] = 3.5 * rng.next_unit() - 0.25;
    CHECK(std::fabs(net5.realize(x)[0] - rect5.dist_to_boundary(x)) <= 1e-12);
  }
}

TEST_CASE("ball distance nets meet their budget") {
  RngStream rng(5, 5);
  for (int d : {2, 5}) {
    Vec c(std::size_t(d), 0.0);
    Domain ball = Domain::ball(c, 1.0);
    ReluNet net = dist_net(ball, 1e-3);
    CHECK(net.cert.verified_sup_err <= 1e-3);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
      Vec x = ball.sample_interior(rng);
      worst = std::max(worst,
                       std::fabs(net.realize(x)[0] - ball.dist_to_boundary(x)));
    }
    CHECK(worst <= 1e-3);
  }
  // width growth against log(1/delta): polynomial with small exponent
  Domain b2 = Domain::ball({0.0, 0.0}, 1.0);
  std::vector<double> lx, ly;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    ReluNet net = dist_net(b2, delta);
    lx.push_back(std::log(std::ceil(std::log(1.0 / delta))));
    ly.push_back(std::log(double(dims_norm(net.dims()))));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double n = double(lx.size());
  double expnt = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  CHECK(expnt <= 3.0);
  // each built net satisfies the family bound with the largest recorded B
  double maxB = 0.0;
  std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<ReluNet> nets;
  for (double delta : deltas) {
    nets.push_back(dist_net(b2, delta));
    maxB = std::max(maxB, nets.back().cert.size_c1);
  }
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    double lg3 = std::pow(std::ceil(std::log(1.0 / deltas[i])), 3.0);
    CHECK(double(dims_norm(nets[i].dims())) <= maxB * 2.0 * lg3 + 1e-9);
  }
  // user domains must bring their own network
  Domain user = Domain::user(
      2, [](const Vec& x) { return 0.5 - norm2(x); }, {-0.5, -0.5}, {0.5, 0.5});
  CHECK_THROWS_AS(dist_net(user, 1e-2), std::invalid_argument);
}

TEST_CASE("certificates re-verify in a single call") {
  ReluNet ups = product_net(2.0, 1e-2);
  CHECK(recheck_certificate(ups) <= 1e-2);
  ReluNet pw = power_net(1.5, 2.0, 1e-3);
  CHECK(recheck_certificate(pw) <= 1e-3);
  ReluNet sq = sqrt_net(4.0, 1e-3);
  CHECK(recheck_certificate(sq) <= 1e-3);
  Domain rect = Domain::hyperrectangle({0.0, 0.0}, {1.0, 2.0});
  CHECK(recheck_certificate(dist_net(rect, 0.0)) <= 1e-12);
  Domain ball = Domain::ball({0.1, -0.2}, 1.5);
  CHECK(recheck_certificate(dist_net(ball, 1e-3)) <= 1e-3);
  ReluNet plain = const_net(2, 1.0);
  CHECK_THROWS_AS(recheck_certificate(plain), std::invalid_argument);
}

TEST_CASE("sampled 1-d approximants verify against a fine grid") {
  auto fn = [](double x) { return std::sin(3.0 * x) + 0.2 * x; };
  ReluNet net = approx_from_samples(fn, -1.0, 2.0, 1e-4);
  CHECK(net.cert.verified_sup_err <= 1e-4);
  RngStream rng(6, 6);
  double worst = 0.0;
  for (int t = 0; t < 20000; ++t) {
    double x = -1.0 + 3.0 * rng.next_unit();
    worst = std::max(worst, std::fabs(net.realize1(x) - fn(x)));
  }
  CHECK(worst <= 2e-4);
}
