#include "swos/geometry.hpp"

#include <cmath>

namespace swos {

double norm2(const Vec& x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

double dist2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void Domain::check_dim(const Vec& x) const {
  if (int(x.size()) != d_)
    throw std::invalid_argument("Domain: point dimension mismatch");
}

Domain Domain::ball(Vec center, double radius) {
  if (!(radius > 0.0)) throw std::domain_error("Domain::ball: radius <= 0");
  Domain dom;
  dom.kind_ = Kind::ball;
  dom.d_ = int(center.size());
  dom.center_ = std::move(center);
  dom.radius_ = radius;
  dom.diameter_ = 2.0 * radius;
  // |B(0,R)| = pi^{d/2} R^d / Gamma(d/2+1)
  dom.volume_ = std::exp(0.5 * dom.d_ * std::log(3.14159265358979323846) +
                         dom.d_ * std::log(radius) -
                         log_gamma(0.5 * dom.d_ + 1.0));
  dom.bb_lo_.resize(dom.d_);
  dom.bb_hi_.resize(dom.d_);
  for (int i = 0; i < dom.d_; ++i) {
    dom.bb_lo_[i] = dom.center_[i] - radius;
    dom.bb_hi_[i] = dom.center_[i] + radius;
  }
  return dom;
}

Domain Domain::hyperrectangle(Vec lo, Vec hi) {
  if (lo.size() != hi.size())
    throw std::invalid_argument("Domain::hyperrectangle: lo/hi mismatch");
  Domain dom;
  dom.kind_ = Kind::hyperrectangle;
  dom.d_ = int(lo.size());
  double diag2 = 0.0, vol = 1.0;
  for (int i = 0; i < dom.d_; ++i) {
    double w = hi[i] - lo[i];
    if (!(w > 0.0)) throw std::domain_error("Domain::hyperrectangle: empty");
    diag2 += w * w;
    vol *= w;
  }
  dom.lo_ = lo;
  dom.hi_ = hi;
  dom.bb_lo_ = std::move(lo);
  dom.bb_hi_ = std::move(hi);
  dom.diameter_ = std::sqrt(diag2);
  dom.volume_ = vol;
  return dom;
}

Domain Domain::user(int d, std::function<double(const Vec&)> dist, Vec bb_lo,
                    Vec bb_hi, std::optional<double> volume,
                    std::uint64_t est_seed, long est_samples) {
  Domain dom;
  dom.kind_ = Kind::user;
  dom.d_ = d;
  dom.user_dist_ = std::move(dist);
  dom.bb_lo_ = std::move(bb_lo);
  dom.bb_hi_ = std::move(bb_hi);
  double diag2 = 0.0, bbvol = 1.0;
  for (int i = 0; i < d; ++i) {
    double w = dom.bb_hi_[i] - dom.bb_lo_[i];
    if (!(w > 0.0)) throw std::domain_error("Domain::user: empty bounding box");
    diag2 += w * w;
    bbvol *= w;
  }
  dom.diameter_ = std::sqrt(diag2);
  if (volume) {
    dom.volume_ = *volume;
  } else {
    RngStream rng(est_seed, 0);
    long hits = 0;
    Vec x(d);
    for (long k = 0; k < est_samples; ++k) {
      for (int i = 0; i < d; ++i)
        x[i] = dom.bb_lo_[i] + (dom.bb_hi_[i] - dom.bb_lo_[i]) * rng.next_unit();
      if (dom.user_dist_(x) > 0.0) ++hits;
    }
    if (hits == 0)
      throw NumericError("Domain::user: volume estimate found no interior",
                         0.0);
    double frac = double(hits) / double(est_samples);
    dom.volume_ = bbvol * frac;
    dom.volume_rel_error_ =
        std::sqrt(frac * (1.0 - frac) / double(est_samples)) / frac;
  }
  return dom;
}

double Domain::dist_to_boundary(const Vec& x) const {
  check_dim(x);
  switch (kind_) {
    case Kind::ball:
      return radius_ - dist2(x, center_);
    case Kind::hyperrectangle: {
      double m = hi_[0] - x[0];
      for (int i = 0; i < d_; ++i) {
        m = std::min(m, x[i] - lo_[i]);
        m = std::min(m, hi_[i] - x[i]);
      }
      return m;
    }
    case Kind::user:
      return user_dist_(x);
  }
  return 0.0;
}

Vec Domain::sample_interior(RngStream& rng) const {
  switch (kind_) {
    case Kind::ball: {
      Vec y = sample_direction(d_, rng);
      double r = radius_ * std::pow(rng.next_open(), 1.0 / d_);
      for (int i = 0; i < d_; ++i) y[i] = center_[i] + r * y[i];
      return y;
    }
    case Kind::hyperrectangle: {
      Vec x(d_);
      for (int i = 0; i < d_; ++i)
        x[i] = lo_[i] + (hi_[i] - lo_[i]) * rng.next_unit();
      return x;
    }
    case Kind::user: {
      Vec x(d_);
      // rejection inside the bounding box; abort on pathological acceptance
      const long max_tries = 100000;
      for (long k = 0; k < max_tries; ++k) {
        for (int i = 0; i < d_; ++i)
          x[i] = bb_lo_[i] + (bb_hi_[i] - bb_lo_[i]) * rng.next_unit();
        if (user_dist_(x) > 0.0) return x;
      }
      throw NumericError(
          "Domain::sample_interior: acceptance below 1e-4, supply a tighter "
          "bounding volume",
          1.0 / double(max_tries));
    }
  }
  throw std::logic_error("Domain: unknown kind");
}

Vec Domain::reference_point() const {
  switch (kind_) {
    case Kind::ball:
      return center_;
    case Kind::hyperrectangle: {
      Vec c(d_);
      for (int i = 0; i < d_; ++i) c[i] = 0.5 * (lo_[i] + hi_[i]);
      return c;
    }
    case Kind::user: {
      Vec c(d_);
      for (int i = 0; i < d_; ++i) c[i] = 0.5 * (bb_lo_[i] + bb_hi_[i]);
      if (user_dist_(c) <= 0.0)
        throw std::domain_error(
            "Domain::reference_point: bounding-box midpoint not interior");
      return c;
    }
  }
  throw std::logic_error("Domain: unknown kind");
}

double Domain::sup_norm_point() const {
  switch (kind_) {
    case Kind::ball:
      return norm2(center_) + radius_;
    default: {
      // farthest bounding-box corner from the origin
      double s = 0.0;
      for (int i = 0; i < d_; ++i) {
        double m = std::max(std::fabs(bb_lo_[i]), std::fabs(bb_hi_[i]));
        s += m * m;
      }
      return std::sqrt(s);
    }
  }
}

void SolverExponents::validate(double alpha) const {
  std::string bad;
  if (!(p > 1.0 && p < alpha)) bad += " p must lie in (1,alpha);";
  if (!(s > 1.0 && s < alpha)) bad += " s must lie in (1,alpha);";
  if (!(s < alpha / p)) bad += " s must be < alpha/p;";
  if (!(q >= s && q < alpha / p)) bad += " q must lie in [s, alpha/p);";
  if (!bad.empty())
    throw std::domain_error("SolverExponents:" + bad);
}

} // namespace swos
