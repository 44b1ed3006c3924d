#pragma once

#include <functional>
#include <optional>
#include <string>

#include "swos/stable_law.hpp"

namespace swos {

double norm2(const Vec& x);
double dist2(const Vec& a, const Vec& b);

// Bounded domain with a signed distance to the boundary: positive inside,
// <= 0 outside (that sign convention is the walk's single exit predicate).
class Domain {
public:
  enum class Kind { ball, hyperrectangle, user };

  static Domain ball(Vec center, double radius);
  static Domain hyperrectangle(Vec lo, Vec hi);
  // user kind supplies signed distance, a bounding box, and optionally the
  // exact volume; otherwise volume is estimated by hit-or-miss once
  static Domain user(int d, std::function<double(const Vec&)> dist, Vec bb_lo,
                     Vec bb_hi, std::optional<double> volume = std::nullopt,
                     std::uint64_t est_seed = 1234, long est_samples = 200000);

  Kind kind() const { return kind_; }
  int dim() const { return d_; }
  double diameter() const { return diameter_; }
  double volume() const { return volume_; }
  double volume_rel_error() const { return volume_rel_error_; }

  double dist_to_boundary(const Vec& x) const;
  bool contains(const Vec& x) const { return dist_to_boundary(x) > 0.0; }

  Vec sample_interior(RngStream& rng) const;

  // a point well inside the domain (ball center / box midpoint); for user
  // domains the bounding-box midpoint is probed and must be interior
  Vec reference_point() const;

  const Vec& bb_lo() const { return bb_lo_; }
  const Vec& bb_hi() const { return bb_hi_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

  // largest coordinate norm over the closure, used by the theory constants
  double sup_norm_point() const;

private:
  Domain() = default;
  void check_dim(const Vec& x) const;

  Kind kind_ = Kind::ball;
  int d_ = 0;
  Vec center_;
  double radius_ = 0.0;
  Vec lo_, hi_;
  std::function<double(const Vec&)> user_dist_;
  Vec bb_lo_, bb_hi_;
  double diameter_ = 0.0;
  double volume_ = 0.0;
  double volume_rel_error_ = 0.0;
};

// Exponent triple of the L^q analysis; validate() enforces
// 1 < p < alpha, 1 < s < alpha, s < alpha/p, s <= q < alpha/p.
struct SolverExponents {
  double p = 1.1;
  double s = 1.2;
  double q = 1.3;
  void validate(double alpha) const;
};

} // namespace swos
