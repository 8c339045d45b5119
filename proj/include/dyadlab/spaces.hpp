#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "dyadlab/errors.hpp"

namespace dyadlab {

/// Target space X = R^d under the l_q norm, sitting inside L^p.  d = 1 means
/// the scalar case (q is then irrelevant).  Both exponents are restricted to
/// (1, inf) so the duality maps used by the norm estimators stay smooth.
class SpaceDescriptor {
 public:
  static SpaceDescriptor scalar(double p) { return SpaceDescriptor(p, 2.0, 1); }
  static SpaceDescriptor lq(double p, double q, int d) { return SpaceDescriptor(p, q, d); }

  double p() const { return p_; }
  double q() const { return q_; }
  int dim() const { return d_; }
  bool is_scalar() const { return d_ == 1; }

  double p_conj() const { return p_ / (p_ - 1.0); }
  double q_conj() const { return q_ / (q_ - 1.0); }

  /// Dual space descriptor; dual of dual reproduces the original.
  SpaceDescriptor dual() const { return SpaceDescriptor(p_conj(), q_conj(), d_); }

  /// l_q norm of one fiber value (plain absolute value when d = 1).
  double vector_norm(std::span<const double> v) const {
    if (static_cast<int>(v.size()) != d_)
      throw MalformedInputError("vector dimension does not match space descriptor");
    if (d_ == 1) return std::abs(v[0]);
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), q_);
    return std::pow(s, 1.0 / q_);
  }

 private:
  SpaceDescriptor(double p, double q, int d) : p_(p), q_(q), d_(d) {
    if (!(p > 1.0) || !std::isfinite(p))
      throw MalformedInputError("exponent p must lie in (1, inf)");
    if (!(q > 1.0) || !std::isfinite(q))
      throw MalformedInputError("inner exponent q must lie in (1, inf)");
    if (d < 1) throw MalformedInputError("dimension must be positive");
  }

  double p_;
  double q_;
  int d_;
};

}  // namespace dyadlab
