#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dyadlab/errors.hpp"
#include "dyadlab/spaces.hpp"

namespace dyadlab::dyadic {

/// 2^{k/2} for integer k, possibly negative.  Every module computes Haar
/// normalization weights through this one function so that grid-side and
/// toss-side evaluations of the same expansion agree bit for bit.
double sqrt_pow2(int k);

/// A dyadic subinterval of [0,1): [position 2^{-depth}, (position+1) 2^{-depth}).
/// The right half of an interval is its "plus" child, the left half "minus".
struct DyadicInterval {
  int depth = 0;
  std::uint32_t position = 0;

  double length() const;
  double left() const;
  double mid() const;
  bool contains(double x) const;

  DyadicInterval parent() const;  // depth >= 1 required
  DyadicInterval minus_child() const { return {depth + 1, 2 * position}; }
  DyadicInterval plus_child() const { return {depth + 1, 2 * position + 1}; }
  DyadicInterval sibling() const;  // depth >= 1 required
  bool is_plus_child() const { return depth > 0 && (position & 1u) != 0; }

  /// Heap-style index: root = 1, children of id are 2*id and 2*id+1.
  std::uint32_t node_id() const { return (std::uint32_t{1} << depth) + position; }
  static DyadicInterval from_node_id(std::uint32_t id);
  static DyadicInterval root() { return {0, 0}; }

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

/// L2-normalized Haar function of I at a point x in [0,1):
/// -|I|^{-1/2} on the minus child, +|I|^{-1/2} on the plus child, 0 outside I.
double haar_eval(const DyadicInterval& I, double x);

/// Truncated Haar expansion of an R^d valued step function on [0,1).
/// Coefficients are stored for every interval of depth <= truncation_depth;
/// the synthesized function is constant on the 2^{K+1} grid cells.
class HaarExpansion {
 public:
  HaarExpansion(int truncation_depth, int dim);

  int truncation_depth() const { return K_; }
  int dim() const { return d_; }
  std::size_t cell_count() const { return std::size_t{1} << (K_ + 1); }
  std::size_t interval_count() const { return cell_count() - 1; }

  std::span<double> mean() { return {mean_.data(), static_cast<std::size_t>(d_)}; }
  std::span<const double> mean() const { return {mean_.data(), static_cast<std::size_t>(d_)}; }

  std::span<double> coeff(const DyadicInterval& I);
  std::span<const double> coeff(const DyadicInterval& I) const;
  std::span<double> coeff_by_id(std::uint32_t node_id);
  std::span<const double> coeff_by_id(std::uint32_t node_id) const;

  friend bool operator==(const HaarExpansion&, const HaarExpansion&) = default;

 private:
  void check_id(std::uint32_t node_id) const;

  int K_;
  int d_;
  std::vector<double> mean_;
  std::vector<double> coeff_;  // node_id-major blocks of size d_
};

/// Haar analysis of cell averages sampled on the uniform grid of depth K+1.
/// samples is cell-major: samples[cell*dim + component].  The cell count
/// must be a power of two >= 2.
HaarExpansion analyze(std::span<const double> samples, int dim);

/// Pointwise synthesis back to cell averages (exact inverse of analyze).
std::vector<double> synthesize(const HaarExpansion& e);

/// The dyadic Hilbert transform: h_{I+} -> +h_{I-}, h_{I-} -> -h_{I+},
/// mean and the root Haar coefficient are annihilated.
HaarExpansion apply_S0(const HaarExpansion& e);

/// Martingale transform: coefficient on h_I multiplied by alpha_I, mean zeroed.
/// alpha is node_id-indexed and must cover every interval of the expansion.
HaarExpansion apply_Talpha(std::span<const int> alpha, const HaarExpansion& e);

/// Classical Haar shift: h_I -> 2^{-1/2} (h_{I-} - h_{I+}).  Coefficients at
/// the truncation depth fall off the table (documented truncation kernel).
HaarExpansion apply_classical_shift(const HaarExpansion& e);

/// Zero out the mean and the root Haar coefficient, leave the rest.
HaarExpansion reduce_tilde(const HaarExpansion& e);

/// True when the mean and the root Haar coefficient vanish.
bool is_reduced(const HaarExpansion& e);

/// L^p norm of the synthesized step function with fiber norm l_q.
double lp_norm(const HaarExpansion& e, const SpaceDescriptor& space);

}  // namespace dyadlab::dyadic
