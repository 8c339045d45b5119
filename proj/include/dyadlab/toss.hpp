#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dyadlab/circle.hpp"
#include "dyadlab/dyadic.hpp"
#include "dyadlab/spaces.hpp"

namespace dyadlab::toss {

using circle::Sign;

/// Exhaustive enumeration refuses beyond depth 8 (4^10 quarter states);
/// anything larger belongs to the sampling paths of the norm estimators.
inline constexpr int kEnumerationDepthBudget = 8;

/// One outcome of the angle sequence, recorded as which quarter arc each
/// theta_j fell in.  A depth-K expansion carries K+2 slots (q_0..q_{K+1}),
/// each uniform on {0,1,2,3}, so every state has probability 4^{-(K+2)}.
struct QuarterState {
  std::vector<std::uint8_t> q;
};

/// +-1 value of the generator phi^sigma on a quarter.
inline double generator_sign(Sign sigma, int quarter) {
  return circle::quarter_sign(sigma, quarter);
}

/// Path of sign tosses belonging to a dyadic interval: entry j is -1 for a
/// step into the minus (left) child and +1 for the plus (right) child.
std::vector<int> interval_to_path(const dyadic::DyadicInterval& I);
dyadic::DyadicInterval path_to_interval(std::span<const int> path);

/// The sign-toss lift F(theta) of a Haar expansion.  Increment tables are
/// indexed by the dyadic interval a toss prefix reaches; each increment
/// carries the generator signature it multiplies (the parity of its interval
/// for plain lifts; the dyadic Hilbert transform flips it).
class TossFunction {
 public:
  TossFunction(int depth, int dim);

  int depth() const { return K_; }
  int dim() const { return d_; }

  std::span<double> mean_increment() { return {mean_.data(), mean_.size()}; }
  std::span<const double> mean_increment() const { return {mean_.data(), mean_.size()}; }
  std::span<double> root_increment() { return {root_.data(), root_.size()}; }
  std::span<const double> root_increment() const { return {root_.data(), root_.size()}; }

  int num_levels() const { return K_; }  // level k targets intervals of depth k+1
  std::span<double> increment(int level, std::uint32_t position);
  std::span<const double> increment(int level, std::uint32_t position) const;
  Sign generator(int level, std::uint32_t position) const;
  void set_generator(int level, std::uint32_t position, Sign s);

  /// Number of quarter slots a state must carry.
  std::size_t state_size() const { return static_cast<std::size_t>(K_) + 2; }
  std::uint64_t state_count() const { return std::uint64_t{1} << (2 * (K_ + 2)); }

  /// Evaluate F at a quarter state (only q_0..q_K are consulted).
  void eval(std::span<const std::uint8_t> q, std::span<double> out) const;
  std::vector<double> eval(const QuarterState& s) const;

 private:
  int K_;
  int d_;
  std::vector<double> mean_;  // dF_{-2}
  std::vector<double> root_;  // dF_{-1}, generator phi^+(theta_0)
  struct Level {
    std::vector<double> value;     // position-major blocks of size d
    std::vector<std::int8_t> gen;  // +1 -> phi^+, -1 -> phi^-
  };
  std::vector<Level> levels_;
};

/// Decode state index -> quarter digits (base-4, slot j = digits 2j..2j+1).
void decode_state(std::uint64_t index, std::span<std::uint8_t> q);

/// Lift of a Haar expansion: the increment over a prefix reaching interval J
/// of depth k+1 equals (f, h_J) |J|^{-1/2} and multiplies phi^{parity(J)}.
TossFunction lift(const dyadic::HaarExpansion& e);

/// Value distribution as exact (value vector, count) pairs over a common
/// denominator of 4^{K+2} equally likely atoms.
using Distribution = std::map<std::vector<double>, std::uint64_t>;
Distribution grid_distribution(const dyadic::HaarExpansion& e);
Distribution state_distribution(const TossFunction& f);

/// L^p norm computed from a distribution (atoms of equal weight).
double lp_norm_from_distribution(const Distribution& dist, std::uint64_t total,
                                 const SpaceDescriptor& space);

struct DistributionReport {
  bool equal = false;
  std::size_t distinct_grid = 0;
  std::size_t distinct_state = 0;
  std::string detail;
};

/// Exact multiset comparison of the law of f on the grid against the law of
/// lift(f) under quarter enumeration.
DistributionReport distribution_check(const dyadic::HaarExpansion& e,
                                      int depth_budget = kEnumerationDepthBudget);

/// Exact expectation of the duality pairing sum_i F_i G_i by enumeration.
double expect_pairing(const TossFunction& F, const TossFunction& G);

/// The dyadic Hilbert transform in toss language: every increment keeps its
/// prefix dependence, its generator swaps signature with sign sigma, and the
/// mean and root increments are annihilated.
TossFunction apply_S0_toss(const TossFunction& F);

/// F with the circle Hilbert transform applied to the last variable of every
/// increment.  Pairable against a TossFunction through a table of one-variable
/// moments E[(H phi^sigma) phi^eta].
struct HLiftedFunction {
  TossFunction base;
};
HLiftedFunction apply_H_increments(const TossFunction& F);

/// moment[s][e] = (1/2pi) integral of (H phi^s)(x) phi^e(x); s,e in {+,-}
/// indexed 0 = plus, 1 = minus.
struct MomentTable {
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double operator()(Sign s, Sign e) const {
    return m[s == Sign::plus ? 0 : 1][e == Sign::plus ? 0 : 1];
  }
};

/// Moments by direct quadrature of H phi^sigma against phi^eta.
MomentTable pairing_moments_quadrature(const circle::QuadratureOptions& opts = {.abs_tol = 1e-12});
/// Moments reduced through quarter averages of H phi^sigma.
MomentTable pairing_moments_quarter_reduced(
    const circle::QuadratureOptions& opts = {.abs_tol = 1e-12});

/// E <F^H, G> via per-level prefix pairings times one-variable moments.
double expect_pairing_H(const HLiftedFunction& FH, const TossFunction& G, const MomentTable& mom);

struct WeakFormResult {
  double lhs = 0.0;       // E <F^H, G> via quadrature moments
  double rhs = 0.0;       // E <S0 F, G> via pure enumeration
  double c0 = 0.0;
  double residual = 0.0;  // |lhs - c0 * rhs|
};

/// The weak form: compares the Hilbert side against c0 times the shifted
/// side, the two computed through independent machinery.  Requires the mean
/// and root coefficient of f to vanish (apply reduce_tilde first).
WeakFormResult weak_form_check(const dyadic::HaarExpansion& f, const dyadic::HaarExpansion& g,
                               const circle::QuadratureOptions& opts = {.abs_tol = 1e-12});

}  // namespace dyadlab::toss
