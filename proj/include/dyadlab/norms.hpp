#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/spaces.hpp"

namespace dyadlab::norms {

enum class NamedOp { identity, S0, classical_shift, T_alpha };

NamedOp parse_op(const std::string& name);  // MalformedInputError on unknown names

/// Dense matrix of an operator on stacked grid-cell values at one truncation
/// depth.  Vector-valued spaces act block-diagonally with the same scalar
/// block per component, so only the scalar block is stored.
struct OperatorMatrix {
  Eigen::MatrixXd m;
  std::string name;
  int depth = 0;
};

/// Columns are the images of grid-cell indicator basis vectors.
/// T_alpha requires its sign table (node-indexed, size 2^{K+1}).
OperatorMatrix materialize(NamedOp op, int depth,
                           const std::vector<int>* alpha = nullptr);

/// Discrete circle Hilbert transform on an N-point uniform grid: the Fourier
/// multiplier -i sgn(n) with the n = 0 and Nyquist modes annihilated.  N must
/// be a power of two.
Eigen::MatrixXd hilbert_matrix(int grid_size);

/// Largest singular value via symmetric power iteration on m^T m.
double norm_2_exact(const Eigen::MatrixXd& m, double rel_tol = 1e-12, int max_iters = 50000);

struct NormEstimateOptions {
  int restarts = 10;
  int iters = 600;
  double tol = 1e-10;
  std::uint64_t seed = 1;
};

struct PowerIterResult {
  double lower_bound = 0.0;
  Eigen::MatrixXd maximizer;          // cells x dim, unit L^p(l_q) norm
  int iterations = 0;                 // iterations of the best restart
  bool converged = false;             // tolerance reached (vs iteration cap)
  std::vector<double> objective_trace;  // best restart, non-decreasing
};

/// Mixed norm ||X||_{L^p(l_q)} of a cells x dim iterate under equal cell
/// weights 1/cells.
double mixed_norm(const Eigen::MatrixXd& x, const SpaceDescriptor& space);

/// Nonlinear power method: alternating duality-map ascent on
/// ||A X||_{L^p(l_q)}.  The objective never decreases, so the best value over
/// restarts is a certified lower bound on the operator norm.
PowerIterResult norm_p_lower(const Eigen::MatrixXd& a, const SpaceDescriptor& space,
                             const NormEstimateOptions& opts = {});

/// Lower bound on the L^p norm of the circle Hilbert transform (componentwise
/// on d channels when the space is vector valued).
double estimate_hp(const SpaceDescriptor& space, int grid_size,
                   const NormEstimateOptions& opts = {});

/// Lower bound on the L^p norm of the dyadic Hilbert transform at depth K.
double estimate_sp(const SpaceDescriptor& space, int depth, const NormEstimateOptions& opts = {});

/// Lower bound on the martingale-transform supremum at depth K: max over
/// sign patterns alpha of the T_alpha estimate.  Exhaustive when
/// 2^{#intervals} <= pattern_budget, otherwise that many seeded random
/// patterns; the all-plus pattern is always included.
double estimate_mp_lower(const SpaceDescriptor& space, int depth, std::uint64_t pattern_budget,
                         const NormEstimateOptions& opts = {});

struct ComparisonCase {
  SpaceDescriptor space;
  int depth = 5;       // truncation for the dyadic side
  int grid_size = 512; // circle grid for the Hilbert side
};

struct ComparisonRow {
  double p = 0.0;
  std::string space_name;
  int depth = 0;
  int grid_size = 0;
  double s_lower = 0.0;
  double h_lower = 0.0;
  double ratio = 0.0;
  double c0 = 0.0;
  double inv_c0 = 0.0;
  double envelope = 0.0;  // (1/c0) * h_lower * slack
  bool violated = false;
};

/// Ratio study s_p / h_p against the 1/c0 envelope.  Only the proven
/// direction is asserted, inflated by the declared estimator slack;
/// violations are flagged, never dropped.
std::vector<ComparisonRow> comparison_experiment(const std::vector<ComparisonCase>& cases,
                                                 const NormEstimateOptions& opts = {},
                                                 double slack = 1.10);

std::string space_name(const SpaceDescriptor& space);

}  // namespace dyadlab::norms
