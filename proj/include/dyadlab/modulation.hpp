#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "dyadlab/toss.hpp"

namespace dyadlab::modulation {

using circle::Sign;

/// The paired frequency sequences: n_0 = 1 and n_{k+1} = 2 n_k N_k.
struct ModulationSchedule {
  std::vector<std::int64_t> N;
  std::vector<std::int64_t> n;  // size N.size() + 1
};

/// Exact recursion with overflow-checked integer arithmetic; the schedule
/// grows doubly fast, so depth and orders must stay small.
ModulationSchedule build_schedule(std::span<const std::int64_t> N);

/// Trig polynomial in variables theta_0..theta_{V-1} with coefficient
/// vectors in C^d.
struct MultiTermTable {
  struct Term {
    std::vector<std::int32_t> l;                // one frequency per variable
    std::vector<std::complex<double>> coeff;    // dim entries
  };
  int num_vars = 0;
  int dim = 1;
  std::vector<Term> terms;

  void eval(std::span<const double> thetas, std::span<std::complex<double>> out) const;
};

/// One lifted increment expanded in truncated Fourier series.
/// level -2 = the mean (no variables), level -1 = the root increment
/// (variable theta_0), level k >= 0 = variables theta_0..theta_{k+1}.
struct IncrementPiece {
  int level = 0;
  MultiTermTable table;
};

/// The whole lift in truncated-series form.
struct PieceSet {
  int num_vars = 0;  // K + 1 variables theta_0..theta_K
  int dim = 1;
  std::vector<IncrementPiece> pieces;

  void eval(std::span<const double> thetas, std::span<std::complex<double>> out) const;
};

/// Expand every increment of F with each quarter-constant factor replaced by
/// its order-M Fourier truncation.  With apply_hilbert, the last factor of
/// every increment carries the multiplier image instead (the mean drops).
PieceSet truncate_lift(const toss::TossFunction& F, int order, bool apply_hilbert = false);

/// Per-term Hilbert multiplier in the last variable of an increment table.
MultiTermTable apply_H_to_last(const MultiTermTable& table);

/// Minimal admissible cumulative spectrum bounds for the truncation:
/// N_k = sum_{j <= k} max |l_j| over all stored terms, floored at 1.
std::vector<std::int64_t> spectrum_bounds(const toss::TossFunction& F, int order);

/// Single-variable trig polynomial in psi with integer frequencies.
struct PsiPolynomial {
  int dim = 1;
  std::vector<std::pair<std::int64_t, std::vector<std::complex<double>>>> terms;

  void eval(double psi, std::span<std::complex<double>> out) const;
};

/// Substitute theta_j + n_j psi into a table at fixed thetas.  Every term
/// lands on frequency sum_j l_j n_j; for increment tables the dominance
/// inequality |sum_{j<last} l_j n_j| < |l_last n_last| is enforced and its
/// violation raises DominanceError (schedule too small).
PsiPolynomial modulate(const MultiTermTable& table, std::span<const std::int64_t> n,
                       std::span<const double> thetas, bool enforce_dominance = true);

/// Multiplier -i sgn(frequency) per term; frequency zero is annihilated.
PsiPolynomial hilbert_in_psi(const PsiPolynomial& p);

struct ModulationIdentityReport {
  double max_residual = 0.0;
  std::int64_t terms_checked = 0;
};

/// For every increment of f: build H_psi(modulated increment) and the
/// modulated image of the increment with the Hilbert transform applied to the
/// last factor, then compare on the probe (theta, psi) set.  Exact on the
/// truncated objects once dominance holds.
ModulationIdentityReport verify_modulation_identity(const dyadic::HaarExpansion& f, int order,
                                                    std::span<const std::vector<double>> thetas,
                                                    std::span<const double> psis);
ModulationIdentityReport verify_modulation_identity(const dyadic::HaarExpansion& f, int order,
                                                    const ModulationSchedule& schedule,
                                                    std::span<const std::vector<double>> thetas,
                                                    std::span<const double> psis);

/// E^theta < A(theta + n psi), B(theta + n psi) > at fixed psi by exact
/// tensor-grid quadrature (grid_per_var points per variable, enough for the
/// truncated degrees).
double modulated_pairing(const PieceSet& A, const PieceSet& B, std::span<const std::int64_t> n,
                         double psi, int grid_per_var);

/// E^psi E^theta of the modulated pairing, with the psi average carried out
/// exactly on the frequency representation.
double psi_averaged_pairing(const PieceSet& A, const PieceSet& B,
                            std::span<const std::int64_t> n, int grid_per_var);

}  // namespace dyadlab::modulation
