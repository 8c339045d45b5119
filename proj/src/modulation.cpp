#include "dyadlab/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace dyadlab::modulation {

using circle::kPi;

ModulationSchedule build_schedule(std::span<const std::int64_t> N) {
  ModulationSchedule s;
  s.N.assign(N.begin(), N.end());
  s.n.resize(N.size() + 1);
  s.n[0] = 1;
  for (std::size_t k = 0; k < N.size(); ++k) {
    if (N[k] < 1) throw MalformedInputError("spectrum bounds must be >= 1");
    std::int64_t twice = 0, next = 0;
    if (__builtin_mul_overflow(std::int64_t{2}, s.n[k], &twice) ||
        __builtin_mul_overflow(twice, N[k], &next)) {
      throw BudgetError("modulation schedule overflows 64-bit integers; reduce depth or order");
    }
    s.n[k + 1] = next;
  }
  return s;
}

void MultiTermTable::eval(std::span<const double> thetas,
                          std::span<std::complex<double>> out) const {
  for (int i = 0; i < dim; ++i) out[i] = {0.0, 0.0};
  for (const Term& t : terms) {
    double phase = 0.0;
    for (int j = 0; j < num_vars; ++j) phase += t.l[j] * thetas[j];
    std::complex<double> e = std::polar(1.0, phase);
    for (int i = 0; i < dim; ++i) out[i] += t.coeff[i] * e;
  }
}

void PieceSet::eval(std::span<const double> thetas, std::span<std::complex<double>> out) const {
  for (int i = 0; i < dim; ++i) out[i] = {0.0, 0.0};
  std::vector<std::complex<double>> buf(dim);
  for (const IncrementPiece& p : pieces) {
    p.table.eval(thetas, buf);
    for (int i = 0; i < dim; ++i) out[i] += buf[i];
  }
}

namespace {

using Factor = std::vector<std::pair<int, std::complex<double>>>;

Factor phi_factor(Sign sigma, int order) {
  // signcos alternates (-1)^j over the odd harmonics, signsin does not.
  Factor f;
  for (int j = 0;; ++j) {
    int l = 2 * j + 1;
    if (l > order) break;
    if (sigma == Sign::plus) {
      double a = (2.0 / kPi) * (j % 2 == 0 ? 1.0 : -1.0) / l;
      f.push_back({l, {a, 0.0}});
      f.push_back({-l, {a, 0.0}});
    } else {
      double a = (2.0 / kPi) / l;
      f.push_back({l, {0.0, -a}});
      f.push_back({-l, {0.0, a}});
    }
  }
  return f;
}

/// (1 + s phi^tau)/2 -- the indicator of the half-circle where the toss
/// phi^tau equals s.
Factor indicator_factor(Sign tau, int s, int order) {
  Factor f = phi_factor(tau, order);
  for (auto& [l, c] : f) c *= 0.5 * s;
  f.push_back({0, {0.5, 0.0}});
  return f;
}

Factor hilbert_factor(const Factor& f) {
  Factor out;
  const std::complex<double> minus_i{0.0, -1.0};
  for (const auto& [l, c] : f) {
    if (l == 0) continue;
    out.push_back({l, minus_i * (l > 0 ? 1.0 : -1.0) * c});
  }
  return out;
}

MultiTermTable tensor_extend(const MultiTermTable& base, const Factor& factor) {
  MultiTermTable out;
  out.num_vars = base.num_vars + 1;
  out.dim = base.dim;
  out.terms.reserve(base.terms.size() * factor.size());
  for (const auto& t : base.terms) {
    for (const auto& [l, c] : factor) {
      MultiTermTable::Term nt;
      nt.l = t.l;
      nt.l.push_back(l);
      nt.coeff.resize(base.dim);
      for (int i = 0; i < base.dim; ++i) nt.coeff[i] = t.coeff[i] * c;
      out.terms.push_back(std::move(nt));
    }
  }
  return out;
}

MultiTermTable seed_table(std::span<const double> value) {
  MultiTermTable t;
  t.num_vars = 0;
  t.dim = static_cast<int>(value.size());
  MultiTermTable::Term term;
  term.coeff.assign(value.begin(), value.end());
  t.terms.push_back(std::move(term));
  return t;
}

bool is_zero(std::span<const double> v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

}  // namespace

PieceSet truncate_lift(const toss::TossFunction& F, int order, bool apply_hilbert) {
  if (order < 1) throw MalformedInputError("truncation order must be >= 1");
  PieceSet set;
  set.num_vars = F.depth() + 1;
  set.dim = F.dim();

  if (!apply_hilbert && !is_zero(F.mean_increment())) {
    set.pieces.push_back({-2, seed_table(F.mean_increment())});
  }
  if (!is_zero(F.root_increment())) {
    Factor last = phi_factor(Sign::plus, order);
    if (apply_hilbert) last = hilbert_factor(last);
    set.pieces.push_back({-1, tensor_extend(seed_table(F.root_increment()), last)});
  }
  for (int k = 0; k < F.num_levels(); ++k) {
    std::size_t count = std::size_t{1} << (k + 1);
    for (std::uint32_t pos = 0; pos < count; ++pos) {
      auto v = F.increment(k, pos);
      if (is_zero(v)) continue;
      // Path constraints: step j needs toss phi^{tau_j}(theta_j) = s_j, where
      // tau_0 is the plus signature and tau_j afterwards is the parity of the
      // interval being subdivided, i.e. the previous step.
      dyadic::DyadicInterval J{k + 1, pos};
      std::vector<int> path = toss::interval_to_path(J);
      MultiTermTable table = seed_table(v);
      Sign tau = Sign::plus;
      for (int j = 0; j <= k; ++j) {
        table = tensor_extend(table, indicator_factor(tau, path[j], order));
        tau = path[j] > 0 ? Sign::plus : Sign::minus;
      }
      Factor last = phi_factor(F.generator(k, pos), order);
      if (apply_hilbert) last = hilbert_factor(last);
      table = tensor_extend(table, last);
      set.pieces.push_back({k, std::move(table)});
    }
  }
  return set;
}

MultiTermTable apply_H_to_last(const MultiTermTable& table) {
  MultiTermTable out;
  out.num_vars = table.num_vars;
  out.dim = table.dim;
  const std::complex<double> minus_i{0.0, -1.0};
  for (const auto& t : table.terms) {
    int l = t.l.back();
    if (l == 0) continue;
    MultiTermTable::Term nt = t;
    std::complex<double> m = minus_i * (l > 0 ? 1.0 : -1.0);
    for (auto& c : nt.coeff) c *= m;
    out.terms.push_back(std::move(nt));
  }
  return out;
}

std::vector<std::int64_t> spectrum_bounds(const toss::TossFunction& F, int order) {
  PieceSet set = truncate_lift(F, order);
  // One bound per recursion step: n_{k+1} = 2 n_k N_k needs N_0..N_{K-1}.
  std::size_t needed = F.depth() > 0 ? static_cast<std::size_t>(F.depth()) : 0;
  std::vector<std::int64_t> max_l(std::max<std::size_t>(needed, 1), 0);
  for (const auto& piece : set.pieces) {
    for (const auto& term : piece.table.terms) {
      for (std::size_t j = 0; j < term.l.size() && j < max_l.size(); ++j) {
        max_l[j] = std::max<std::int64_t>(max_l[j], std::abs(term.l[j]));
      }
    }
  }
  std::vector<std::int64_t> N(max_l.size());
  std::int64_t cum = 0;
  for (std::size_t k = 0; k < max_l.size(); ++k) {
    cum += max_l[k];
    N[k] = std::max<std::int64_t>(cum, 1);
  }
  return N;
}

void PsiPolynomial::eval(double psi, std::span<std::complex<double>> out) const {
  for (int i = 0; i < dim; ++i) out[i] = {0.0, 0.0};
  for (const auto& [freq, coeff] : terms) {
    std::complex<double> e = std::polar(1.0, static_cast<double>(freq) * psi);
    for (int i = 0; i < dim; ++i) out[i] += coeff[i] * e;
  }
}

PsiPolynomial modulate(const MultiTermTable& table, std::span<const std::int64_t> n,
                       std::span<const double> thetas, bool enforce_dominance) {
  if (static_cast<int>(n.size()) < table.num_vars)
    throw MalformedInputError("schedule shorter than the variable count");
  if (static_cast<int>(thetas.size()) < table.num_vars)
    throw MalformedInputError("theta vector shorter than the variable count");
  std::map<std::int64_t, std::vector<std::complex<double>>> acc;
  for (const auto& t : table.terms) {
    std::int64_t freq = 0;
    for (int j = 0; j < table.num_vars; ++j) {
      std::int64_t contrib = 0, next = 0;
      if (__builtin_mul_overflow(std::int64_t{t.l[j]}, n[j], &contrib) ||
          __builtin_add_overflow(freq, contrib, &next)) {
        throw BudgetError("modulated frequency overflows 64-bit integers");
      }
      freq = next;
    }
    if (enforce_dominance && table.num_vars > 0) {
      int last = table.num_vars - 1;
      if (t.l[last] != 0) {
        std::int64_t high = t.l[last] * n[last];
        std::int64_t low = freq - high;
        if (std::llabs(low) >= std::llabs(high)) {
          std::ostringstream msg;
          msg << "schedule too small: |" << low << "| >= |" << high
              << "| so the top frequency no longer fixes the sign";
          throw DominanceError(msg.str());
        }
      }
    }
    double phase = 0.0;
    for (int j = 0; j < table.num_vars; ++j) phase += t.l[j] * thetas[j];
    std::complex<double> e = std::polar(1.0, phase);
    auto [it, inserted] = acc.try_emplace(freq, table.dim, std::complex<double>{0.0, 0.0});
    for (int i = 0; i < table.dim; ++i) it->second[i] += t.coeff[i] * e;
  }
  PsiPolynomial p;
  p.dim = table.dim;
  p.terms.assign(acc.begin(), acc.end());
  return p;
}

PsiPolynomial hilbert_in_psi(const PsiPolynomial& p) {
  PsiPolynomial out;
  out.dim = p.dim;
  const std::complex<double> minus_i{0.0, -1.0};
  for (const auto& [freq, coeff] : p.terms) {
    if (freq == 0) continue;
    std::vector<std::complex<double>> c(coeff.size());
    std::complex<double> m = minus_i * (freq > 0 ? 1.0 : -1.0);
    for (std::size_t i = 0; i < coeff.size(); ++i) c[i] = m * coeff[i];
    out.terms.push_back({freq, std::move(c)});
  }
  return out;
}

ModulationIdentityReport verify_modulation_identity(const dyadic::HaarExpansion& f, int order,
                                                    std::span<const std::vector<double>> thetas,
                                                    std::span<const double> psis) {
  toss::TossFunction F = toss::lift(f);
  ModulationSchedule schedule = build_schedule(spectrum_bounds(F, order));
  return verify_modulation_identity(f, order, schedule, thetas, psis);
}

ModulationIdentityReport verify_modulation_identity(const dyadic::HaarExpansion& f, int order,
                                                    const ModulationSchedule& schedule,
                                                    std::span<const std::vector<double>> thetas,
                                                    std::span<const double> psis) {
  toss::TossFunction F = toss::lift(f);
  PieceSet set = truncate_lift(F, order);
  ModulationIdentityReport report;
  std::vector<std::complex<double>> lv(F.dim()), rv(F.dim());
  for (const IncrementPiece& piece : set.pieces) {
    if (piece.level == -2) continue;  // constants carry no generator
    MultiTermTable h_image = apply_H_to_last(piece.table);
    for (const auto& theta : thetas) {
      PsiPolynomial lhs = hilbert_in_psi(modulate(piece.table, schedule.n, theta));
      PsiPolynomial rhs = modulate(h_image, schedule.n, theta);
      for (double psi : psis) {
        lhs.eval(psi, lv);
        rhs.eval(psi, rv);
        for (int i = 0; i < F.dim(); ++i) {
          report.max_residual = std::max(report.max_residual, std::abs(lv[i] - rv[i]));
        }
      }
    }
    report.terms_checked += static_cast<std::int64_t>(piece.table.terms.size());
  }
  return report;
}

namespace {

/// Iterate the tensor grid {2 pi j / L}^V and average fn over it.
template <typename Fn>
double tensor_grid_average(int num_vars, int grid, Fn&& fn) {
  std::vector<double> theta(num_vars, 0.0);
  std::vector<int> idx(num_vars, 0);
  double sum = 0.0;
  std::uint64_t points = 1;
  for (int v = 0; v < num_vars; ++v) points *= static_cast<std::uint64_t>(grid);
  for (std::uint64_t flat = 0; flat < points; ++flat) {
    std::uint64_t rest = flat;
    for (int v = 0; v < num_vars; ++v) {
      idx[v] = static_cast<int>(rest % grid);
      rest /= grid;
      theta[v] = -kPi + 2.0 * kPi * idx[v] / grid;
    }
    sum += fn(std::span<const double>(theta.data(), theta.size()));
  }
  return sum / static_cast<double>(points);
}

}  // namespace

double modulated_pairing(const PieceSet& A, const PieceSet& B, std::span<const std::int64_t> n,
                         double psi, int grid_per_var) {
  int vars = std::max(A.num_vars, B.num_vars);
  if (static_cast<int>(n.size()) < vars)
    throw MalformedInputError("schedule shorter than the variable count");
  std::vector<std::complex<double>> av(A.dim), bv(B.dim);
  std::vector<double> shifted(vars);
  return tensor_grid_average(vars, grid_per_var, [&](std::span<const double> theta) {
    for (int v = 0; v < vars; ++v) shifted[v] = theta[v] + static_cast<double>(n[v]) * psi;
    A.eval(shifted, av);
    B.eval(shifted, bv);
    std::complex<double> dot{0.0, 0.0};
    for (int i = 0; i < A.dim; ++i) dot += av[i] * bv[i];
    return dot.real();
  });
}

double psi_averaged_pairing(const PieceSet& A, const PieceSet& B,
                            std::span<const std::int64_t> n, int grid_per_var) {
  int vars = std::max(A.num_vars, B.num_vars);
  if (static_cast<int>(n.size()) < vars)
    throw MalformedInputError("schedule shorter than the variable count");
  // At each theta grid point, collect the psi-frequency representation of
  // both factors and keep only opposite-frequency products: that is the
  // exact psi average.
  return tensor_grid_average(vars, grid_per_var, [&](std::span<const double> theta) {
    std::map<std::int64_t, std::vector<std::complex<double>>> fa, fb;
    auto collect = [&](const PieceSet& S,
                       std::map<std::int64_t, std::vector<std::complex<double>>>& into) {
      for (const IncrementPiece& piece : S.pieces) {
        for (const auto& term : piece.table.terms) {
          std::int64_t freq = 0;
          double phase = 0.0;
          for (int j = 0; j < piece.table.num_vars; ++j) {
            freq += term.l[j] * n[j];
            phase += term.l[j] * theta[j];
          }
          std::complex<double> e = std::polar(1.0, phase);
          auto [it, inserted] = into.try_emplace(freq, S.dim, std::complex<double>{0.0, 0.0});
          for (int i = 0; i < S.dim; ++i) it->second[i] += term.coeff[i] * e;
        }
      }
    };
    collect(A, fa);
    collect(B, fb);
    std::complex<double> acc{0.0, 0.0};
    for (const auto& [freq, ca] : fa) {
      auto it = fb.find(-freq);
      if (it == fb.end()) continue;
      for (int i = 0; i < A.dim; ++i) acc += ca[i] * it->second[i];
    }
    return acc.real();
  });
}

}  // namespace dyadlab::modulation
