#include "dyadlab/norms.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "dyadlab/circle.hpp"

namespace dyadlab::norms {

using dyadic::HaarExpansion;

NamedOp parse_op(const std::string& name) {
  if (name == "identity") return NamedOp::identity;
  if (name == "s0" || name == "S0") return NamedOp::S0;
  if (name == "classical-shift" || name == "classical_shift") return NamedOp::classical_shift;
  if (name == "t-alpha" || name == "t_alpha") return NamedOp::T_alpha;
  throw MalformedInputError("unknown operator name: " + name);
}

OperatorMatrix materialize(NamedOp op, int depth, const std::vector<int>* alpha) {
  const std::size_t n = std::size_t{1} << (depth + 1);
  OperatorMatrix out;
  out.depth = depth;
  out.m = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> basis(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    basis.assign(n, 0.0);
    basis[j] = 1.0;
    HaarExpansion e = dyadic::analyze(basis, 1);
    HaarExpansion image = [&] {
      switch (op) {
        case NamedOp::identity:
          out.name = "identity";
          return e;
        case NamedOp::S0:
          out.name = "s0";
          return dyadic::apply_S0(e);
        case NamedOp::classical_shift:
          out.name = "classical-shift";
          return dyadic::apply_classical_shift(e);
        case NamedOp::T_alpha:
          out.name = "t-alpha";
          if (alpha == nullptr)
            throw MalformedInputError("t-alpha materialization needs a sign table");
          return dyadic::apply_Talpha(*alpha, e);
      }
      throw MalformedInputError("unknown operator");
    }();
    std::vector<double> col = dyadic::synthesize(image);
    for (std::size_t i = 0; i < n; ++i) out.m(i, j) = col[i];
  }
  return out;
}

Eigen::MatrixXd hilbert_matrix(int grid_size) {
  if (grid_size < 2 || !std::has_single_bit(static_cast<unsigned>(grid_size)))
    throw MalformedInputError("grid size must be a power of two >= 2");
  const int n = grid_size;
  // Convolution kernel of the multiplier -i sgn over frequencies |k| < n/2:
  // t_m = (2/n) sum_{k=1}^{n/2-1} sin(2 pi k m / n), via the Dirichlet form.
  std::vector<double> t(n, 0.0);
  const int top = n / 2 - 1;
  for (int m = 1; m < n; ++m) {
    double a = 2.0 * circle::kPi * m / n;
    double s = std::sin(a / 2.0);
    t[m] = (2.0 / n) * std::sin(top * a / 2.0) * std::sin((top + 1) * a / 2.0) / s;
  }
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) h(i, j) = t[(i - j + n) % n];
  }
  return h;
}

double norm_2_exact(const Eigen::MatrixXd& m, double rel_tol, int max_iters) {
  const Eigen::Index n = m.cols();
  std::mt19937_64 rng(0x5eed2u);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    double norm = w.norm();
    if (norm == 0.0) return 0.0;
    double next = v.dot(w);
    w /= norm;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::max(next, 1e-300)) {
      return std::sqrt(std::max(next, 0.0));
    }
    lambda = next;
    v = w;
  }
  throw AccuracyError("norm_2_exact power iteration did not converge", lambda);
}

double mixed_norm(const Eigen::MatrixXd& x, const SpaceDescriptor& space) {
  const double p = space.p();
  const double q = space.q();
  const double w = 1.0 / static_cast<double>(x.rows());
  double acc = 0.0;
  for (Eigen::Index c = 0; c < x.rows(); ++c) {
    double r = space.dim() == 1 ? std::abs(x(c, 0))
                                : std::pow(x.row(c).array().abs().pow(q).sum(), 1.0 / q);
    acc += w * std::pow(r, p);
  }
  return std::pow(acc, 1.0 / p);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Norming element of u in L^p(l_q): the duality map through |.|^{q-1}
/// componentwise and the fiber norm to the power p - q, normalized in the
/// dual mixed norm.
Eigen::MatrixXd duality_map(const Eigen::MatrixXd& u, const SpaceDescriptor& space) {
  const double q = space.dim() == 1 ? 2.0 : space.q();
  const double p = space.p();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(u.rows(), u.cols());
  for (Eigen::Index c = 0; c < u.rows(); ++c) {
    double r = space.dim() == 1 ? std::abs(u(c, 0))
                                : std::pow(u.row(c).array().abs().pow(q).sum(), 1.0 / q);
    if (r == 0.0) continue;
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
      double a = u(c, i);
      if (a == 0.0) continue;
      double mag = std::pow(r, p - q) * std::pow(std::abs(a), q - 1.0);
      v(c, i) = a > 0 ? mag : -mag;
    }
  }
  double norm = mixed_norm(v, space.dual());
  if (norm > 0.0) v /= norm;
  return v;
}

void check_finite(const Eigen::MatrixXd& x, const char* where) {
  if (!x.allFinite()) throw NumericalError(std::string("non-finite values in ") + where);
}

}  // namespace

PowerIterResult norm_p_lower(const Eigen::MatrixXd& a, const SpaceDescriptor& space,
                             const NormEstimateOptions& opts) {
  const Eigen::Index cells = a.cols();
  const int d = space.dim();
  const SpaceDescriptor dual = space.dual();
  const Eigen::MatrixXd at = a.transpose();

  // Two structured starts ahead of the seeded random ones: the top singular
  // vector of the p = 2 problem, and a random sign pattern.
  Eigen::VectorXd top = Eigen::VectorXd::Ones(cells);
  {
    std::mt19937_64 rng(splitmix64(opts.seed));
    std::normal_distribution<double> gauss;
    for (Eigen::Index i = 0; i < cells; ++i) top[i] = gauss(rng);
    top.normalize();
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd w = at * (a * top);
      double n = w.norm();
      if (n == 0.0) break;
      top = w / n;
    }
  }

  PowerIterResult best;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Eigen::MatrixXd x(cells, d);
    std::mt19937_64 rng(splitmix64(opts.seed + 0x9e37ull * (r + 1)));
    if (r == 0) {
      for (int i = 0; i < d; ++i) x.col(i) = top;
    } else if (r == 1) {
      std::uniform_int_distribution<int> coin(0, 1);
      for (Eigen::Index c = 0; c < cells; ++c)
        for (int i = 0; i < d; ++i) x(c, i) = coin(rng) ? 1.0 : -1.0;
    } else {
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      for (Eigen::Index c = 0; c < cells; ++c)
        for (int i = 0; i < d; ++i) x(c, i) = unif(rng);
    }
    double n0 = mixed_norm(x, space);
    if (n0 == 0.0) continue;
    x /= n0;

    PowerIterResult cur;
    double prev = 0.0;
    for (int it = 0; it < opts.iters; ++it) {
      Eigen::MatrixXd u = a * x;
      check_finite(u, "power iteration image");
      double obj = mixed_norm(u, space);
      cur.objective_trace.push_back(obj);
      cur.iterations = it + 1;
      if (obj < prev - 1e-12 * std::max(1.0, prev))
        throw InternalError("power iteration objective decreased");
      if (obj == 0.0) break;
      if (it > 0 && obj - prev < opts.tol) {
        cur.converged = true;
        prev = obj;
        break;
      }
      prev = obj;
      Eigen::MatrixXd v = duality_map(u, space);
      Eigen::MatrixXd z = at * v;
      check_finite(z, "adjoint image");
      Eigen::MatrixXd next = duality_map(z, dual);
      double nn = mixed_norm(next, space);
      if (nn == 0.0) break;
      x = next / nn;
    }
    cur.lower_bound = prev;
    cur.maximizer = x;
    if (cur.lower_bound > best.lower_bound) best = std::move(cur);
  }
  return best;
}

double estimate_hp(const SpaceDescriptor& space, int grid_size, const NormEstimateOptions& opts) {
  Eigen::MatrixXd h = hilbert_matrix(grid_size);
  return norm_p_lower(h, space, opts).lower_bound;
}

double estimate_sp(const SpaceDescriptor& space, int depth, const NormEstimateOptions& opts) {
  OperatorMatrix s0 = materialize(NamedOp::S0, depth);
  return norm_p_lower(s0.m, space, opts).lower_bound;
}

double estimate_mp_lower(const SpaceDescriptor& space, int depth, std::uint64_t pattern_budget,
                         const NormEstimateOptions& opts) {
  const std::size_t intervals = (std::size_t{1} << (depth + 1)) - 1;
  const std::size_t table = intervals + 1;  // node ids 1..2^{K+1}-1
  double best = 0.0;
  auto run_pattern = [&](const std::vector<int>& alpha) {
    OperatorMatrix t = materialize(NamedOp::T_alpha, depth, &alpha);
    best = std::max(best, norm_p_lower(t.m, space, opts).lower_bound);
  };

  std::vector<int> alpha(table, 1);
  run_pattern(alpha);  // the all-plus pattern is always part of the search

  bool exhaustive = intervals < 63 && (std::uint64_t{1} << intervals) <= pattern_budget;
  if (exhaustive) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << intervals); ++mask) {
      for (std::size_t b = 0; b < intervals; ++b)
        alpha[b + 1] = (mask >> b) & 1u ? -1 : 1;
      run_pattern(alpha);
    }
  } else {
    std::mt19937_64 rng(splitmix64(opts.seed ^ 0xa1fa));
    std::uniform_int_distribution<int> coin(0, 1);
    for (std::uint64_t s = 1; s < pattern_budget; ++s) {
      for (std::size_t b = 1; b <= intervals; ++b) alpha[b] = coin(rng) ? 1 : -1;
      run_pattern(alpha);
    }
  }
  return best;
}

std::string space_name(const SpaceDescriptor& space) {
  if (space.is_scalar()) return "scalar";
  std::ostringstream s;
  s << "l" << space.q() << "x" << space.dim();
  return s.str();
}

std::vector<ComparisonRow> comparison_experiment(const std::vector<ComparisonCase>& cases,
                                                 const NormEstimateOptions& opts, double slack) {
  const double c0 = circle::c0_series(1e-12);
  std::vector<ComparisonRow> rows;
  rows.reserve(cases.size());
  for (const ComparisonCase& cs : cases) {
    ComparisonRow row;
    row.p = cs.space.p();
    row.space_name = space_name(cs.space);
    row.depth = cs.depth;
    row.grid_size = cs.grid_size;
    row.s_lower = estimate_sp(cs.space, cs.depth, opts);
    row.h_lower = estimate_hp(cs.space, cs.grid_size, opts);
    row.ratio = row.s_lower / row.h_lower;
    row.c0 = c0;
    row.inv_c0 = 1.0 / c0;
    row.envelope = row.inv_c0 * row.h_lower * slack;
    row.violated = row.s_lower > row.envelope;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dyadlab::norms
