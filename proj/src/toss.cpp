#include "dyadlab/toss.hpp"

#include <cmath>
#include <sstream>

namespace dyadlab::toss {

using dyadic::DyadicInterval;
using dyadic::HaarExpansion;

std::vector<int> interval_to_path(const DyadicInterval& I) {
  std::vector<int> path(I.depth);
  for (int j = 0; j < I.depth; ++j) {
    path[j] = ((I.position >> (I.depth - 1 - j)) & 1u) ? +1 : -1;
  }
  return path;
}

DyadicInterval path_to_interval(std::span<const int> path) {
  std::uint32_t pos = 0;
  for (int step : path) {
    if (step != 1 && step != -1) throw MalformedInputError("path entries must be +1 or -1");
    pos = 2 * pos + (step > 0 ? 1 : 0);
  }
  return {static_cast<int>(path.size()), pos};
}

TossFunction::TossFunction(int depth, int dim) : K_(depth), d_(dim) {
  if (depth < 0) throw MalformedInputError("depth must be >= 0");
  if (dim < 1) throw MalformedInputError("dimension must be positive");
  mean_.assign(d_, 0.0);
  root_.assign(d_, 0.0);
  levels_.resize(K_);
  for (int k = 0; k < K_; ++k) {
    std::size_t count = std::size_t{1} << (k + 1);
    levels_[k].value.assign(count * d_, 0.0);
    levels_[k].gen.resize(count);
    for (std::uint32_t pos = 0; pos < count; ++pos) {
      levels_[k].gen[pos] = (pos & 1u) ? +1 : -1;  // parity of the target interval
    }
  }
}

std::span<double> TossFunction::increment(int level, std::uint32_t position) {
  return {levels_.at(level).value.data() + std::size_t{position} * d_,
          static_cast<std::size_t>(d_)};
}

std::span<const double> TossFunction::increment(int level, std::uint32_t position) const {
  return {levels_.at(level).value.data() + std::size_t{position} * d_,
          static_cast<std::size_t>(d_)};
}

Sign TossFunction::generator(int level, std::uint32_t position) const {
  return levels_.at(level).gen.at(position) > 0 ? Sign::plus : Sign::minus;
}

void TossFunction::set_generator(int level, std::uint32_t position, Sign s) {
  levels_.at(level).gen.at(position) = s == Sign::plus ? +1 : -1;
}

void TossFunction::eval(std::span<const std::uint8_t> q, std::span<double> out) const {
  if (q.size() < state_size()) throw MalformedInputError("quarter state too short");
  for (int i = 0; i < d_; ++i) out[i] = mean_[i];
  double s0 = generator_sign(Sign::plus, q[0]);
  for (int i = 0; i < d_; ++i) out[i] += root_[i] * s0;
  std::uint32_t pos = s0 > 0 ? 1u : 0u;  // position at depth 1
  for (int k = 0; k < K_; ++k) {
    const Level& level = levels_[k];
    const double* v = level.value.data() + std::size_t{pos} * d_;
    int quarter = q[k + 1];
    Sign gen = level.gen[pos] > 0 ? Sign::plus : Sign::minus;
    double sg = generator_sign(gen, quarter);
    for (int i = 0; i < d_; ++i) out[i] += v[i] * sg;
    // The descent below the current interval always uses the toss of the
    // interval's own parity, regardless of how the generator tag was mapped.
    Sign parity = (pos & 1u) ? Sign::plus : Sign::minus;
    double sp = generator_sign(parity, quarter);
    pos = 2 * pos + (sp > 0 ? 1u : 0u);
  }
}

std::vector<double> TossFunction::eval(const QuarterState& s) const {
  std::vector<double> out(d_);
  eval(std::span<const std::uint8_t>(s.q.data(), s.q.size()), out);
  return out;
}

void decode_state(std::uint64_t index, std::span<std::uint8_t> q) {
  for (std::size_t j = 0; j < q.size(); ++j) {
    q[j] = static_cast<std::uint8_t>((index >> (2 * j)) & 3u);
  }
}

TossFunction lift(const HaarExpansion& e) {
  TossFunction F(e.truncation_depth(), e.dim());
  for (int i = 0; i < e.dim(); ++i) {
    F.mean_increment()[i] = e.mean()[i];
    F.root_increment()[i] = e.coeff(DyadicInterval::root())[i];
  }
  for (int k = 0; k < F.num_levels(); ++k) {
    int depth = k + 1;
    double w = dyadic::sqrt_pow2(depth);  // |J|^{-1/2}
    std::size_t count = std::size_t{1} << depth;
    for (std::uint32_t pos = 0; pos < count; ++pos) {
      auto c = e.coeff({depth, pos});
      auto v = F.increment(k, pos);
      for (int i = 0; i < e.dim(); ++i) v[i] = c[i] * w;
    }
  }
  return F;
}

namespace {

void check_budget(int depth, int budget) {
  if (depth > budget) {
    std::ostringstream msg;
    msg << "enumeration over 4^" << depth + 2 << " quarter states exceeds the 4^" << budget + 2
        << " budget";
    throw BudgetError(msg.str());
  }
}

}  // namespace

Distribution grid_distribution(const HaarExpansion& e) {
  Distribution dist;
  std::vector<double> values = dyadic::synthesize(e);
  const int d = e.dim();
  // Scale cell counts so both laws share the denominator 4^{K+2}.
  const std::uint64_t scale = std::uint64_t{1} << (e.truncation_depth() + 3);
  for (std::size_t c = 0; c < e.cell_count(); ++c) {
    std::vector<double> key(values.begin() + c * d, values.begin() + (c + 1) * d);
    dist[key] += scale;
  }
  return dist;
}

Distribution state_distribution(const TossFunction& f) {
  Distribution dist;
  std::vector<std::uint8_t> q(f.state_size());
  std::vector<double> value(f.dim());
  for (std::uint64_t s = 0; s < f.state_count(); ++s) {
    decode_state(s, q);
    f.eval(q, value);
    dist[value] += 1;
  }
  return dist;
}

double lp_norm_from_distribution(const Distribution& dist, std::uint64_t total,
                                 const SpaceDescriptor& space) {
  double p = space.p();
  double acc = 0.0;
  for (const auto& [value, count] : dist) {
    double r = space.vector_norm({value.data(), value.size()});
    acc += static_cast<double>(count) / static_cast<double>(total) * std::pow(r, p);
  }
  return std::pow(acc, 1.0 / p);
}

DistributionReport distribution_check(const HaarExpansion& e, int depth_budget) {
  check_budget(e.truncation_depth(), depth_budget);
  DistributionReport report;
  Distribution grid = grid_distribution(e);
  Distribution states = state_distribution(lift(e));
  report.distinct_grid = grid.size();
  report.distinct_state = states.size();
  report.equal = grid == states;
  if (!report.equal) {
    std::ostringstream msg;
    msg << "law mismatch: " << grid.size() << " grid atoms vs " << states.size()
        << " state atoms";
    for (const auto& [value, count] : grid) {
      auto it = states.find(value);
      if (it == states.end() || it->second != count) {
        msg << "; first differing value has grid count " << count;
        break;
      }
    }
    report.detail = msg.str();
  }
  return report;
}

double expect_pairing(const TossFunction& F, const TossFunction& G) {
  if (F.dim() != G.dim()) throw MalformedInputError("pairing requires equal dimensions");
  if (F.depth() != G.depth()) throw MalformedInputError("pairing requires equal depths");
  check_budget(F.depth(), kEnumerationDepthBudget);
  std::vector<std::uint8_t> q(F.state_size());
  std::vector<double> fv(F.dim()), gv(G.dim());
  // Kahan accumulation keeps the enumeration exact to working precision.
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t s = 0; s < F.state_count(); ++s) {
    decode_state(s, q);
    F.eval(q, fv);
    G.eval(q, gv);
    double term = 0.0;
    for (int i = 0; i < F.dim(); ++i) term += fv[i] * gv[i];
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(F.state_count());
}

TossFunction apply_S0_toss(const TossFunction& F) {
  TossFunction out(F.depth(), F.dim());
  // mean and root increments are annihilated; every level increment keeps its
  // prefix dependence, picks up the sign of its current signature, and swaps
  // to the opposite generator.
  for (int k = 0; k < F.num_levels(); ++k) {
    std::size_t count = std::size_t{1} << (k + 1);
    for (std::uint32_t pos = 0; pos < count; ++pos) {
      Sign s = F.generator(k, pos);
      double sign = s == Sign::plus ? 1.0 : -1.0;
      auto src = F.increment(k, pos);
      auto dst = out.increment(k, pos);
      for (int i = 0; i < F.dim(); ++i) dst[i] = sign * src[i];
      out.set_generator(k, pos, circle::opposite(s));
    }
  }
  return out;
}

HLiftedFunction apply_H_increments(const TossFunction& F) { return HLiftedFunction{F}; }

MomentTable pairing_moments_quadrature(const circle::QuadratureOptions& opts) {
  MomentTable t;
  t.m[0][0] = circle::pairing_moment(Sign::plus, Sign::plus, opts);
  t.m[0][1] = circle::pairing_moment(Sign::plus, Sign::minus, opts);
  t.m[1][0] = circle::pairing_moment(Sign::minus, Sign::plus, opts);
  t.m[1][1] = circle::pairing_moment(Sign::minus, Sign::minus, opts);
  return t;
}

MomentTable pairing_moments_quarter_reduced(const circle::QuadratureOptions& opts) {
  MomentTable t;
  auto hp = circle::project_quarters(
      circle::CircleFunction::named(circle::CircleFunction::Named::H_phi_plus), opts);
  auto hm = circle::project_quarters(
      circle::CircleFunction::named(circle::CircleFunction::Named::H_phi_minus), opts);
  for (int ei = 0; ei < 2; ++ei) {
    Sign eta = ei == 0 ? Sign::plus : Sign::minus;
    double accp = 0.0, accm = 0.0;
    for (int qtr = 0; qtr < 4; ++qtr) {
      accp += hp[qtr] * circle::quarter_sign(eta, qtr);
      accm += hm[qtr] * circle::quarter_sign(eta, qtr);
    }
    t.m[0][ei] = accp / 4.0;
    t.m[1][ei] = accm / 4.0;
  }
  return t;
}

double expect_pairing_H(const HLiftedFunction& FH, const TossFunction& G,
                        const MomentTable& mom) {
  const TossFunction& F = FH.base;
  if (F.dim() != G.dim()) throw MalformedInputError("pairing requires equal dimensions");
  if (F.depth() != G.depth()) throw MalformedInputError("pairing requires equal depths");
  // Increments at distinct levels integrate to zero against each other; at a
  // common level the prefix factor is exact and the theta_{k+1} factor is a
  // one-variable moment.  The mean increment of F^H is gone (H of constants).
  double acc = 0.0;
  {
    double dot = 0.0;
    for (int i = 0; i < F.dim(); ++i) dot += F.root_increment()[i] * G.root_increment()[i];
    acc += dot * mom(Sign::plus, Sign::plus);
  }
  for (int k = 0; k < F.num_levels(); ++k) {
    std::size_t count = std::size_t{1} << (k + 1);
    double prefix_weight = std::ldexp(1.0, -(k + 1));  // P(prefix reaches J)
    for (std::uint32_t pos = 0; pos < count; ++pos) {
      auto fv = F.increment(k, pos);
      auto gv = G.increment(k, pos);
      double dot = 0.0;
      for (int i = 0; i < F.dim(); ++i) dot += fv[i] * gv[i];
      if (dot == 0.0) continue;
      acc += prefix_weight * dot * mom(F.generator(k, pos), G.generator(k, pos));
    }
  }
  return acc;
}

WeakFormResult weak_form_check(const HaarExpansion& f, const HaarExpansion& g,
                               const circle::QuadratureOptions& opts) {
  if (!dyadic::is_reduced(f))
    throw PreconditionError("weak form requires a reduced input; apply reduce_tilde first");
  if (f.dim() != g.dim()) throw MalformedInputError("weak form requires equal dimensions");
  TossFunction F = lift(f);
  TossFunction G = lift(g);
  WeakFormResult r;
  MomentTable mom = pairing_moments_quadrature(opts);
  r.lhs = expect_pairing_H(apply_H_increments(F), G, mom);
  r.rhs = expect_pairing(apply_S0_toss(F), G);
  r.c0 = circle::c0_series(1e-12);
  r.residual = std::abs(r.lhs - r.c0 * r.rhs);
  return r;
}

}  // namespace dyadlab::toss
