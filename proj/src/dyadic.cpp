#include "dyadlab/dyadic.hpp"

#include <bit>
#include <cmath>

namespace dyadlab::dyadic {

double sqrt_pow2(int k) {
  if ((k & 1) == 0) return std::ldexp(1.0, k / 2);
  return std::ldexp(std::sqrt(2.0), (k - 1) / 2);
}

double DyadicInterval::length() const { return std::ldexp(1.0, -depth); }

double DyadicInterval::left() const { return static_cast<double>(position) * length(); }

double DyadicInterval::mid() const { return left() + 0.5 * length(); }

bool DyadicInterval::contains(double x) const { return x >= left() && x < left() + length(); }

DyadicInterval DyadicInterval::parent() const {
  if (depth < 1) throw MalformedInputError("root interval has no parent");
  return {depth - 1, position / 2};
}

DyadicInterval DyadicInterval::sibling() const {
  if (depth < 1) throw MalformedInputError("root interval has no sibling");
  return {depth, position ^ 1u};
}

DyadicInterval DyadicInterval::from_node_id(std::uint32_t id) {
  if (id == 0) throw MalformedInputError("node id 0 is not a dyadic interval");
  int depth = std::bit_width(id) - 1;
  return {depth, id - (std::uint32_t{1} << depth)};
}

double haar_eval(const DyadicInterval& I, double x) {
  if (!I.contains(x)) return 0.0;
  double w = sqrt_pow2(I.depth);  // |I|^{-1/2}
  return x < I.mid() ? -w : w;
}

HaarExpansion::HaarExpansion(int truncation_depth, int dim) : K_(truncation_depth), d_(dim) {
  if (truncation_depth < 0) throw MalformedInputError("truncation depth must be >= 0");
  if (dim < 1) throw MalformedInputError("dimension must be positive");
  mean_.assign(d_, 0.0);
  coeff_.assign(cell_count() * static_cast<std::size_t>(d_), 0.0);
}

void HaarExpansion::check_id(std::uint32_t node_id) const {
  if (node_id < 1 || node_id >= cell_count())
    throw MalformedInputError("interval outside the truncated table");
}

std::span<double> HaarExpansion::coeff(const DyadicInterval& I) { return coeff_by_id(I.node_id()); }

std::span<const double> HaarExpansion::coeff(const DyadicInterval& I) const {
  return coeff_by_id(I.node_id());
}

std::span<double> HaarExpansion::coeff_by_id(std::uint32_t node_id) {
  check_id(node_id);
  return {coeff_.data() + std::size_t{node_id} * d_, static_cast<std::size_t>(d_)};
}

std::span<const double> HaarExpansion::coeff_by_id(std::uint32_t node_id) const {
  check_id(node_id);
  return {coeff_.data() + std::size_t{node_id} * d_, static_cast<std::size_t>(d_)};
}

HaarExpansion analyze(std::span<const double> samples, int dim) {
  if (dim < 1) throw MalformedInputError("dimension must be positive");
  if (samples.empty() || samples.size() % dim != 0)
    throw MalformedInputError("sample buffer size must be a multiple of the dimension");
  std::size_t m = samples.size() / dim;
  if (m < 2 || !std::has_single_bit(m))
    throw MalformedInputError("sample count must be a power of two >= 2");
  int K = std::countr_zero(m) - 1;

  HaarExpansion e(K, dim);
  std::vector<double> avg(samples.begin(), samples.end());
  for (int t = K; t >= 0; --t) {
    std::size_t nt = std::size_t{1} << t;
    std::vector<double> up(nt * dim);
    double w = sqrt_pow2(-t);  // |I|^{1/2} at depth t
    for (std::size_t pos = 0; pos < nt; ++pos) {
      auto c = e.coeff({t, static_cast<std::uint32_t>(pos)});
      for (int i = 0; i < dim; ++i) {
        double lo = avg[(2 * pos) * dim + i];
        double hi = avg[(2 * pos + 1) * dim + i];
        up[pos * dim + i] = 0.5 * (lo + hi);
        c[i] = w * (hi - lo) / 2.0;
      }
    }
    avg.swap(up);
  }
  for (int i = 0; i < dim; ++i) e.mean()[i] = avg[i];
  return e;
}

std::vector<double> synthesize(const HaarExpansion& e) {
  const int K = e.truncation_depth();
  const int d = e.dim();
  const std::size_t cells = e.cell_count();
  std::vector<double> out(cells * d);
  std::vector<double> acc(d);
  for (std::size_t c = 0; c < cells; ++c) {
    for (int i = 0; i < d; ++i) acc[i] = e.mean()[i];
    for (int t = 0; t <= K; ++t) {
      std::uint32_t pos = static_cast<std::uint32_t>(c >> (K + 1 - t));
      double s = ((c >> (K - t)) & 1u) ? 1.0 : -1.0;
      double w = sqrt_pow2(t);
      auto coeff = e.coeff_by_id((std::uint32_t{1} << t) + pos);
      // Accumulation mirrors the toss-model evaluation term by term so the
      // two paths produce identical doubles.
      for (int i = 0; i < d; ++i) acc[i] += (coeff[i] * w) * s;
    }
    for (int i = 0; i < d; ++i) out[c * d + i] = acc[i];
  }
  return out;
}

HaarExpansion apply_S0(const HaarExpansion& e) {
  HaarExpansion out(e.truncation_depth(), e.dim());
  // Coefficient on h_{I+} moves to h_{I-} with sign +, the one on h_{I-}
  // moves to h_{I+} with sign -.  Depth is preserved, so nothing truncates.
  for (int t = 0; t + 1 <= e.truncation_depth(); ++t) {
    std::size_t nt = std::size_t{1} << t;
    for (std::size_t pos = 0; pos < nt; ++pos) {
      DyadicInterval parent{t, static_cast<std::uint32_t>(pos)};
      auto from_plus = e.coeff(parent.plus_child());
      auto from_minus = e.coeff(parent.minus_child());
      auto to_minus = out.coeff(parent.minus_child());
      auto to_plus = out.coeff(parent.plus_child());
      for (int i = 0; i < e.dim(); ++i) {
        to_minus[i] = from_plus[i];
        to_plus[i] = -from_minus[i];
      }
    }
  }
  return out;
}

HaarExpansion apply_Talpha(std::span<const int> alpha, const HaarExpansion& e) {
  if (alpha.size() != e.cell_count())
    throw MalformedInputError("alpha must assign a sign to every interval (node-indexed table)");
  HaarExpansion out(e.truncation_depth(), e.dim());
  for (std::uint32_t id = 1; id < e.cell_count(); ++id) {
    int a = alpha[id];
    if (a != 1 && a != -1) throw MalformedInputError("alpha entries must be +1 or -1");
    auto src = e.coeff_by_id(id);
    auto dst = out.coeff_by_id(id);
    for (int i = 0; i < e.dim(); ++i) dst[i] = a * src[i];
  }
  return out;
}

HaarExpansion apply_classical_shift(const HaarExpansion& e) {
  HaarExpansion out(e.truncation_depth(), e.dim());
  const double w = sqrt_pow2(-1);  // 2^{-1/2}
  for (int t = 0; t + 1 <= e.truncation_depth(); ++t) {
    std::size_t nt = std::size_t{1} << t;
    for (std::size_t pos = 0; pos < nt; ++pos) {
      DyadicInterval I{t, static_cast<std::uint32_t>(pos)};
      auto src = e.coeff(I);
      auto lo = out.coeff(I.minus_child());
      auto hi = out.coeff(I.plus_child());
      for (int i = 0; i < e.dim(); ++i) {
        lo[i] += w * src[i];
        hi[i] -= w * src[i];
      }
    }
  }
  return out;
}

HaarExpansion reduce_tilde(const HaarExpansion& e) {
  HaarExpansion out = e;
  for (int i = 0; i < e.dim(); ++i) {
    out.mean()[i] = 0.0;
    out.coeff(DyadicInterval::root())[i] = 0.0;
  }
  return out;
}

bool is_reduced(const HaarExpansion& e) {
  for (int i = 0; i < e.dim(); ++i) {
    if (e.mean()[i] != 0.0) return false;
    if (e.coeff(DyadicInterval::root())[i] != 0.0) return false;
  }
  return true;
}

double lp_norm(const HaarExpansion& e, const SpaceDescriptor& space) {
  if (space.dim() != e.dim())
    throw MalformedInputError("space dimension does not match the expansion");
  std::vector<double> values = synthesize(e);
  const std::size_t cells = e.cell_count();
  const double cell_weight = 1.0 / static_cast<double>(cells);
  const double p = space.p();
  double s = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    double r = space.vector_norm({values.data() + c * e.dim(), static_cast<std::size_t>(e.dim())});
    s += cell_weight * std::pow(r, p);
  }
  return std::pow(s, 1.0 / p);
}

}  // namespace dyadlab::dyadic
