#include "dyadlab/circle.hpp"

#include <algorithm>
#include <cmath>

namespace dyadlab::circle {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

}  // namespace

double wrap_angle(double x) {
  double y = std::fmod(x + kPi, kTwoPi);
  if (y < 0) y += kTwoPi;
  double r = y - kPi;
  return r >= kPi ? -kPi : r;
}

double phi(Sign sigma, double theta) {
  double v = sigma == Sign::plus ? std::cos(theta) : std::sin(theta);
  return v >= 0.0 ? 1.0 : -1.0;
}

int quarter_of(double theta) {
  double t = wrap_angle(theta);
  int q = static_cast<int>(std::floor((t + kPi) / (kPi / 2.0)));
  return std::clamp(q, 0, 3);
}

double quarter_sign(Sign sigma, int quarter) {
  // Signs of cos resp. sin on (A_{-2}, A_{-1}, A_0, A_1).
  static constexpr std::array<double, 4> plus{-1.0, +1.0, +1.0, -1.0};
  static constexpr std::array<double, 4> minus{-1.0, -1.0, +1.0, +1.0};
  if (quarter < 0 || quarter > 3) throw MalformedInputError("quarter index must be 0..3");
  return sigma == Sign::plus ? plus[quarter] : minus[quarter];
}

Spectral::Spectral(int order) : order_(order) {
  if (order < 0) throw MalformedInputError("spectral order must be >= 0");
  c_.assign(2 * static_cast<std::size_t>(order) + 1, {0.0, 0.0});
}

std::complex<double>& Spectral::coeff(int n) {
  if (std::abs(n) > order_) throw MalformedInputError("frequency outside spectral table");
  return c_[static_cast<std::size_t>(n + order_)];
}

std::complex<double> Spectral::coeff(int n) const {
  if (std::abs(n) > order_) return {0.0, 0.0};
  return c_[static_cast<std::size_t>(n + order_)];
}

std::complex<double> Spectral::eval(double theta) const {
  // Sum from -N to N via a running phase factor.
  std::complex<double> z = std::polar(1.0, theta);
  std::complex<double> zn = std::polar(1.0, -order_ * theta);
  std::complex<double> acc{0.0, 0.0};
  for (int n = -order_; n <= order_; ++n) {
    acc += c_[static_cast<std::size_t>(n + order_)] * zn;
    zn *= z;
  }
  return acc;
}

bool Spectral::is_hermitian(double tol) const {
  for (int n = 1; n <= order_; ++n) {
    if (std::abs(coeff(-n) - std::conj(coeff(n))) > tol) return false;
  }
  return std::abs(coeff(0).imag()) <= tol;
}

Spectral hilbert_multiplier(const Spectral& f) {
  Spectral out(f.order());
  const std::complex<double> minus_i{0.0, -1.0};
  for (int n = -f.order(); n <= f.order(); ++n) {
    if (n == 0) continue;
    out.coeff(n) = minus_i * static_cast<double>(n > 0 ? 1 : -1) * f.coeff(n);
  }
  return out;
}

Spectral phi_series(Sign sigma, int order) {
  // signcos = (4/pi) sum (-1)^j cos((2j+1)t)/(2j+1);
  // signsin = (4/pi) sum sin((2j+1)t)/(2j+1), no alternation.
  Spectral out(order);
  for (int j = 0;; ++j) {
    int l = 2 * j + 1;
    if (l > order) break;
    if (sigma == Sign::plus) {
      double a = (2.0 / kPi) * (j % 2 == 0 ? 1.0 : -1.0) / l;
      out.coeff(l) = {a, 0.0};
      out.coeff(-l) = {a, 0.0};
    } else {
      double a = (2.0 / kPi) / l;
      out.coeff(l) = {0.0, -a};
      out.coeff(-l) = {0.0, a};
    }
  }
  return out;
}

Spectral chi_arc_series(int order) {
  Spectral out(order);
  out.coeff(0) = {0.5, 0.0};
  for (int l = 1; l <= order; ++l) {
    double a = std::sin(l * kPi / 2.0) / (l * kPi);
    out.coeff(l) = {a, 0.0};
    out.coeff(-l) = {a, 0.0};
  }
  return out;
}

double eval_g(double x) {
  double t = wrap_angle(x);
  double sp = std::sin((t + kPi / 2.0) / 2.0);
  double sm = std::sin((t - kPi / 2.0) / 2.0);
  if (sp == 0.0 || sm == 0.0) throw SingularityError("g is singular at +-pi/2");
  return (std::log(std::abs(sp)) - std::log(std::abs(sm))) / kPi;
}

double eval_H_phi(Sign sigma, double x) {
  if (sigma == Sign::plus) return eval_g(x) - eval_g(wrap_angle(x + kPi));
  return eval_g(wrap_angle(x - kPi / 2.0)) - eval_g(wrap_angle(x + kPi / 2.0));
}

double CircleFunction::eval(double theta) const {
  if (const Spectral* s = std::get_if<Spectral>(&rep_)) return s->eval_real(theta);
  switch (std::get<Named>(rep_)) {
    case Named::phi_plus:
      return phi(Sign::plus, theta);
    case Named::phi_minus:
      return phi(Sign::minus, theta);
    case Named::g:
      return eval_g(theta);
    case Named::H_phi_plus:
      return eval_H_phi(Sign::plus, theta);
    case Named::H_phi_minus:
      return eval_H_phi(Sign::minus, theta);
    case Named::chi_arc: {
      double t = wrap_angle(theta);
      return (t > -kPi / 2.0 && t < kPi / 2.0) ? 1.0 : 0.0;
    }
  }
  throw InternalError("unreachable circle evaluator");
}

std::vector<double> CircleFunction::singular_points() const {
  if (is_spectral()) return {};
  switch (std::get<Named>(rep_)) {
    case Named::g:
    case Named::H_phi_plus:
      return {-kPi / 2.0, kPi / 2.0};
    case Named::H_phi_minus:
      return {-kPi, 0.0, kPi};
    default:
      return {};
  }
}

namespace {

/// One level-h trapezoid pass over the tanh-sinh nodes x = c + r tanh(y),
/// y = (pi/2) sinh(u), u = j h.  Node positions are formed as offsets from
/// the nearer endpoint so log singularities stay resolvable.
double tanh_sinh_pass(const std::function<double(double)>& f, double a, double b, double h,
                      double endpoint_offset) {
  const double r = 0.5 * (b - a);
  const double u_cap = 6.6;  // beyond this the weights underflow
  auto node = [&](double u, int toward_b) -> double {
    double y = 0.5 * kPi * std::sinh(u);
    if (y > 350.0) return 0.0;
    double ch = std::cosh(y);
    double weight = 0.5 * kPi * std::cosh(u) / (ch * ch);
    double e2 = std::exp(-2.0 * y);
    double dist = r * (2.0 * e2 / (1.0 + e2));  // r (1 - tanh y)
    if (dist < endpoint_offset) return 0.0;     // truncated tail
    double x = toward_b ? b - dist : a + dist;
    double v = f(x);
    if (!std::isfinite(v)) throw NumericalError("integrand evaluated to a non-finite value");
    return weight * v;
  };
  double sum = node(0.0, 1);  // center: dist = r, so x is the midpoint
  for (int j = 1; j * h <= u_cap; ++j) {
    sum += node(j * h, 1) + node(j * h, 0);
  }
  return sum * h * r;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts) {
  if (!(b > a)) return 0.0;
  double prev = tanh_sinh_pass(f, a, b, 1.0, opts.endpoint_offset);
  double gap = std::abs(prev);
  for (int level = 1; level <= opts.max_level; ++level) {
    double h = std::ldexp(1.0, -level);
    double cur = tanh_sinh_pass(f, a, b, h, opts.endpoint_offset);
    gap = std::abs(cur - prev);
    prev = cur;
    if (level >= 3 && gap <= opts.abs_tol) return cur;
  }
  throw AccuracyError("tanh-sinh quadrature did not converge", gap);
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> interior_splits, const QuadratureOptions& opts) {
  std::vector<double> cuts{a};
  std::sort(interior_splits.begin(), interior_splits.end());
  for (double s : interior_splits) {
    if (s > a && s < b && s - cuts.back() > 4.0 * opts.endpoint_offset) cuts.push_back(s);
  }
  cuts.push_back(b);
  const std::size_t panels = cuts.size() - 1;
  QuadratureOptions local = opts;
  local.abs_tol = opts.abs_tol / static_cast<double>(panels);
  double total = 0.0;
  double achieved = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    // Shaving endpoint_offset off each end skips log endpoints; the omitted
    // mass is O(offset * |log offset|), far below the tolerances in use.
    double lo = cuts[i] + opts.endpoint_offset;
    double hi = cuts[i + 1] - opts.endpoint_offset;
    try {
      total += integrate(f, lo, hi, local);
    } catch (const AccuracyError& err) {
      achieved += err.achieved;
    }
  }
  if (achieved > opts.abs_tol)
    throw AccuracyError("split quadrature did not converge", achieved);
  return total;
}

std::array<double, 4> project_quarters(const std::function<double(double)>& f,
                                       const std::vector<double>& singularities,
                                       const QuadratureOptions& opts) {
  std::array<double, 4> avg{};
  for (int i = 0; i < 4; ++i) {
    double lo = -kPi + i * (kPi / 2.0);
    double hi = lo + kPi / 2.0;
    std::vector<double> interior;
    for (double s : singularities) {
      if (s > lo && s < hi) interior.push_back(s);
    }
    avg[i] = integrate_split(f, lo, hi, interior, opts) / (kPi / 2.0);
  }
  return avg;
}

std::array<double, 4> project_quarters(const CircleFunction& f, const QuadratureOptions& opts) {
  return project_quarters([&f](double x) { return f.eval(x); }, f.singular_points(), opts);
}

double c0_series(double tail_tol) {
  const double scale = 8.0 / (kPi * kPi);
  long double sum = 0.0L;
  double sign = 1.0;
  for (long long k = 0;; ++k) {
    long double l = 2 * k + 1;
    long double term = 1.0L / (l * l);
    if (scale * static_cast<double>(term) < tail_tol) break;  // alternating tail bound
    sum += sign * term;
    sign = -sign;
  }
  return scale * static_cast<double>(sum);
}

double compute_c0(const QuadratureOptions& opts, double cross_tol) {
  auto h_phi_plus = [](double x) { return eval_H_phi(Sign::plus, x); };
  double quad = integrate_split(h_phi_plus, 0.0, kPi / 2.0, {}, opts) / (kPi / 2.0);
  double series = c0_series(std::min(1e-12, cross_tol));
  if (std::abs(quad - series) > cross_tol)
    throw InternalError("quadrature and series values of c0 disagree");
  return series;
}

double pairing_moment(Sign sigma, Sign eta, const QuadratureOptions& opts) {
  CircleFunction h = CircleFunction::named(sigma == Sign::plus ? CircleFunction::Named::H_phi_plus
                                                               : CircleFunction::Named::H_phi_minus);
  auto integrand = [&](double x) { return h.eval(x) * phi(eta, x); };
  std::vector<double> splits{-kPi / 2.0, 0.0, kPi / 2.0};
  return integrate_split(integrand, -kPi, kPi, splits, opts) / kTwoPi;
}

std::vector<double> probe_grid(int count, const std::vector<double>& exclusions,
                               double exclusion_radius) {
  std::vector<double> grid;
  grid.reserve(count);
  for (int i = 0; i < count; ++i) {
    double x = -kPi + (i + 0.5) * kTwoPi / count;
    bool keep = true;
    for (double e : exclusions) {
      double d = std::abs(wrap_angle(x - e));
      if (d < exclusion_radius) {
        keep = false;
        break;
      }
    }
    if (keep) grid.push_back(x);
  }
  return grid;
}

}  // namespace dyadlab::circle
