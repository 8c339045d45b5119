#pragma once

#include <array>
#include <complex>
#include <functional>
#include <variant>
#include <vector>

#include "dyadlab/errors.hpp"

namespace dyadlab::circle {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Signature sigma of the two square-wave generators.
enum class Sign : int { plus = +1, minus = -1 };

inline Sign opposite(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }

/// Wrap an angle into [-pi, pi).
double wrap_angle(double x);

/// phi^+(theta) = sign cos(theta), phi^-(theta) = sign sin(theta).
/// Zeros of cos/sin are mapped to +1 (a measure-zero convention fixed for
/// determinism).
double phi(Sign sigma, double theta);

/// Quarter arcs A_i = [i pi/2, i pi/2 + pi/2) for i = -2,-1,0,1, indexed
/// 0..3 in that order.
int quarter_of(double theta);
double quarter_sign(Sign sigma, int quarter);

/// Finite Fourier series sum_{|n| <= order} c_n e^{in theta}.
class Spectral {
 public:
  explicit Spectral(int order);

  int order() const { return order_; }
  std::complex<double>& coeff(int n);
  std::complex<double> coeff(int n) const;
  std::complex<double> eval(double theta) const;
  double eval_real(double theta) const { return eval(theta).real(); }
  bool is_hermitian(double tol = 1e-12) const;

 private:
  int order_;
  std::vector<std::complex<double>> c_;  // index n + order
};

/// Multiplier action of the circle Hilbert transform: c_n -> -i sgn(n) c_n.
Spectral hilbert_multiplier(const Spectral& f);

/// Order-N truncations of the named functions.
Spectral phi_series(Sign sigma, int order);
Spectral chi_arc_series(int order);  // indicator of (-pi/2, pi/2)

/// H chi_{(-pi/2,pi/2)} in closed form; odd, zero at 0 and +-pi, blows up to
/// +infinity as x -> pi/2 from the left.  Throws SingularityError at +-pi/2.
double eval_g(double x);

/// H phi^+ (x) = g(x) - g(x+pi); H phi^- (x) = H phi^+ (x - pi/2).
double eval_H_phi(Sign sigma, double x);

/// A function on the torus, either a named closed form or a spectral table.
class CircleFunction {
 public:
  enum class Named { phi_plus, phi_minus, g, H_phi_plus, H_phi_minus, chi_arc };

  static CircleFunction named(Named which) { return CircleFunction(which); }
  static CircleFunction spectral(Spectral s) { return CircleFunction(std::move(s)); }

  double eval(double theta) const;
  bool is_spectral() const { return std::holds_alternative<Spectral>(rep_); }
  const Spectral& spectral_rep() const { return std::get<Spectral>(rep_); }

  /// Points in [-pi, pi] where the closed form is singular (empty for
  /// spectral tables and bounded evaluators).
  std::vector<double> singular_points() const;

 private:
  explicit CircleFunction(Named which) : rep_(which) {}
  explicit CircleFunction(Spectral s) : rep_(std::move(s)) {}
  std::variant<Named, Spectral> rep_;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_level = 12;            // node-doubling levels of the tanh-sinh rule
  double endpoint_offset = 1e-15;  // nodes closer to an endpoint are dropped
};

/// Tanh-sinh quadrature with level doubling until the absolute tolerance is
/// met.  Integrable endpoint singularities (log type) are fine; nodes within
/// endpoint_offset of an endpoint are truncated away, which for a log
/// singularity discards O(offset |log offset|) mass.  Throws AccuracyError
/// (reporting what was achieved) if the level cap is hit first.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

/// Same, splitting [a, b] at the given interior points and shaving
/// endpoint_offset off every panel end so integrable log endpoints never get
/// evaluated exactly at the singularity.
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> interior_splits, const QuadratureOptions& opts = {});

/// Averages of f over the four quarter arcs, adaptive quadrature with
/// absolute tolerance opts.abs_tol.
std::array<double, 4> project_quarters(const CircleFunction& f, const QuadratureOptions& opts = {});
std::array<double, 4> project_quarters(const std::function<double(double)>& f,
                                       const std::vector<double>& singularities,
                                       const QuadratureOptions& opts = {});

/// The alternating series route to c0: (8/pi^2) sum_k (-1)^k / (2k+1)^2,
/// summed until the alternating tail bound drops below tail_tol.
double c0_series(double tail_tol = 1e-12);

/// c0 = average of H phi^+ over [0, pi/2), computed by quadrature and by the
/// series, cross-checked to cross_tol; returns the series value.
double compute_c0(const QuadratureOptions& opts = {.abs_tol = 1e-12}, double cross_tol = 1e-9);

/// (1/2pi) integral of (H phi^sigma)(x) phi^eta(x) over the torus.
double pairing_moment(Sign sigma, Sign eta, const QuadratureOptions& opts = {.abs_tol = 1e-12});

/// Uniform probe grid on [-pi, pi) with exclusion_radius-neighborhoods of the
/// given points removed.
std::vector<double> probe_grid(int count, const std::vector<double>& exclusions,
                               double exclusion_radius = 0.1);

}  // namespace dyadlab::circle
