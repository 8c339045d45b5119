#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dyadlab/norms.hpp"

using namespace dyadlab;
using namespace dyadlab::norms;

namespace {

Eigen::MatrixXd random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
  return m;
}

}  // namespace

TEST_CASE("operator names parse or fail loudly") {
  CHECK(parse_op("identity") == NamedOp::identity);
  CHECK(parse_op("s0") == NamedOp::S0);
  CHECK(parse_op("classical-shift") == NamedOp::classical_shift);
  CHECK(parse_op("t-alpha") == NamedOp::T_alpha);
  CHECK_THROWS_AS(parse_op("frobnicate"), MalformedInputError);
}

TEST_CASE("materialized identity is the identity matrix") {
  OperatorMatrix id = materialize(NamedOp::identity, 2);
  CHECK((id.m - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("materialized operators act like their coefficient-space versions") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  const int depth = 3;
  OperatorMatrix s0 = materialize(NamedOp::S0, depth);
  OperatorMatrix shift = materialize(NamedOp::classical_shift, depth);
  for (int trial = 0; trial < 4; ++trial) {
    Eigen::VectorXd x(s0.m.cols());
    for (int i = 0; i < x.size(); ++i) x[i] = gauss(rng);
    std::vector<double> samples(x.data(), x.data() + x.size());
    auto via_ops = dyadic::synthesize(dyadic::apply_S0(dyadic::analyze(samples, 1)));
    Eigen::VectorXd via_matrix = s0.m * x;
    for (int i = 0; i < x.size(); ++i) CHECK(via_matrix[i] == doctest::Approx(via_ops[i]).epsilon(1e-12));
    auto shift_ops = dyadic::synthesize(dyadic::apply_classical_shift(dyadic::analyze(samples, 1)));
    Eigen::VectorXd shift_matrix = shift.m * x;
    for (int i = 0; i < x.size(); ++i)
      CHECK(shift_matrix[i] == doctest::Approx(shift_ops[i]).epsilon(1e-12));
  }
}

TEST_CASE("the squared shift matrix is minus the projection onto proper detail") {
  const int depth = 1;
  OperatorMatrix s0 = materialize(NamedOp::S0, depth);
  const int n = 4;
  // projection onto the span of the depth-1 Haar functions
  Eigen::MatrixXd proj(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> basis(n, 0.0);
    basis[j] = 1.0;
    auto e = dyadic::analyze(basis, 1);
    e.mean()[0] = 0.0;
    e.coeff(dyadic::DyadicInterval::root())[0] = 0.0;
    auto col = dyadic::synthesize(e);
    for (int i = 0; i < n; ++i) proj(i, j) = col[i];
  }
  CHECK((s0.m * s0.m + proj).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("all-plus martingale transform materializes to I minus the mean") {
  const int depth = 2;
  const int n = 8;
  std::vector<int> alpha(n, 1);
  OperatorMatrix t = materialize(NamedOp::T_alpha, depth, &alpha);
  Eigen::MatrixXd expected =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  CHECK((t.m - expected).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(materialize(NamedOp::T_alpha, depth, nullptr), MalformedInputError);
}

TEST_CASE("exact spectral norms of the named operators") {
  for (int depth : {1, 3, 5}) {
    CHECK(norm_2_exact(materialize(NamedOp::S0, depth).m) == doctest::Approx(1.0).epsilon(1e-10));
  }
  std::vector<int> alpha(16, 1);
  std::mt19937_64 rng(3);
  for (auto& a : alpha) a = (rng() & 1) ? 1 : -1;
  CHECK(norm_2_exact(materialize(NamedOp::T_alpha, 3, &alpha).m) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(norm_2_exact(materialize(NamedOp::classical_shift, 3).m) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(norm_2_exact(Eigen::MatrixXd::Zero(6, 6)) == 0.0);

  // against a dense SVD oracle on random matrices
  for (std::uint64_t seed : {7ull, 8ull}) {
    Eigen::MatrixXd m = random_matrix(24, seed);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    CHECK(norm_2_exact(m) == doctest::Approx(svd.singularValues()[0]).epsilon(1e-9));
  }
}

TEST_CASE("power method is exact on the identity for every space") {
  NormEstimateOptions opts;
  opts.restarts = 3;
  opts.seed = 4;
  for (const SpaceDescriptor& space :
       {SpaceDescriptor::scalar(1.5), SpaceDescriptor::scalar(4.0),
        SpaceDescriptor::lq(3.0, 1.5, 2)}) {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(8, 8);
    CHECK(norm_p_lower(id, space, opts).lower_bound == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("power method finds the top entry of diagonal operators") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
  d.diagonal() << 2.0, 1.0, 0.5, 0.25;
  NormEstimateOptions opts;
  opts.restarts = 6;
  opts.seed = 9;
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    CHECK(norm_p_lower(d, SpaceDescriptor::scalar(p), opts).lower_bound ==
          doctest::Approx(2.0).epsilon(1e-8));
  }
}

TEST_CASE("power method at p = 2 agrees with the spectral norm") {
  OperatorMatrix s0 = materialize(NamedOp::S0, 3);
  NormEstimateOptions opts;
  opts.restarts = 4;
  opts.seed = 10;
  double est = norm_p_lower(s0.m, SpaceDescriptor::scalar(2.0), opts).lower_bound;
  CHECK(est == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(est <= norm_2_exact(s0.m) * (1 + 1e-8));  // lower bounds stay lower
}

TEST_CASE("objective traces never decrease") {
  NormEstimateOptions opts;
  opts.restarts = 3;
  opts.iters = 60;
  opts.seed = 12;
  Eigen::MatrixXd m = random_matrix(12, 21);
  auto result = norm_p_lower(m, SpaceDescriptor::scalar(3.0), opts);
  for (std::size_t i = 1; i < result.objective_trace.size(); ++i) {
    CHECK(result.objective_trace[i] >= result.objective_trace[i - 1] - 1e-12);
  }
  CHECK(result.lower_bound > 0.0);
}

TEST_CASE("estimates are symmetric under duality") {
  // agreement needs both searches to land on the global optimum, so the
  // matrices are small and the restart budget generous
  NormEstimateOptions opts;
  opts.restarts = 48;
  opts.iters = 3000;
  opts.tol = 1e-12;
  opts.seed = 13;
  for (std::uint64_t seed : {31ull, 32ull}) {
    Eigen::MatrixXd m = random_matrix(10, seed);
    double direct = norm_p_lower(m, SpaceDescriptor::scalar(3.0), opts).lower_bound;
    Eigen::MatrixXd mt = m.transpose();
    double dual = norm_p_lower(mt, SpaceDescriptor::scalar(1.5), opts).lower_bound;
    CHECK(direct == doctest::Approx(dual).epsilon(1e-6));
  }
}

TEST_CASE("discrete circle Hilbert matrix: skewness and unit spectral norm") {
  Eigen::MatrixXd h = hilbert_matrix(64);
  CHECK((h + h.transpose()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(norm_2_exact(h) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(hilbert_matrix(100), MalformedInputError);
}

TEST_CASE("Hilbert estimates: p = 2 anchor and duality symmetry") {
  NormEstimateOptions opts;
  opts.restarts = 6;
  opts.iters = 2500;
  opts.tol = 1e-12;
  opts.seed = 14;
  CHECK(estimate_hp(SpaceDescriptor::scalar(2.0), 64, opts) == doctest::Approx(1.0).epsilon(1e-8));
  double p4 = estimate_hp(SpaceDescriptor::scalar(4.0), 128, opts);
  double p43 = estimate_hp(SpaceDescriptor::scalar(4.0 / 3.0), 128, opts);
  CHECK(p4 == doctest::Approx(p43).epsilon(1e-6));
  CHECK(p4 < (1.0 + std::sqrt(2.0)) * (1 + 1e-6));  // below the classical value
}

TEST_CASE("Hilbert estimates never decrease with the grid") {
  NormEstimateOptions opts;
  opts.restarts = 5;
  opts.iters = 800;
  opts.seed = 15;
  double prev = 0.0;
  for (int grid : {64, 128, 256}) {
    double est = estimate_hp(SpaceDescriptor::scalar(4.0), grid, opts);
    CHECK(est >= prev - 1e-8);
    prev = est;
  }
}

TEST_CASE("shift estimates: anchors and growth in depth") {
  NormEstimateOptions opts;
  opts.restarts = 5;
  opts.seed = 16;
  CHECK(estimate_sp(SpaceDescriptor::scalar(2.0), 4, opts) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(estimate_sp(SpaceDescriptor::lq(2.0, 2.0, 2), 3, opts) ==
        doctest::Approx(1.0).epsilon(1e-8));
  double prev = 0.0;
  for (int depth : {2, 3, 4}) {
    double est = estimate_sp(SpaceDescriptor::scalar(4.0), depth, opts);
    CHECK(est >= prev - 1e-8);
    prev = est;
  }
}

TEST_CASE("martingale supremum: Hilbert-space anchor and sampled search") {
  NormEstimateOptions opts;
  opts.restarts = 3;
  opts.seed = 17;
  // exhaustive over all sign patterns at depth 1 (8 patterns)
  CHECK(estimate_mp_lower(SpaceDescriptor::scalar(2.0), 1, 64, opts) ==
        doctest::Approx(1.0).epsilon(1e-8));
  // sampled search at a depth whose pattern space is out of reach
  CHECK(estimate_mp_lower(SpaceDescriptor::scalar(4.0), 3, 6, opts) >= 1.0 - 1e-8);
}

TEST_CASE("ratio study stays inside the envelope at the p = 2 anchor") {
  NormEstimateOptions opts;
  opts.restarts = 4;
  opts.seed = 18;
  std::vector<ComparisonCase> cases{{SpaceDescriptor::scalar(2.0), 3, 64}};
  auto rows = comparison_experiment(cases, opts);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].s_lower == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rows[0].h_lower == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rows[0].ratio == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(rows[0].inv_c0 == doctest::Approx(1.3468852520).epsilon(1e-9));
  CHECK_FALSE(rows[0].violated);
  CHECK(rows[0].space_name == "scalar");
}
