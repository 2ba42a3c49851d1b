#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "experiments.hpp"
#include "moment_match.hpp"
#include "rng.hpp"
#include "support/oracles.hpp"

using namespace pfopt;

namespace {

MomentEstimates exact_separable_estimates(const std::array<double, 4>& a,
                                          const std::array<double, 4>& b) {
  MomentEstimates est;
  est.first = oracles::separable_first_moments(a, b);
  est.second = oracles::separable_second_moments(a, b);
  est.n_samples_used = 1;  // exact values, no sampling
  return est;
}

}  // namespace

TEST_SUITE("moment_match") {

TEST_CASE("two-point symmetric sample set standardizes to +-1") {
  const std::vector<State> samples = {{1, 1, 1, 1}, {-1, -1, -1, -1}};
  const TargetMoments tm = compute_target_moments(samples);
  CHECK(tm.n_source_samples == 2);
  for (int c = 0; c < kStateDim; ++c) {
    CHECK(tm.mean[static_cast<std::size_t>(c)] == doctest::Approx(0.0));
    CHECK(tm.stddev[static_cast<std::size_t>(c)] == doctest::Approx(1.0));
    CHECK(tm.standardized[static_cast<std::size_t>(c)]);
  }
  // Standardized samples are +-(1,1,1,1): odd potentials average to 0,
  // every quadratic and quartic potential averages to 1.
  for (int k = 0; k < 4; ++k) CHECK(tm.t[k] == doctest::Approx(0.0));
  for (int k = 4; k < kNumPotentials; ++k)
    CHECK(tm.t[k] == doctest::Approx(1.0));
}

TEST_CASE("constant coordinate raises DegenerateData") {
  const std::vector<State> samples = {{1, 2, 3, 4}, {1, 5, 6, 7}, {1, 8, 9, 0}};
  CHECK_THROWS_AS(compute_target_moments(samples), DegenerateData);
  const std::vector<State> all_equal(5, State{2, 2, 2, 2});
  CHECK_THROWS_AS(compute_target_moments(all_equal), DegenerateData);
}

TEST_CASE("empty or non-finite samples raise InvalidInput") {
  CHECK_THROWS_AS(compute_target_moments({}), InvalidInput);
  const std::vector<State> bad = {
      {1, 2, 3, 4}, {std::numeric_limits<double>::quiet_NaN(), 0, 0, 0}};
  CHECK_THROWS_AS(compute_target_moments(bad), InvalidInput);
  // A single sample is trivially constant in every coordinate.
  const std::vector<State> one = {{1, 2, 3, 4}};
  CHECK_THROWS_AS(compute_target_moments(one), DegenerateData);
}

TEST_CASE("Gaussian sample targets match closed forms at large N") {
  Rng rng(2024);
  const int n = 100000;
  std::vector<State> samples(static_cast<std::size_t>(n));
  for (auto& x : samples)
    for (int c = 0; c < kStateDim; ++c) x[static_cast<std::size_t>(c)] = rng.normal();

  const TargetMoments tm = compute_target_moments(samples);
  const double tol = 5.0 / std::sqrt(static_cast<double>(n));

  // Standardization keeps mean 0 / variance 1 coordinates essentially as-is.
  for (int k = 0; k < 4; ++k) CHECK(std::abs(tm.t[k]) < 1e-12);
  // Pure squares are exactly 1 after standardization (population variance).
  for (int i = 0; i < kStateDim; ++i)
    CHECK(tm.t[quadratic_index(i, i)] == doctest::Approx(1.0).epsilon(1e-10));
  // Cross second moments vanish, quartics match E[x^4]=3, E[x^2 y^2]=1.
  CHECK(std::abs(tm.t[quadratic_index(0, 1)]) < tol);
  CHECK(std::abs(tm.t[quartic_index(0, 0)] - 3.0) < 20.0 * tol);
  CHECK(std::abs(tm.t[quartic_index(0, 1)] - 1.0) < 5.0 * tol);
}

TEST_CASE("residual, error, and objective formulas") {
  MomentEstimates est;
  est.first = Eigen::VectorXd::Zero(kNumPotentials);
  TargetMoments tm;
  tm.t = Eigen::VectorXd::Zero(kNumPotentials);

  SUBCASE("matched moments give the zero residual") {
    est.first.setConstant(0.7);
    tm.t.setConstant(0.7);
    const Eigen::VectorXd f = residual(est, tm);
    CHECK(f.norm() == 0.0);
    CHECK(moment_matching_error(f) == 0.0);
    CHECK(average_error_per_moment(0.0, kNumPotentials) == 0.0);
  }

  SUBCASE("unit offset in one moment") {
    est.first[0] = 1.0;
    const Eigen::VectorXd f = residual(est, tm);
    CHECK(f[0] == 1.0);
    CHECK(f.tail(23).norm() == 0.0);
    CHECK(moment_matching_error(f) == doctest::Approx(0.5));
  }

  SUBCASE("all-ones residual") {
    est.first.setConstant(1.0);
    const Eigen::VectorXd f = residual(est, tm);
    CHECK(moment_matching_error(f) == doctest::Approx(12.0));
    CHECK(average_error_per_moment(12.0, kNumPotentials) == doctest::Approx(1.0));
  }

  SUBCASE("objective scales as sqrt(2 eps / l)") {
    CHECK(average_error_per_moment(0.5, kNumPotentials) ==
          doctest::Approx(std::sqrt(1.0 / 24.0)));
    CHECK_THROWS_AS(average_error_per_moment(-1e-9, kNumPotentials),
                    InvalidInput);
  }
}

TEST_CASE("jacobian is exactly symmetric and zero at zero covariance") {
  MomentEstimates est;
  est.first = Eigen::VectorXd::LinSpaced(kNumPotentials, 0.1, 2.4);
  est.second = est.first * est.first.transpose();
  const Eigen::MatrixXd J = jacobian(est);
  CHECK(J.norm() == 0.0);

  // Generic case: symmetry is exact by construction.
  Rng rng(8);
  Eigen::MatrixXd noise(kNumPotentials, kNumPotentials);
  for (int i = 0; i < kNumPotentials; ++i)
    for (int j = 0; j < kNumPotentials; ++j) noise(i, j) = rng.normal();
  est.second += noise * noise.transpose();
  const Eigen::MatrixXd J2 = jacobian(est);
  for (int i = 0; i < kNumPotentials; ++i)
    for (int j = 0; j < kNumPotentials; ++j) CHECK(J2(i, j) == J2(j, i));
}

TEST_CASE("jacobian diagonal equals minus the potential variances (Gaussian)") {
  // At the standard Gaussian parameters: Var[x_i] = 1, Var[x_i^2] = 2.
  MCConfig cfg;
  cfg.n_samples = 20000;
  cfg.seed = 14;
  ParamVector alpha = ParamVector::Zero();
  for (int i = 0; i < kStateDim; ++i) alpha[quadratic_index(i, i)] = 0.5;
  const MomentEstimates est = estimate_expectations(alpha, cfg);
  const Eigen::MatrixXd J = jacobian(est);
  CHECK(J(0, 0) == doctest::Approx(-1.0).epsilon(0.1));
  const int i22 = quadratic_index(0, 0);
  CHECK(J(i22, i22) == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("jacobian matches central finite differences on separable densities") {
  /* On a product-form density both E[psi] and the covariance are exact
   * quadrature expressions, so the derivative identity
   * dE[psi_i]/dalpha_j = -Cov(psi_i, psi_j) can be checked without any
   * Monte Carlo noise.  Perturbing a pure-square or pure-quartic parameter
   * keeps the density product-form, which is what makes the finite
   * difference evaluable. */
  const std::array<double, 4> a = {0.5, 0.7, 0.4, 1.1};
  const std::array<double, 4> b = {1.0, 0.8, 1.3, 0.6};
  const MomentEstimates est = exact_separable_estimates(a, b);
  const Eigen::MatrixXd J = jacobian(est);

  const double h = 1e-3;
  const int columns[8] = {quadratic_index(0, 0), quadratic_index(1, 1),
                          quadratic_index(2, 2), quadratic_index(3, 3),
                          quartic_index(0, 0),   quartic_index(1, 1),
                          quartic_index(2, 2),   quartic_index(3, 3)};
  for (int ci = 0; ci < 8; ++ci) {
    const int j = columns[ci];
    const bool is_square = j < 14;
    const int coord = is_square ? (j == 4 ? 0 : j == 8 ? 1 : j == 11 ? 2 : 3)
                                : (j == 14 ? 0 : j == 18 ? 1 : j == 21 ? 2 : 3);
    auto perturbed = [&](double delta) {
      std::array<double, 4> ap = a, bp = b;
      (is_square ? ap : bp)[static_cast<std::size_t>(coord)] += delta;
      return oracles::separable_first_moments(ap, bp);
    };
    const Eigen::VectorXd fd = (perturbed(h) - perturbed(-h)) / (2.0 * h);
    for (int i = 0; i < kNumPotentials; ++i) {
      const double ref = fd[i];
      const double got = J(i, j);
      const double scale = std::max(std::abs(ref), 1e-8);
      CHECK(std::abs(got - ref) / scale <= 1e-4);
    }
  }
}

TEST_CASE("jacobian diagonal matches quadrature variances (quartic density)") {
  const std::array<double, 4> a = {0.5, 0.5, 0.5, 0.5};
  const std::array<double, 4> b = {1.0, 1.0, 1.0, 1.0};
  const MomentEstimates est = exact_separable_estimates(a, b);
  const Eigen::MatrixXd J = jacobian(est);

  const double m2 = oracles::quartic_moment(0.5, 1.0, 2);
  const double m4 = oracles::quartic_moment(0.5, 1.0, 4);
  const double m8 = oracles::quartic_moment(0.5, 1.0, 8);
  CHECK(J(0, 0) == doctest::Approx(-m2).epsilon(1e-10));
  CHECK(J(quadratic_index(0, 0), quadratic_index(0, 0)) ==
        doctest::Approx(-(m4 - m2 * m2)).epsilon(1e-10));
  CHECK(J(quartic_index(0, 0), quartic_index(0, 0)) ==
        doctest::Approx(-(m8 - m4 * m4)).epsilon(1e-10));
}

TEST_CASE("standardization fallback keeps near-constant coordinates raw") {
  /* Coordinate 2 varies at 1e-15 around 5: far below the 1e-12 relative
   * scale cutoff, so it must pass through unstandardized but flagged. */
  std::vector<State> samples;
  Rng rng(33);
  for (int i = 0; i < 200; ++i) {
    State x{};
    x[0] = rng.normal();
    x[1] = 2.0 * rng.normal() + 1.0;
    x[2] = 5.0 + 5e-15 * rng.normal();
    x[3] = rng.normal() - 3.0;
    samples.push_back(x);
  }
  const TargetMoments tm = compute_target_moments(samples);
  CHECK(tm.standardized[0]);
  CHECK(tm.standardized[1]);
  CHECK(!tm.standardized[2]);
  CHECK(tm.standardized[3]);
  // The raw coordinate keeps its raw scale: t for x_2 x_2 is near 25, not 1.
  CHECK(tm.t[quadratic_index(2, 2)] == doctest::Approx(25.0).epsilon(1e-3));
}

}  // TEST_SUITE
