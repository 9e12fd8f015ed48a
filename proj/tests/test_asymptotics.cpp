#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "mtlab/asymptotics.hpp"
#include "mtlab/rng.hpp"
#include "oracles.hpp"

using mtlab::EffectSize;
using mtlab::fixed_point_u;
using mtlab::LimitParams;
using mtlab::Probability;

namespace {
const double kMuGrid[] = {0.5, 1.0, 2.0, 4.0};
const double kLambdaGrid[] = {1.5, 2.0, 10.0, 100.0};
}  // namespace

TEST_CASE("fixed_point_u satisfies its defining equation to 1e-12 on the grid") {
  for (const double mu : kMuGrid) {
    for (const double lambda : kLambdaGrid) {
      const double u = fixed_point_u(EffectSize(mu), lambda).value();
      CHECK(u > 0.0);
      CHECK(u < 1.0);
      const double residual = mtlab::alt_pvalue_cdf(u, EffectSize(mu)).value() - lambda * u;
      CHECK(std::fabs(residual) <= 1e-12);
      // self-consistency in ratio form
      CHECK(mtlab::alt_pvalue_cdf(u, EffectSize(mu)).value() / u ==
            doctest::Approx(lambda).epsilon(1e-9));
    }
  }
}

TEST_CASE("fixed_point_u agrees with the long double bisection oracle") {
  for (const double mu : kMuGrid) {
    for (const double lambda : kLambdaGrid) {
      const double want = static_cast<double>(oracle::fixed_point_u(mu, lambda));
      CHECK(fixed_point_u(EffectSize(mu), lambda).value() ==
            doctest::Approx(want).epsilon(1e-10));
    }
  }
  CHECK(fixed_point_u(EffectSize(2.0), 91.0).value() ==
        doctest::Approx(static_cast<double>(oracle::fixed_point_u(2.0L, 91.0L))).epsilon(1e-10));
}

TEST_CASE("fixed_point_u decreases in lambda and vanishes as lambda grows") {
  const double u5 = fixed_point_u(EffectSize(2.0), 5.0).value();
  const double u50 = fixed_point_u(EffectSize(2.0), 50.0).value();
  const double u500 = fixed_point_u(EffectSize(2.0), 500.0).value();
  CHECK(u5 > u50);
  CHECK(u50 > u500);
  CHECK(fixed_point_u(EffectSize(2.0), 1e6).value() < 1e-3);
}

TEST_CASE("fixed_point_u increases in mu at fixed lambda") {
  for (const double lambda : kLambdaGrid) {
    double prev = 0.0;
    for (const double mu : kMuGrid) {
      const double u = fixed_point_u(EffectSize(mu), lambda).value();
      CHECK(u > prev);
      prev = u;
    }
  }
}

TEST_CASE("fixed_point_u rejects degenerate lambda") {
  CHECK_THROWS_AS(fixed_point_u(EffectSize(2.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fixed_point_u(EffectSize(2.0), 1.0 + 1e-13), std::invalid_argument);
  CHECK_THROWS_AS(fixed_point_u(EffectSize(2.0), 0.5), std::invalid_argument);
}

TEST_CASE("F_mu(u) - lambda*u changes sign exactly once on a 200-point grid") {
  // log-spaced grid: the crossing sits near zero for large lambda / small mu
  for (const double mu : kMuGrid) {
    for (const double lambda : kLambdaGrid) {
      int sign_changes = 0;
      bool have_prev = false;
      bool prev_positive = false;
      for (int i = 0; i < 200; ++i) {
        const double u = std::pow(10.0, -28.0 + 28.0 * static_cast<double>(i) / 199.0);
        const double g = mtlab::alt_pvalue_cdf(u, EffectSize(mu)).value() - lambda * u;
        const bool positive = g > 0.0;
        if (have_prev && positive != prev_positive) ++sign_changes;
        prev_positive = positive;
        have_prev = true;
      }
      CHECK(sign_changes == 1);
    }
  }
}

TEST_CASE("lambda_infinity evaluates 1 + (1-gamma)/(gamma*pi1)") {
  const LimitParams lp(EffectSize(2.0), 0.1, Probability(0.1));
  CHECK(lambda_infinity(lp) == doctest::Approx(91.0).epsilon(1e-12));
  CHECK_THROWS_AS(LimitParams(EffectSize(2.0), 0.0, Probability(0.1)), std::invalid_argument);
  CHECK_THROWS_AS(LimitParams(EffectSize(2.0), 1.0, Probability(0.1)), std::invalid_argument);
  CHECK_THROWS_AS(LimitParams(EffectSize(2.0), 0.1, Probability(0.0)), std::invalid_argument);
  CHECK_THROWS_AS(LimitParams(EffectSize(2.0), 0.1, Probability(1.0)), std::invalid_argument);
}

TEST_CASE("bh_limit_threshold satisfies the mixture equation G(u) = u/gamma") {
  mtlab::RandomStream stream(mtlab::SeedSpec{5001, 0});
  const LimitParams pinned(EffectSize(2.0), 0.1, Probability(0.1));
  const double u_pinned = mtlab::bh_limit_threshold(pinned).value();
  CHECK(std::fabs(mtlab::mixture_pvalue_cdf(u_pinned, pinned.mu_inf, pinned.pi1_inf).value() -
                  u_pinned / pinned.gamma.value()) <= 1e-9);

  for (int rep = 0; rep < 50; ++rep) {
    const LimitParams lp(EffectSize(0.2 + 4.0 * stream.next_unit()),
                         0.01 + 0.98 * stream.next_unit(),
                         Probability(0.01 + 0.9 * stream.next_unit()));
    const double u = mtlab::bh_limit_threshold(lp).value();
    const double mixture = mtlab::mixture_pvalue_cdf(u, lp.mu_inf, lp.pi1_inf).value();
    CHECK(std::fabs(mixture - u / lp.gamma.value()) <= 1e-9);
  }
}

TEST_CASE("bh_limit_threshold falls toward zero as pi1 shrinks") {
  const double u1 = mtlab::bh_limit_threshold(LimitParams(EffectSize(2.0), 1e-1,
                                                          Probability(0.1))).value();
  const double u2 = mtlab::bh_limit_threshold(LimitParams(EffectSize(2.0), 1e-2,
                                                          Probability(0.1))).value();
  const double u3 = mtlab::bh_limit_threshold(LimitParams(EffectSize(2.0), 1e-3,
                                                          Probability(0.1))).value();
  CHECK(u1 > u2);
  CHECK(u2 > u3);
  CHECK(u3 < 1e-6);
}

TEST_CASE("bh_limit_threshold grows with gamma") {
  double prev = 0.0;
  for (const double gamma : {0.05, 0.1, 0.2, 0.4}) {
    const double u = mtlab::bh_limit_threshold(LimitParams(EffectSize(2.0), 0.1,
                                                           Probability(gamma))).value();
    CHECK(u > prev);
    prev = u;
  }
}

TEST_CASE("oracle_limit_threshold is the same limit as bh_limit_threshold") {
  mtlab::RandomStream stream(mtlab::SeedSpec{5002, 0});
  for (int rep = 0; rep < 20; ++rep) {
    const LimitParams lp(EffectSize(0.2 + 4.0 * stream.next_unit()),
                         0.01 + 0.98 * stream.next_unit(),
                         Probability(0.01 + 0.9 * stream.next_unit()));
    CHECK(mtlab::oracle_limit_threshold(lp).value() == mtlab::bh_limit_threshold(lp).value());
  }
}
