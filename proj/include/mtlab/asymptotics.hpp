// Large-m limit of the BH and oracle thresholds: the interior fixed point
// u(mu, lambda) of F_mu(u) = lambda*u, evaluated at lambda_inf = 1 + (1-gamma)/(gamma*pi1).

#pragma once

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "mtlab/normal.hpp"
#include "mtlab/types.hpp"

namespace mtlab {

struct LimitParams {
  LimitParams(EffectSize mu_inf, double pi1_inf, Probability gamma)
      : mu_inf(mu_inf), pi1_inf(pi1_inf), gamma(gamma) {
    if (!(pi1_inf > 0.0 && pi1_inf < 1.0)) {
      throw std::invalid_argument("LimitParams: pi1_inf must lie strictly in (0,1)");
    }
    if (!(gamma.value() > 0.0 && gamma.value() < 1.0)) {
      throw std::invalid_argument("LimitParams: gamma must lie strictly in (0,1)");
    }
  }
  EffectSize mu_inf;
  double pi1_inf;
  Probability gamma;
};

inline double lambda_infinity(const LimitParams& lp) {
  return 1.0 + (1.0 - lp.gamma.value()) / (lp.gamma.value() * lp.pi1_inf);
}

// Unique u in (0,1) with F_mu(u) = lambda*u, for lambda > 1. F_mu is concave
// with F_mu(u)/u -> infinity as u -> 0+, so g(u) = F_mu(u) - lambda*u has
// exactly one interior sign change. Bracketing bisection down to a relative
// 1e-16 interval, then secant refinements; the returned point has |g| at
// roughly machine level.
inline Probability fixed_point_u(EffectSize mu, double lambda) {
  if (!std::isfinite(lambda) || !(lambda > 1.0 + 1e-12)) {
    throw std::invalid_argument("fixed_point_u: lambda must exceed 1");
  }
  const auto g = [&](double u) { return alt_pvalue_cdf(u, mu).value() - lambda * u; };

  double lo = 1e-16;
  double g_lo = g(lo);
  while (g_lo <= 0.0 && lo > 1e-280) {  // huge lambda pushes the root below 1e-16
    lo *= 1e-8;
    g_lo = g(lo);
  }
  if (g_lo <= 0.0) {
    throw std::invalid_argument("fixed_point_u: lambda too large for an interior fixed point");
  }
  double hi = 1.0 - 1e-16;
  double g_hi = g(hi);  // = 1 - lambda*(1 - 1e-16) < 0

  // Large lambda leaves the root many orders of magnitude below 1, so the
  // bracket is halved geometrically until it is tight in relative terms.
  for (int i = 0; i < 600 && hi - lo > 1e-16 * hi; ++i) {
    const double mid = hi > 4.0 * lo ? std::exp(0.5 * (std::log(lo) + std::log(hi)))
                                     : 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = g(mid);
    if (g_mid > 0.0) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
      g_hi = g_mid;
    }
  }

  double best = std::fabs(g_lo) < std::fabs(g_hi) ? lo : hi;
  double g_best = std::min(std::fabs(g_lo), std::fabs(g_hi));
  double x0 = lo, f0 = g_lo, x1 = hi, f1 = g_hi;
  for (int i = 0; i < 8 && f1 != f0; ++i) {
    double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!(x2 > lo && x2 < hi)) x2 = 0.5 * (lo + hi);
    if (x2 <= lo || x2 >= hi) break;
    const double f2 = g(x2);
    if (std::fabs(f2) < g_best) {
      g_best = std::fabs(f2);
      best = x2;
    }
    if (f2 > 0.0) {
      lo = x2;
      g_lo = f2;
    } else {
      hi = x2;
      g_hi = f2;
    }
    if (f2 == 0.0) break;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
  }
  return Probability(best);
}

// Limiting BH threshold u(mu_inf, lambda_inf). The same u solves the mixture
// equation G(u) = u/gamma with G(u) = (1-pi1) u + pi1 F_mu(u); the identity is
// asserted in debug builds as a cross-check of the lambda_inf reading.
inline Probability bh_limit_threshold(const LimitParams& lp) {
  const Probability u = fixed_point_u(lp.mu_inf, lambda_infinity(lp));
  assert(std::fabs(mixture_pvalue_cdf(u.value(), lp.mu_inf, lp.pi1_inf).value() -
                   u.value() / lp.gamma.value()) <= 1e-9);
  return u;
}

// The oracle threshold converges to the same limit as BH; kept as a named
// alias so reports attribute convergence targets to the right procedure.
inline Probability oracle_limit_threshold(const LimitParams& lp) {
  return bh_limit_threshold(lp);
}

}  // namespace mtlab
