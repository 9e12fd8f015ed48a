// Outcome accounting and error measures: the V/S/R/U/T contingency counts,
// FDP, and the FDR / mFDR / FWER / PPV estimators with standard errors.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtlab/procedures.hpp"
#include "mtlab/text.hpp"
#include "mtlab/types.hpp"

namespace mtlab {

// One procedure applied to one field: rejected/non-rejected by true/false null.
struct OutcomeTable {
  std::size_t v = 0;  // rejected true nulls (false discoveries)
  std::size_t s = 0;  // rejected false nulls (true discoveries)
  std::size_t u = 0;  // non-rejected true nulls
  std::size_t t = 0;  // non-rejected false nulls

  std::size_t r() const { return v + s; }
  std::size_t m0() const { return v + u; }
  std::size_t m1() const { return s + t; }
  std::size_t m() const { return m0() + m1(); }
};

inline OutcomeTable tabulate(const ThresholdDecision& decision,
                             std::span<const HypothesisStatus> statuses) {
  OutcomeTable table;
  for (const std::size_t index : decision.rejected) {
    if (index >= statuses.size()) {
      throw std::invalid_argument("tabulate: rejected index out of range");
    }
    if (statuses[index] == HypothesisStatus::TrueNull) {
      ++table.v;
    } else {
      ++table.s;
    }
  }
  std::size_t m0 = 0;
  for (const HypothesisStatus status : statuses) {
    if (status == HypothesisStatus::TrueNull) ++m0;
  }
  table.u = m0 - table.v;
  table.t = (statuses.size() - m0) - table.s;
  return table;
}

// FDP = V / max(R, 1), so an empty rejection set counts as zero.
inline double fdp(const OutcomeTable& table) {
  return static_cast<double>(table.v) /
         static_cast<double>(std::max<std::size_t>(table.r(), 1));
}

// A (level, power, pi1) operating point for the analytic formulas.
struct DesignPoint {
  DesignPoint(double alpha, double power, double pi1) : alpha(alpha), power(power), pi1(pi1) {
    if (!(alpha >= 0.0 && alpha <= 1.0) || !(power >= 0.0 && power <= 1.0) ||
        !(pi1 >= 0.0 && pi1 <= 1.0)) {
      throw std::invalid_argument("DesignPoint: alpha, power, pi1 must lie in [0,1]");
    }
  }
  double alpha;
  double power;  // 1 - beta
  double pi1;
};

// PPV = (1-beta) pi1 / ((1-beta) pi1 + alpha (1-pi1)).
inline Probability ppv_formula(const DesignPoint& d) {
  const double hits = d.power * d.pi1;
  const double denominator = hits + d.alpha * (1.0 - d.pi1);
  if (denominator == 0.0) {
    throw std::domain_error("ppv_formula: undefined, no rejections in expectation");
  }
  return Probability(hits / denominator);
}

// mFDR = pi0 alpha / (pi0 alpha + pi1 (1-beta)); complements ppv_formula to 1.
inline double mfdr_analytic(const DesignPoint& d) {
  const double false_hits = d.alpha * (1.0 - d.pi1);
  const double denominator = false_hits + d.power * d.pi1;
  if (denominator == 0.0) {
    throw std::domain_error("mfdr_analytic: undefined, no rejections in expectation");
  }
  return false_hits / denominator;
}

namespace detail {

// Averaging over a sorted copy makes the mean exactly permutation-invariant.
inline double stable_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (const double value : values) sum += value;
  return sum / static_cast<double>(values.size());
}

}  // namespace detail

// Heterogeneous levels/powers reduce to the homogeneous formula with the
// averaged level and averaged power.
inline Probability ppv_formula_heterogeneous(std::span<const double> levels,
                                             std::span<const double> powers, double pi1) {
  if (levels.empty() || levels.size() != powers.size()) {
    throw std::invalid_argument(
        "ppv_formula_heterogeneous: levels and powers must be nonempty and equal-length");
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 0.0 && levels[i] <= 1.0) || !(powers[i] >= 0.0 && powers[i] <= 1.0)) {
      throw std::invalid_argument("ppv_formula_heterogeneous: entries must lie in [0,1]");
    }
  }
  const double mean_level = detail::stable_mean({levels.begin(), levels.end()});
  const double mean_power = detail::stable_mean({powers.begin(), powers.end()});
  return ppv_formula(DesignPoint(mean_level, mean_power, pi1));
}

// The smallest pi1 for which PPV >= 1/2 is attainable: pi1/(1-pi1) = alpha,
// i.e. pi1 = alpha/(1+alpha). Below it PPV < 1/2 even at power 1.
inline double min_pi1_for_ppv_half(Probability alpha) {
  if (!(alpha.value() > 0.0)) {
    throw std::invalid_argument("min_pi1_for_ppv_half: alpha must be positive");
  }
  return alpha.value() / (1.0 + alpha.value());
}

// One Monte Carlo rate estimate; `defined` is false when the estimand does
// not exist for the observed sample (mFDR and PPV with no rejections at all).
struct RateEstimate {
  double estimate = 0.0;
  double se = 0.0;
  bool defined = true;
};

struct RateSummary {
  RateEstimate fdr;   // mean of per-trial FDP
  RateEstimate mfdr;  // ratio of means: mean V / mean R
  RateEstimate fwer;  // fraction of trials with V >= 1
  RateEstimate ppv;   // mean S / mean R = 1 - mfdr
  std::size_t trials = 0;
};

namespace detail {

// Delta-method standard error of the ratio mean(num)/mean(den); pairs are
// sorted first so the estimate is independent of trial order.
inline RateEstimate ratio_estimate(std::vector<std::pair<double, double>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  const std::size_t n = pairs.size();
  double num_sum = 0.0;
  double den_sum = 0.0;
  for (const auto& [num, den] : pairs) {
    num_sum += num;
    den_sum += den;
  }
  if (den_sum == 0.0) return {0.0, 0.0, false};
  const double theta = num_sum / den_sum;
  if (n < 2) return {theta, 0.0, true};
  double residual_sq = 0.0;
  for (const auto& [num, den] : pairs) {
    const double res = num - theta * den;
    residual_sq += res * res;
  }
  const double den_mean = den_sum / static_cast<double>(n);
  const double se = std::sqrt(residual_sq / static_cast<double>(n - 1)) /
                    (den_mean * std::sqrt(static_cast<double>(n)));
  return {theta, se, true};
}

inline RateEstimate mean_estimate(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  double sum = 0.0;
  for (const double value : values) sum += value;
  const double mean = sum / static_cast<double>(n);
  if (n < 2) return {mean, 0.0, true};
  double sq = 0.0;
  for (const double value : values) {
    const double d = value - mean;
    sq += d * d;
  }
  const double sd = std::sqrt(sq / static_cast<double>(n - 1));
  return {mean, sd / std::sqrt(static_cast<double>(n)), true};
}

}  // namespace detail

// Aggregates per-trial outcome tables into rate estimates. FDR is the mean of
// per-trial FDPs; mFDR and PPV are ratio-of-means estimators and are flagged
// undefined when no trial rejected anything.
inline RateSummary estimate_rates(std::span<const OutcomeTable> tables) {
  if (tables.empty()) throw std::invalid_argument("estimate_rates: no tables");
  const std::size_t n = tables.size();

  std::vector<double> fdps;
  std::vector<double> hits;  // 1{V >= 1}
  std::vector<std::pair<double, double>> v_over_r;
  std::vector<std::pair<double, double>> s_over_r;
  fdps.reserve(n);
  hits.reserve(n);
  v_over_r.reserve(n);
  s_over_r.reserve(n);
  for (const OutcomeTable& table : tables) {
    fdps.push_back(fdp(table));
    hits.push_back(table.v >= 1 ? 1.0 : 0.0);
    v_over_r.emplace_back(static_cast<double>(table.v), static_cast<double>(table.r()));
    s_over_r.emplace_back(static_cast<double>(table.s), static_cast<double>(table.r()));
  }

  RateSummary summary;
  summary.trials = n;
  summary.fdr = detail::mean_estimate(std::move(fdps));
  summary.fwer = detail::mean_estimate(std::move(hits));
  summary.mfdr = detail::ratio_estimate(std::move(v_over_r));
  summary.ppv = detail::ratio_estimate(std::move(s_over_r));
  return summary;
}

// CSV fragment with fixed header `metric,estimate,stderr,trials,flag`.
inline std::string rate_summary_csv(const RateSummary& summary) {
  std::ostringstream out;
  out << "metric,estimate,stderr,trials,flag\n";
  const auto row = [&](const char* name, const RateEstimate& est) {
    out << name << ',';
    if (est.defined) {
      out << format_real(est.estimate) << ',' << format_real(est.se);
    } else {
      out << ',';
    }
    out << ',' << summary.trials << ',' << (est.defined ? "ok" : "undefined") << '\n';
  };
  row("fdr", summary.fdr);
  row("mfdr", summary.mfdr);
  row("fwer", summary.fwer);
  row("ppv", summary.ppv);
  return std::move(out).str();
}

}  // namespace mtlab
