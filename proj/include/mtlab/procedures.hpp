// Threshold multiple tests: fixed-alpha, Bonferroni, Benjamini-Hochberg, and
// the oracle FDP threshold. Each returns the rejection threshold tau together
// with the rejection set {i : p_i <= tau}.

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "mtlab/types.hpp"

namespace mtlab {

struct ThresholdDecision {
  Probability tau;
  std::vector<std::size_t> rejected;  // ascending indices, exactly {i : p_i <= tau}
  std::size_t s_hat = 0;              // |rejected|
};

namespace detail {

inline ThresholdDecision reject_at(std::span<const double> p_values, double tau) {
  ThresholdDecision decision{Probability(tau), {}, 0};
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    if (p_values[i] <= tau) decision.rejected.push_back(i);
  }
  decision.s_hat = decision.rejected.size();
  return decision;
}

}  // namespace detail

// Rejects every p_i <= alpha.
inline ThresholdDecision alpha_threshold(std::span<const double> p_values, Probability alpha) {
  return detail::reject_at(p_values, alpha.value());
}

// Fixed-alpha test at alpha = fwer_level / m, controlling the FWER at
// fwer_level for any joint distribution of the P-values.
inline ThresholdDecision bonferroni(std::span<const double> p_values, Probability fwer_level) {
  if (p_values.empty()) throw std::invalid_argument("bonferroni: no P-values");
  if (!(fwer_level.value() > 0.0)) {
    throw std::invalid_argument("bonferroni: fwer_level must be positive");
  }
  return detail::reject_at(p_values, fwer_level.value() / static_cast<double>(p_values.size()));
}

// Step-up BH: with p_(1) <= ... <= p_(m), s_hat = max{s : p_(s) <= s*gamma/m}
// (0 if none) and tau = s_hat*gamma/m. Ties at tau are all rejected, which
// coincides with rejecting the s_hat smallest P-values.
inline ThresholdDecision benjamini_hochberg(std::span<const double> p_values, Probability gamma) {
  if (p_values.empty()) throw std::invalid_argument("benjamini_hochberg: no P-values");
  if (!(gamma.value() > 0.0 && gamma.value() < 1.0)) {
    throw std::invalid_argument("benjamini_hochberg: gamma must lie in (0,1)");
  }
  const std::size_t m = p_values.size();
  const auto step_threshold = [&](std::size_t s) {
    return static_cast<double>(s) * gamma.value() / static_cast<double>(m);
  };

  std::vector<double> sorted(p_values.begin(), p_values.end());
  std::sort(sorted.begin(), sorted.end());

  // Scan from the top: the first s with p_(s) <= s*gamma/m is the maximum.
  std::size_t s_hat = 0;
  for (std::size_t s = m; s >= 1; --s) {
    if (sorted[s - 1] <= step_threshold(s)) {
      s_hat = s;
      break;
    }
  }
  return detail::reject_at(p_values, step_threshold(s_hat));
}

// Oracle threshold tau* = max{t : FDP_t <= gamma}, where FDP_t counts false
// rejections among {p_i <= t} using the true statuses. FDP_t only changes at
// observed P-values, so the max over candidates {0} union {observed p} yields
// the same rejection set as the max over all t in [0,1].
inline ThresholdDecision oracle_threshold(std::span<const double> p_values,
                                          std::span<const HypothesisStatus> statuses,
                                          Probability gamma) {
  if (p_values.size() != statuses.size()) {
    throw std::invalid_argument("oracle_threshold: p_values and statuses differ in length");
  }
  if (!(gamma.value() > 0.0 && gamma.value() < 1.0)) {
    throw std::invalid_argument("oracle_threshold: gamma must lie in (0,1)");
  }
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

  double best = -1.0;
  std::size_t rejections = 0;
  std::size_t false_rejections = 0;
  std::size_t pos = 0;
  while (pos < m) {
    const double t = p_values[order[pos]];
    while (pos < m && p_values[order[pos]] == t) {  // absorb ties as one candidate
      if (statuses[order[pos]] == HypothesisStatus::TrueNull) ++false_rejections;
      ++rejections;
      ++pos;
    }
    const double fdp_at_t =
        static_cast<double>(false_rejections) / static_cast<double>(rejections);
    if (fdp_at_t <= gamma.value()) best = t;
  }
  // Candidate t = 0 (reject nothing for continuous P-values) always remains.
  return detail::reject_at(p_values, best >= 0.0 ? best : 0.0);
}

}  // namespace mtlab
