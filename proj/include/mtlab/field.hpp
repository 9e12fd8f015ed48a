// Simulated field of investigation under the normal means model: m hypotheses
// with ground-truth statuses, Z-ratios, and one-sided P-values.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mtlab/normal.hpp"
#include "mtlab/rng.hpp"
#include "mtlab/text.hpp"
#include "mtlab/types.hpp"

namespace mtlab {

struct ModelParams {
  ModelParams(std::size_t m, double pi1, EffectSize mu) : m(m), pi1(pi1), mu(mu) {
    if (m == 0) throw std::invalid_argument("ModelParams: m must be at least 1");
    if (!(pi1 >= 0.0 && pi1 <= 1.0)) {
      throw std::invalid_argument("ModelParams: pi1 must lie in [0,1]");
    }
  }

  // m1 = round(pi1 * m); the counts are fixed, not sampled.
  std::size_t false_null_count() const {
    return static_cast<std::size_t>(std::llround(pi1 * static_cast<double>(m)));
  }
  std::size_t true_null_count() const { return m - false_null_count(); }

  std::size_t m;
  double pi1;
  EffectSize mu;
};

struct HypothesisField {
  std::vector<HypothesisStatus> statuses;
  std::vector<double> z_ratios;
  std::vector<double> p_values;  // p_i = 1 - Phi(z_i)
  ModelParams params;
};

enum class StatusPlacement {
  Shuffled,        // false nulls at uniformly random positions
  FirstFalseNulls  // deterministic: the first m1 indices
};

namespace detail {
// Block-counter domains keeping the placement shuffle and the Z draws on
// disjoint counter ranges of the same (seed, trial) stream.
inline constexpr std::uint64_t kZDomain = 0;
inline constexpr std::uint64_t kPlacementDomain = 1;
}  // namespace detail

// Draws one field: Z_i ~ N(0,1) under a true null and N(mu,1) under a false
// null, p_i = 1 - Phi(Z_i). Bitwise reproducible in (params, seed).
inline HypothesisField generate_field(const ModelParams& params, SeedSpec seed,
                                      StatusPlacement placement = StatusPlacement::Shuffled) {
  const std::size_t m = params.m;
  const std::size_t m1 = params.false_null_count();

  HypothesisField field{{}, {}, {}, params};
  field.statuses.assign(m, HypothesisStatus::TrueNull);
  std::fill_n(field.statuses.begin(), m1, HypothesisStatus::FalseNull);
  if (placement == StatusPlacement::Shuffled && m1 > 0 && m1 < m) {
    RandomStream shuffle(seed, detail::kPlacementDomain);
    for (std::size_t i = m - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle.next_below(i + 1));
      std::swap(field.statuses[i], field.statuses[j]);
    }
  }

  RandomStream draws(seed, detail::kZDomain);
  field.z_ratios.resize(m);
  field.p_values.resize(m);
  const double mu = params.mu.value();
  for (std::size_t i = 0; i < m; ++i) {
    double z = normal_quantile(draws.next_unit());
    if (field.statuses[i] == HypothesisStatus::FalseNull) z += mu;
    field.z_ratios[i] = z;
    field.p_values[i] = normal_cdf(-z).value();  // upper tail keeps tiny p accurate
  }
  return field;
}

// Fraction of P-values at or below t.
inline double empirical_pvalue_cdf(const HypothesisField& field, double t) {
  std::size_t count = 0;
  for (const double p : field.p_values) {
    if (p <= t) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(field.p_values.size());
}

// --- flat table format: header `index,status,z,p`, one row per hypothesis ---

inline const char* status_name(HypothesisStatus status) {
  return status == HypothesisStatus::TrueNull ? "TrueNull" : "FalseNull";
}

inline void write_field_table(std::ostream& out, const std::vector<HypothesisStatus>& statuses,
                              const std::vector<double>& z_ratios,
                              const std::vector<double>& p_values) {
  out << "index,status,z,p\n";
  for (std::size_t i = 0; i < statuses.size(); ++i) {
    out << i << ',' << status_name(statuses[i]) << ',' << format_real(z_ratios[i]) << ','
        << format_real(p_values[i]) << '\n';
  }
}

inline void write_field_table(std::ostream& out, const HypothesisField& field) {
  write_field_table(out, field.statuses, field.z_ratios, field.p_values);
}

// A field table loaded from disk; ground-truth model parameters are unknown.
struct FieldTable {
  std::vector<HypothesisStatus> statuses;
  std::vector<double> z_ratios;
  std::vector<double> p_values;
};

inline FieldTable read_field_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "index,status,z,p") {
    throw std::invalid_argument("field table: expected header `index,status,z,p`");
  }
  FieldTable table;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(text::trim(line), ',');
    if (cols.size() != 4) {
      throw std::invalid_argument("field table: row " + std::to_string(row) +
                                  " does not have 4 columns");
    }
    std::uint64_t index = 0;
    double z = 0.0;
    double p = 0.0;
    if (!text::parse_u64(cols[0], index) || index != row) {
      throw std::invalid_argument("field table: row " + std::to_string(row) + " has a bad index");
    }
    const std::string_view status = text::trim(cols[1]);
    if (status == "TrueNull") {
      table.statuses.push_back(HypothesisStatus::TrueNull);
    } else if (status == "FalseNull") {
      table.statuses.push_back(HypothesisStatus::FalseNull);
    } else {
      throw std::invalid_argument("field table: row " + std::to_string(row) +
                                  " has unknown status");
    }
    if (!text::parse_double(cols[2], z) || !text::parse_double(cols[3], p) ||
        !(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("field table: row " + std::to_string(row) +
                                  " has a bad z or p value");
    }
    table.z_ratios.push_back(z);
    table.p_values.push_back(p);
    ++row;
  }
  return table;
}

}  // namespace mtlab
