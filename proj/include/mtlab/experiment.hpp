// Experiment orchestration: reproducible Monte Carlo campaigns tying the
// field model, threshold procedures, metrics, and limit theory together.
//
// Trial k always draws from substream (master_seed, k), and aggregation runs
// over trial-indexed slots, so reports are byte-identical for any worker
// count and any completion order.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mtlab/asymptotics.hpp"
#include "mtlab/field.hpp"
#include "mtlab/metrics.hpp"
#include "mtlab/procedures.hpp"
#include "mtlab/text.hpp"

namespace mtlab {

enum class ProcedureKind { Alpha, Bonferroni, BH, Oracle };

inline const char* procedure_name(ProcedureKind kind) {
  switch (kind) {
    case ProcedureKind::Alpha: return "alpha";
    case ProcedureKind::Bonferroni: return "bonferroni";
    case ProcedureKind::BH: return "bh";
    case ProcedureKind::Oracle: return "oracle";
  }
  return "?";
}

// Raised for malformed configs or CLI inputs; maps to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a Monte Carlo trial fails; maps to exit code 2.
struct TrialError : std::runtime_error {
  TrialError(std::size_t trial, const std::string& what)
      : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial(trial) {}
  std::size_t trial;
};

struct ExperimentConfig {
  std::size_t m = 0;
  double pi1 = 0.0;
  double mu = 1.0;  // placeholder when pi1 == 0; never drawn in that case
  ProcedureKind procedure = ProcedureKind::BH;
  double param = 0.0;  // `level` for alpha/bonferroni, `gamma` for bh/oracle
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> m_schedule;  // nonempty only for convergence studies
};

inline bool procedure_uses_gamma(ProcedureKind kind) {
  return kind == ProcedureKind::BH || kind == ProcedureKind::Oracle;
}

inline void validate_config(const ExperimentConfig& config) {
  if (config.m == 0) throw ConfigError("config: m must be at least 1");
  if (!(config.pi1 >= 0.0 && config.pi1 <= 1.0)) throw ConfigError("config: pi1 must lie in [0,1]");
  if (config.pi1 > 0.0 && !(config.mu > 0.0)) throw ConfigError("config: mu must be positive");
  if (config.trials == 0) throw ConfigError("config: trials must be at least 1");
  if (procedure_uses_gamma(config.procedure)) {
    if (!(config.param > 0.0 && config.param < 1.0)) {
      throw ConfigError("config: gamma must lie in (0,1)");
    }
  } else if (config.procedure == ProcedureKind::Bonferroni) {
    if (!(config.param > 0.0 && config.param <= 1.0)) {
      throw ConfigError("config: level must lie in (0,1]");
    }
  } else if (!(config.param >= 0.0 && config.param <= 1.0)) {
    throw ConfigError("config: level must lie in [0,1]");
  }
  for (std::size_t i = 1; i < config.m_schedule.size(); ++i) {
    if (config.m_schedule[i] <= config.m_schedule[i - 1]) {
      throw ConfigError("config: m_schedule must be strictly increasing");
    }
  }
  if (!config.m_schedule.empty() && config.m_schedule.front() == 0) {
    throw ConfigError("config: m_schedule entries must be at least 1");
  }
}

// --- flat key-value config format -------------------------------------------
//
// One `key = value` pair per line; `#` starts a comment. Keys: m, pi1, mu,
// procedure, level|gamma, trials, seed, m_schedule (comma-separated).

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  bool saw_m = false, saw_pi1 = false, saw_mu = false, saw_procedure = false;
  bool saw_level = false, saw_gamma = false, saw_trials = false, saw_seed = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = text::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(text::trim(body.substr(0, eq)));
    const std::string_view value = text::trim(body.substr(eq + 1));
    const auto bad = [&](const char* what) {
      return ConfigError("config line " + std::to_string(line_no) + ": " + what);
    };

    if (key == "m") {
      std::uint64_t v = 0;
      if (!text::parse_u64(value, v)) throw bad("m must be a positive integer");
      config.m = static_cast<std::size_t>(v);
      saw_m = true;
    } else if (key == "pi1") {
      if (!text::parse_double(value, config.pi1)) throw bad("pi1 must be a real number");
      saw_pi1 = true;
    } else if (key == "mu") {
      if (!text::parse_double(value, config.mu)) throw bad("mu must be a real number");
      saw_mu = true;
    } else if (key == "procedure") {
      if (value == "alpha") config.procedure = ProcedureKind::Alpha;
      else if (value == "bonferroni") config.procedure = ProcedureKind::Bonferroni;
      else if (value == "bh") config.procedure = ProcedureKind::BH;
      else if (value == "oracle") config.procedure = ProcedureKind::Oracle;
      else throw bad("procedure must be one of alpha, bonferroni, bh, oracle");
      saw_procedure = true;
    } else if (key == "level") {
      if (!text::parse_double(value, config.param)) throw bad("level must be a real number");
      saw_level = true;
    } else if (key == "gamma") {
      if (!text::parse_double(value, config.param)) throw bad("gamma must be a real number");
      saw_gamma = true;
    } else if (key == "trials") {
      std::uint64_t v = 0;
      if (!text::parse_u64(value, v)) throw bad("trials must be a positive integer");
      config.trials = static_cast<std::size_t>(v);
      saw_trials = true;
    } else if (key == "seed") {
      if (!text::parse_u64(value, config.seed)) throw bad("seed must be a 64-bit unsigned integer");
      saw_seed = true;
    } else if (key == "m_schedule") {
      for (const auto& item : text::split(value, ',')) {
        std::uint64_t v = 0;
        if (!text::parse_u64(item, v)) throw bad("m_schedule entries must be positive integers");
        config.m_schedule.push_back(static_cast<std::size_t>(v));
      }
    } else {
      throw bad("unknown key");
    }
  }

  if (!saw_m) throw ConfigError("config: missing key m");
  if (!saw_pi1) throw ConfigError("config: missing key pi1");
  if (!saw_procedure) throw ConfigError("config: missing key procedure");
  if (!saw_trials) throw ConfigError("config: missing key trials");
  if (!saw_seed) throw ConfigError("config: missing key seed");
  if (config.pi1 > 0.0 && !saw_mu) throw ConfigError("config: mu is required when pi1 > 0");
  if (procedure_uses_gamma(config.procedure)) {
    if (!saw_gamma) throw ConfigError("config: gamma is required for bh/oracle");
    if (saw_level) throw ConfigError("config: level is not a bh/oracle key");
  } else {
    if (!saw_level) throw ConfigError("config: level is required for alpha/bonferroni");
    if (saw_gamma) throw ConfigError("config: gamma is not an alpha/bonferroni key");
  }
  validate_config(config);
  return config;
}

// Canonical form: fixed key order, one pair per line. parse(serialize(c))
// serializes back byte-identically.
inline std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "m = " << config.m << '\n';
  out << "pi1 = " << format_real(config.pi1) << '\n';
  out << "mu = " << format_real(config.mu) << '\n';
  out << "procedure = " << procedure_name(config.procedure) << '\n';
  out << (procedure_uses_gamma(config.procedure) ? "gamma = " : "level = ")
      << format_real(config.param) << '\n';
  out << "trials = " << config.trials << '\n';
  out << "seed = " << config.seed << '\n';
  if (!config.m_schedule.empty()) {
    out << "m_schedule = ";
    for (std::size_t i = 0; i < config.m_schedule.size(); ++i) {
      if (i > 0) out << ',';
      out << config.m_schedule[i];
    }
    out << '\n';
  }
  return std::move(out).str();
}

// --- Monte Carlo runner ------------------------------------------------------

namespace detail {

struct TrialOutcome {
  OutcomeTable table;
  double tau = 0.0;
};

inline ThresholdDecision apply_procedure(ProcedureKind kind, double param,
                                         const HypothesisField& field) {
  switch (kind) {
    case ProcedureKind::Alpha:
      return alpha_threshold(field.p_values, Probability(param));
    case ProcedureKind::Bonferroni:
      return bonferroni(field.p_values, Probability(param));
    case ProcedureKind::BH:
      return benjamini_hochberg(field.p_values, Probability(param));
    case ProcedureKind::Oracle:
      return oracle_threshold(field.p_values, field.statuses, Probability(param));
  }
  throw std::logic_error("apply_procedure: unreachable");
}

inline unsigned effective_workers(unsigned requested, std::size_t trials) {
  unsigned workers = requested != 0 ? requested : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (static_cast<std::size_t>(workers) > trials) workers = static_cast<unsigned>(trials);
  return workers;
}

// Runs `trials` independent trials with per-trial substreams, in parallel.
// Results land in trial-indexed slots; a failure aborts with the lowest
// failing trial index.
inline std::vector<TrialOutcome> run_trials(const ModelParams& model, ProcedureKind kind,
                                            double param, std::size_t trials,
                                            std::uint64_t master_seed, unsigned workers) {
  std::vector<TrialOutcome> outcomes(trials);
  const auto one_trial = [&](std::size_t k) {
    const HypothesisField field = generate_field(model, SeedSpec{master_seed, k});
    const ThresholdDecision decision = apply_procedure(kind, param, field);
    outcomes[k] = {tabulate(decision, field.statuses), decision.tau.value()};
  };

  const unsigned n_workers = effective_workers(workers, trials);
  if (n_workers <= 1) {
    for (std::size_t k = 0; k < trials; ++k) {
      try {
        one_trial(k);
      } catch (const std::exception& e) {
        throw TrialError(k, e.what());
      }
    }
    return outcomes;
  }

  std::mutex failure_mutex;
  std::optional<std::pair<std::size_t, std::string>> failure;
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < trials; k += n_workers) {
        try {
          one_trial(k);
        } catch (const std::exception& e) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure || k < failure->first) failure = {k, e.what()};
          return;
        }
      }
    });
  }
  for (auto& thread : pool) thread.join();
  if (failure) throw TrialError(failure->first, failure->second);
  return outcomes;
}

}  // namespace detail

// One row of the report CSV; optional cells serialize as empty fields.
struct MetricRow {
  std::size_t m = 0;
  double pi1 = 0.0;
  double mu = 0.0;
  std::string procedure;
  double param = 0.0;
  std::string metric;
  std::optional<double> estimate;
  std::optional<double> se;
  std::size_t trials = 0;
  std::optional<double> target;
  std::string flag = "ok";
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<MetricRow> rows;
};

namespace detail {

inline void append_block_rows(std::vector<MetricRow>& rows, const ExperimentConfig& config,
                              std::size_t m, const std::vector<TrialOutcome>& outcomes,
                              std::optional<double> limit_target) {
  std::vector<OutcomeTable> tables;
  std::vector<double> taus;
  tables.reserve(outcomes.size());
  taus.reserve(outcomes.size());
  for (const TrialOutcome& outcome : outcomes) {
    tables.push_back(outcome.table);
    taus.push_back(outcome.tau);
  }
  const RateSummary rates = estimate_rates(tables);
  const RateEstimate mean_tau = detail::mean_estimate(taus);
  const double sd_tau = mean_tau.se * std::sqrt(static_cast<double>(outcomes.size()));

  MetricRow base;
  base.m = m;
  base.pi1 = config.pi1;
  base.mu = config.mu;
  base.procedure = procedure_name(config.procedure);
  base.param = config.param;
  base.trials = outcomes.size();

  const auto push_rate = [&](const char* name, const RateEstimate& est) {
    MetricRow row = base;
    row.metric = name;
    if (est.defined) {
      row.estimate = est.estimate;
      row.se = est.se;
    } else {
      row.flag = "undefined";
    }
    rows.push_back(std::move(row));
  };
  push_rate("fdr", rates.fdr);
  push_rate("mfdr", rates.mfdr);
  push_rate("fwer", rates.fwer);
  push_rate("ppv", rates.ppv);

  MetricRow tau_row = base;
  tau_row.metric = "mean_tau";
  tau_row.estimate = mean_tau.estimate;
  tau_row.se = mean_tau.se;
  tau_row.target = limit_target;
  rows.push_back(tau_row);

  MetricRow sd_row = base;
  sd_row.metric = "sd_tau";
  sd_row.estimate = sd_tau;
  // Normal-approximation standard error of a sample SD.
  sd_row.se = outcomes.size() > 1
                  ? sd_tau / std::sqrt(2.0 * static_cast<double>(outcomes.size() - 1))
                  : 0.0;
  rows.push_back(sd_row);

  if (limit_target) {
    MetricRow dev_row = base;
    dev_row.metric = "tau_deviation";
    dev_row.estimate = std::fabs(mean_tau.estimate - *limit_target);
    dev_row.se = mean_tau.se;
    dev_row.target = limit_target;
    rows.push_back(std::move(dev_row));
  }
}

inline std::optional<double> limit_target_for(const ExperimentConfig& config) {
  if (!procedure_uses_gamma(config.procedure)) return std::nullopt;
  if (!(config.pi1 > 0.0 && config.pi1 < 1.0)) return std::nullopt;
  const LimitParams lp(EffectSize(config.mu), config.pi1, Probability(config.param));
  return bh_limit_threshold(lp).value();
}

}  // namespace detail

// Runs config.trials trials at config.m and aggregates the rate estimates.
// For bh/oracle with pi1 in (0,1) the limiting threshold is attached as the
// mean_tau target. workers = 0 means use all hardware threads; the worker
// count never changes the report.
inline ExperimentReport run_experiment(const ExperimentConfig& config, unsigned workers = 0) {
  validate_config(config);
  ExperimentReport report{config, {}};
  const ModelParams model(config.m, config.pi1, EffectSize(config.mu));
  const auto outcomes =
      detail::run_trials(model, config.procedure, config.param, config.trials, config.seed, workers);
  detail::append_block_rows(report.rows, config, config.m, outcomes,
                            detail::limit_target_for(config));
  return report;
}

// Convergence study over config.m_schedule: one block of rows per m, all m
// sharing the same per-trial seed family (common random numbers).
inline ExperimentReport run_convergence_study(const ExperimentConfig& config,
                                              unsigned workers = 0) {
  validate_config(config);
  if (config.m_schedule.empty()) {
    throw ConfigError("run_convergence_study: config has no m_schedule");
  }
  ExperimentReport report{config, {}};
  const auto target = detail::limit_target_for(config);
  for (const std::size_t m : config.m_schedule) {
    const ModelParams model(m, config.pi1, EffectSize(config.mu));
    const auto outcomes =
        detail::run_trials(model, config.procedure, config.param, config.trials, config.seed, workers);
    detail::append_block_rows(report.rows, config, m, outcomes, target);
  }
  return report;
}

// PPV consistency check: the alpha-threshold test on fields whose mu is
// derived from the requested power, so that level and power match the design
// point exactly.
struct PpvCheckResult {
  double mu = 0.0;           // shift realizing the requested power
  double formula_ppv = 0.0;  // Eq. PPV at the design point
  RateEstimate empirical_ppv;
  double z_score = 0.0;  // (empirical - formula) / SE
  RateSummary rates;
};

inline PpvCheckResult ppv_consistency_check(const DesignPoint& d, std::size_t m,
                                            std::size_t trials, std::uint64_t master_seed,
                                            unsigned workers = 0) {
  const EffectSize mu = effect_for_power(d.alpha, d.power);
  const ModelParams model(m, d.pi1, mu);
  const auto outcomes =
      detail::run_trials(model, ProcedureKind::Alpha, d.alpha, trials, master_seed, workers);
  std::vector<OutcomeTable> tables;
  tables.reserve(outcomes.size());
  for (const auto& outcome : outcomes) tables.push_back(outcome.table);

  PpvCheckResult result;
  result.mu = mu.value();
  result.formula_ppv = d.pi1 > 0.0 ? ppv_formula(d).value() : 0.0;
  result.rates = estimate_rates(tables);
  result.empirical_ppv = result.rates.ppv;
  if (result.empirical_ppv.defined && result.empirical_ppv.se > 0.0) {
    result.z_score = (result.empirical_ppv.estimate - result.formula_ppv) / result.empirical_ppv.se;
  }
  return result;
}

// --- report serialization ----------------------------------------------------

inline constexpr const char* kReportCsvHeader =
    "m,pi1,mu,procedure,param,metric,estimate,stderr,trials,target,flag";

inline std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << kReportCsvHeader << '\n';
  const auto cell = [](const std::optional<double>& value) {
    return value ? format_real(*value) : std::string();
  };
  for (const MetricRow& row : report.rows) {
    out << row.m << ',' << format_real(row.pi1) << ',' << format_real(row.mu) << ','
        << row.procedure << ',' << format_real(row.param) << ',' << row.metric << ','
        << cell(row.estimate) << ',' << cell(row.se) << ',' << row.trials << ','
        << cell(row.target) << ',' << row.flag << '\n';
  }
  return std::move(out).str();
}

// JSON mirror: an array of row objects with the same field names as the CSV
// columns; missing values are null, reals carry 17 significant digits.
inline std::string report_to_json(const ExperimentReport& report) {
  std::ostringstream out;
  const auto cell = [](const std::optional<double>& value) {
    return value ? format_real(*value) : std::string("null");
  };
  out << "[\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const MetricRow& row = report.rows[i];
    out << "  {\"m\": " << row.m << ", \"pi1\": " << format_real(row.pi1)
        << ", \"mu\": " << format_real(row.mu) << ", \"procedure\": \"" << row.procedure
        << "\", \"param\": " << format_real(row.param) << ", \"metric\": \"" << row.metric
        << "\", \"estimate\": " << cell(row.estimate) << ", \"stderr\": " << cell(row.se)
        << ", \"trials\": " << row.trials << ", \"target\": " << cell(row.target)
        << ", \"flag\": \"" << row.flag << "\"}" << (i + 1 < report.rows.size() ? "," : "") << '\n';
  }
  out << "]\n";
  return std::move(out).str();
}

}  // namespace mtlab
