// mtlab command line: simulate fields, apply threshold procedures, evaluate
// the PPV formulas and limit thresholds, and run Monte Carlo experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mtlab/mtlab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 1;
constexpr int kExitRuntimeFailure = 2;

mtlab::FieldTable load_table(const std::string& path) {
  if (path.empty() || path == "-") return mtlab::read_field_table(std::cin);
  std::ifstream in(path);
  if (!in) throw mtlab::ConfigError("cannot open input file: " + path);
  return mtlab::read_field_table(in);
}

mtlab::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mtlab::ConfigError("cannot open config file: " + path);
  return mtlab::parse_config(in);
}

void print_decision(const mtlab::ThresholdDecision& decision) {
  std::cout << mtlab::format_real(decision.tau.value()) << ',' << decision.s_hat << '\n';
  for (const std::size_t index : decision.rejected) std::cout << index << '\n';
}

void write_outputs(const mtlab::ExperimentReport& report, const std::string& csv_path,
                   const std::string& json_path) {
  const std::string csv = mtlab::report_to_csv(report);
  if (csv_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(csv_path);
    if (!out) throw mtlab::ConfigError("cannot open output file: " + csv_path);
    out << csv;
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw mtlab::ConfigError("cannot open output file: " + json_path);
    out << mtlab::report_to_json(report);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiple-testing simulation lab"};
  app.require_subcommand(1);

  // simulate: draw one field and emit the flat table
  auto* simulate = app.add_subcommand("simulate", "generate one hypothesis field as a table");
  std::uint64_t sim_m = 0;
  double sim_pi1 = 0.0;
  double sim_mu = 1.0;
  std::uint64_t sim_seed = 0;
  std::uint64_t sim_stream = 0;
  std::string sim_placement = "shuffled";
  std::string sim_out;
  simulate->add_option("--m", sim_m, "number of hypotheses")->required();
  simulate->add_option("--pi1", sim_pi1, "proportion of false nulls")->required();
  simulate->add_option("--mu", sim_mu, "alternative mean shift (required when pi1 > 0)");
  simulate->add_option("--seed", sim_seed, "master seed");
  simulate->add_option("--stream", sim_stream, "substream id (trial index)");
  simulate->add_option("--placement", sim_placement, "status placement: shuffled|first")
      ->check(CLI::IsMember({"shuffled", "first"}));
  simulate->add_option("--out", sim_out, "output file (default stdout)");

  // procedure subcommands: read a field table, print `tau,s_hat` + indices
  auto* alpha_cmd = app.add_subcommand("alpha", "fixed-alpha threshold test");
  double alpha_level = 0.0;
  std::string alpha_in;
  alpha_cmd->add_option("--alpha", alpha_level, "rejection threshold")->required();
  alpha_cmd->add_option("--in", alpha_in, "field table file (default stdin)");

  auto* bonf_cmd = app.add_subcommand("bonferroni", "Bonferroni FWER threshold test");
  double bonf_level = 0.0;
  std::string bonf_in;
  bonf_cmd->add_option("--level", bonf_level, "FWER level")->required();
  bonf_cmd->add_option("--in", bonf_in, "field table file (default stdin)");

  auto* bh_cmd = app.add_subcommand("bh", "Benjamini-Hochberg step-up test");
  double bh_gamma = 0.0;
  std::string bh_in;
  bh_cmd->add_option("--gamma", bh_gamma, "FDR level")->required();
  bh_cmd->add_option("--in", bh_in, "field table file (default stdin)");

  auto* oracle_cmd = app.add_subcommand("oracle", "oracle FDP threshold test");
  double oracle_gamma = 0.0;
  std::string oracle_in;
  oracle_cmd->add_option("--gamma", oracle_gamma, "FDP bound")->required();
  oracle_cmd->add_option("--in", oracle_in, "field table file (default stdin)");

  // ppv: analytic operating-point quantities
  auto* ppv_cmd = app.add_subcommand("ppv", "evaluate the PPV formula at a design point");
  double ppv_alpha = 0.0, ppv_power = 0.0, ppv_pi1 = 0.0;
  ppv_cmd->add_option("--alpha", ppv_alpha, "per-test level")->required();
  ppv_cmd->add_option("--power", ppv_power, "per-test power")->required();
  ppv_cmd->add_option("--pi1", ppv_pi1, "proportion of false nulls")->required();

  // limit: asymptotic threshold
  auto* limit_cmd = app.add_subcommand("limit", "limiting BH/oracle threshold");
  double limit_mu = 0.0, limit_pi1 = 0.0, limit_gamma = 0.0;
  limit_cmd->add_option("--mu", limit_mu, "limit effect size")->required();
  limit_cmd->add_option("--pi1", limit_pi1, "limit proportion of false nulls")->required();
  limit_cmd->add_option("--gamma", limit_gamma, "FDR level")->required();

  // experiment / converge: Monte Carlo campaigns from a config file
  auto* exp_cmd = app.add_subcommand("experiment", "run a Monte Carlo experiment config");
  std::string exp_config, exp_csv, exp_json;
  unsigned exp_workers = 0;
  exp_cmd->add_option("--config", exp_config, "config file")->required();
  exp_cmd->add_option("--workers", exp_workers, "worker threads (0 = all cores)");
  exp_cmd->add_option("--csv", exp_csv, "write the CSV report here (default stdout)");
  exp_cmd->add_option("--json", exp_json, "also write the JSON mirror here");

  auto* conv_cmd = app.add_subcommand("converge", "run an m-schedule convergence study");
  std::string conv_config, conv_csv, conv_json;
  unsigned conv_workers = 0;
  conv_cmd->add_option("--config", conv_config, "config file (must set m_schedule)")->required();
  conv_cmd->add_option("--workers", conv_workers, "worker threads (0 = all cores)");
  conv_cmd->add_option("--csv", conv_csv, "write the CSV report here (default stdout)");
  conv_cmd->add_option("--json", conv_json, "also write the JSON mirror here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitInvalidConfig;
  }

  try {
    if (simulate->parsed()) {
      if (sim_pi1 > 0.0 && !(sim_mu > 0.0)) {
        throw mtlab::ConfigError("simulate: --mu must be positive when pi1 > 0");
      }
      const mtlab::ModelParams params(static_cast<std::size_t>(sim_m), sim_pi1,
                                      mtlab::EffectSize(sim_pi1 > 0.0 ? sim_mu : 1.0));
      const auto placement = sim_placement == "first" ? mtlab::StatusPlacement::FirstFalseNulls
                                                      : mtlab::StatusPlacement::Shuffled;
      const auto field = mtlab::generate_field(
          params, mtlab::SeedSpec{sim_seed, sim_stream}, placement);
      if (sim_out.empty()) {
        mtlab::write_field_table(std::cout, field);
      } else {
        std::ofstream out(sim_out);
        if (!out) throw mtlab::ConfigError("cannot open output file: " + sim_out);
        mtlab::write_field_table(out, field);
      }
    } else if (alpha_cmd->parsed()) {
      const auto table = load_table(alpha_in);
      print_decision(mtlab::alpha_threshold(table.p_values, mtlab::Probability(alpha_level)));
    } else if (bonf_cmd->parsed()) {
      const auto table = load_table(bonf_in);
      print_decision(mtlab::bonferroni(table.p_values, mtlab::Probability(bonf_level)));
    } else if (bh_cmd->parsed()) {
      const auto table = load_table(bh_in);
      print_decision(mtlab::benjamini_hochberg(table.p_values, mtlab::Probability(bh_gamma)));
    } else if (oracle_cmd->parsed()) {
      const auto table = load_table(oracle_in);
      print_decision(mtlab::oracle_threshold(table.p_values, table.statuses,
                                             mtlab::Probability(oracle_gamma)));
    } else if (ppv_cmd->parsed()) {
      const mtlab::DesignPoint d(ppv_alpha, ppv_power, ppv_pi1);
      std::cout << "metric,value\n";
      std::cout << "ppv," << mtlab::format_real(mtlab::ppv_formula(d).value()) << '\n';
      std::cout << "mfdr," << mtlab::format_real(mtlab::mfdr_analytic(d)) << '\n';
      std::cout << "min_pi1_for_ppv_half,"
                << mtlab::format_real(mtlab::min_pi1_for_ppv_half(mtlab::Probability(ppv_alpha)))
                << '\n';
    } else if (limit_cmd->parsed()) {
      const mtlab::LimitParams lp(mtlab::EffectSize(limit_mu), limit_pi1,
                                  mtlab::Probability(limit_gamma));
      std::cout << mtlab::format_real(mtlab::lambda_infinity(lp)) << ','
                << mtlab::format_real(mtlab::bh_limit_threshold(lp).value()) << '\n';
    } else if (exp_cmd->parsed()) {
      const auto config = load_config(exp_config);
      write_outputs(mtlab::run_experiment(config, exp_workers), exp_csv, exp_json);
    } else if (conv_cmd->parsed()) {
      const auto config = load_config(conv_config);
      if (config.m_schedule.empty()) {
        throw mtlab::ConfigError("converge: config must set m_schedule");
      }
      write_outputs(mtlab::run_convergence_study(config, conv_workers), conv_csv, conv_json);
    }
  } catch (const mtlab::TrialError& e) {
    std::cerr << "runtime failure at " << e.what() << '\n';
    return kExitRuntimeFailure;
  } catch (const mtlab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntimeFailure;
  }
  return kExitOk;
}
