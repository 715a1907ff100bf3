// censimp command line: conditional-mean imputation for right-censored
// covariates, the simulation harness, and the recruitment pipeline.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "censimp/censimp.hpp"

namespace {

using censimp::Approach;
using censimp::ExtensionKind;
using censimp::Interpolation;

void add_model_flags(CLI::App* cmd, censimp::cli::Options& opt) {
  const std::map<std::string, Approach> approaches{
      {"extrapolated", Approach::extrapolated},
      {"non-extrapolated", Approach::non_extrapolated}};
  const std::map<std::string, ExtensionKind> extensions{
      {"weibull", ExtensionKind::weibull},
      {"exponential", ExtensionKind::exponential},
      {"drop-off", ExtensionKind::drop_off},
      {"carry-forward", ExtensionKind::carry_forward}};
  const std::map<std::string, Interpolation> interpolations{
      {"carry-forward", Interpolation::carry_forward}, {"mean", Interpolation::mean}};
  cmd->add_option("--approach", opt.approach, "Integration approach for conditional means")
      ->transform(CLI::CheckedTransformer(approaches, CLI::ignore_case));
  cmd->add_option("--extension", opt.extension, "Tail extension beyond the last event")
      ->transform(CLI::CheckedTransformer(extensions, CLI::ignore_case));
  cmd->add_option("--interpolation", opt.interpolation,
                  "Baseline value at censored knots")
      ->transform(CLI::CheckedTransformer(interpolations, CLI::ignore_case));
  cmd->add_option("--upper-cap", opt.upper_cap,
                  "Finite integration horizon in years (default: none)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opt.seed, "RNG seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impute right-censored covariates by conditional means"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a key=value config file");
  app.get_config_formatter_base()->comment('#');

  censimp::cli::Options opt;

  CLI::App* impute = app.add_subcommand("impute", "Impute a censored-covariate dataset");
  impute->add_option("--input", opt.input, "Input CSV (columns y,w,delta,z...)")->required();
  impute->add_option("--output", opt.output, "Output CSV")->required();
  add_model_flags(impute, opt);

  CLI::App* simulate = app.add_subcommand("simulate", "Run a Monte Carlo scenario");
  simulate->add_option("--scenario", opt.scenario,
                       "Scenario name, <family>-<censoring>-n<size>");
  simulate->add_option("--replicates", opt.replicates, "Replicates to run")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
  simulate->add_option("--output", opt.output, "Output CSV")->required();
  add_model_flags(simulate, opt);

  CLI::App* recruit = app.add_subcommand("recruit", "Rank trial candidates by predicted decline");
  recruit->add_option("--input", opt.input,
                      "Visit CSV; omitted means the built-in synthetic cohort");
  recruit->add_option("--output", opt.output, "Ranked list CSV")->required();
  recruit->add_option("--agreement-output", opt.agreement_output,
                      "Also write the two-approach agreement summary here");
  recruit->add_option("--trial-size", opt.trial_size, "Subjects to recruit")
      ->check(CLI::PositiveNumber);
  recruit->add_option("--horizon", opt.horizon, "Trial length in years")
      ->check(CLI::PositiveNumber);
  recruit->add_option("--resamples", opt.resamples,
                      "Bootstrap resamples for the agreement summary (0 = single run)");
  recruit->add_option("--cohort-size", opt.cohort_size, "Synthetic cohort size")
      ->check(CLI::PositiveNumber);
  add_model_flags(recruit, opt);

  CLI::App* extend = app.add_subcommand("extend-study",
                                        "Compare tail extensions on one scenario");
  extend->add_option("--scenario", opt.scenario, "Scenario name");
  extend->add_option("--replicates", opt.replicates, "Replicates per extension")
      ->check(CLI::PositiveNumber);
  extend->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
  extend->add_option("--output", opt.output, "Output CSV")->required();
  add_model_flags(extend, opt);

  CLI11_PARSE(app, argc, argv);

  return censimp::cli::guarded(
      [&]() -> int {
        if (impute->parsed()) return censimp::cli::run_impute(opt, std::cerr);
        if (simulate->parsed()) return censimp::cli::run_simulate(opt, std::cerr);
        if (recruit->parsed()) return censimp::cli::run_recruit(opt, std::cerr);
        return censimp::cli::run_extend_study(opt, std::cerr);
      },
      std::cerr);
}
