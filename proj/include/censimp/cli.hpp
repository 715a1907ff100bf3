#pragma once

// Command implementations behind the CLI executable, written against
// streams/paths so integration tests can drive them without a process.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "censimp/cohort.hpp"
#include "censimp/errors.hpp"
#include "censimp/impute.hpp"
#include "censimp/io.hpp"
#include "censimp/simulate.hpp"

namespace censimp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitModel = 3;
inline constexpr int kExitScenario = 4;

struct Options {
  std::string input;
  std::string output;
  std::string agreement_output;
  Approach approach = Approach::extrapolated;
  ExtensionKind extension = ExtensionKind::weibull;
  Interpolation interpolation = Interpolation::carry_forward;
  std::optional<double> upper_cap;
  std::uint64_t seed = 1;
  int replicates = 200;
  std::string scenario = "weibull-light-n500";
  int trial_size = 200;
  double horizon = 2.0;
  int threads = 0;
  int resamples = 0;
  int cohort_size = 970;
};

namespace detail {

inline std::string na_or(double v) { return std::isfinite(v) ? format_double(v) : "NA"; }

inline ImputationConfig imputation_config(const Options& opt) {
  ImputationConfig config;
  config.approach = opt.approach;
  config.extension_kind = opt.extension;
  config.interpolation = opt.interpolation;
  config.upper_cap = opt.upper_cap;
  return config;
}

inline std::string common_manifest(const Options& opt, const std::string& command) {
  std::ostringstream m;
  m << "# manifest: command=" << command << " approach=" << to_string(opt.approach)
    << " extension=" << to_string(opt.extension) << " interpolation="
    << (opt.interpolation == Interpolation::mean ? "mean" : "carry-forward") << " upper_cap="
    << (opt.upper_cap ? format_double(*opt.upper_cap) : std::string("none"))
    << " seed=" << opt.seed;
  return m.str();
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file '" + path + "'", 0);
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open input file '" + path + "'", 0);
  return in;
}

}  // namespace detail

inline int run_impute(const Options& opt, std::ostream& err) {
  auto in = detail::open_input(opt.input);
  const DatasetFile file = read_dataset(in);
  auto out = detail::open_output(opt.output);
  out << detail::common_manifest(opt, "impute") << " input=" << opt.input << '\n';
  out << "y,w,delta";
  for (const auto& name : file.z_names) out << ',' << name;
  out << ",imputed,conditional_mean,survival_at_w,extension_fallback\n";
  if (file.records.empty()) {
    err << "warning: input has a header but no rows; nothing to impute\n";
    return kExitOk;
  }

  const ImputedDataset result = impute_dataset(file.records, detail::imputation_config(opt));
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    const auto& d = result.diagnostics[i];
    out << format_double(r.y) << ',' << format_double(r.w) << ',' << r.delta;
    for (Eigen::Index k = 0; k < r.z.size(); ++k) out << ',' << format_double(r.z(k));
    out << ',' << (d.imputed ? 1 : 0) << ','
        << (d.imputed ? format_double(d.conditional_mean) : std::string()) << ','
        << (std::isfinite(d.survival_at_w) ? format_double(d.survival_at_w) : std::string())
        << ',' << (d.used_fallback_extension ? 1 : 0) << '\n';
    if (!d.error.empty())
      err << "warning: record " << (i + 1) << " not imputed: " << d.error << '\n';
  }
  return kExitOk;
}

namespace detail {

inline void write_summary_rows(std::ostream& out, const SimulationSummary& summary) {
  static const char* params[3] = {"alpha", "beta", "gamma"};
  const MethodStats* stats[3] = {&summary.full_cohort, &summary.extrapolated,
                                 &summary.non_extrapolated};
  static const char* methods[3] = {"full-cohort", "extrapolated", "non-extrapolated"};
  out << "parameter,method,bias,percent_bias,se,relative_efficiency\n";
  for (int p = 0; p < 3; ++p) {
    for (int m = 0; m < 3; ++m) {
      const auto& s = *stats[m];
      const auto pi = static_cast<std::size_t>(p);
      out << params[p] << ',' << methods[m] << ',' << format_double(s.bias[pi]) << ','
          << format_double(s.percent_bias[pi]) << ',' << na_or(s.se[pi]) << ','
          << na_or(s.rel_efficiency[pi]) << '\n';
    }
  }
  out << "# censor_rate_observed=" << format_double(summary.censor_rate_observed) << '\n';
  out << "# extension_convergence_rate=" << format_double(summary.extension_convergence_rate)
      << '\n';
  out << "# replicates_completed=" << summary.replicates_completed
      << " replicates_failed=" << summary.replicates_failed << '\n';
}

inline ScenarioConfig scenario_config(const Options& opt) {
  ScenarioConfig config = parse_scenario(opt.scenario);
  config.replicates = opt.replicates;
  config.seed = opt.seed;
  config.threads = opt.threads;
  config.extension_kind = opt.extension;
  config.interpolation = opt.interpolation;
  return config;
}

}  // namespace detail

inline int run_simulate(const Options& opt, std::ostream& err) {
  const ScenarioConfig config = detail::scenario_config(opt);
  auto out = detail::open_output(opt.output);
  out << detail::common_manifest(opt, "simulate") << " scenario=" << opt.scenario
      << " replicates=" << opt.replicates << " n=" << config.n << '\n';
  const SimulationSummary summary = run_scenario(config);
  detail::write_summary_rows(out, summary);
  if (summary.replicates_failed > 0)
    err << "warning: " << summary.replicates_failed << " replicates failed\n";
  return kExitOk;
}

inline int run_recruit(const Options& opt, std::ostream& err) {
  std::vector<SubjectVisits> subjects;
  if (opt.input.empty()) {
    subjects = synthetic_cohort(opt.cohort_size, opt.seed).subjects;
  } else {
    auto in = detail::open_input(opt.input);
    subjects = read_visits(in);
  }

  const RecruitmentRun run =
      run_recruitment(subjects, opt.trial_size, opt.horizon, detail::imputation_config(opt));
  const RecruitmentList& list = opt.approach == Approach::extrapolated
                                    ? run.list_extrapolated
                                    : run.list_non_extrapolated;

  auto out = detail::open_output(opt.output);
  out << detail::common_manifest(opt, "recruit") << " trial_size=" << opt.trial_size
      << " horizon=" << format_double(opt.horizon)
      << " cohort=" << (opt.input.empty() ? "synthetic" : opt.input) << '\n';
  out << "rank,subject_id,delta_hat,predicted_end,recruited\n";
  for (const auto& entry : list.entries) {
    out << entry.rank << ',' << format_int(entry.subject_id) << ','
        << format_double(entry.delta_hat) << ',' << format_double(entry.predicted_end) << ','
        << (entry.rank <= list.trial_size ? 1 : 0) << '\n';
  }

  if (!opt.agreement_output.empty()) {
    auto agree = detail::open_output(opt.agreement_output);
    agree << detail::common_manifest(opt, "recruit-agreement")
          << " trial_size=" << opt.trial_size << " horizon=" << format_double(opt.horizon)
          << '\n';
    agree << "kind,both,neither,only_extrapolated,only_non_extrapolated,total,resamples\n";
    const AgreementCounts& c = run.agreement;
    agree << "single," << c.both_recruited << ',' << c.neither_recruited << ','
          << c.only_first << ',' << c.only_second << ',' << c.total() << ",1\n";
    if (opt.resamples > 0) {
      ResampleConfig rcfg;
      rcfg.n_resamples = opt.resamples;
      rcfg.trial_size = opt.trial_size;
      rcfg.horizon = opt.horizon;
      rcfg.seed = opt.seed;
      const AgreementSummary s =
          resample_agreement(subjects, rcfg, detail::imputation_config(opt));
      agree << "bootstrap-mean," << format_double(s.mean_both) << ','
            << format_double(s.mean_neither) << ',' << format_double(s.mean_only_extrapolated)
            << ',' << format_double(s.mean_only_non_extrapolated) << ','
            << format_double(s.mean_both + s.mean_neither + s.mean_only_extrapolated +
                             s.mean_only_non_extrapolated)
            << ',' << s.n_resamples << '\n';
    }
  }
  (void)err;
  return kExitOk;
}

inline int run_extend_study(const Options& opt, std::ostream& err) {
  auto out = detail::open_output(opt.output);
  out << detail::common_manifest(opt, "extend-study") << " scenario=" << opt.scenario
      << " replicates=" << opt.replicates << '\n';
  out << "extension,status,beta_bias,beta_percent_bias,beta_se,beta_relative_efficiency,"
         "extension_convergence_rate\n";
  const ExtensionKind kinds[4] = {ExtensionKind::weibull, ExtensionKind::exponential,
                                  ExtensionKind::drop_off, ExtensionKind::carry_forward};
  for (const ExtensionKind kind : kinds) {
    Options arm = opt;
    arm.extension = kind;
    const ScenarioConfig config = detail::scenario_config(arm);
    try {
      const SimulationSummary summary = run_scenario(config);
      const auto& s = summary.extrapolated;
      out << to_string(kind) << ",ok," << format_double(s.bias[1]) << ','
          << format_double(s.percent_bias[1]) << ',' << detail::na_or(s.se[1]) << ','
          << detail::na_or(s.rel_efficiency[1]) << ','
          << format_double(summary.extension_convergence_rate) << '\n';
    } catch (const ScenarioFailedError& e) {
      out << to_string(kind) << ",failed,,,,,\n";
      err << "note: extension " << to_string(kind) << " failed: " << e.what() << '\n';
    }
  }
  return kExitOk;
}

// Maps the library's exceptions onto the documented process exit codes.
template <typename F>
int guarded(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ScenarioFailedError& e) {
    err << "error: " << e.what() << '\n';
    return kExitScenario;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitModel;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitModel;
  }
}

}  // namespace censimp::cli
