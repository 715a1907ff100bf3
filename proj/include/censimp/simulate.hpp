#pragma once

// Monte Carlo study comparing the full-cohort analysis with both imputation
// approaches on synthetic right-censored covariates. Replicates draw from
// counter-based streams and run in parallel with slot-indexed outputs, so a
// summary is bit-identical regardless of thread count.

#include <Eigen/Dense>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "censimp/data.hpp"
#include "censimp/errors.hpp"
#include "censimp/impute.hpp"
#include "censimp/regression.hpp"
#include "censimp/rng.hpp"

namespace censimp {

enum class XFamily { weibull, lognormal };

inline const char* to_string(XFamily f) {
  return f == XFamily::weibull ? "weibull" : "lognormal";
}

struct ScenarioConfig {
  int n = 500;
  XFamily x_family = XFamily::weibull;
  double weibull_shape = 0.75;
  double weibull_scale_base = 0.25;
  double weibull_scale_z = 0.25;
  double lognormal_mean_z = 0.05;
  double lognormal_var = 0.25;
  double censor_rate = 0.5;
  double alpha = 1.0;
  double beta = 0.5;
  double gamma = 0.25;
  double sigma = 1.0;
  int replicates = 200;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  ExtensionKind extension_kind = ExtensionKind::weibull;
  Interpolation interpolation = Interpolation::carry_forward;
};

struct GeneratedData {
  Dataset records;
  std::vector<double> true_x;
};

inline GeneratedData generate_dataset(const ScenarioConfig& config, std::uint64_t replicate) {
  Rng rng(config.seed, replicate, 0);
  GeneratedData out;
  out.records.resize(static_cast<std::size_t>(config.n));
  out.true_x.resize(static_cast<std::size_t>(config.n));
  const double sd_log = std::sqrt(config.lognormal_var);
  for (int i = 0; i < config.n; ++i) {
    auto& r = out.records[static_cast<std::size_t>(i)];
    const double z = rng.bernoulli(0.5) ? 1.0 : 0.0;
    double x;
    if (config.x_family == XFamily::weibull) {
      x = rng.weibull(config.weibull_shape, config.weibull_scale_base + config.weibull_scale_z * z);
    } else {
      x = rng.lognormal(config.lognormal_mean_z * z, sd_log);
    }
    const double c = rng.exponential(config.censor_rate);
    const double e = rng.normal();
    r.y = config.alpha + config.beta * x + config.gamma * z + config.sigma * e;
    r.w = std::min(x, c);
    r.delta = (x <= c) ? 1 : 0;
    r.z = Eigen::VectorXd::Constant(1, z);
    out.true_x[static_cast<std::size_t>(i)] = x;
  }
  return out;
}

struct MethodStats {
  std::array<double, 3> bias{};          // alpha, beta, gamma
  std::array<double, 3> percent_bias{};
  std::array<double, 3> se{};
  std::array<double, 3> rel_efficiency{};
};

struct SimulationSummary {
  MethodStats full_cohort, extrapolated, non_extrapolated;
  double censor_rate_observed = 0.0;
  double extension_convergence_rate = 1.0;
  int replicates_completed = 0;
  int replicates_failed = 0;
};

namespace detail {

struct ReplicateOutcome {
  bool ok = false;
  std::array<Eigen::Vector3d, 3> theta;  // full, extrapolated, non_extrapolated
  double censored_frac = 0.0;
  bool used_fallback = false;
  std::string error;
};

inline Eigen::Vector3d fit_theta(const Dataset& records, const std::vector<double>* true_x) {
  const auto n = static_cast<Eigen::Index>(records.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    X(i, 1) = true_x ? (*true_x)[static_cast<std::size_t>(i)] : r.w;
    X(i, 2) = r.z(0);
    y(i) = r.y;
  }
  return fit_ols(X, y).theta;
}

inline ReplicateOutcome run_replicate(const ScenarioConfig& config, std::uint64_t rep) {
  ReplicateOutcome out;
  try {
    GeneratedData data = generate_dataset(config, rep);
    int censored = 0;
    for (const auto& r : data.records) censored += (r.delta == 0);
    out.censored_frac = static_cast<double>(censored) / static_cast<double>(config.n);

    out.theta[0] = fit_theta(data.records, &data.true_x);

    ImputationConfig ext_cfg;
    ext_cfg.approach = Approach::extrapolated;
    ext_cfg.extension_kind = config.extension_kind;
    ext_cfg.interpolation = config.interpolation;
    ImputedDataset ext = impute_dataset(data.records, ext_cfg);
    out.used_fallback = ext.used_fallback_extension;
    out.theta[1] = fit_theta(ext.records, nullptr);

    ImputationConfig non_cfg;
    non_cfg.approach = Approach::non_extrapolated;
    non_cfg.interpolation = config.interpolation;
    ImputedDataset non = impute_dataset(data.records, non_cfg);
    out.theta[2] = fit_theta(non.records, nullptr);

    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace detail

inline SimulationSummary run_scenario(const ScenarioConfig& config) {
  const auto reps = static_cast<std::size_t>(config.replicates);
  std::vector<detail::ReplicateOutcome> slots(reps);

  unsigned n_threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                          : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(reps));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= reps) return;
      slots[rep] = detail::run_replicate(config, rep);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SimulationSummary summary;
  std::array<std::array<std::vector<double>, 3>, 3> estimates;  // method x param
  double censored_sum = 0.0;
  int fallbacks = 0;
  for (const auto& slot : slots) {
    if (!slot.ok) {
      ++summary.replicates_failed;
      continue;
    }
    ++summary.replicates_completed;
    censored_sum += slot.censored_frac;
    fallbacks += slot.used_fallback ? 1 : 0;
    for (int m = 0; m < 3; ++m)
      for (int p = 0; p < 3; ++p)
        estimates[static_cast<std::size_t>(m)][static_cast<std::size_t>(p)].push_back(
            slot.theta[static_cast<std::size_t>(m)](p));
  }
  if (summary.replicates_completed == 0) {
    throw ScenarioFailedError(slots.empty() ? "no replicates requested"
                                            : "all replicates failed: " + slots.front().error);
  }

  const double truth[3] = {config.alpha, config.beta, config.gamma};
  const auto completed = static_cast<double>(summary.replicates_completed);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::array<std::array<double, 3>, 3> variance{};
  MethodStats* stats[3] = {&summary.full_cohort, &summary.extrapolated,
                           &summary.non_extrapolated};
  for (int m = 0; m < 3; ++m) {
    for (int p = 0; p < 3; ++p) {
      const auto& est = estimates[static_cast<std::size_t>(m)][static_cast<std::size_t>(p)];
      double mean = 0.0;
      for (double v : est) mean += v;
      mean /= completed;
      double var = nan;
      if (est.size() > 1) {
        var = 0.0;
        for (double v : est) var += (v - mean) * (v - mean);
        var /= (completed - 1.0);
      }
      variance[static_cast<std::size_t>(m)][static_cast<std::size_t>(p)] = var;
      auto& s = *stats[m];
      s.bias[static_cast<std::size_t>(p)] = mean - truth[p];
      s.percent_bias[static_cast<std::size_t>(p)] = 100.0 * (mean - truth[p]) / truth[p];
      s.se[static_cast<std::size_t>(p)] = est.size() > 1 ? std::sqrt(var) : nan;
    }
  }
  for (int m = 0; m < 3; ++m)
    for (int p = 0; p < 3; ++p)
      stats[m]->rel_efficiency[static_cast<std::size_t>(p)] =
          variance[0][static_cast<std::size_t>(p)] / variance[static_cast<std::size_t>(m)][static_cast<std::size_t>(p)];

  summary.censor_rate_observed = censored_sum / completed;
  summary.extension_convergence_rate = 1.0 - static_cast<double>(fallbacks) / completed;
  return summary;
}

// Named scenarios follow "<family>-<censoring>-n<size>", e.g.
// "weibull-extra-heavy-n500". Censoring labels map to the exponential rates
// that produce roughly 17/49/82 percent censoring for Weibull covariates and
// 20/35/80 percent for lognormal ones.
inline ScenarioConfig parse_scenario(const std::string& name) {
  const auto npos = std::string::npos;
  const auto n_mark = name.rfind("-n");
  if (n_mark == npos || n_mark + 2 >= name.size())
    throw ParseError("scenario name must end in -n<size>: " + name, 0);
  const auto fam_end = name.find('-');
  if (fam_end == npos || fam_end >= n_mark)
    throw ParseError("scenario name must be <family>-<censoring>-n<size>: " + name, 0);

  ScenarioConfig config;
  const std::string family = name.substr(0, fam_end);
  if (family == "weibull") {
    config.x_family = XFamily::weibull;
  } else if (family == "lognormal") {
    config.x_family = XFamily::lognormal;
  } else {
    throw ParseError("unknown covariate family: " + family, 0);
  }

  std::string censoring = name.substr(fam_end + 1, n_mark - fam_end - 1);
  if (censoring == "extraheavy") censoring = "extra-heavy";
  const bool weib = config.x_family == XFamily::weibull;
  if (censoring == "light") {
    config.censor_rate = weib ? 0.5 : 0.2;
  } else if (censoring == "heavy") {
    config.censor_rate = weib ? 2.9 : 0.4;
  } else if (censoring == "extra-heavy") {
    config.censor_rate = weib ? 20.0 : 1.67;
  } else {
    throw ParseError("unknown censoring level: " + censoring, 0);
  }

  try {
    config.n = std::stoi(name.substr(n_mark + 2));
  } catch (const std::exception&) {
    throw ParseError("bad sample size in scenario name: " + name, 0);
  }
  if (config.n < 2) throw ParseError("scenario sample size must be at least 2", 0);
  return config;
}

}  // namespace censimp
