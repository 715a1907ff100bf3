#pragma once

// Synthetic longitudinal cohort shaped like a premanifest HD observational
// study, plus the end-to-end recruitment run and the bootstrap agreement
// harness comparing the two imputation approaches.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "censimp/impute.hpp"
#include "censimp/recruit.hpp"
#include "censimp/rng.hpp"

namespace censimp {

struct SyntheticCohort {
  std::vector<SubjectVisits> subjects;
  std::vector<double> true_time_start;  // first visit to diagnosis, unobserved when censored
  Eigen::VectorXd theta;                // progression coefficients behind cuhdrs_end
  double sigma = 1.2;                   // residual sd of the progression model
};

// Draws visit windows, a proportional-hazards time to diagnosis driven by
// age and CAG length, component symptom scores that worsen as diagnosis
// approaches, and an end score generated from the progression model itself.
inline SyntheticCohort synthetic_cohort(int n = 970, std::uint64_t seed = 7) {
  SyntheticCohort cohort;
  cohort.theta = Eigen::VectorXd(kProgressionCoefs);
  cohort.theta << 21.680, 0.084, 1.048, -0.024, -0.021, -0.089, 0.006;
  cohort.sigma = 1.2;
  cohort.subjects.resize(static_cast<std::size_t>(n));
  cohort.true_time_start.resize(static_cast<std::size_t>(n));

  constexpr double hazard_rate = 0.030;
  constexpr double hazard_shape = 1.2;
  constexpr double beta_age = 0.03;
  constexpr double beta_cag = 0.25;
  const long study_open = days_from_civil(2002, 1, 1);

  for (int i = 0; i < n; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i), 100);
    auto& s = cohort.subjects[static_cast<std::size_t>(i)];
    s.subject_id = i + 1;
    s.age_at_first_visit = std::clamp(rng.normal(44.0, 10.0), 21.0, 70.0);
    s.cag = 36 + std::min(static_cast<int>(rng.exponential(0.4)), 14);

    const long first_serial = study_open + static_cast<long>(rng.below(2192));
    const double follow_target = rng.uniform(1.0, 9.0);
    const long last_serial =
        first_serial + std::max(365L, std::lround(follow_target * 365.25));
    s.first_visit_date = civil_from_days(first_serial);
    s.last_visit_date = civil_from_days(last_serial);
    const double follow_up = years_between(s.first_visit_date, s.last_visit_date);

    const double lp = beta_age * (s.age_at_first_visit - 44.0) + beta_cag * (s.cag - 38.5);
    double t_diag =
        std::pow(-std::log(rng.uniform()) / (hazard_rate * std::exp(lp)), 1.0 / hazard_shape);
    if (t_diag <= follow_up) {
      const long offset = std::clamp(std::lround(t_diag * 365.25), 1L,
                                     last_serial - first_serial);
      s.diagnosis_date = civil_from_days(first_serial + offset);
      t_diag = years_between(s.first_visit_date, *s.diagnosis_date);
    }
    cohort.true_time_start[static_cast<std::size_t>(i)] = t_diag;

    // Symptom components drift with proximity to diagnosis.
    const double severity = 1.0 / (1.0 + std::exp(0.5 * t_diag));
    const double tfc = std::clamp(13.0 - 7.5 * severity + rng.normal(0.0, 0.5), 0.0, 13.0);
    const double tms = std::clamp(4.0 + 42.0 * severity + rng.normal(0.0, 3.0), 0.0, 124.0);
    const double sdmt = std::max(0.0, 52.0 - 26.0 * severity + rng.normal(0.0, 4.0));
    const double swr = std::max(0.0, 103.0 - 42.0 * severity + rng.normal(0.0, 6.0));
    s.cuhdrs_start = cuhdrs(tfc, tms, sdmt, swr);

    const double time_end_true = t_diag - follow_up;
    s.cuhdrs_end = progression_design_row(time_end_true, s.cuhdrs_start, s.age_at_first_visit,
                                          static_cast<double>(s.cag))
                       .dot(cohort.theta) +
                   rng.normal(0.0, cohort.sigma);
  }
  return cohort;
}

// ---------------------------------------------------------------------------
// One full recruitment run: impute under both approaches, fit both
// progression models, rank the censored subjects under each, and report the
// agreement partition between the two recruited sets.

struct RecruitmentRun {
  ImputedTimesResult times_extrapolated, times_non_extrapolated;
  RegressionFit fit_extrapolated, fit_non_extrapolated;
  RecruitmentList list_extrapolated, list_non_extrapolated;
  AgreementCounts agreement;
};

namespace detail {

inline RecruitmentList rank_arm(const std::vector<SubjectVisits>& subjects,
                                const std::vector<DerivedTimes>& base_times,
                                const ImputedTimesResult& imputed, const RegressionFit& fit,
                                int trial_size, double horizon) {
  std::vector<Prediction> predictions;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (!base_times[i].censored) continue;
    RecruitmentState state{subjects[i].subject_id, imputed.times[i].time_end,
                           subjects[i].cuhdrs_end, subjects[i].age_at_first_visit,
                           static_cast<double>(subjects[i].cag)};
    const double delta = predict_change(fit, state, horizon);
    predictions.push_back({state.subject_id, state.cuhdrs_now + delta, delta});
  }
  return rank_and_recruit(std::move(predictions), trial_size, horizon);
}

}  // namespace detail

inline RecruitmentRun run_recruitment(const std::vector<SubjectVisits>& subjects,
                                      int trial_size = 200, double horizon = 2.0,
                                      ImputationConfig config = {}) {
  const std::vector<DerivedTimes> base_times = derive_times(subjects);

  ImputationConfig ext_cfg = config;
  ext_cfg.approach = Approach::extrapolated;
  ImputationConfig non_cfg = config;
  non_cfg.approach = Approach::non_extrapolated;

  RecruitmentRun run;
  run.times_extrapolated = impute_times(subjects, base_times, ext_cfg);
  run.times_non_extrapolated = impute_times(subjects, base_times, non_cfg);
  run.fit_extrapolated =
      fit_progression(make_progression_rows(subjects, run.times_extrapolated.times));
  run.fit_non_extrapolated =
      fit_progression(make_progression_rows(subjects, run.times_non_extrapolated.times));
  run.list_extrapolated = detail::rank_arm(subjects, base_times, run.times_extrapolated,
                                           run.fit_extrapolated, trial_size, horizon);
  run.list_non_extrapolated = detail::rank_arm(subjects, base_times, run.times_non_extrapolated,
                                               run.fit_non_extrapolated, trial_size, horizon);
  run.agreement = compare_recruitment(run.list_extrapolated, run.list_non_extrapolated);
  return run;
}

// ---------------------------------------------------------------------------
// Bootstrap agreement study: the diagnosed subjects stay fixed, the censored
// pool is resampled with replacement, and each resample is pushed through
// both arms. Reported counts are means over resamples.

struct ResampleConfig {
  int n_resamples = 100;
  int trial_size = 200;
  double horizon = 2.0;
  std::uint64_t seed = 11;
};

struct AgreementSummary {
  double mean_both = 0.0;
  double mean_neither = 0.0;
  double mean_only_extrapolated = 0.0;
  double mean_only_non_extrapolated = 0.0;
  int n_resamples = 0;
  int pool_size = 0;  // censored candidates per resample
};

inline AgreementSummary resample_agreement(const std::vector<SubjectVisits>& subjects,
                                           const ResampleConfig& config = {},
                                           ImputationConfig imp_config = {}) {
  const std::vector<DerivedTimes> base_times = derive_times(subjects);
  std::vector<std::size_t> censored_idx;
  std::vector<SubjectVisits> fixed;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (base_times[i].censored)
      censored_idx.push_back(i);
    else
      fixed.push_back(subjects[i]);
  }
  if (censored_idx.empty()) throw TooFewRowsError();

  AgreementSummary summary;
  summary.n_resamples = config.n_resamples;
  summary.pool_size = static_cast<int>(censored_idx.size());

  for (int r = 0; r < config.n_resamples; ++r) {
    Rng rng(config.seed, static_cast<std::uint64_t>(r), 200);
    std::vector<SubjectVisits> resampled = fixed;
    for (std::size_t k = 0; k < censored_idx.size(); ++k) {
      SubjectVisits pick = subjects[censored_idx[rng.below(censored_idx.size())]];
      // Resampled candidates need distinct identities for stable ranking.
      pick.subject_id = static_cast<std::int64_t>(1000000 + k);
      resampled.push_back(pick);
    }
    const RecruitmentRun run =
        run_recruitment(resampled, config.trial_size, config.horizon, imp_config);
    summary.mean_both += run.agreement.both_recruited;
    summary.mean_neither += run.agreement.neither_recruited;
    summary.mean_only_extrapolated += run.agreement.only_first;
    summary.mean_only_non_extrapolated += run.agreement.only_second;
  }
  const auto denom = static_cast<double>(config.n_resamples);
  summary.mean_both /= denom;
  summary.mean_neither /= denom;
  summary.mean_only_extrapolated /= denom;
  summary.mean_only_non_extrapolated /= denom;
  return summary;
}

}  // namespace censimp
