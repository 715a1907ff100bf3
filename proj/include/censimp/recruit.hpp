#pragma once

// Trial-recruitment pipeline on longitudinal visit data: derive times to
// diagnosis, impute the censored ones, fit the symptom-progression model,
// predict per-subject symptom change over a trial horizon, and rank
// candidates by steepest predicted decline.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "censimp/data.hpp"
#include "censimp/errors.hpp"
#include "censimp/impute.hpp"
#include "censimp/regression.hpp"
#include "censimp/rng.hpp"

namespace censimp {

// ---------------------------------------------------------------------------
// Calendar dates as serial day counts (proleptic Gregorian, epoch 1970-01-01).

struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;
};

inline long days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<long>(era) * 146097 + static_cast<long>(doe) - 719468;
}

inline Date civil_from_days(long serial) {
  serial += 719468;
  const long era = (serial >= 0 ? serial : serial - 146096) / 146097;
  const auto doe = static_cast<unsigned long>(serial - era * 146097);
  const unsigned long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long y = static_cast<long>(yoe) + era * 400;
  const auto doy = static_cast<unsigned>(doe - (365 * yoe + yoe / 4 - yoe / 100));
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return Date{static_cast<int>(y + (m <= 2)), m, d};
}

inline long to_serial(const Date& date) { return days_from_civil(date.year, date.month, date.day); }

inline double years_between(const Date& from, const Date& to) {
  return static_cast<double>(to_serial(to) - to_serial(from)) / 365.25;
}

// ---------------------------------------------------------------------------
// Subject-level inputs and derived time variables.

struct SubjectVisits {
  std::int64_t subject_id = 0;
  Date first_visit_date;
  Date last_visit_date;
  std::optional<Date> diagnosis_date;
  double age_at_first_visit = 0.0;
  int cag = 36;
  double cuhdrs_start = 0.0;
  double cuhdrs_end = 0.0;
};

struct DerivedTimes {
  double time_start = 0.0;  // first visit to diagnosis; = follow_up when censored
  bool censored = false;
  double follow_up = 0.0;   // first visit to last visit
  double time_end = 0.0;    // last visit to diagnosis; negative if diagnosed earlier
};

// Composite symptom score; decreases as symptoms worsen.
inline double cuhdrs(double tfc, double tms, double sdmt, double swr) {
  return (tfc - 10.4) / 1.9 - (tms - 29.7) / 14.9 + (sdmt - 28.4) / 11.3 +
         (swr - 66.1) / 20.1 + 10.0;
}

inline std::vector<DerivedTimes> derive_times(const std::vector<SubjectVisits>& subjects) {
  std::vector<DerivedTimes> out(subjects.size());
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    const auto& s = subjects[i];
    auto& t = out[i];
    t.follow_up = years_between(s.first_visit_date, s.last_visit_date);
    if (!(t.follow_up > 0.0))
      throw InvalidDatesError("subject " + std::to_string(s.subject_id) +
                              ": last visit does not follow the first");
    if (s.diagnosis_date) {
      const double dt = years_between(s.first_visit_date, *s.diagnosis_date);
      if (dt < 0.0 || dt > t.follow_up)
        throw InvalidDatesError("subject " + std::to_string(s.subject_id) +
                                ": diagnosis date outside the visit window");
      t.time_start = dt;
      t.censored = false;
    } else {
      t.time_start = t.follow_up;
      t.censored = true;
    }
    t.time_end = t.time_start - t.follow_up;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Imputation of censored times to diagnosis, capped at 60 years from the
// first visit, with (AGE, CAG) as survival covariates.

struct ImputedTimesResult {
  std::vector<DerivedTimes> times;
  ImputedDataset imputation;
};

inline ImputedTimesResult impute_times(const std::vector<SubjectVisits>& subjects,
                                       const std::vector<DerivedTimes>& times,
                                       ImputationConfig config = {}) {
  if (!config.upper_cap) config.upper_cap = 60.0;
  Dataset records(subjects.size());
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    records[i].y = 0.0;
    records[i].w = times[i].time_start;
    records[i].delta = times[i].censored ? 0 : 1;
    records[i].z = Eigen::Vector2d(subjects[i].age_at_first_visit,
                                   static_cast<double>(subjects[i].cag));
  }
  ImputedTimesResult out;
  out.imputation = impute_dataset(records, config);
  out.times = times;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (!times[i].censored || !out.imputation.diagnostics[i].imputed) continue;
    out.times[i].time_start = out.imputation.records[i].w;
    out.times[i].time_end = out.times[i].time_start - out.times[i].follow_up;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symptom-progression model: cUHDRS at the period end regressed on time to
// diagnosis from the period end, the starting score, age, CAG length, and
// the two products, with AGE, CAG, cUHDRS_start centered at 18, 36, 23.8.

inline constexpr double kAgeCenter = 18.0;
inline constexpr double kCagCenter = 36.0;
inline constexpr double kCuhdrsCenter = 23.8;
inline constexpr int kProgressionCoefs = 7;

struct ProgressionRow {
  double time_end = 0.0;
  double cuhdrs_start = 0.0;
  double age = 0.0;
  double cag = 0.0;
  double cuhdrs_end = 0.0;
};

inline Eigen::RowVectorXd progression_design_row(double time_end, double cuhdrs_start,
                                                 double age, double cag) {
  const double score_c = cuhdrs_start - kCuhdrsCenter;
  const double age_c = age - kAgeCenter;
  const double cag_c = cag - kCagCenter;
  Eigen::RowVectorXd row(kProgressionCoefs);
  row << 1.0, time_end, score_c, time_end * score_c, age_c, cag_c, age_c * cag_c;
  return row;
}

inline std::vector<ProgressionRow> make_progression_rows(
    const std::vector<SubjectVisits>& subjects, const std::vector<DerivedTimes>& times) {
  std::vector<ProgressionRow> rows(subjects.size());
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    rows[i] = {times[i].time_end, subjects[i].cuhdrs_start, subjects[i].age_at_first_visit,
               static_cast<double>(subjects[i].cag), subjects[i].cuhdrs_end};
  }
  return rows;
}

inline RegressionFit fit_progression(const std::vector<ProgressionRow>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd X(n, kProgressionCoefs);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    X.row(i) = progression_design_row(r.time_end, r.cuhdrs_start, r.age, r.cag);
    y(i) = r.cuhdrs_end;
  }
  return fit_ols(X, y);
}

// ---------------------------------------------------------------------------
// Prediction of symptom change over a trial of the given length: the
// recruitment score plays cUHDRS_start, and time to diagnosis shrinks by the
// horizon because the trial ends that much closer to diagnosis.

struct RecruitmentState {
  std::int64_t subject_id = 0;
  double time_end = 0.0;     // time to (possibly imputed) diagnosis at recruitment
  double cuhdrs_now = 0.0;   // score at recruitment
  double age = 0.0;
  double cag = 0.0;
};

inline double predict_change(const RegressionFit& fit, const RecruitmentState& state,
                             double horizon) {
  if (!std::isfinite(state.time_end) || !std::isfinite(state.cuhdrs_now) ||
      !std::isfinite(state.age) || !std::isfinite(state.cag))
    throw MissingCovariateError("non-finite covariate for subject " +
                                std::to_string(state.subject_id));
  const Eigen::RowVectorXd row =
      progression_design_row(state.time_end - horizon, state.cuhdrs_now, state.age, state.cag);
  const double predicted_end = row.dot(fit.theta);
  return predicted_end - state.cuhdrs_now;
}

// ---------------------------------------------------------------------------
// Rank-based recruitment.

struct RankedCandidate {
  std::int64_t subject_id = 0;
  double predicted_end = 0.0;
  double delta_hat = 0.0;
  int rank = 0;
};

struct RecruitmentList {
  std::vector<RankedCandidate> entries;  // all candidates, rank ascending
  int trial_size = 0;
  double horizon_years = 0.0;
};

struct Prediction {
  std::int64_t subject_id = 0;
  double predicted_end = 0.0;
  double delta_hat = 0.0;
};

inline RecruitmentList rank_and_recruit(std::vector<Prediction> predictions, int trial_size,
                                        double horizon_years = 2.0) {
  if (trial_size < 0 || static_cast<std::size_t>(trial_size) > predictions.size())
    throw OutOfRangeError("trial size exceeds the number of candidates");
  std::sort(predictions.begin(), predictions.end(), [](const Prediction& a, const Prediction& b) {
    if (a.delta_hat != b.delta_hat) return a.delta_hat < b.delta_hat;
    return a.subject_id < b.subject_id;
  });
  RecruitmentList out;
  out.trial_size = trial_size;
  out.horizon_years = horizon_years;
  out.entries.resize(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out.entries[i] = {predictions[i].subject_id, predictions[i].predicted_end,
                      predictions[i].delta_hat, static_cast<int>(i) + 1};
  }
  return out;
}

struct AgreementCounts {
  int both_recruited = 0;
  int neither_recruited = 0;
  int only_first = 0;
  int only_second = 0;

  int total() const { return both_recruited + neither_recruited + only_first + only_second; }
};

inline AgreementCounts compare_recruitment(const RecruitmentList& a, const RecruitmentList& b) {
  if (a.entries.size() != b.entries.size())
    throw DimensionMismatchError("recruitment lists cover different candidate pools");
  std::vector<std::int64_t> rec_a, rec_b;
  for (const auto& e : a.entries)
    if (e.rank <= a.trial_size) rec_a.push_back(e.subject_id);
  for (const auto& e : b.entries)
    if (e.rank <= b.trial_size) rec_b.push_back(e.subject_id);
  std::sort(rec_a.begin(), rec_a.end());
  std::sort(rec_b.begin(), rec_b.end());
  std::vector<std::int64_t> both;
  std::set_intersection(rec_a.begin(), rec_a.end(), rec_b.begin(), rec_b.end(),
                        std::back_inserter(both));
  AgreementCounts out;
  out.both_recruited = static_cast<int>(both.size());
  out.only_first = static_cast<int>(rec_a.size() - both.size());
  out.only_second = static_cast<int>(rec_b.size() - both.size());
  out.neither_recruited = static_cast<int>(a.entries.size()) - out.both_recruited -
                          out.only_first - out.only_second;
  return out;
}

}  // namespace censimp
