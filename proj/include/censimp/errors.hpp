#pragma once

#include <stdexcept>
#include <string>

namespace censimp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// cox_survival
struct NoEventsError : Error {
  NoEventsError() : Error("no uncensored records (all delta = 0)") {}
};
struct SingularInformationError : Error {
  int column;
  explicit SingularInformationError(int col)
      : Error("singular information matrix; offending covariate column " + std::to_string(col)),
        column(col) {}
};
struct NotConvergedError : Error {
  using Error::Error;
};
struct DimensionMismatchError : Error {
  using Error::Error;
};

// tail_extension
struct DegenerateTailError : Error {
  using Error::Error;
};
struct WeibullNonConvergenceError : Error {
  using Error::Error;
  WeibullNonConvergenceError()
      : Error("profiled Weibull likelihood has no interior maximum") {}
};
struct OutOfRangeError : Error {
  using Error::Error;
};
struct DivergentIntegralError : Error {
  using Error::Error;
  DivergentIntegralError()
      : Error("carry-forward tail with infinite upper bound: integral diverges") {}
};

// imputation
struct ZeroSurvivalError : Error {
  using Error::Error;
};

// outcome_regression
struct RankDeficientError : Error {
  int column;
  explicit RankDeficientError(int col)
      : Error("design matrix is rank deficient; offending column " + std::to_string(col)),
        column(col) {}
};
struct TooFewRowsError : Error {
  using Error::Error;
  TooFewRowsError() : Error("not enough rows to fit the requested model") {}
};

// sim_harness
struct ScenarioFailedError : Error {
  using Error::Error;
};

// recruitment
struct InvalidDatesError : Error {
  using Error::Error;
};
struct MissingCovariateError : Error {
  using Error::Error;
};

// cli_io
struct ParseError : Error {
  long line;
  ParseError(const std::string& msg, long line_no)
      : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

}  // namespace censimp
