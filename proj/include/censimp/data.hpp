#pragma once

#include <Eigen/Dense>
#include <vector>

namespace censimp {

// One subject with a possibly censored covariate. w = min(x, c) is observed,
// delta = 1 when w is the true covariate value, y is the regression outcome
// and z holds the always-observed covariates.
struct CensoredRecord {
  double y = 0.0;
  double w = 0.0;
  int delta = 1;
  Eigen::VectorXd z;
};

using Dataset = std::vector<CensoredRecord>;

}  // namespace censimp
