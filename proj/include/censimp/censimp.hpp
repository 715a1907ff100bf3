#pragma once

// Umbrella header for the whole library.

#include "censimp/breslow.hpp"
#include "censimp/cli.hpp"
#include "censimp/cohort.hpp"
#include "censimp/cox.hpp"
#include "censimp/curve.hpp"
#include "censimp/data.hpp"
#include "censimp/errors.hpp"
#include "censimp/impute.hpp"
#include "censimp/io.hpp"
#include "censimp/quadrature.hpp"
#include "censimp/recruit.hpp"
#include "censimp/regression.hpp"
#include "censimp/rng.hpp"
#include "censimp/simulate.hpp"
#include "censimp/special.hpp"
#include "censimp/tail.hpp"
