#pragma once

// Umbrella header for the filterstab library: stability of the nonlinear
// filter for slowly switching finite-state Markov chains, estimated by
// long-horizon Monte Carlo and checked against closed-form bounds.

#include "filterstab/bounds.hpp"
#include "filterstab/errors.hpp"
#include "filterstab/estimators.hpp"
#include "filterstab/experiment.hpp"
#include "filterstab/filter.hpp"
#include "filterstab/matrix.hpp"
#include "filterstab/model.hpp"
#include "filterstab/noise.hpp"
#include "filterstab/rng.hpp"
#include "filterstab/sim.hpp"
