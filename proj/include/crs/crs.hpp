#pragma once

// Umbrella header for the caching-aided rate-splitting library.

#include "crs/caching.hpp"
#include "crs/core_model.hpp"
#include "crs/montecarlo.hpp"
#include "crs/philox.hpp"
#include "crs/quadrature.hpp"
#include "crs/rate_analysis.hpp"
#include "crs/sinr_distributions.hpp"
#include "crs/special_functions.hpp"
#include "crs/sweep.hpp"
