#pragma once

// Umbrella header for the full library.

#include "clime/classify.hpp"
#include "clime/covariance.hpp"
#include "clime/errors.hpp"
#include "clime/estimator.hpp"
#include "clime/io.hpp"
#include "clime/lp.hpp"
#include "clime/matrix.hpp"
#include "clime/model_select.hpp"
#include "clime/parallel.hpp"
#include "clime/refit.hpp"
#include "clime/rng.hpp"
#include "clime/simplex.hpp"
#include "clime/simulation.hpp"
