#pragma once

// Umbrella header.

#include "vinegof/bootstrap.hpp"
#include "vinegof/errors.hpp"
#include "vinegof/gof_tests.hpp"
#include "vinegof/infomatrix.hpp"
#include "vinegof/io.hpp"
#include "vinegof/math.hpp"
#include "vinegof/pair_copula.hpp"
#include "vinegof/rng.hpp"
#include "vinegof/rvine.hpp"
#include "vinegof/rvine_derivs.hpp"
#include "vinegof/rvine_eval.hpp"
#include "vinegof/rvine_fit.hpp"
#include "vinegof/statistics.hpp"
#include "vinegof/transforms.hpp"
