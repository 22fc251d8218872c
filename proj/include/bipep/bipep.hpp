#pragma once

// Umbrella header: the whole library.
#include "bipep/errors.hpp"
#include "bipep/field.hpp"
#include "bipep/functionals.hpp"
#include "bipep/grid.hpp"
#include "bipep/harness.hpp"
#include "bipep/io.hpp"
#include "bipep/limits.hpp"
#include "bipep/models.hpp"
#include "bipep/rate_fit.hpp"
#include "bipep/selfcheck.hpp"
#include "bipep/spectral.hpp"
#include "bipep/timestep.hpp"
