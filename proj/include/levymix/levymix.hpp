#pragma once

#include "levymix/calibration.hpp"
#include "levymix/cli.hpp"
#include "levymix/config.hpp"
#include "levymix/errors.hpp"
#include "levymix/fourier.hpp"
#include "levymix/levy_core.hpp"
#include "levymix/model.hpp"
#include "levymix/montecarlo.hpp"
#include "levymix/pricing.hpp"
#include "levymix/reference.hpp"
#include "levymix/rng.hpp"
#include "levymix/version.hpp"
