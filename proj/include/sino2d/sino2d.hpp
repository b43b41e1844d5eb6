#pragma once

#include "sino2d/core.hpp"
#include "sino2d/dense.hpp"
#include "sino2d/error.hpp"
#include "sino2d/estimator.hpp"
#include "sino2d/fisher.hpp"
#include "sino2d/io.hpp"
#include "sino2d/montecarlo.hpp"
#include "sino2d/nelder_mead.hpp"
#include "sino2d/periodogram.hpp"
#include "sino2d/rng.hpp"
