// mtvpar.hpp
// Convenience header pulling in the whole core library.

#pragma once

#include "mtvpar/dp_solver.hpp"
#include "mtvpar/error.hpp"
#include "mtvpar/metrics.hpp"
#include "mtvpar/model.hpp"
#include "mtvpar/mtv_par.hpp"
#include "mtvpar/rate_estimation.hpp"
#include "mtvpar/simulation.hpp"
