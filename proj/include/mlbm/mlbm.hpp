#pragma once

#include "mlbm/cavity.hpp"
#include "mlbm/kernels.hpp"
#include "mlbm/lattice.hpp"
#include "mlbm/parallel.hpp"
#include "mlbm/probe.hpp"
#include "mlbm/solvers.hpp"
#include "mlbm/throughput.hpp"
#include "mlbm/traversal.hpp"
