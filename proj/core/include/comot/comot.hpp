#pragma once

#include "comot/assign.hpp"
#include "comot/config.hpp"
#include "comot/error.hpp"
#include "comot/geometry.hpp"
#include "comot/graph_laplacian.hpp"
#include "comot/io.hpp"
#include "comot/kalman.hpp"
#include "comot/metrics.hpp"
#include "comot/sim.hpp"
#include "comot/tracker.hpp"
#include "comot/types.hpp"
