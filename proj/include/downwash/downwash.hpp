#pragma once

// Umbrella header: closed-form downwash model, flight-log pipeline,
// pass-under simulation, serialization.

#include "downwash/drone.hpp"
#include "downwash/environment.hpp"
#include "downwash/fit.hpp"
#include "downwash/flow_field.hpp"
#include "downwash/grid.hpp"
#include "downwash/jet.hpp"
#include "downwash/json_io.hpp"
#include "downwash/least_squares.hpp"
#include "downwash/log.hpp"
#include "downwash/sim.hpp"
#include "downwash/stats.hpp"
#include "downwash/synthetic.hpp"
#include "downwash/version.hpp"
