#pragma once

#include "ppr/costs.hpp"
#include "ppr/dot.hpp"
#include "ppr/errors.hpp"
#include "ppr/json_io.hpp"
#include "ppr/network.hpp"
#include "ppr/rational.hpp"
#include "ppr/report.hpp"
#include "ppr/scenarios.hpp"
#include "ppr/solver.hpp"
#include "ppr/spm.hpp"
