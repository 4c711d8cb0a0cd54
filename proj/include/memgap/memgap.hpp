#pragma once

#include "memgap/analysis.hpp"
#include "memgap/brownian.hpp"
#include "memgap/config.hpp"
#include "memgap/errors.hpp"
#include "memgap/format.hpp"
#include "memgap/initial.hpp"
#include "memgap/io.hpp"
#include "memgap/model.hpp"
#include "memgap/oracle.hpp"
#include "memgap/rng.hpp"
#include "memgap/runner.hpp"
#include "memgap/sample_path.hpp"
#include "memgap/scheme.hpp"
#include "memgap/stats.hpp"
#include "memgap/time_grid.hpp"
