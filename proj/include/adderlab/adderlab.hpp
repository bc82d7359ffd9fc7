#pragma once

#include "analysis.hpp"
#include "bench.hpp"
#include "cell_model.hpp"
#include "error.hpp"
#include "generators.hpp"
#include "netlist.hpp"
#include "simulation.hpp"
