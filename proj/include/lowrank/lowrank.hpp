#pragma once

#include "lowrank/adls.hpp"
#include "lowrank/ale.hpp"
#include "lowrank/als.hpp"
#include "lowrank/bench.hpp"
#include "lowrank/dense.hpp"
#include "lowrank/probgen.hpp"
#include "lowrank/sensing.hpp"
#include "lowrank/solver_common.hpp"
#include "lowrank/structure.hpp"
