#pragma once

#include "polarsolve/model.hpp"
#include "polarsolve/grid.hpp"
#include "polarsolve/choice.hpp"
#include "polarsolve/parallel.hpp"
#include "polarsolve/single_elite.hpp"
#include "polarsolve/two_elite.hpp"
#include "polarsolve/oracle.hpp"
#include "polarsolve/oracle_check.hpp"
#include "polarsolve/config.hpp"
#include "polarsolve/io.hpp"
#include "polarsolve/experiment.hpp"
