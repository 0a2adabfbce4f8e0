#pragma once

#include "gsg/borel.hpp"
#include "gsg/borel_code.hpp"
#include "gsg/core.hpp"
#include "gsg/covering.hpp"
#include "gsg/game.hpp"
#include "gsg/io.hpp"
#include "gsg/limits.hpp"
#include "gsg/morphism.hpp"
#include "gsg/solver.hpp"
#include "gsg/strategy.hpp"
#include "gsg/tree.hpp"
#include "gsg/unravel.hpp"
