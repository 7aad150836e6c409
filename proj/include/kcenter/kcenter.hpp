#pragma once

#include "arrangement.hpp"
#include "fast_feasibility.hpp"
#include "feasibility.hpp"
#include "geometry.hpp"
#include "oracle.hpp"
#include "rational.hpp"
#include "scalar.hpp"
#include "solver.hpp"
#include "sorted_matrix.hpp"
#include "stem.hpp"
#include "sublist_lp.hpp"
#include "tree.hpp"
