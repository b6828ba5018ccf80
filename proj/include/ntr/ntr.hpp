#pragma once

// Umbrella header for the nonnegative tensor rank workbench.

#include "ntr/assignment.hpp"
#include "ntr/canonical.hpp"
#include "ntr/cells.hpp"
#include "ntr/decomposition.hpp"
#include "ntr/experiments.hpp"
#include "ntr/identifiability.hpp"
#include "ntr/io.hpp"
#include "ntr/kkt.hpp"
#include "ntr/nnls.hpp"
#include "ntr/polynomial.hpp"
#include "ntr/random.hpp"
#include "ntr/rank_bounds.hpp"
#include "ntr/reports.hpp"
#include "ntr/solvers.hpp"
#include "ntr/tensor.hpp"
