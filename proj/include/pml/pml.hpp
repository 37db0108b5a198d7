#pragma once

// Umbrella header for the whole library.

#include "pml/approx_pml.hpp"
#include "pml/bench.hpp"
#include "pml/common.hpp"
#include "pml/exact_oracle.hpp"
#include "pml/graph.hpp"
#include "pml/grid.hpp"
#include "pml/io.hpp"
#include "pml/level_set.hpp"
#include "pml/level_sets.hpp"
#include "pml/linalg.hpp"
#include "pml/matrix_round.hpp"
#include "pml/orientation.hpp"
#include "pml/profile.hpp"
#include "pml/pseudo_pml.hpp"
#include "pml/relaxation.hpp"
#include "pml/sampling.hpp"
#include "pml/sparsify.hpp"
#include "pml/tree_packing.hpp"
