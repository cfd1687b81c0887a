#pragma once

#include <cstdint>

#include "minbrain/core.hpp"

namespace minbrain {

struct RefinementResult {
    Partition partition;
    Labeling labeling;    // block labels: lexicographically least member
    int iterations = 0;   // splitting rounds until fixpoint
};

// Coarsest sufficient refinement of the system's labeling, computed by
// iterated signature splitting from the labeling's preimage partition.
//
// States are split when they disagree, for some edge label, on the block of
// their successor or on which successors exist. States without outgoing
// transitions (the leaves of a depth-truncated tree) impose no constraint of
// their own; they are carried along with the block of their sibling
// successors, so a truncated tree refines to the same classes as the
// machine that generated it.
//
// order_seed permutes internal processing order; the fixpoint partition does
// not depend on it.
//
// Errors: NondeterministicInput when some (state, label) pair has two
// distinct successors.
RefinementResult minimal_sufficient_refinement(const StateRelabeledSystem& m,
                                               std::uint64_t order_seed = 0);

// Checks that `result` is sufficient, refines the input labeling, and that
// merging any two of its blocks either breaks sufficiency or leaves the
// refinement order. Exhaustive over block pairs.
bool verify_minimality(const StateRelabeledSystem& m, const RefinementResult& result);

}  // namespace minbrain
