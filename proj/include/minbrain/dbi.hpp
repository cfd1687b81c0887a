#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "minbrain/core.hpp"
#include "minbrain/external.hpp"

namespace minbrain {

// Finite Moore machine: an external system with an initial state.
struct MooreMachine {
    ExternalSystem sys;
    int initial = 0;
};

MooreMachine make_moore(ExternalSystem sys, const std::string& initial);

// Success function of one test-equivalence class, as a bit per state, plus
// the first test discovered for the class (diagnostics only).
struct SuccessFunction {
    std::uint64_t bits = 0;
    std::string representative;

    bool at(int x) const { return (bits >> x) & 1; }
};

// Fixpoint closure over success vectors: seeds are the length-0 tests, one
// per observation in sorted order; expansion prefixes actions in sorted
// order, breadth-first. The discovery order is the canonical class order.
// The count is the diversity K <= 2^|X|.
std::vector<SuccessFunction> enumerate_test_classes(const MooreMachine& m);

// xi(x) = (S_1(x), ..., S_K(x)) in canonical order.
std::vector<int> success_vector(const std::vector<SuccessFunction>& classes, int x);

// Index shuffle: alpha_u(k) = n iff x -> S_k(f(x,u)) equals class n.
// Errors: ClosureViolation when the prefixed vector is not a known class
// (cannot happen after a correct enumeration).
std::vector<int> alpha(const MooreMachine& m, const std::vector<SuccessFunction>& classes,
                       int u);

struct UpdateGraph {
    std::vector<std::string> node_names;         // success vectors as bit strings
    std::vector<std::vector<int>> node_bits;     // per node, K components
    std::vector<std::vector<int>> tau;           // [node][u] -> node
    std::vector<int> sigma;                      // [node] -> observation index
    int s0 = 0;
    std::vector<std::vector<int>> alpha_u;       // [u][k] class shuffle

    // View as a state-relabeled system (edges: actions, labels: outputs).
    StateRelabeledSystem to_srts(const MooreMachine& m) const;
};

// S = { xi(x) }, tau by the alpha_u index shuffles, sigma(xi(x)) = h(x),
// s0 = xi(x0). Errors: SigmaIllDefined if two states with equal vectors
// disagree on h (impossible given the length-0 seeds; kept as a guard).
UpdateGraph build_update_graph(const MooreMachine& m);

// The partition of X induced by equal success vectors.
Partition xi_partition(const MooreMachine& m, const std::vector<SuccessFunction>& classes);

// Verifies that xi is a rooted isomorphism between a reduced machine and
// its update graph: tau_u(xi(x)) = xi(f(x,u)), sigma(xi(x)) = h(x),
// xi(x0) = s0. Errors: NotReduced when xi is not injective.
bool check_isomorphism(const MooreMachine& m, const UpdateGraph& g);

}  // namespace minbrain
