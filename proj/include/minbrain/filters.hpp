#pragma once

#include <deque>
#include <string>
#include <vector>

#include "minbrain/core.hpp"
#include "minbrain/external.hpp"
#include "minbrain/prob_model.hpp"

namespace minbrain {

// --- Nondeterministic set filter -----------------------------------------
//
// I-states are nonempty subsets of X, held as sorted index vectors.

std::string ndet_state_name(const ExternalSystem& ext, const std::vector<int>& subset);

// Condition on an observation without moving: X cap h^-1(y).
// Errors: InconsistentObservation when the result is empty.
std::vector<int> ndet_init(const ExternalSystem& ext, const std::vector<int>& x0, int y);

// X_{k+1} = f(X_k, u) cap h^-1(y).
std::vector<int> ndet_step(const ExternalSystem& ext, const std::vector<int>& xk, int u, int y);

// The filter's own DITS: all subsets reachable from x0, closed under
// consistent (u, y) steps. Edge labels are pair labels; the initial state
// is the x0 subset itself.
struct FilterGraph {
    TransitionSystem system;      // states: "{a,b,c}" subset names
    std::string root;             // name of the x0 subset
    std::map<std::string, std::vector<int>> subsets;
};

// With complete = true the graph carries an absorbing "{}" state for
// model-inconsistent continuations, so every (u, y) pair is defined
// everywhere and the graph is a full system.
FilterGraph reachable_filter_graph(const ExternalSystem& ext, const std::vector<int>& x0,
                                   std::size_t limit = 100000, bool complete = false);

// Depth-bounded tree of model-consistent histories, each node labeled by
// its filter state. Inconsistent branches are absent.
struct ConsistentTree {
    StateRelabeledSystem srts;                          // labeled by filter-state names
    std::map<std::string, std::vector<int>> subsets;    // per node
};

ConsistentTree consistent_history_tree(const ExternalSystem& ext, const std::vector<int>& x0,
                                       int depth, std::size_t limit = 1000000);

// Localization task labeling: singleton filter states get their own label,
// everything else (including the pre-observation root) shares one.
std::map<std::string, std::string> localization_labels(
    const std::vector<std::string>& states,
    const std::map<std::string, std::vector<int>>& subsets);

// --- Discrete Bayes filter ------------------------------------------------

// Condition on an observation without moving (the stage-1 update).
// Errors: ZeroEvidence when the normalizer vanishes.
template <class Scalar>
Vec<Scalar> bayes_init(const ProbModel<Scalar>& pm, const Vec<Scalar>& prior, int y);

// p'(x') ~ P(y|x') * sum_x P(x'|x,u) p(x), normalized.
template <class Scalar>
Vec<Scalar> bayes_step(const ProbModel<Scalar>& pm, const Vec<Scalar>& p, int u, int y);

// --- Moving-average filter -------------------------------------------------

struct MovingAverage {
    int window_size = 1;
    std::deque<double> window;
};

// FIFO update; before the window fills, the mean runs over the entries seen
// so far.
std::pair<MovingAverage, double> movavg_step(MovingAverage state, double y);

}  // namespace minbrain
