#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "minbrain/core.hpp"
#include "minbrain/external.hpp"

namespace minbrain {

// Default node budget for explicit unrolling; the CLI overrides it from
// MINBRAIN_SIZE_LIMIT.
inline constexpr std::size_t kDefaultNodeLimit = 1'000'000;

// Edge labels of history systems over U x Y are "u|y"; the first step after
// eta_0 carries the null action and reads "|y". Observation-only history
// spaces label edges with the observation alone.
std::string pair_label(const std::string& action, const std::string& observation);
std::pair<std::string, std::string> split_pair_label(const std::string& label);

struct HistoryNode {
    int parent = -1;    // -1 for roots
    int action = -1;    // index into actions; -1 for the null action and for roots
    int obs = -1;       // -1 for roots
    int depth = 0;      // number of observations so far
};

// Depth-bounded explicit unrolling of a history I-space: one tree per
// initial condition, every node below the bound fully branched.
struct HistoryIts {
    std::vector<std::string> actions;         // U; empty for observation-only histories
    std::vector<std::string> observations;    // Y
    std::vector<std::string> initials;        // eta_0 identifiers, one root each
    int depth = 0;
    std::vector<HistoryNode> nodes;    // roots first, then breadth-first
    std::vector<std::string> names;    // canonical history-encoded names

    bool observation_only() const { return actions.empty(); }
    TransitionSystem to_system() const;
    int node_index(const std::string& name) const;
};

// Errors: SizeLimit when the unrolled node count would exceed node_limit.
HistoryIts unroll(std::vector<std::string> actions, std::vector<std::string> observations,
                  std::vector<std::string> initials, int depth,
                  std::size_t node_limit = kDefaultNodeLimit);

// Deterministic, complete, output-labeled machine over the history
// alphabet: a regular encoding of an I-map. The null action row is required
// from every state of observation-only machines and from the initial state
// otherwise.
struct TaskMachine {
    std::vector<std::string> alphabet_u;    // may be empty: observation-only
    std::vector<std::string> alphabet_y;
    std::vector<std::string> states;                  // sorted unique
    std::map<std::tuple<int, int, int>, int> delta;   // (state, action|-1, obs) -> state
    std::vector<std::string> output;                  // per state
    int initial = 0;

    int action_index(const std::string& name) const;    // -1 for ""
    int observation_index(const std::string& name) const;
    int state_index(const std::string& name) const;
    int step(int state, int action, int obs) const;    // IncompleteTaskMachine if undefined
};

TaskMachine make_task_machine(std::vector<std::string> alphabet_u,
                              std::vector<std::string> alphabet_y,
                              std::vector<std::string> states,
                              const std::map<std::tuple<std::string, std::string, std::string>,
                                             std::string>& delta,
                              const std::map<std::string, std::string>& output,
                              const std::string& initial);

// Machine state reached by each history node.
std::vector<int> run_machine(const HistoryIts& h, const TaskMachine& m);

// Node labels via the machine's output map.
std::map<std::string, std::string> machine_labels(const HistoryIts& h, const TaskMachine& m);

// Attach an I-map to the unrolled tree. The extensional form requires a
// label for every node (PartialMap otherwise).
StateRelabeledSystem apply_imap(const HistoryIts& h,
                                const std::map<std::string, std::string>& labels);
StateRelabeledSystem apply_imap(const HistoryIts& h, const TaskMachine& m);

// Quotient over the derived I-space; possibly nondeterministic.
TransitionSystem derive_its(const HistoryIts& h,
                            const std::map<std::string, std::string>& labels);
TransitionSystem derive_its(const HistoryIts& h, const TaskMachine& m);

// Keeps exactly the transitions whose action component matches the policy
// at the source state. The policy maps state names to action names, with ""
// selecting null-action edges.
TransitionSystem restrict_by_policy(const TransitionSystem& sys,
                                    const std::map<std::string, std::string>& policy);

// phi_pi(i, y) = phi(i, pi(i), y) with edge labels projected to Y.
// Requires a deterministic input system over pair labels.
TransitionSystem strong_restrict(const TransitionSystem& sys,
                                 const std::map<std::string, std::string>& policy);

// Drops states unreachable from the initial state (or from all states when
// none is designated, i.e. returns the system unchanged).
TransitionSystem prune_unreachable(const TransitionSystem& sys);

// Transcribed finite-horizon tasks over the histories of an external
// system, built by the annotated subset construction: a machine state is
// the set of (external state, progress) pairs consistent with the history.
// Outputs: "1" success determined, "0" failure determined, "?" undecided.
//
// Errors: EmptyGoal for reach-style tasks with an empty goal set.
TaskMachine build_reach_task(const ExternalSystem& ext, const std::vector<std::string>& goal);
TaskMachine build_avoid_task(const ExternalSystem& ext, const std::vector<std::string>& bad);
TaskMachine build_reach_avoid_task(const ExternalSystem& ext,
                                   const std::vector<std::string>& goal,
                                   const std::vector<std::string>& bad);

inline const std::string kTaskSuccess = "1";
inline const std::string kTaskFail = "0";
inline const std::string kTaskPending = "?";

}  // namespace minbrain
