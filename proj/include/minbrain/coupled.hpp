#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "minbrain/core.hpp"
#include "minbrain/external.hpp"
#include "minbrain/history.hpp"
#include "minbrain/refine.hpp"

namespace minbrain {

// Internal DITS over Y coupled to an external system through a sensor map
// and a policy. Planner-shaped internals over U x Y are strong-restricted
// before being wrapped here.
struct CoupledSystem {
    ExternalSystem external;
    TransitionSystem internal;                  // deterministic, edge labels in Y
    std::map<std::string, std::string> policy;  // internal state -> action
    std::string initial_internal;               // iota_0
    std::optional<DisturbanceModel> disturbances;
};

CoupledSystem make_coupled(ExternalSystem external, TransitionSystem internal,
                           std::map<std::string, std::string> policy,
                           std::string initial_internal,
                           std::optional<DisturbanceModel> disturbances = {});

// One stage: observe y from x, update the internal state, emit the action,
// move the external state. Stage-0 has no action; rollouts therefore apply
// one fewer action than they collect observations.
struct StepResult {
    std::string internal_state, external_state;    // after the step
    std::string action, observation;
};

// Errors: InadmissibleDisturbance (nondeterministic mode, disturbance
// outside Theta(x,u) or Psi(x)); UndefinedInternalTransition when the
// reachable (iota, y) pair has no transition or the policy is undefined.
StepResult step(const CoupledSystem& cs,
                const std::string& internal_state, const std::string& external_state,
                const std::optional<std::pair<std::string, std::string>>& disturbance = {});

struct Rollout {
    std::string initial_internal, initial_external;
    std::vector<std::string> observations;        // y_1 .. y_H
    std::vector<std::string> actions;             // u_1 .. u_{H-1}
    std::vector<std::string> external_states;     // x_1 .. x_H
    std::vector<std::string> internal_states;     // iota_1 .. iota_H
    std::vector<std::pair<std::string, std::string>> disturbances;    // (theta, psi) per stage
};

// Disturbance inputs for a rollout: none, a fixed trace, a seeded sampler
// (probabilistic mode), or exhaustive branching (nondeterministic mode).
struct NoDisturbance {};
struct FixedTrace {
    std::vector<std::pair<std::string, std::string>> steps;
};
struct SeededSampler {
    std::uint64_t seed = 0;
};
struct Exhaustive {
    std::size_t limit = 100000;
};
using DisturbancePolicy = std::variant<NoDisturbance, FixedTrace, SeededSampler, Exhaustive>;

// Unique trajectory in the disturbance-free and sampled modes; the full set
// of trajectories in exhaustive mode.
std::vector<Rollout> rollout(const CoupledSystem& cs, const std::string& initial_external,
                             int horizon, const DisturbancePolicy& dp = NoDisturbance{});

// R_X(I_task): external states from which some action sequence produces a
// success-labeled history. Disturbance-free.
std::vector<std::string> backward_reachable_set(const ExternalSystem& ext,
                                                const TaskMachine& task);

enum class Feasibility { feasible, infeasible, horizon_exhausted };

struct FeasibilityResult {
    Feasibility verdict = Feasibility::feasible;
    std::optional<std::string> witness;    // least failing external state
};

// Def-6 style check, disturbance-free: from every x in the backward
// reachable set, the unique rollout must realize the task. A rollout
// realizes the task when its label sequence reaches success at least once
// and never reaches a determined failure; the sequence is evaluated exactly
// because the finite coupled run is eventually periodic. horizon_bound caps
// the exploration; if a verdict is still open at the bound the result is
// horizon_exhausted rather than a failure.
FeasibilityResult is_feasible_policy(const CoupledSystem& cs, const TaskMachine& task,
                                     int horizon_bound);

// Robust variant under nondeterministic disturbances: every disturbance
// trace must realize the task (mode all) or at least one must (mode some).
enum class TraceQuantifier { all_traces, some_trace };
FeasibilityResult is_feasible_policy_robust(const CoupledSystem& cs, const TaskMachine& task,
                                            int horizon_bound, TraceQuantifier quantifier);

struct MinimalDits {
    StateRelabeledSystem dits;     // quotient over Y, states labeled by the reduced policy
    RefinementResult refinement;   // classes of the policy's minimal sufficient refinement
};

// Prop-3 construction: restrict the history ITS by the policy, prune
// histories unreachable from eta_0, take the minimal sufficient refinement
// of the policy labeling, and return the quotient with the induced policy.
MinimalDits minimal_dits_for_policy(const HistoryIts& h,
                                    const std::map<std::string, std::string>& policy);

}  // namespace minbrain
