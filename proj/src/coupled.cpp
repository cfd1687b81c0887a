#include "minbrain/coupled.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "minbrain/errors.hpp"

namespace minbrain {

namespace {

// Index-level view of a coupled system for the simulation loops.
struct Ctx {
    const CoupledSystem& cs;
    std::map<std::pair<int, int>, int> phi;    // (internal, y) -> internal
    std::vector<int> pi;                       // internal -> action index, -1 unknown
    int initial_internal;

    explicit Ctx(const CoupledSystem& cs_in) : cs(cs_in) {
        const TransitionSystem& in = cs.internal;
        for (const Transition& t : in.transitions) {
            int y = cs.external.observation_index(in.labels[t.label]);
            if (y < 0)
                fail("InvalidSystem",
                     "internal edge label is not an observation: " + in.labels[t.label]);
            phi[{t.src, y}] = t.dst;
        }
        pi.assign(in.states.size(), -1);
        for (const auto& [state, action] : cs.policy) {
            int i = in.state_index(state);
            if (i < 0) continue;
            if (action.empty()) continue;    // the null action never drives the external
            int u = cs.external.action_index(action);
            if (u < 0) fail("InvalidSystem", "policy action unknown: " + action);
            pi[i] = u;
        }
        initial_internal = in.state_index(cs.initial_internal);
        if (initial_internal < 0)
            fail("InvalidSystem", "initial internal state unknown: " + cs.initial_internal);
    }

    int advance_internal(int i, int y) const {
        auto it = phi.find({i, y});
        if (it == phi.end())
            fail("UndefinedInternalTransition",
                 "no internal transition from " + cs.internal.states[i] + " on " +
                     cs.external.observations[y]);
        return it->second;
    }

    int action_at(int i) const {
        if (pi[i] < 0)
            fail("UndefinedInternalTransition",
                 "policy undefined at internal state " + cs.internal.states[i]);
        return pi[i];
    }
};

double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int sample_row(const std::vector<Rat>& row, std::mt19937_64& rng) {
    double u = next_unit(rng);
    double acc = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        acc += row[i].get_d();
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(row.size()) - 1;
}

}  // namespace

CoupledSystem make_coupled(ExternalSystem external, TransitionSystem internal,
                           std::map<std::string, std::string> policy,
                           std::string initial_internal,
                           std::optional<DisturbanceModel> disturbances) {
    if (!is_deterministic(internal)) fail("NondeterministicInput", "internal system is a NITS");
    CoupledSystem cs{std::move(external), std::move(internal), std::move(policy),
                     std::move(initial_internal), std::move(disturbances)};
    if (cs.disturbances) validate_disturbances(cs.external, *cs.disturbances);
    Ctx ctx(cs);    // surfaces index errors early
    (void)ctx;
    return cs;
}

StepResult step(const CoupledSystem& cs, const std::string& internal_state,
                const std::string& external_state,
                const std::optional<std::pair<std::string, std::string>>& disturbance) {
    Ctx ctx(cs);
    const ExternalSystem& ext = cs.external;
    int i = cs.internal.state_index(internal_state);
    int x = ext.state_index(external_state);
    if (i < 0 || x < 0) fail("InvalidSystem", "unknown coupled state");

    int theta = -1, psi = -1;
    if (cs.disturbances) {
        if (!disturbance) fail("InadmissibleDisturbance", "disturbed system needs (theta, psi)");
        theta = cs.disturbances->theta_index(disturbance->first);
        psi = cs.disturbances->psi_index(disturbance->second);
        if (theta < 0 || psi < 0) fail("InadmissibleDisturbance", "unknown disturbance");
        if (cs.disturbances->mode == DisturbanceModel::Mode::nondeterministic &&
            !cs.disturbances->psi_ok[x][psi])
            fail("InadmissibleDisturbance", "psi not admissible at " + external_state);
    }

    int y = cs.disturbances ? cs.disturbances->h_psi[x][psi] : ext.h[x];
    int i2 = ctx.advance_internal(i, y);
    int u = ctx.action_at(i2);
    if (cs.disturbances && cs.disturbances->mode == DisturbanceModel::Mode::nondeterministic &&
        !cs.disturbances->theta_ok[x][u][theta])
        fail("InadmissibleDisturbance", "theta not admissible at (" + external_state + ", " +
                                            ext.actions[u] + ")");
    int x2 = cs.disturbances ? cs.disturbances->f_theta[x][u][theta] : ext.f[x][u];
    return StepResult{cs.internal.states[i2], ext.states[x2], ext.actions[u],
                      ext.observations[y]};
}

namespace {

void rollout_rec(const Ctx& ctx, int i, int x, int stage, int horizon,
                 const DisturbancePolicy& dp, std::mt19937_64* rng, Rollout& acc,
                 std::vector<Rollout>& out, std::size_t limit) {
    const CoupledSystem& cs = ctx.cs;
    const ExternalSystem& ext = cs.external;
    const DisturbanceModel* dm = cs.disturbances ? &*cs.disturbances : nullptr;

    if (stage > horizon) {
        out.push_back(acc);
        if (out.size() > limit) fail("SizeLimit", "exhaustive rollout set exceeds the limit");
        return;
    }

    auto with_psi = [&](int psi) {
        int y = dm ? dm->h_psi[x][psi] : ext.h[x];
        int i2 = ctx.advance_internal(i, y);
        std::size_t mark_obs = acc.observations.size();
        acc.observations.push_back(ext.observations[y]);
        acc.external_states.push_back(ext.states[x]);
        acc.internal_states.push_back(cs.internal.states[i2]);

        if (stage == horizon) {
            // Final stage observes without acting.
            if (dm) acc.disturbances.emplace_back("", dm->psis[psi]);
            out.push_back(acc);
            if (out.size() > limit) fail("SizeLimit", "exhaustive rollout set exceeds the limit");
            if (dm) acc.disturbances.pop_back();
        } else {
            int u = ctx.action_at(i2);
            auto move_with_theta = [&](int theta) {
                int x2 = dm ? dm->f_theta[x][u][theta] : ext.f[x][u];
                acc.actions.push_back(ext.actions[u]);
                if (dm) acc.disturbances.emplace_back(dm->thetas[theta], dm->psis[psi]);
                rollout_rec(ctx, i2, x2, stage + 1, horizon, dp, rng, acc, out, limit);
                acc.actions.pop_back();
                if (dm) acc.disturbances.pop_back();
            };
            if (!dm) {
                move_with_theta(-1);
            } else if (std::holds_alternative<Exhaustive>(dp)) {
                for (int theta = 0; theta < static_cast<int>(dm->thetas.size()); ++theta)
                    if (dm->theta_ok[x][u][theta]) move_with_theta(theta);
            } else if (std::holds_alternative<SeededSampler>(dp)) {
                move_with_theta(sample_row(dm->p_theta[x][u], *rng));
            } else {
                const auto& trace = std::get<FixedTrace>(dp).steps;
                int theta = dm->theta_index(trace[stage - 1].first);
                if (theta < 0) fail("InadmissibleDisturbance", "unknown theta in trace");
                if (dm->mode == DisturbanceModel::Mode::nondeterministic &&
                    !dm->theta_ok[x][u][theta])
                    fail("InadmissibleDisturbance", "theta not admissible in trace");
                move_with_theta(theta);
            }
        }
        acc.observations.resize(mark_obs);
        acc.external_states.resize(mark_obs);
        acc.internal_states.resize(mark_obs);
    };

    if (!dm) {
        with_psi(-1);
    } else if (std::holds_alternative<Exhaustive>(dp)) {
        for (int psi = 0; psi < static_cast<int>(dm->psis.size()); ++psi)
            if (dm->psi_ok[x][psi]) with_psi(psi);
    } else if (std::holds_alternative<SeededSampler>(dp)) {
        with_psi(sample_row(dm->p_psi[x], *rng));
    } else {
        const auto& trace = std::get<FixedTrace>(dp).steps;
        if (static_cast<int>(trace.size()) < horizon)
            fail("InadmissibleDisturbance", "disturbance trace shorter than the horizon");
        int psi = dm->psi_index(trace[stage - 1].second);
        if (psi < 0) fail("InadmissibleDisturbance", "unknown psi in trace");
        if (dm->mode == DisturbanceModel::Mode::nondeterministic && !dm->psi_ok[x][psi])
            fail("InadmissibleDisturbance", "psi not admissible in trace");
        with_psi(psi);
    }
}

}  // namespace

std::vector<Rollout> rollout(const CoupledSystem& cs, const std::string& initial_external,
                             int horizon, const DisturbancePolicy& dp) {
    if (horizon < 1) fail("InvalidSystem", "rollout horizon must be at least 1");
    Ctx ctx(cs);
    int x0 = cs.external.state_index(initial_external);
    if (x0 < 0) fail("InvalidSystem", "unknown external state: " + initial_external);

    if (cs.disturbances) {
        if (std::holds_alternative<NoDisturbance>(dp))
            fail("InadmissibleDisturbance", "disturbed system needs a disturbance policy");
        if (std::holds_alternative<SeededSampler>(dp) &&
            cs.disturbances->mode != DisturbanceModel::Mode::probabilistic)
            fail("InadmissibleDisturbance", "sampling needs a probabilistic model");
        if (std::holds_alternative<Exhaustive>(dp) &&
            cs.disturbances->mode != DisturbanceModel::Mode::nondeterministic)
            fail("InadmissibleDisturbance", "exhaustive mode needs a nondeterministic model");
    } else if (!std::holds_alternative<NoDisturbance>(dp)) {
        fail("InadmissibleDisturbance", "disturbance policy given for a disturbance-free system");
    }

    std::mt19937_64 rng(std::holds_alternative<SeededSampler>(dp)
                            ? std::get<SeededSampler>(dp).seed
                            : 0);
    Rollout acc;
    acc.initial_internal = cs.initial_internal;
    acc.initial_external = initial_external;
    std::vector<Rollout> out;
    std::size_t limit = std::holds_alternative<Exhaustive>(dp)
                            ? std::get<Exhaustive>(dp).limit
                            : 1000000;
    rollout_rec(ctx, ctx.initial_internal, x0, 1, horizon, dp, &rng, acc, out, limit);
    return out;
}

namespace {

// Task machine stepping with external-system symbol indices.
struct TaskCtx {
    const TaskMachine& m;
    std::vector<int> action_map;    // external action index -> machine index (or -1 rule)
    std::vector<int> obs_map;

    TaskCtx(const TaskMachine& m_in, const ExternalSystem& ext) : m(m_in) {
        for (const std::string& y : ext.observations) obs_map.push_back(m.observation_index(y));
        for (const std::string& u : ext.actions)
            action_map.push_back(m.alphabet_u.empty() ? -1 : m.action_index(u));
    }

    int init(int y) const { return m.step(m.initial, -1, obs_map[y]); }
    int advance(int q, int u, int y) const { return m.step(q, action_map[u], obs_map[y]); }
};

}  // namespace

std::vector<std::string> backward_reachable_set(const ExternalSystem& ext,
                                                const TaskMachine& task) {
    TaskCtx tc(task, ext);
    const int nq = static_cast<int>(task.states.size());
    auto key = [nq](int x, int q) { return x * nq + q; };

    std::vector<std::string> result;
    for (int x0 = 0; x0 < static_cast<int>(ext.states.size()); ++x0) {
        std::vector<char> seen(ext.states.size() * nq, 0);
        std::vector<std::pair<int, int>> stack;
        int q1 = tc.init(ext.h[x0]);
        stack.emplace_back(x0, q1);
        seen[key(x0, q1)] = 1;
        bool success = false;
        while (!stack.empty() && !success) {
            auto [x, q] = stack.back();
            stack.pop_back();
            if (task.output[q] == kTaskSuccess) {
                success = true;
                break;
            }
            for (int u = 0; u < static_cast<int>(ext.actions.size()); ++u) {
                int x2 = ext.f[x][u];
                int q2 = tc.advance(q, u, ext.h[x2]);
                if (!seen[key(x2, q2)]) {
                    seen[key(x2, q2)] = 1;
                    stack.emplace_back(x2, q2);
                }
            }
        }
        if (success) result.push_back(ext.states[x0]);
    }
    return result;
}

namespace {

enum class RunVerdict { satisfied, unsatisfied, open };

// Exact evaluation of one disturbance-free coupled run: the product state
// sequence is eventually periodic, so "success reached at least once and
// failure never" is decidable as soon as the cycle closes.
RunVerdict evaluate_run(const Ctx& ctx, const TaskCtx& tc, int x0, int bound) {
    const ExternalSystem& ext = ctx.cs.external;
    const int nq = static_cast<int>(tc.m.states.size());
    const int ni = static_cast<int>(ctx.cs.internal.states.size());

    int y = ext.h[x0];
    int i = ctx.advance_internal(ctx.initial_internal, y);
    int q = tc.init(y);
    int x = x0;

    std::set<long long> visited;
    bool seen_success = false;
    for (int stage = 1; stage <= bound; ++stage) {
        const std::string& label = tc.m.output[q];
        if (label == kTaskFail) return RunVerdict::unsatisfied;
        if (label == kTaskSuccess) seen_success = true;
        long long k = (static_cast<long long>(x) * ni + i) * nq + q;
        if (!visited.insert(k).second)
            return seen_success ? RunVerdict::satisfied : RunVerdict::unsatisfied;
        int u = ctx.action_at(i);
        x = ext.f[x][u];
        y = ext.h[x];
        i = ctx.advance_internal(i, y);
        q = tc.advance(q, u, y);
    }
    return RunVerdict::open;
}

}  // namespace

FeasibilityResult is_feasible_policy(const CoupledSystem& cs, const TaskMachine& task,
                                     int horizon_bound) {
    if (cs.disturbances)
        fail("InvalidSystem", "feasibility is defined for disturbance-free couplings");
    Ctx ctx(cs);
    TaskCtx tc(task, cs.external);
    FeasibilityResult result;
    for (const std::string& x_name : backward_reachable_set(cs.external, task)) {
        int x = cs.external.state_index(x_name);
        switch (evaluate_run(ctx, tc, x, horizon_bound)) {
            case RunVerdict::satisfied:
                break;
            case RunVerdict::unsatisfied:
                return FeasibilityResult{Feasibility::infeasible, x_name};
            case RunVerdict::open:
                if (result.verdict == Feasibility::feasible) {
                    result.verdict = Feasibility::horizon_exhausted;
                    result.witness = x_name;
                }
                break;
        }
    }
    return result;
}

namespace {

RunVerdict combine(bool any_sat, bool any_unsat, bool any_open, TraceQuantifier quant) {
    if (quant == TraceQuantifier::all_traces) {
        if (any_unsat) return RunVerdict::unsatisfied;
        return any_open ? RunVerdict::open : RunVerdict::satisfied;
    }
    if (any_sat) return RunVerdict::satisfied;
    return any_open ? RunVerdict::open : RunVerdict::unsatisfied;
}

// Pre-observation configuration: the external system sits at x, the
// internal state is i_prev, and the task machine still has to consume this
// stage's observation (paired with u_prev, or the null action at stage 1).
RunVerdict evaluate_robust(const Ctx& ctx, const TaskCtx& tc, int i_prev, int q_prev,
                           int u_prev, int x, bool seen_success, int depth, int bound,
                           std::set<long long>& on_path, TraceQuantifier quant) {
    const DisturbanceModel& dm = *ctx.cs.disturbances;
    const int nq = static_cast<int>(tc.m.states.size());
    const int ni = static_cast<int>(ctx.cs.internal.states.size());
    if (depth > bound) return RunVerdict::open;

    bool any_sat = false, any_unsat = false, any_open = false;
    for (int psi = 0; psi < static_cast<int>(dm.psis.size()); ++psi) {
        if (!dm.psi_ok[x][psi]) continue;
        int y = dm.h_psi[x][psi];
        int i = ctx.advance_internal(i_prev, y);
        int q = q_prev < 0 ? tc.init(y) : tc.advance(q_prev, u_prev, y);
        RunVerdict branch;
        const std::string& label = tc.m.output[q];
        bool success = seen_success || label == kTaskSuccess;
        if (label == kTaskFail) {
            branch = RunVerdict::unsatisfied;
        } else {
            long long key = (static_cast<long long>(x) * ni + i) * nq + q;
            if (on_path.count(key)) {
                branch = success ? RunVerdict::satisfied : RunVerdict::unsatisfied;
            } else {
                on_path.insert(key);
                int u = ctx.action_at(i);
                bool t_sat = false, t_unsat = false, t_open = false;
                for (int theta = 0; theta < static_cast<int>(dm.thetas.size()); ++theta) {
                    if (!dm.theta_ok[x][u][theta]) continue;
                    RunVerdict sub =
                        evaluate_robust(ctx, tc, i, q, u, dm.f_theta[x][u][theta], success,
                                        depth + 1, bound, on_path, quant);
                    t_sat |= sub == RunVerdict::satisfied;
                    t_unsat |= sub == RunVerdict::unsatisfied;
                    t_open |= sub == RunVerdict::open;
                }
                on_path.erase(key);
                branch = combine(t_sat, t_unsat, t_open, quant);
            }
        }
        any_sat |= branch == RunVerdict::satisfied;
        any_unsat |= branch == RunVerdict::unsatisfied;
        any_open |= branch == RunVerdict::open;
    }
    return combine(any_sat, any_unsat, any_open, quant);
}

}  // namespace

FeasibilityResult is_feasible_policy_robust(const CoupledSystem& cs, const TaskMachine& task,
                                            int horizon_bound, TraceQuantifier quantifier) {
    if (!cs.disturbances || cs.disturbances->mode != DisturbanceModel::Mode::nondeterministic)
        fail("InvalidSystem", "robust feasibility needs a nondeterministic disturbance model");
    Ctx ctx(cs);
    TaskCtx tc(task, cs.external);
    FeasibilityResult result;
    for (const std::string& x_name : backward_reachable_set(cs.external, task)) {
        int x = cs.external.state_index(x_name);
        std::set<long long> on_path;
        switch (evaluate_robust(ctx, tc, ctx.initial_internal, -1, -1, x, false, 1,
                                horizon_bound, on_path, quantifier)) {
            case RunVerdict::satisfied:
                break;
            case RunVerdict::unsatisfied:
                return FeasibilityResult{Feasibility::infeasible, x_name};
            case RunVerdict::open:
                if (result.verdict == Feasibility::feasible) {
                    result.verdict = Feasibility::horizon_exhausted;
                    result.witness = x_name;
                }
                break;
        }
    }
    return result;
}

MinimalDits minimal_dits_for_policy(const HistoryIts& h,
                                    const std::map<std::string, std::string>& policy) {
    if (h.observation_only())
        fail("InvalidSystem", "a policy needs an action history space");
    if (h.initials.size() != 1)
        fail("InvalidSystem", "minimal DITS needs a unique initial history");

    TransitionSystem restricted = prune_unreachable(restrict_by_policy(h.to_system(), policy));
    std::map<std::string, std::string> pi;
    for (const std::string& s : restricted.states) {
        auto it = policy.find(s);
        if (it == policy.end()) fail("PartialMap", "policy undefined at " + s);
        pi[s] = it->second;
    }
    StateRelabeledSystem labeled = make_srts(restricted, pi);
    RefinementResult refinement = minimal_sufficient_refinement(labeled);

    TransitionSystem pair_quotient = quotient(restricted, refinement.partition);
    // Project the edge labels to observations; each block applies a single
    // action, so the projection stays deterministic.
    std::vector<std::array<std::string, 3>> triples;
    std::set<std::string> used;
    for (const Transition& t : pair_quotient.transitions) {
        auto [action, obs] = split_pair_label(pair_quotient.labels[t.label]);
        triples.push_back({pair_quotient.states[t.src], obs, pair_quotient.states[t.dst]});
        used.insert(obs);
    }
    std::optional<std::string> initial;
    if (pair_quotient.initial) initial = pair_quotient.states[*pair_quotient.initial];
    TransitionSystem projected = make_transition_system(
        pair_quotient.states, {used.begin(), used.end()}, triples, initial);

    // The reduced policy: every member of a block shares the policy value.
    std::map<std::string, std::string> reduced;
    auto blocks = refinement.partition.block_names();
    for (const auto& members : blocks) reduced[members.front()] = pi.at(members.front());
    MinimalDits out{make_srts(std::move(projected), reduced), std::move(refinement)};
    return out;
}

}  // namespace minbrain
