#include "minbrain/history.hpp"

#include <algorithm>
#include <set>

#include "minbrain/errors.hpp"

namespace minbrain {

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> names, const char* what) {
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        fail("InvalidSystem", std::string("duplicate ") + what + " identifier");
    return names;
}

int sorted_index(const std::vector<std::string>& names, const std::string& name) {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) return -1;
    return static_cast<int>(it - names.begin());
}

const std::string kDefaultRoot = "()";

}  // namespace

std::string pair_label(const std::string& action, const std::string& observation) {
    return action + "|" + observation;
}

std::pair<std::string, std::string> split_pair_label(const std::string& label) {
    auto pos = label.find('|');
    if (pos == std::string::npos) fail("InvalidSystem", "not a pair label: " + label);
    return {label.substr(0, pos), label.substr(pos + 1)};
}

TransitionSystem HistoryIts::to_system() const {
    std::set<std::string> labels;
    std::vector<std::array<std::string, 3>> triples;
    triples.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const HistoryNode& node = nodes[i];
        if (node.parent < 0) continue;
        std::string label =
            observation_only()
                ? observations[node.obs]
                : pair_label(node.action < 0 ? "" : actions[node.action], observations[node.obs]);
        labels.insert(label);
        triples.push_back({names[node.parent], label, names[i]});
    }
    std::optional<std::string> initial;
    if (initials.size() == 1) initial = names[0];
    return make_transition_system(names, {labels.begin(), labels.end()}, triples, initial);
}

int HistoryIts::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

HistoryIts unroll(std::vector<std::string> actions, std::vector<std::string> observations,
                  std::vector<std::string> initials, int depth, std::size_t node_limit) {
    if (depth < 1) fail("InvalidSystem", "unroll depth must be at least 1");
    HistoryIts h;
    h.actions = sorted_unique(std::move(actions), "action");
    h.observations = sorted_unique(std::move(observations), "observation");
    if (h.observations.empty()) fail("InvalidSystem", "empty observation set");
    if (initials.empty()) initials = {kDefaultRoot};
    h.initials = sorted_unique(std::move(initials), "initial");
    h.depth = depth;

    // Node count check before building: roots, then |Y| children per root,
    // then branching max(1, |U|) * |Y| below.
    {
        const std::size_t ny = h.observations.size();
        const std::size_t branch = std::max<std::size_t>(1, h.actions.size()) * ny;
        std::size_t level = h.initials.size();
        std::size_t total = level;
        for (int d = 1; d <= depth; ++d) {
            level *= d == 1 ? ny : branch;
            total += level;
            if (total > node_limit)
                fail("SizeLimit", "unrolled tree exceeds the node limit of " +
                                      std::to_string(node_limit));
        }
    }

    for (const std::string& root : h.initials) {
        h.nodes.push_back(HistoryNode{});
        h.names.push_back(root);
    }
    // Breadth-first expansion; the frontier is a contiguous index range.
    std::size_t begin = 0, end = h.nodes.size();
    for (int d = 1; d <= depth; ++d) {
        for (std::size_t p = begin; p < end; ++p) {
            const bool first = d == 1;
            const int num_actions =
                first || h.actions.empty() ? 1 : static_cast<int>(h.actions.size());
            for (int a = 0; a < num_actions; ++a) {
                const int action = first || h.actions.empty() ? -1 : a;
                for (int y = 0; y < static_cast<int>(h.observations.size()); ++y) {
                    HistoryNode node;
                    node.parent = static_cast<int>(p);
                    node.action = action;
                    node.obs = y;
                    node.depth = d;
                    std::string segment = action < 0
                                              ? h.observations[y]
                                              : h.actions[action] + ":" + h.observations[y];
                    std::string name = h.names[p] == kDefaultRoot
                                           ? segment
                                           : h.names[p] + "." + segment;
                    h.nodes.push_back(node);
                    h.names.push_back(std::move(name));
                }
            }
        }
        begin = end;
        end = h.nodes.size();
    }
    return h;
}

int TaskMachine::action_index(const std::string& name) const {
    if (name.empty()) return -1;
    int idx = sorted_index(alphabet_u, name);
    if (idx < 0) fail("AlphabetMismatch", "unknown action: " + name);
    return idx;
}

int TaskMachine::observation_index(const std::string& name) const {
    int idx = sorted_index(alphabet_y, name);
    if (idx < 0) fail("AlphabetMismatch", "unknown observation: " + name);
    return idx;
}

int TaskMachine::state_index(const std::string& name) const {
    return sorted_index(states, name);
}

int TaskMachine::step(int state, int action, int obs) const {
    auto it = delta.find({state, action, obs});
    if (it == delta.end())
        fail("IncompleteTaskMachine",
             "no transition from " + states[state] + " on (" +
                 (action < 0 ? std::string() : alphabet_u[action]) + ", " + alphabet_y[obs] + ")");
    return it->second;
}

TaskMachine make_task_machine(std::vector<std::string> alphabet_u,
                              std::vector<std::string> alphabet_y,
                              std::vector<std::string> states,
                              const std::map<std::tuple<std::string, std::string, std::string>,
                                             std::string>& delta,
                              const std::map<std::string, std::string>& output,
                              const std::string& initial) {
    TaskMachine m;
    m.alphabet_u = sorted_unique(std::move(alphabet_u), "action");
    m.alphabet_y = sorted_unique(std::move(alphabet_y), "observation");
    if (m.alphabet_y.empty()) fail("InvalidSystem", "empty observation alphabet");
    m.states = sorted_unique(std::move(states), "state");
    if (m.states.empty()) fail("InvalidSystem", "empty machine");
    for (const auto& [key, dst] : delta) {
        const auto& [q_name, a_name, y_name] = key;
        int q = m.state_index(q_name);
        int d = m.state_index(dst);
        if (q < 0 || d < 0) fail("InvalidSystem", "delta references unknown state");
        m.delta[{q, m.action_index(a_name), m.observation_index(y_name)}] = d;
    }
    m.output.assign(m.states.size(), "");
    for (const auto& [q_name, label] : output) {
        int q = m.state_index(q_name);
        if (q < 0) fail("InvalidSystem", "output references unknown state");
        m.output[q] = label;
    }
    for (std::size_t q = 0; q < m.states.size(); ++q)
        if (m.output[q].empty() && !output.count(m.states[q]))
            fail("InvalidSystem", "output is not total at " + m.states[q]);
    int init = m.state_index(initial);
    if (init < 0) fail("InvalidSystem", "initial state unknown: " + initial);
    m.initial = init;

    // Completeness: every (state, u, y) pair; the null-action row everywhere
    // for observation-only machines, at the initial state otherwise.
    const int ny = static_cast<int>(m.alphabet_y.size());
    for (int q = 0; q < static_cast<int>(m.states.size()); ++q) {
        for (int y = 0; y < ny; ++y) {
            if (m.alphabet_u.empty()) {
                if (!m.delta.count({q, -1, y}))
                    fail("IncompleteTaskMachine", "missing transition at " + m.states[q]);
            } else {
                for (int u = 0; u < static_cast<int>(m.alphabet_u.size()); ++u)
                    if (!m.delta.count({q, u, y}))
                        fail("IncompleteTaskMachine", "missing transition at " + m.states[q]);
            }
        }
    }
    if (!m.alphabet_u.empty()) {
        for (int y = 0; y < ny; ++y)
            if (!m.delta.count({m.initial, -1, y}))
                fail("IncompleteTaskMachine", "missing null-action transition at the initial state");
    }
    return m;
}

std::vector<int> run_machine(const HistoryIts& h, const TaskMachine& m) {
    for (const std::string& y : h.observations)
        if (sorted_index(m.alphabet_y, y) < 0)
            fail("AlphabetMismatch", "machine does not cover observation " + y);
    if (!h.observation_only() && m.alphabet_u.empty() && h.actions.size() > 1)
        fail("AlphabetMismatch", "observation-only machine on an action history space");
    std::vector<int> state(h.nodes.size(), m.initial);
    for (std::size_t i = 0; i < h.nodes.size(); ++i) {
        const HistoryNode& node = h.nodes[i];
        if (node.parent < 0) continue;
        int action = -1;
        if (!m.alphabet_u.empty() && node.action >= 0)
            action = m.action_index(h.actions[node.action]);
        int obs = m.observation_index(h.observations[node.obs]);
        state[i] = m.step(state[node.parent], action, obs);
    }
    return state;
}

std::map<std::string, std::string> machine_labels(const HistoryIts& h, const TaskMachine& m) {
    std::vector<int> state = run_machine(h, m);
    std::map<std::string, std::string> labels;
    for (std::size_t i = 0; i < h.nodes.size(); ++i) labels[h.names[i]] = m.output[state[i]];
    return labels;
}

StateRelabeledSystem apply_imap(const HistoryIts& h,
                                const std::map<std::string, std::string>& labels) {
    return make_srts(h.to_system(), labels);
}

StateRelabeledSystem apply_imap(const HistoryIts& h, const TaskMachine& m) {
    return make_srts(h.to_system(), machine_labels(h, m));
}

TransitionSystem derive_its(const HistoryIts& h,
                            const std::map<std::string, std::string>& labels) {
    return quotient(apply_imap(h, labels));
}

TransitionSystem derive_its(const HistoryIts& h, const TaskMachine& m) {
    return quotient(apply_imap(h, m));
}

TransitionSystem restrict_by_policy(const TransitionSystem& sys,
                                    const std::map<std::string, std::string>& policy) {
    for (const std::string& s : sys.states)
        if (!policy.count(s)) fail("PartialMap", "policy undefined at " + s);
    std::vector<std::array<std::string, 3>> kept;
    std::set<std::string> used;
    for (const Transition& t : sys.transitions) {
        auto [action, obs] = split_pair_label(sys.labels[t.label]);
        if (action != policy.at(sys.states[t.src])) continue;
        kept.push_back({sys.states[t.src], sys.labels[t.label], sys.states[t.dst]});
        used.insert(sys.labels[t.label]);
    }
    std::optional<std::string> initial;
    if (sys.initial) initial = sys.states[*sys.initial];
    return make_transition_system(sys.states, {used.begin(), used.end()}, kept, initial);
}

TransitionSystem strong_restrict(const TransitionSystem& sys,
                                 const std::map<std::string, std::string>& policy) {
    if (!is_deterministic(sys)) fail("NondeterministicInput", "strong restriction of a NITS");
    for (const std::string& s : sys.states)
        if (!policy.count(s)) fail("PartialMap", "policy undefined at " + s);
    std::vector<std::array<std::string, 3>> kept;
    std::set<std::string> used;
    for (const Transition& t : sys.transitions) {
        auto [action, obs] = split_pair_label(sys.labels[t.label]);
        if (action != policy.at(sys.states[t.src])) continue;
        kept.push_back({sys.states[t.src], obs, sys.states[t.dst]});
        used.insert(obs);
    }
    std::optional<std::string> initial;
    if (sys.initial) initial = sys.states[*sys.initial];
    return make_transition_system(sys.states, {used.begin(), used.end()}, kept, initial);
}

TransitionSystem prune_unreachable(const TransitionSystem& sys) {
    if (!sys.initial) return sys;
    auto out = sys.out_edges();
    std::vector<char> reach(sys.states.size(), 0);
    std::vector<int> stack{*sys.initial};
    reach[*sys.initial] = 1;
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (auto [lam, dst] : out[s]) {
            if (!reach[dst]) {
                reach[dst] = 1;
                stack.push_back(dst);
            }
        }
    }
    std::vector<std::string> states;
    for (std::size_t i = 0; i < sys.states.size(); ++i)
        if (reach[i]) states.push_back(sys.states[i]);
    std::vector<std::array<std::string, 3>> kept;
    std::set<std::string> used;
    for (const Transition& t : sys.transitions) {
        if (!reach[t.src] || !reach[t.dst]) continue;
        kept.push_back({sys.states[t.src], sys.labels[t.label], sys.states[t.dst]});
        used.insert(sys.labels[t.label]);
    }
    return make_transition_system(states, {used.begin(), used.end()}, kept,
                                  sys.states[*sys.initial]);
}

namespace {

// Annotated subset construction shared by the three task builders.
// status: 0 pending, 1 success, 2 fail (success and fail are absorbing).
TaskMachine build_task(const ExternalSystem& ext, const std::vector<char>& goal,
                       const std::vector<char>& bad, bool success_possible) {
    using Config = std::vector<std::pair<int, int>>;    // sorted (x, status)

    auto initial_status = [&](int x) -> int {
        if (!bad.empty() && bad[x]) return 2;
        if (!goal.empty() && goal[x]) return 1;
        return 0;
    };
    auto next_status = [&](int status, int x) -> int {
        if (status != 0) return status;
        if (!bad.empty() && bad[x]) return 2;
        if (!goal.empty() && goal[x]) return 1;
        return 0;
    };
    auto output_of = [&](const Config& c) -> std::string {
        if (c.empty()) return kTaskPending;    // unreachable history
        bool all_success = true, all_fail = true;
        for (auto [x, st] : c) {
            all_success &= st == 1;
            all_fail &= st == 2;
        }
        if (success_possible && all_success) return kTaskSuccess;
        if (all_fail) return kTaskFail;
        // Closed tasks without a goal are satisfied until determined failed.
        return goal.empty() ? kTaskSuccess : kTaskPending;
    };

    Config root;
    for (int x = 0; x < static_cast<int>(ext.states.size()); ++x)
        root.emplace_back(x, initial_status(x));

    std::map<Config, int> ids;
    std::vector<Config> configs;
    auto intern = [&](Config c) {
        auto [it, inserted] = ids.emplace(std::move(c), static_cast<int>(ids.size()));
        if (inserted) {
            configs.push_back(it->first);
            if (configs.size() > 100000) fail("SizeLimit", "task machine construction blew up");
        }
        return it->second;
    };

    const int ny = static_cast<int>(ext.observations.size());
    const int nu = static_cast<int>(ext.actions.size());
    intern(root);
    std::map<std::tuple<int, int, int>, int> delta;
    for (int q = 0; q < static_cast<int>(configs.size()); ++q) {
        const Config src = configs[q];
        // Null-action step: condition on an observation without moving.
        for (int y = 0; y < ny; ++y) {
            Config dst;
            for (auto [x, st] : src)
                if (ext.h[x] == y) dst.emplace_back(x, st);
            delta[{q, -1, y}] = intern(std::move(dst));
        }
        for (int u = 0; u < nu; ++u) {
            for (int y = 0; y < ny; ++y) {
                std::set<std::pair<int, int>> dst_set;
                for (auto [x, st] : src) {
                    int x2 = ext.f[x][u];
                    if (ext.h[x2] != y) continue;
                    dst_set.emplace(x2, next_status(st, x2));
                }
                delta[{q, u, y}] = intern(Config(dst_set.begin(), dst_set.end()));
            }
        }
    }

    // Pack into the canonical machine shape with stable names.
    int width = 1;
    for (std::size_t c = configs.size(); c >= 10; c /= 10) ++width;
    auto name_of = [&](int q) {
        std::string digits = std::to_string(q);
        return "q" + std::string(width - digits.size(), '0') + digits;
    };
    std::vector<std::string> names;
    std::map<std::tuple<std::string, std::string, std::string>, std::string> delta_names;
    std::map<std::string, std::string> output;
    for (int q = 0; q < static_cast<int>(configs.size()); ++q) {
        names.push_back(name_of(q));
        output[name_of(q)] = output_of(configs[q]);
    }
    for (const auto& [key, dst] : delta) {
        const auto& [q, a, y] = key;
        delta_names[{name_of(q), a < 0 ? "" : ext.actions[a], ext.observations[y]}] =
            name_of(dst);
    }
    return make_task_machine(ext.actions, ext.observations, names, delta_names, output,
                             name_of(0));
}

}  // namespace

TaskMachine build_reach_task(const ExternalSystem& ext, const std::vector<std::string>& goal) {
    if (goal.empty()) fail("EmptyGoal", "reach task with empty goal");
    std::vector<char> g(ext.states.size(), 0);
    for (const std::string& s : goal) {
        int x = ext.state_index(s);
        if (x < 0) fail("InvalidSystem", "goal state unknown: " + s);
        g[x] = 1;
    }
    return build_task(ext, g, {}, true);
}

TaskMachine build_avoid_task(const ExternalSystem& ext, const std::vector<std::string>& bad) {
    std::vector<char> b(ext.states.size(), 0);
    for (const std::string& s : bad) {
        int x = ext.state_index(s);
        if (x < 0) fail("InvalidSystem", "bad state unknown: " + s);
        b[x] = 1;
    }
    return build_task(ext, {}, b, false);
}

TaskMachine build_reach_avoid_task(const ExternalSystem& ext,
                                   const std::vector<std::string>& goal,
                                   const std::vector<std::string>& bad) {
    if (goal.empty()) fail("EmptyGoal", "reach task with empty goal");
    std::vector<char> g(ext.states.size(), 0), b(ext.states.size(), 0);
    for (const std::string& s : goal) {
        int x = ext.state_index(s);
        if (x < 0) fail("InvalidSystem", "goal state unknown: " + s);
        g[x] = 1;
    }
    for (const std::string& s : bad) {
        int x = ext.state_index(s);
        if (x < 0) fail("InvalidSystem", "bad state unknown: " + s);
        if (g[x]) fail("InvalidSystem", "goal and bad sets overlap at " + s);
        b[x] = 1;
    }
    return build_task(ext, g, b, true);
}

}  // namespace minbrain
