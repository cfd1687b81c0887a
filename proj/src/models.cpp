#include "minbrain/models.hpp"

namespace minbrain {

namespace {

const std::string kRoot = "i0";
const std::string kLastRed = "ir";
const std::string kLastGreen = "ig";
const std::string kViolated = "int";

std::map<std::tuple<std::string, std::string, std::string>, std::string> alternation_delta(
    const std::vector<std::string>& actions) {
    std::map<std::tuple<std::string, std::string, std::string>, std::string> delta;
    auto arm = [&](const std::string& q, const std::string& on_r, const std::string& on_g) {
        if (actions.empty()) {
            delta[{q, "", "r"}] = on_r;
            delta[{q, "", "g"}] = on_g;
        } else {
            for (const std::string& u : actions) {
                delta[{q, u, "r"}] = on_r;
                delta[{q, u, "g"}] = on_g;
            }
        }
    };
    arm(kRoot, kLastRed, kLastGreen);
    arm(kLastRed, kViolated, kLastGreen);
    arm(kLastGreen, kLastRed, kViolated);
    arm(kViolated, kViolated, kViolated);
    return delta;
}

}  // namespace

StateRelabeledSystem red_green_filter() {
    TransitionSystem sys = make_transition_system(
        {kRoot, kLastRed, kLastGreen, kViolated}, {"g", "r"},
        {
            {kRoot, "r", kLastRed},
            {kRoot, "g", kLastGreen},
            {kLastRed, "g", kLastGreen},
            {kLastRed, "r", kViolated},
            {kLastGreen, "r", kLastRed},
            {kLastGreen, "g", kViolated},
            {kViolated, "r", kViolated},
            {kViolated, "g", kViolated},
        },
        kRoot);
    return make_srts(std::move(sys), {{kRoot, kTaskSuccess},
                                      {kLastRed, kTaskSuccess},
                                      {kLastGreen, kTaskSuccess},
                                      {kViolated, kTaskFail}});
}

TaskMachine red_green_task_machine() {
    return make_task_machine({}, {"g", "r"}, {kRoot, kLastRed, kLastGreen, kViolated},
                             alternation_delta({}),
                             {{kRoot, kTaskSuccess},
                              {kLastRed, kTaskSuccess},
                              {kLastGreen, kTaskSuccess},
                              {kViolated, kTaskFail}},
                             kRoot);
}

TaskMachine red_green_refined_machine() {
    return make_task_machine({}, {"g", "r"}, {kRoot, kLastRed, kLastGreen, kViolated},
                             alternation_delta({}),
                             {{kRoot, kRoot},
                              {kLastRed, kLastRed},
                              {kLastGreen, kLastGreen},
                              {kViolated, kViolated}},
                             kRoot);
}

ExternalSystem red_green_annulus() {
    // Both gates join the two regions; crossing updates the region and
    // records the gate color as the observation.
    std::vector<std::string> states{"a.g", "a.r", "b.g", "b.r"};
    std::map<std::pair<std::string, std::string>, std::string> f;
    std::map<std::string, std::string> h;
    for (std::string region : {"a", "b"}) {
        const std::string other = region == "a" ? "b" : "a";
        for (std::string color : {"g", "r"}) {
            const std::string x = region + "." + color;
            f[{x, "u_g"}] = other + ".g";
            f[{x, "u_r"}] = other + ".r";
            h[x] = color;
        }
    }
    return make_external(states, {"u_g", "u_r"}, {"g", "r"}, f, h);
}

TaskMachine red_green_plan_policy_machine() {
    std::map<std::tuple<std::string, std::string, std::string>, std::string> delta;
    for (std::string q : {"p0", "pg", "pr"}) {
        for (std::string u : {"u_g", "u_r"}) {
            delta[{q, u, "r"}] = "pr";
            delta[{q, u, "g"}] = "pg";
        }
    }
    delta[{"p0", "", "r"}] = "pr";
    delta[{"p0", "", "g"}] = "pg";
    return make_task_machine({"u_g", "u_r"}, {"g", "r"}, {"p0", "pg", "pr"}, delta,
                             {{"p0", ""}, {"pr", "u_g"}, {"pg", "u_r"}}, "p0");
}

StateRelabeledSystem red_green_executor() {
    TransitionSystem sys = make_transition_system(
        {"e0", "eg", "er"}, {"g", "r"},
        {
            {"e0", "r", "er"},
            {"e0", "g", "eg"},
            {"er", "r", "er"},
            {"er", "g", "eg"},
            {"eg", "r", "er"},
            {"eg", "g", "eg"},
        },
        {"e0"});
    return make_srts(std::move(sys), {{"e0", ""}, {"er", "u_g"}, {"eg", "u_r"}});
}

CoupledSystem red_green_coupled() {
    StateRelabeledSystem executor = red_green_executor();
    std::map<std::string, std::string> policy;
    for (std::size_t i = 0; i < executor.system.states.size(); ++i)
        policy[executor.system.states[i]] = executor.labeling.of(static_cast<int>(i));
    return make_coupled(red_green_annulus(), executor.system, policy, "e0");
}

std::string corridor_state_name(int q1, int q2, int l1, int l2, bool heading_up) {
    return std::to_string(q1) + "," + std::to_string(q2) + "|" + std::to_string(l1) + "," +
           std::to_string(l2) + "|" + (heading_up ? "U" : "R");
}

ExternalSystem corridor_external(int lmax) {
    if (lmax < 1) fail("InvalidSystem", "corridor bound must be at least 1");
    auto in_env = [](int q1, int q2, int l1, int l2) {
        return (q2 == 0 && q1 >= 0 && q1 <= l1) || (q1 == l1 && q2 >= 0 && q2 <= l2);
    };
    std::vector<std::string> states;
    std::map<std::pair<std::string, std::string>, std::string> f;
    std::map<std::string, std::string> h;
    for (int l1 = 1; l1 <= lmax; ++l1) {
        for (int l2 = 1; l2 <= lmax; ++l2) {
            for (int q1 = 0; q1 <= l1; ++q1) {
                for (int q2 = 0; q2 <= l2; ++q2) {
                    if (!in_env(q1, q2, l1, l2)) continue;
                    for (bool up : {false, true}) {
                        std::string x = corridor_state_name(q1, q2, l1, l2, up);
                        states.push_back(x);
                        int ahead1 = q1 + (up ? 0 : 1);
                        int ahead2 = q2 + (up ? 1 : 0);
                        h[x] = in_env(ahead1, ahead2, l1, l2) ? "0" : "1";
                        int r1 = in_env(q1 + 1, q2, l1, l2) ? q1 + 1 : q1;
                        f[{x, "right"}] = corridor_state_name(r1, q2, l1, l2, false);
                        int u2 = in_env(q1, q2 + 1, l1, l2) ? q2 + 1 : q2;
                        f[{x, "up"}] = corridor_state_name(q1, u2, l1, l2, true);
                    }
                }
            }
        }
    }
    return make_external(states, {"right", "up"}, {"0", "1"}, f, h);
}

std::vector<int> corridor_initial_set(const ExternalSystem& ext) {
    std::vector<int> x0;
    for (int x = 0; x < static_cast<int>(ext.states.size()); ++x) {
        const std::string& name = ext.states[x];
        if (name.rfind("0,0|", 0) == 0 && name.back() == 'R') x0.push_back(x);
    }
    return x0;
}

CoupledSystem corridor_coupled(int lmax) {
    TransitionSystem executor = make_transition_system(
        {"phase_r", "phase_u", "done"}, {"0", "1"},
        {
            {"phase_r", "0", "phase_r"},
            {"phase_r", "1", "phase_u"},
            {"phase_u", "0", "phase_u"},
            {"phase_u", "1", "done"},
            {"done", "0", "done"},
            {"done", "1", "done"},
        },
        {"phase_r"});
    std::map<std::string, std::string> policy{
        {"phase_r", "right"}, {"phase_u", "up"}, {"done", "up"}};
    return make_coupled(corridor_external(lmax), std::move(executor), std::move(policy),
                        "phase_r");
}

TransitionSystem binary_toy_planner() {
    std::vector<std::array<std::string, 3>> triples;
    std::vector<std::string> labels;
    for (std::string u : {"0", "1"}) {
        for (std::string y : {"0", "1"}) {
            labels.push_back(pair_label(u, y));
            const std::string dst = u == y ? "0" : "1";
            triples.push_back({"0", labels.back(), dst});
            triples.push_back({"1", labels.back(), dst});
        }
    }
    return make_transition_system({"0", "1"}, labels, triples);
}

std::map<std::string, std::string> binary_toy_policy() {
    return {{"0", "0"}, {"1", "1"}};
}

}  // namespace minbrain
