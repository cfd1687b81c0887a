// minbrain: load, check, minimize, simulate, and export information
// transition systems from the shared JSON formats.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "minbrain/coupled.hpp"
#include "minbrain/dbi.hpp"
#include "minbrain/errors.hpp"
#include "minbrain/filters.hpp"
#include "minbrain/json_io.hpp"
#include "minbrain/models.hpp"
#include "minbrain/psr.hpp"
#include "minbrain/refine.hpp"

namespace {

using minbrain::Json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitInput = 2;

bool input_shaped(const std::string& code) {
    return code == "SchemaError" || code == "InvalidSystem" || code == "InvalidPartition" ||
           code == "AlphabetMismatch";
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) minbrain::fail("SchemaError", "cannot open input file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        minbrain::fail("SchemaError", std::string("JSON parse error: ") + e.what());
    }
}

void emit(const Json& j, const std::string& output_path) {
    std::string text = j.dump(2) + "\n";
    if (output_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(output_path);
        if (!out) minbrain::fail("SchemaError", "cannot open output file: " + output_path);
        out << text;
    }
}

void emit_text(const std::string& text, const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) minbrain::fail("SchemaError", "cannot open output file: " + path);
    out << text;
}

std::size_t node_limit_from_env() {
    const char* env = std::getenv("MINBRAIN_SIZE_LIMIT");
    if (!env) return minbrain::kDefaultNodeLimit;
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
        minbrain::fail("SchemaError", "MINBRAIN_SIZE_LIMIT must be a positive integer");
    return static_cast<std::size_t>(v);
}

minbrain::HistoryIts unroll_from_json(const Json& spec) {
    std::vector<std::string> actions, observations, initials;
    if (spec.contains("actions")) actions = spec["actions"].get<std::vector<std::string>>();
    observations = spec.at("observations").get<std::vector<std::string>>();
    if (spec.contains("initials")) initials = spec["initials"].get<std::vector<std::string>>();
    int depth = spec.at("depth").get<int>();
    return minbrain::unroll(actions, observations, initials, depth, node_limit_from_env());
}

std::map<std::string, std::string> string_map(const Json& j) {
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : j.items()) out[k] = v.get<std::string>();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimally sufficient information transition systems"};
    app.require_subcommand(1);

    std::string input_path, output_path, dot_path, example_name, start_state;
    int depth = 6;
    int horizon = 20;
    std::uint64_t seed = 0;
    int max_test_len = 3;
    bool exact = true, use_float = false, strong = false, exhaustive = false, robust = false;

    auto add_io = [&](CLI::App* cmd, bool need_input) {
        auto* opt = cmd->add_option("--input", input_path, "input JSON file");
        if (need_input) opt->required();
        cmd->add_option("--output", output_path, "output JSON file (stdout when absent)");
        cmd->add_option("--dot", dot_path, "also write a DOT rendering here");
    };

    auto* check = app.add_subcommand("check-sufficient", "sufficiency of a state labeling");
    add_io(check, true);

    auto* minimize = app.add_subcommand("minimize", "minimal sufficient refinement");
    add_io(minimize, true);

    auto* quot = app.add_subcommand("quotient", "quotient by the state labeling");
    add_io(quot, true);

    auto* derive = app.add_subcommand("derive", "derived ITS of an I-map over histories");
    add_io(derive, true);
    derive->add_option("--depth", depth, "unroll depth override");

    auto* restr = app.add_subcommand("restrict", "restrict a system by a policy");
    add_io(restr, true);
    restr->add_flag("--strong", strong, "strong restriction (project labels to Y)");

    auto* sim = app.add_subcommand("simulate", "roll out a coupled system");
    add_io(sim, true);
    sim->add_option("--horizon", horizon, "number of stages")->required();
    sim->add_option("--seed", seed, "sampler seed (probabilistic disturbances)");
    sim->add_flag("--exhaustive", exhaustive, "enumerate nondeterministic traces");
    sim->add_option("--start", start_state, "initial external state override");

    auto* reach = app.add_subcommand("reach-set", "backward reachable set of a task");
    add_io(reach, true);

    auto* feas = app.add_subcommand("feasible", "feasible-policy check");
    add_io(feas, true);
    feas->add_option("--horizon", horizon, "exploration bound");
    feas->add_flag("--robust", robust, "all disturbance traces must succeed");

    auto* dbi = app.add_subcommand("dbi-graph", "update graph of a Moore machine");
    add_io(dbi, true);

    auto* psr = app.add_subcommand("psr-run", "discover core tests and emit the linear PSR");
    add_io(psr, true);
    psr->add_option("--max-test-len", max_test_len, "outcome matrix bound");
    psr->add_flag("--exact", exact, "exact rational arithmetic (default)");
    psr->add_flag("--float", use_float, "floating-point arithmetic");

    auto* example = app.add_subcommand("example", "write a bundled worked example");
    example->add_option("name", example_name,
                        "red-green-filter | red-green-plan | l-corridor | binary-toy")
        ->required();
    example->add_option("--output", output_path, "output JSON file (stdout when absent)");
    example->add_option("--dot", dot_path, "also write a DOT rendering here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) {
            auto m = minbrain::srts_from_json(load_json(input_path));
            auto witness = minbrain::sufficiency_counterexample(m);
            Json out;
            out["sufficient"] = !witness.has_value();
            if (witness) {
                out["witness"] = {{"s", witness->s},
                                  {"t", witness->t},
                                  {"label", witness->label},
                                  {"s_next", witness->s_next},
                                  {"t_next", witness->t_next}};
            }
            emit(out, output_path);
            return witness ? kExitDomain : kExitOk;
        }
        if (minimize->parsed()) {
            auto m = minbrain::srts_from_json(load_json(input_path));
            auto result = minbrain::minimal_sufficient_refinement(m);
            emit(minbrain::refinement_to_json(result), output_path);
            std::map<std::string, std::string> names;
            for (std::size_t s = 0; s < m.system.states.size(); ++s)
                names[m.system.states[s]] = result.labeling.of(static_cast<int>(s));
            emit_text(minbrain::to_dot(minbrain::quotient(make_srts(m.system, names)),
                                       "refined"),
                      dot_path);
            return kExitOk;
        }
        if (quot->parsed()) {
            auto m = minbrain::srts_from_json(load_json(input_path));
            auto q = minbrain::quotient(m);
            emit(minbrain::system_to_json(q), output_path);
            emit_text(minbrain::to_dot(q, "quotient"), dot_path);
            return kExitOk;
        }
        if (derive->parsed()) {
            Json j = load_json(input_path);
            Json spec = j.at("unroll");
            if (derive->count("--depth")) spec["depth"] = depth;
            auto tree = unroll_from_json(spec);
            auto machine = minbrain::task_machine_from_json(j.at("imap"));
            auto derived = minbrain::derive_its(tree, machine);
            Json out = minbrain::system_to_json(derived);
            out["deterministic"] = minbrain::is_deterministic(derived);
            emit(out, output_path);
            emit_text(minbrain::to_dot(derived, "derived"), dot_path);
            return kExitOk;
        }
        if (restr->parsed()) {
            Json j = load_json(input_path);
            auto sys = minbrain::system_from_json(j.at("system"));
            auto policy = string_map(j.at("policy"));
            auto result = strong ? minbrain::strong_restrict(sys, policy)
                                 : minbrain::restrict_by_policy(sys, policy);
            emit(minbrain::system_to_json(result), output_path);
            emit_text(minbrain::to_dot(result, "restricted"), dot_path);
            return kExitOk;
        }
        if (sim->parsed()) {
            Json j = load_json(input_path);
            auto cs = minbrain::coupled_from_json(j);
            std::string start = start_state;
            if (start.empty()) {
                if (!j.contains("initial_external"))
                    minbrain::fail("SchemaError",
                                   "simulate needs --start or an initial_external field");
                start = j["initial_external"].get<std::string>();
            }
            minbrain::DisturbancePolicy dp = minbrain::NoDisturbance{};
            if (cs.disturbances) {
                if (exhaustive)
                    dp = minbrain::Exhaustive{};
                else if (cs.disturbances->mode ==
                         minbrain::DisturbanceModel::Mode::probabilistic)
                    dp = minbrain::SeededSampler{seed};
                else
                    minbrain::fail("InadmissibleDisturbance",
                                   "nondeterministic models need --exhaustive");
            }
            auto rollouts = minbrain::rollout(cs, start, horizon, dp);
            if (output_path.empty()) {
                for (const auto& r : rollouts) std::cout << minbrain::rollout_to_json_lines(r);
            } else {
                std::ofstream out(output_path);
                if (!out)
                    minbrain::fail("SchemaError", "cannot open output file: " + output_path);
                for (const auto& r : rollouts) out << minbrain::rollout_to_json_lines(r);
            }
            return kExitOk;
        }
        if (reach->parsed()) {
            Json j = load_json(input_path);
            auto ext = minbrain::external_from_json(j.at("external"));
            auto task = minbrain::task_machine_from_json(j.at("task"));
            Json out;
            out["states"] = minbrain::backward_reachable_set(ext, task);
            emit(out, output_path);
            return kExitOk;
        }
        if (feas->parsed()) {
            Json j = load_json(input_path);
            auto cs = minbrain::coupled_from_json(j.at("coupled"));
            auto task = minbrain::task_machine_from_json(j.at("task"));
            auto result =
                robust ? minbrain::is_feasible_policy_robust(
                             cs, task, horizon, minbrain::TraceQuantifier::all_traces)
                       : minbrain::is_feasible_policy(cs, task, horizon);
            Json out;
            out["feasible"] = result.verdict == minbrain::Feasibility::feasible;
            out["verdict"] = result.verdict == minbrain::Feasibility::feasible
                                 ? "feasible"
                                 : (result.verdict == minbrain::Feasibility::infeasible
                                        ? "infeasible"
                                        : "horizon_exhausted");
            if (result.witness) out["witness"] = *result.witness;
            emit(out, output_path);
            return result.verdict == minbrain::Feasibility::feasible ? kExitOk : kExitDomain;
        }
        if (dbi->parsed()) {
            auto m = minbrain::moore_from_json(load_json(input_path));
            auto g = minbrain::build_update_graph(m);
            Json out = minbrain::update_graph_to_json(m, g);
            out["diversity"] = g.alpha_u.empty() ? 0 : g.alpha_u.front().size();
            out["reduced"] = g.node_bits.size() == m.sys.states.size();
            emit(out, output_path);
            emit_text(minbrain::to_dot(g.to_srts(m), "update_graph"), dot_path);
            return kExitOk;
        }
        if (psr->parsed()) {
            auto pm = minbrain::prob_model_from_json(load_json(input_path));
            if (use_float) {
                auto fm = minbrain::convert_model<double>(pm);
                auto discovered = minbrain::discover_core_tests(fm, max_test_len);
                Json out;
                out["core_tests"] = Json::array();
                for (const auto& t : discovered.core) {
                    std::string s;
                    for (std::size_t i = 0; i < t.steps.size(); ++i) {
                        if (i) s += ".";
                        s += fm.actions[t.steps[i].first] + ":" +
                             fm.observations[t.steps[i].second];
                    }
                    out["core_tests"].push_back(s);
                }
                out["m0"] = Json::array();
                for (int i = 0; i < discovered.m0.size(); ++i)
                    out["m0"].push_back(discovered.m0(i));
                emit(out, output_path);
            } else {
                auto discovered = minbrain::discover_core_tests(pm, max_test_len);
                emit(minbrain::psr_to_json(discovered), output_path);
            }
            return kExitOk;
        }
        if (example->parsed()) {
            if (example_name == "red-green-filter") {
                auto tree = minbrain::unroll({}, {"g", "r"}, {}, 6, node_limit_from_env());
                auto labeled = minbrain::apply_imap(tree, minbrain::red_green_task_machine());
                auto refinement = minbrain::minimal_sufficient_refinement(labeled);
                std::map<std::string, std::string> names;
                for (std::size_t s = 0; s < labeled.system.states.size(); ++s)
                    names[labeled.system.states[s]] =
                        refinement.labeling.of(static_cast<int>(s));
                auto filter = minbrain::quotient(make_srts(labeled.system, names));
                Json out;
                out["filter"] = minbrain::system_to_json(filter);
                out["classes"] = minbrain::partition_to_json(refinement.partition)["blocks"];
                emit(out, output_path);
                emit_text(minbrain::to_dot(filter, "red_green_filter"), dot_path);
                return kExitOk;
            }
            if (example_name == "red-green-plan") {
                auto tree =
                    minbrain::unroll({"u_g", "u_r"}, {"g", "r"}, {}, 6, node_limit_from_env());
                auto policy = minbrain::machine_labels(
                    tree, minbrain::red_green_plan_policy_machine());
                auto result = minbrain::minimal_dits_for_policy(tree, policy);
                Json out;
                out["dits"] = minbrain::system_to_json(result.dits.system);
                Json table = Json::object();
                for (std::size_t s = 0; s < result.dits.system.states.size(); ++s) {
                    std::string action = result.dits.labeling.of(static_cast<int>(s));
                    table[result.dits.system.states[s]] = action.empty() ? "()" : action;
                }
                out["policy"] = std::move(table);
                emit(out, output_path);
                emit_text(minbrain::to_dot(result.dits, "red_green_plan"), dot_path);
                return kExitOk;
            }
            if (example_name == "l-corridor") {
                auto cs = minbrain::corridor_coupled(3);
                Json out = minbrain::coupled_to_json(cs);
                out["initial_external"] = minbrain::corridor_state_name(0, 0, 2, 3, false);
                emit(out, output_path);
                emit_text(minbrain::to_dot(cs.internal, "corridor_executor"), dot_path);
                return kExitOk;
            }
            if (example_name == "binary-toy") {
                auto planner = minbrain::binary_toy_planner();
                auto policy = minbrain::binary_toy_policy();
                Json out;
                out["planner"] = minbrain::system_to_json(planner);
                out["policy"] = policy;
                out["executor"] =
                    minbrain::system_to_json(minbrain::strong_restrict(planner, policy));
                emit(out, output_path);
                emit_text(minbrain::to_dot(planner, "binary_toy"), dot_path);
                return kExitOk;
            }
            minbrain::fail("SchemaError", "unknown example: " + example_name);
        }
    } catch (const minbrain::Error& e) {
        Json out;
        out["error"] = {{"code", e.code()}, {"message", e.what()}};
        std::cout << out.dump(2) << "\n";
        return input_shaped(e.code()) ? kExitInput : kExitDomain;
    } catch (const Json::exception& e) {
        Json out;
        out["error"] = {{"code", "SchemaError"}, {"message", e.what()}};
        std::cout << out.dump(2) << "\n";
        return kExitInput;
    }
    return kExitOk;
}
