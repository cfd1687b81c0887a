#include "minbrain/json_io.hpp"

#include <algorithm>
#include <sstream>

namespace minbrain {

namespace {

const Json& field(const Json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) fail("SchemaError", std::string("missing field: ") + name);
    return *it;
}

std::vector<std::string> string_list(const Json& j, const char* name) {
    std::vector<std::string> out;
    for (const Json& v : field(j, name)) {
        if (!v.is_string()) fail("SchemaError", std::string(name) + " must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

// "(s,u,y)" with possible commas inside s: split at the last two commas.
std::tuple<std::string, std::string, std::string> parse_triple_key(const std::string& key) {
    if (key.size() < 2 || key.front() != '(' || key.back() != ')')
        fail("SchemaError", "bad delta key: " + key);
    std::string body = key.substr(1, key.size() - 2);
    auto last = body.rfind(',');
    if (last == std::string::npos) fail("SchemaError", "bad delta key: " + key);
    auto mid = body.rfind(',', last - 1 > 0 ? last - 1 : 0);
    if (mid == std::string::npos || mid >= last) fail("SchemaError", "bad delta key: " + key);
    return {body.substr(0, mid), body.substr(mid + 1, last - mid - 1), body.substr(last + 1)};
}

std::string quote_dot(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

Json system_to_json(const TransitionSystem& sys) {
    Json j;
    j["states"] = sys.states;
    j["labels"] = sys.labels;
    Json transitions = Json::array();
    for (const Transition& t : sys.transitions)
        transitions.push_back({sys.states[t.src], sys.labels[t.label], sys.states[t.dst]});
    j["transitions"] = std::move(transitions);
    if (sys.initial) j["initial"] = sys.states[*sys.initial];
    return j;
}

Json srts_to_json(const StateRelabeledSystem& m) {
    Json j = system_to_json(m.system);
    Json labels = Json::object();
    for (std::size_t s = 0; s < m.system.states.size(); ++s)
        labels[m.system.states[s]] = m.labeling.of(static_cast<int>(s));
    j["state_labels"] = std::move(labels);
    return j;
}

TransitionSystem system_from_json(const Json& j) {
    std::vector<std::array<std::string, 3>> triples;
    for (const Json& t : field(j, "transitions")) {
        if (!t.is_array() || t.size() != 3) fail("SchemaError", "transition must be a triple");
        triples.push_back({t[0].get<std::string>(), t[1].get<std::string>(),
                           t[2].get<std::string>()});
    }
    std::optional<std::string> initial;
    if (j.contains("initial") && !j["initial"].is_null())
        initial = j["initial"].get<std::string>();
    return make_transition_system(string_list(j, "states"), string_list(j, "labels"), triples,
                                  initial);
}

StateRelabeledSystem srts_from_json(const Json& j) {
    TransitionSystem sys = system_from_json(j);
    std::map<std::string, std::string> labels;
    for (const auto& [k, v] : field(j, "state_labels").items())
        labels[k] = v.get<std::string>();
    return make_srts(std::move(sys), labels);
}

Json partition_to_json(const Partition& p) {
    Json j;
    j["blocks"] = p.block_names();
    return j;
}

Partition partition_from_json(const Json& j) {
    std::vector<std::vector<std::string>> blocks;
    for (const Json& b : field(j, "blocks")) blocks.push_back(b.get<std::vector<std::string>>());
    return make_partition(blocks);
}

Json refinement_to_json(const RefinementResult& r) {
    Json j = partition_to_json(r.partition);
    Json labels = Json::object();
    for (std::size_t s = 0; s < r.partition.domain.size(); ++s)
        labels[r.partition.domain[s]] = r.labeling.of(static_cast<int>(s));
    j["state_labels"] = std::move(labels);
    j["iterations"] = r.iterations;
    return j;
}

Json task_machine_to_json(const TaskMachine& m) {
    Json j;
    j["alphabet_u"] = m.alphabet_u;
    j["alphabet_y"] = m.alphabet_y;
    j["states"] = m.states;
    Json delta = Json::object();
    for (const auto& [key, dst] : m.delta) {
        const auto& [q, a, y] = key;
        delta["(" + m.states[q] + "," + (a < 0 ? "" : m.alphabet_u[a]) + "," + m.alphabet_y[y] +
              ")"] = m.states[dst];
    }
    j["delta"] = std::move(delta);
    Json output = Json::object();
    for (std::size_t q = 0; q < m.states.size(); ++q) output[m.states[q]] = m.output[q];
    j["output"] = std::move(output);
    j["initial"] = m.states[m.initial];
    return j;
}

TaskMachine task_machine_from_json(const Json& j) {
    std::map<std::tuple<std::string, std::string, std::string>, std::string> delta;
    for (const auto& [key, dst] : field(j, "delta").items())
        delta[parse_triple_key(key)] = dst.get<std::string>();
    std::map<std::string, std::string> output;
    for (const auto& [k, v] : field(j, "output").items()) output[k] = v.get<std::string>();
    return make_task_machine(string_list(j, "alphabet_u"), string_list(j, "alphabet_y"),
                             string_list(j, "states"), delta, output,
                             field(j, "initial").get<std::string>());
}

Json external_to_json(const ExternalSystem& ext) {
    Json j;
    j["states"] = ext.states;
    j["labels"] = ext.actions;
    Json transitions = Json::array();
    for (std::size_t x = 0; x < ext.states.size(); ++x)
        for (std::size_t u = 0; u < ext.actions.size(); ++u)
            transitions.push_back({ext.states[x], ext.actions[u], ext.states[ext.f[x][u]]});
    j["transitions"] = std::move(transitions);
    Json labels = Json::object();
    for (std::size_t x = 0; x < ext.states.size(); ++x)
        labels[ext.states[x]] = ext.observations[ext.h[x]];
    j["state_labels"] = std::move(labels);
    return j;
}

ExternalSystem external_from_json(const Json& j) {
    StateRelabeledSystem m = srts_from_json(j);
    if (!is_deterministic(m.system) || !is_full(m.system))
        fail("SchemaError", "an external system needs a total transition function");
    std::map<std::pair<std::string, std::string>, std::string> f;
    for (const Transition& t : m.system.transitions)
        f[{m.system.states[t.src], m.system.labels[t.label]}] = m.system.states[t.dst];
    std::map<std::string, std::string> h;
    for (std::size_t x = 0; x < m.system.states.size(); ++x)
        h[m.system.states[x]] = m.labeling.of(static_cast<int>(x));
    return make_external(m.system.states, m.system.labels, m.labeling.codomain, f, h);
}

Json moore_to_json(const MooreMachine& m) {
    Json j = external_to_json(m.sys);
    j["initial"] = m.sys.states[m.initial];
    return j;
}

MooreMachine moore_from_json(const Json& j) {
    ExternalSystem ext = external_from_json(j);
    return make_moore(std::move(ext), field(j, "initial").get<std::string>());
}

Json disturbances_to_json(const ExternalSystem& ext, const DisturbanceModel& dm) {
    Json j;
    j["mode"] = dm.mode == DisturbanceModel::Mode::nondeterministic ? "nondeterministic"
                                                                    : "probabilistic";
    j["thetas"] = dm.thetas;
    j["psis"] = dm.psis;
    Json f = Json::object(), h = Json::object();
    for (std::size_t x = 0; x < ext.states.size(); ++x) {
        for (std::size_t u = 0; u < ext.actions.size(); ++u)
            for (std::size_t t = 0; t < dm.thetas.size(); ++t)
                f["(" + ext.states[x] + "," + ext.actions[u] + "," + dm.thetas[t] + ")"] =
                    ext.states[dm.f_theta[x][u][t]];
        for (std::size_t p = 0; p < dm.psis.size(); ++p)
            h["(" + ext.states[x] + "," + dm.psis[p] + ")"] =
                ext.observations[dm.h_psi[x][p]];
    }
    j["f_theta"] = std::move(f);
    j["h_psi"] = std::move(h);
    if (dm.mode == DisturbanceModel::Mode::nondeterministic) {
        Json tok = Json::object(), pok = Json::object();
        for (std::size_t x = 0; x < ext.states.size(); ++x) {
            Json row = Json::array();
            for (std::size_t p = 0; p < dm.psis.size(); ++p)
                if (dm.psi_ok[x][p]) row.push_back(dm.psis[p]);
            pok[ext.states[x]] = std::move(row);
            for (std::size_t u = 0; u < ext.actions.size(); ++u) {
                Json trow = Json::array();
                for (std::size_t t = 0; t < dm.thetas.size(); ++t)
                    if (dm.theta_ok[x][u][t]) trow.push_back(dm.thetas[t]);
                tok["(" + ext.states[x] + "," + ext.actions[u] + ")"] = std::move(trow);
            }
        }
        j["theta_ok"] = std::move(tok);
        j["psi_ok"] = std::move(pok);
    } else {
        Json pt = Json::object(), pp = Json::object();
        for (std::size_t x = 0; x < ext.states.size(); ++x) {
            Json row = Json::object();
            for (std::size_t p = 0; p < dm.psis.size(); ++p)
                row[dm.psis[p]] = rational_to_string(dm.p_psi[x][p]);
            pp[ext.states[x]] = std::move(row);
            for (std::size_t u = 0; u < ext.actions.size(); ++u) {
                Json trow = Json::object();
                for (std::size_t t = 0; t < dm.thetas.size(); ++t)
                    trow[dm.thetas[t]] = rational_to_string(dm.p_theta[x][u][t]);
                pt["(" + ext.states[x] + "," + ext.actions[u] + ")"] = std::move(trow);
            }
        }
        j["p_theta"] = std::move(pt);
        j["p_psi"] = std::move(pp);
    }
    return j;
}

namespace {

std::pair<std::string, std::string> parse_pair_key(const std::string& key) {
    if (key.size() < 2 || key.front() != '(' || key.back() != ')')
        fail("SchemaError", "bad pair key: " + key);
    std::string body = key.substr(1, key.size() - 2);
    auto last = body.rfind(',');
    if (last == std::string::npos) fail("SchemaError", "bad pair key: " + key);
    return {body.substr(0, last), body.substr(last + 1)};
}

}  // namespace

DisturbanceModel disturbances_from_json(const Json& j, const ExternalSystem& ext) {
    DisturbanceModel dm;
    std::string mode = field(j, "mode").get<std::string>();
    if (mode == "nondeterministic")
        dm.mode = DisturbanceModel::Mode::nondeterministic;
    else if (mode == "probabilistic")
        dm.mode = DisturbanceModel::Mode::probabilistic;
    else
        fail("SchemaError", "unknown disturbance mode: " + mode);
    dm.thetas = string_list(j, "thetas");
    std::sort(dm.thetas.begin(), dm.thetas.end());
    dm.psis = string_list(j, "psis");
    std::sort(dm.psis.begin(), dm.psis.end());

    const std::size_t nx = ext.states.size(), nu = ext.actions.size();
    const std::size_t nt = dm.thetas.size(), np = dm.psis.size();
    dm.f_theta.assign(nx, std::vector<std::vector<int>>(nu, std::vector<int>(nt, -1)));
    dm.h_psi.assign(nx, std::vector<int>(np, -1));
    for (const auto& [key, dst] : field(j, "f_theta").items()) {
        auto [x_name, u_name, t_name] = parse_triple_key(key);
        int x = ext.state_index(x_name), u = ext.action_index(u_name);
        int t = dm.theta_index(t_name), d = ext.state_index(dst.get<std::string>());
        if (x < 0 || u < 0 || t < 0 || d < 0) fail("SchemaError", "bad f_theta entry: " + key);
        dm.f_theta[x][u][t] = d;
    }
    for (const auto& [key, obs] : field(j, "h_psi").items()) {
        auto [x_name, p_name] = parse_pair_key(key);
        int x = ext.state_index(x_name), p = dm.psi_index(p_name);
        int y = ext.observation_index(obs.get<std::string>());
        if (x < 0 || p < 0 || y < 0) fail("SchemaError", "bad h_psi entry: " + key);
        dm.h_psi[x][p] = y;
    }
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t p = 0; p < np; ++p)
            if (dm.h_psi[x][p] < 0) fail("SchemaError", "h_psi is not total");
        for (std::size_t u = 0; u < nu; ++u)
            for (std::size_t t = 0; t < nt; ++t)
                if (dm.f_theta[x][u][t] < 0) fail("SchemaError", "f_theta is not total");
    }

    if (dm.mode == DisturbanceModel::Mode::nondeterministic) {
        dm.theta_ok.assign(nx, std::vector<std::vector<char>>(nu, std::vector<char>(nt, 0)));
        dm.psi_ok.assign(nx, std::vector<char>(np, 0));
        for (const auto& [key, row] : field(j, "theta_ok").items()) {
            auto [x_name, u_name] = parse_pair_key(key);
            int x = ext.state_index(x_name), u = ext.action_index(u_name);
            if (x < 0 || u < 0) fail("SchemaError", "bad theta_ok entry: " + key);
            for (const Json& t_name : row) {
                int t = dm.theta_index(t_name.get<std::string>());
                if (t < 0) fail("SchemaError", "bad theta_ok entry: " + key);
                dm.theta_ok[x][u][t] = 1;
            }
        }
        for (const auto& [x_name, row] : field(j, "psi_ok").items()) {
            int x = ext.state_index(x_name);
            if (x < 0) fail("SchemaError", "bad psi_ok entry: " + x_name);
            for (const Json& p_name : row) {
                int p = dm.psi_index(p_name.get<std::string>());
                if (p < 0) fail("SchemaError", "bad psi_ok entry: " + x_name);
                dm.psi_ok[x][p] = 1;
            }
        }
    } else {
        dm.p_theta.assign(nx, std::vector<std::vector<Rat>>(nu, std::vector<Rat>(nt, 0)));
        dm.p_psi.assign(nx, std::vector<Rat>(np, 0));
        for (const auto& [key, row] : field(j, "p_theta").items()) {
            auto [x_name, u_name] = parse_pair_key(key);
            int x = ext.state_index(x_name), u = ext.action_index(u_name);
            if (x < 0 || u < 0) fail("SchemaError", "bad p_theta entry: " + key);
            for (const auto& [t_name, value] : row.items()) {
                int t = dm.theta_index(t_name);
                if (t < 0) fail("SchemaError", "bad p_theta entry: " + key);
                dm.p_theta[x][u][t] = parse_rational(value.get<std::string>());
            }
        }
        for (const auto& [x_name, row] : field(j, "p_psi").items()) {
            int x = ext.state_index(x_name);
            if (x < 0) fail("SchemaError", "bad p_psi entry: " + x_name);
            for (const auto& [p_name, value] : row.items()) {
                int p = dm.psi_index(p_name);
                if (p < 0) fail("SchemaError", "bad p_psi entry: " + x_name);
                dm.p_psi[x][p] = parse_rational(value.get<std::string>());
            }
        }
    }
    validate_disturbances(ext, dm);
    return dm;
}

Json coupled_to_json(const CoupledSystem& cs) {
    Json j;
    j["external"] = external_to_json(cs.external);
    j["internal"] = system_to_json(cs.internal);
    j["policy"] = cs.policy;
    j["initial_internal"] = cs.initial_internal;
    if (cs.disturbances) j["disturbances"] = disturbances_to_json(cs.external, *cs.disturbances);
    return j;
}

CoupledSystem coupled_from_json(const Json& j) {
    ExternalSystem ext = external_from_json(field(j, "external"));
    TransitionSystem internal = system_from_json(field(j, "internal"));
    std::map<std::string, std::string> policy;
    for (const auto& [k, v] : field(j, "policy").items()) policy[k] = v.get<std::string>();
    // Planner-shaped internal over U x Y: strong-restrict by the policy.
    bool pair_labeled = !internal.labels.empty() &&
                        internal.labels.front().find('|') != std::string::npos;
    if (pair_labeled) internal = strong_restrict(internal, policy);
    std::optional<DisturbanceModel> dm;
    if (j.contains("disturbances")) dm = disturbances_from_json(j["disturbances"], ext);
    return make_coupled(std::move(ext), std::move(internal), std::move(policy),
                        field(j, "initial_internal").get<std::string>(), std::move(dm));
}

Json prob_model_to_json(const ProbModel<Rat>& pm) {
    Json j;
    j["states"] = pm.states;
    j["actions"] = pm.actions;
    j["observations"] = pm.observations;
    Json trans = Json::object();
    for (std::size_t u = 0; u < pm.actions.size(); ++u) {
        Json rows = Json::array();
        for (int x2 = 0; x2 < pm.trans[u].rows(); ++x2) {
            Json row = Json::array();
            for (int x = 0; x < pm.trans[u].cols(); ++x)
                row.push_back(rational_to_string(pm.trans[u](x2, x)));
            rows.push_back(std::move(row));
        }
        trans[pm.actions[u]] = std::move(rows);
    }
    j["trans"] = std::move(trans);
    Json obs = Json::array();
    for (int y = 0; y < pm.obs.rows(); ++y) {
        Json row = Json::array();
        for (int x = 0; x < pm.obs.cols(); ++x) row.push_back(rational_to_string(pm.obs(y, x)));
        obs.push_back(std::move(row));
    }
    j["obs"] = std::move(obs);
    Json init = Json::array();
    for (int x = 0; x < pm.init.size(); ++x) init.push_back(rational_to_string(pm.init(x)));
    j["init"] = std::move(init);
    return j;
}

ProbModel<Rat> prob_model_from_json(const Json& j) {
    ProbModel<Rat> pm;
    pm.states = string_list(j, "states");
    std::sort(pm.states.begin(), pm.states.end());
    pm.actions = string_list(j, "actions");
    std::sort(pm.actions.begin(), pm.actions.end());
    pm.observations = string_list(j, "observations");
    std::sort(pm.observations.begin(), pm.observations.end());
    const int nx = static_cast<int>(pm.states.size());
    const int ny = static_cast<int>(pm.observations.size());
    auto parse_cell = [](const Json& v) {
        return v.is_string() ? parse_rational(v.get<std::string>())
                             : parse_rational(v.dump());
    };
    pm.trans.assign(pm.actions.size(), Mat<Rat>::Zero(nx, nx));
    const Json& trans = field(j, "trans");
    for (std::size_t u = 0; u < pm.actions.size(); ++u) {
        const Json& rows = field(trans, pm.actions[u].c_str());
        if (static_cast<int>(rows.size()) != nx) fail("SchemaError", "bad kernel shape");
        for (int x2 = 0; x2 < nx; ++x2) {
            if (static_cast<int>(rows[x2].size()) != nx) fail("SchemaError", "bad kernel shape");
            for (int x = 0; x < nx; ++x) pm.trans[u](x2, x) = parse_cell(rows[x2][x]);
        }
    }
    const Json& obs = field(j, "obs");
    pm.obs = Mat<Rat>::Zero(ny, nx);
    if (static_cast<int>(obs.size()) != ny) fail("SchemaError", "bad observation kernel shape");
    for (int y = 0; y < ny; ++y) {
        if (static_cast<int>(obs[y].size()) != nx)
            fail("SchemaError", "bad observation kernel shape");
        for (int x = 0; x < nx; ++x) pm.obs(y, x) = parse_cell(obs[y][x]);
    }
    const Json& init = field(j, "init");
    if (static_cast<int>(init.size()) != nx) fail("SchemaError", "bad initial shape");
    pm.init = Vec<Rat>::Zero(nx);
    for (int x = 0; x < nx; ++x) pm.init(x) = parse_cell(init[x]);
    validate_prob_model(pm);
    return pm;
}

Json psr_to_json(const LinearPsr<Rat>& psr) {
    Json j;
    j["actions"] = psr.actions;
    j["observations"] = psr.observations;
    auto test_name = [&](const PsrTest& t) {
        std::string s;
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            if (i) s += ".";
            s += psr.actions[t.steps[i].first] + ":" + psr.observations[t.steps[i].second];
        }
        return s;
    };
    Json core = Json::array();
    for (const PsrTest& t : psr.core) core.push_back(test_name(t));
    j["core_tests"] = std::move(core);
    Json m0 = Json::array();
    for (int i = 0; i < psr.m0.size(); ++i) m0.push_back(rational_to_string(psr.m0(i)));
    j["m0"] = std::move(m0);
    Json weights = Json::object();
    for (const auto& [key, vec] : psr.r_pair) {
        Json entry;
        Json pair = Json::array();
        for (int i = 0; i < vec.size(); ++i) pair.push_back(rational_to_string(vec(i)));
        entry["pair"] = std::move(pair);
        const Mat<Rat>& ext = psr.r_ext.at(key);
        Json rows = Json::array();
        for (int i = 0; i < ext.rows(); ++i) {
            Json row = Json::array();
            for (int c = 0; c < ext.cols(); ++c) row.push_back(rational_to_string(ext(i, c)));
            rows.push_back(std::move(row));
        }
        entry["ext"] = std::move(rows);
        weights["(" + psr.actions[key.first] + "," + psr.observations[key.second] + ")"] =
            std::move(entry);
    }
    j["weights"] = std::move(weights);
    return j;
}

Json update_graph_to_json(const MooreMachine& m, const UpdateGraph& g) {
    return srts_to_json(g.to_srts(m));
}

Json rollout_to_json(const Rollout& r) {
    Json j;
    j["initial_internal"] = r.initial_internal;
    j["initial_external"] = r.initial_external;
    j["observations"] = r.observations;
    j["actions"] = r.actions;
    j["external_states"] = r.external_states;
    j["internal_states"] = r.internal_states;
    if (!r.disturbances.empty()) {
        Json d = Json::array();
        for (const auto& [theta, psi] : r.disturbances) d.push_back({theta, psi});
        j["disturbances"] = std::move(d);
    }
    return j;
}

std::string rollout_to_json_lines(const Rollout& r) {
    std::ostringstream out;
    for (std::size_t k = 0; k < r.observations.size(); ++k) {
        Json line;
        line["stage"] = k + 1;
        line["x"] = r.external_states[k];
        line["y"] = r.observations[k];
        line["iota"] = r.internal_states[k];
        if (k < r.actions.size()) line["u"] = r.actions[k];
        if (k < r.disturbances.size()) {
            if (!r.disturbances[k].first.empty()) line["theta"] = r.disturbances[k].first;
            if (!r.disturbances[k].second.empty()) line["psi"] = r.disturbances[k].second;
        }
        out << line.dump() << "\n";
    }
    return out.str();
}

std::string to_dot(const TransitionSystem& sys, const std::string& graph_name) {
    std::ostringstream out;
    out << "digraph " << graph_name << " {\n  rankdir=LR;\n";
    if (sys.initial)
        out << "  __start [shape=point];\n  __start -> " << quote_dot(sys.states[*sys.initial])
            << ";\n";
    for (const std::string& s : sys.states)
        out << "  " << quote_dot(s) << " [shape=circle];\n";
    for (const Transition& t : sys.transitions)
        out << "  " << quote_dot(sys.states[t.src]) << " -> " << quote_dot(sys.states[t.dst])
            << " [label=" << quote_dot(sys.labels[t.label]) << "];\n";
    out << "}\n";
    return out.str();
}

std::string to_dot(const StateRelabeledSystem& m, const std::string& graph_name) {
    std::ostringstream out;
    out << "digraph " << graph_name << " {\n  rankdir=LR;\n";
    if (m.system.initial)
        out << "  __start [shape=point];\n  __start -> "
            << quote_dot(m.system.states[*m.system.initial]) << ";\n";
    for (std::size_t s = 0; s < m.system.states.size(); ++s)
        out << "  " << quote_dot(m.system.states[s]) << " [shape=circle, label="
            << quote_dot(m.system.states[s] + "\n" + m.labeling.of(static_cast<int>(s)))
            << "];\n";
    for (const Transition& t : m.system.transitions)
        out << "  " << quote_dot(m.system.states[t.src]) << " -> "
            << quote_dot(m.system.states[t.dst])
            << " [label=" << quote_dot(m.system.labels[t.label]) << "];\n";
    out << "}\n";
    return out.str();
}

}  // namespace minbrain
