#include "minbrain/dbi.hpp"

#include <algorithm>
#include <map>

#include "minbrain/errors.hpp"

namespace minbrain {

MooreMachine make_moore(ExternalSystem sys, const std::string& initial) {
    if (sys.states.size() > 62) fail("SizeLimit", "success vectors are held in 64-bit masks");
    int x0 = sys.state_index(initial);
    if (x0 < 0) fail("InvalidSystem", "initial state unknown: " + initial);
    return MooreMachine{std::move(sys), x0};
}

std::vector<SuccessFunction> enumerate_test_classes(const MooreMachine& m) {
    const ExternalSystem& ext = m.sys;
    const int nx = static_cast<int>(ext.states.size());

    std::vector<SuccessFunction> classes;
    std::map<std::uint64_t, int> seen;
    auto add = [&](std::uint64_t bits, std::string rep) {
        auto [it, inserted] = seen.emplace(bits, static_cast<int>(classes.size()));
        if (inserted) classes.push_back(SuccessFunction{bits, std::move(rep)});
        return inserted;
    };

    for (int y = 0; y < static_cast<int>(ext.observations.size()); ++y) {
        std::uint64_t bits = 0;
        for (int x = 0; x < nx; ++x)
            if (ext.h[x] == y) bits |= std::uint64_t(1) << x;
        add(bits, "((), " + ext.observations[y] + ")");
    }
    // Breadth-first by (class index, action): S'(x) = S(f(x, u)).
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const SuccessFunction base = classes[k];
        for (int u = 0; u < static_cast<int>(ext.actions.size()); ++u) {
            std::uint64_t bits = 0;
            for (int x = 0; x < nx; ++x)
                if ((base.bits >> ext.f[x][u]) & 1) bits |= std::uint64_t(1) << x;
            add(bits, ext.actions[u] + " . " + base.representative);
        }
    }
    return classes;
}

std::vector<int> success_vector(const std::vector<SuccessFunction>& classes, int x) {
    std::vector<int> xi(classes.size());
    for (std::size_t k = 0; k < classes.size(); ++k) xi[k] = classes[k].at(x) ? 1 : 0;
    return xi;
}

std::vector<int> alpha(const MooreMachine& m, const std::vector<SuccessFunction>& classes,
                       int u) {
    const ExternalSystem& ext = m.sys;
    const int nx = static_cast<int>(ext.states.size());
    std::map<std::uint64_t, int> index;
    for (std::size_t k = 0; k < classes.size(); ++k) index[classes[k].bits] = static_cast<int>(k);
    std::vector<int> out(classes.size());
    for (std::size_t k = 0; k < classes.size(); ++k) {
        std::uint64_t bits = 0;
        for (int x = 0; x < nx; ++x)
            if ((classes[k].bits >> ext.f[x][u]) & 1) bits |= std::uint64_t(1) << x;
        auto it = index.find(bits);
        if (it == index.end())
            fail("ClosureViolation", "prefixed class escapes the enumerated set");
        out[k] = it->second;
    }
    return out;
}

namespace {

std::string bit_name(const std::vector<int>& bits) {
    std::string s;
    s.reserve(bits.size());
    for (int b : bits) s += b ? '1' : '0';
    return s;
}

}  // namespace

UpdateGraph build_update_graph(const MooreMachine& m) {
    const ExternalSystem& ext = m.sys;
    const int nx = static_cast<int>(ext.states.size());
    const int nu = static_cast<int>(ext.actions.size());
    auto classes = enumerate_test_classes(m);
    const int K = static_cast<int>(classes.size());

    UpdateGraph g;
    g.alpha_u.reserve(nu);
    for (int u = 0; u < nu; ++u) g.alpha_u.push_back(alpha(m, classes, u));

    std::map<std::vector<int>, int> node_ids;
    std::vector<int> node_of_state(nx);
    for (int x = 0; x < nx; ++x) {
        std::vector<int> xi = success_vector(classes, x);
        auto [it, inserted] = node_ids.emplace(xi, static_cast<int>(node_ids.size()));
        if (inserted) {
            g.node_bits.push_back(it->first);
            g.node_names.push_back(bit_name(it->first));
            g.sigma.push_back(ext.h[x]);
        } else if (g.sigma[it->second] != ext.h[x]) {
            fail("SigmaIllDefined", "equal success vectors with different outputs");
        }
        node_of_state[x] = it->second;
    }
    g.s0 = node_of_state[m.initial];

    const int n = static_cast<int>(g.node_bits.size());
    g.tau.assign(n, std::vector<int>(nu, -1));
    for (int s = 0; s < n; ++s) {
        for (int u = 0; u < nu; ++u) {
            std::vector<int> shuffled(K);
            for (int k = 0; k < K; ++k) shuffled[k] = g.node_bits[s][g.alpha_u[u][k]];
            auto it = node_ids.find(shuffled);
            if (it == node_ids.end())
                fail("ClosureViolation", "shuffled vector is not a state vector");
            g.tau[s][u] = it->second;
        }
    }
    return g;
}

StateRelabeledSystem UpdateGraph::to_srts(const MooreMachine& m) const {
    std::vector<std::array<std::string, 3>> triples;
    for (std::size_t s = 0; s < node_names.size(); ++s)
        for (std::size_t u = 0; u < m.sys.actions.size(); ++u)
            triples.push_back({node_names[s], m.sys.actions[u], node_names[tau[s][u]]});
    std::map<std::string, std::string> labels;
    for (std::size_t s = 0; s < node_names.size(); ++s)
        labels[node_names[s]] = m.sys.observations[sigma[s]];
    TransitionSystem sys =
        make_transition_system(node_names, m.sys.actions, triples, node_names[s0]);
    return make_srts(std::move(sys), labels);
}

Partition xi_partition(const MooreMachine& m, const std::vector<SuccessFunction>& classes) {
    std::map<std::vector<int>, std::vector<std::string>> groups;
    for (int x = 0; x < static_cast<int>(m.sys.states.size()); ++x)
        groups[success_vector(classes, x)].push_back(m.sys.states[x]);
    std::vector<std::vector<std::string>> blocks;
    blocks.reserve(groups.size());
    for (auto& [xi, members] : groups) blocks.push_back(std::move(members));
    return make_partition(blocks);
}

bool check_isomorphism(const MooreMachine& m, const UpdateGraph& g) {
    const ExternalSystem& ext = m.sys;
    const int nx = static_cast<int>(ext.states.size());
    auto classes = enumerate_test_classes(m);

    std::map<std::vector<int>, int> node_ids;
    for (std::size_t s = 0; s < g.node_bits.size(); ++s)
        node_ids[g.node_bits[s]] = static_cast<int>(s);

    std::vector<int> image(nx);
    std::map<int, int> preimage;
    for (int x = 0; x < nx; ++x) {
        auto it = node_ids.find(success_vector(classes, x));
        if (it == node_ids.end()) return false;
        image[x] = it->second;
        auto [pit, inserted] = preimage.emplace(it->second, x);
        if (!inserted) fail("NotReduced", "two states share a success vector");
    }
    if (preimage.size() != g.node_bits.size()) return false;
    if (image[m.initial] != g.s0) return false;
    for (int x = 0; x < nx; ++x) {
        if (g.sigma[image[x]] != ext.h[x]) return false;
        for (int u = 0; u < static_cast<int>(ext.actions.size()); ++u)
            if (g.tau[image[x]][u] != image[ext.f[x][u]]) return false;
    }
    return true;
}

}  // namespace minbrain
