#include "minbrain/filters.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "minbrain/history.hpp"

namespace minbrain {

std::string ndet_state_name(const ExternalSystem& ext, const std::vector<int>& subset) {
    std::string name = "{";
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i) name += ",";
        name += ext.states[subset[i]];
    }
    return name + "}";
}

std::vector<int> ndet_init(const ExternalSystem& ext, const std::vector<int>& x0, int y) {
    std::vector<int> out;
    for (int x : x0)
        if (ext.h[x] == y) out.push_back(x);
    if (out.empty()) fail("InconsistentObservation", "no state in the set yields " +
                                                         ext.observations[y]);
    return out;
}

std::vector<int> ndet_step(const ExternalSystem& ext, const std::vector<int>& xk, int u, int y) {
    if (xk.empty()) fail("InconsistentObservation", "empty I-state");
    std::set<int> image;
    for (int x : xk) {
        int x2 = ext.f[x][u];
        if (ext.h[x2] == y) image.insert(x2);
    }
    if (image.empty())
        fail("InconsistentObservation", "history impossible under the model: (" +
                                            ext.actions[u] + ", " + ext.observations[y] + ")");
    return {image.begin(), image.end()};
}

FilterGraph reachable_filter_graph(const ExternalSystem& ext, const std::vector<int>& x0,
                                   std::size_t limit, bool complete) {
    FilterGraph fg;

    std::map<std::vector<int>, std::string> names;
    std::vector<std::vector<int>> queue;
    std::vector<std::array<std::string, 3>> triples;
    std::set<std::string> labels;

    auto intern = [&](const std::vector<int>& subset) {
        auto [it, inserted] = names.emplace(subset, ndet_state_name(ext, subset));
        if (inserted) {
            queue.push_back(subset);
            fg.subsets[it->second] = subset;
            if (names.size() > limit) fail("SizeLimit", "filter graph exceeds the limit");
        }
        return it->second;
    };

    fg.root = intern(x0);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const std::vector<int> subset = queue[qi];
        const std::string& src = names.at(subset);
        for (int u = 0; u < static_cast<int>(ext.actions.size()); ++u) {
            for (int y = 0; y < static_cast<int>(ext.observations.size()); ++y) {
                std::set<int> image;
                for (int x : subset) {
                    int x2 = ext.f[x][u];
                    if (ext.h[x2] == y) image.insert(x2);
                }
                if (image.empty() && !complete) continue;
                std::vector<int> dst(image.begin(), image.end());
                std::string label = pair_label(ext.actions[u], ext.observations[y]);
                labels.insert(label);
                triples.push_back({src, label, intern(dst)});
            }
        }
    }

    std::vector<std::string> states;
    for (const auto& [subset, name] : names) states.push_back(name);
    fg.system = make_transition_system(states, {labels.begin(), labels.end()}, triples, fg.root);
    return fg;
}

ConsistentTree consistent_history_tree(const ExternalSystem& ext, const std::vector<int>& x0,
                                       int depth, std::size_t limit) {
    if (depth < 1) fail("InvalidSystem", "tree depth must be at least 1");
    struct Node {
        std::string name;
        std::vector<int> subset;
        int depth;
    };
    std::vector<Node> nodes{{"()", x0, 0}};
    std::vector<std::array<std::string, 3>> triples;
    std::set<std::string> labels;
    std::map<std::string, std::string> state_labels;
    state_labels["()"] = ndet_state_name(ext, x0);

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node node = nodes[i];
        if (node.depth >= depth) continue;
        auto expand = [&](int action, const std::vector<int>& next, const std::string& y_name) {
            if (next.empty()) return;
            std::string segment =
                action < 0 ? y_name : ext.actions[action] + ":" + y_name;
            std::string name =
                node.name == "()" ? segment : node.name + "." + segment;
            std::string label =
                pair_label(action < 0 ? "" : ext.actions[action], y_name);
            labels.insert(label);
            triples.push_back({node.name, label, name});
            state_labels[name] = ndet_state_name(ext, next);
            nodes.push_back({std::move(name), next, node.depth + 1});
            if (nodes.size() > limit) fail("SizeLimit", "consistent tree exceeds the limit");
        };
        if (node.depth == 0) {
            for (int y = 0; y < static_cast<int>(ext.observations.size()); ++y) {
                std::vector<int> x1;
                for (int x : node.subset)
                    if (ext.h[x] == y) x1.push_back(x);
                expand(-1, x1, ext.observations[y]);
            }
        } else {
            for (int u = 0; u < static_cast<int>(ext.actions.size()); ++u) {
                for (int y = 0; y < static_cast<int>(ext.observations.size()); ++y) {
                    std::set<int> image;
                    for (int x : node.subset) {
                        int x2 = ext.f[x][u];
                        if (ext.h[x2] == y) image.insert(x2);
                    }
                    expand(u, {image.begin(), image.end()}, ext.observations[y]);
                }
            }
        }
    }

    std::vector<std::string> states;
    states.reserve(nodes.size());
    ConsistentTree tree;
    for (const Node& n : nodes) {
        states.push_back(n.name);
        tree.subsets[n.name] = n.subset;
    }
    TransitionSystem sys =
        make_transition_system(states, {labels.begin(), labels.end()}, triples, {"()"});
    tree.srts = make_srts(std::move(sys), state_labels);
    return tree;
}

std::map<std::string, std::string> localization_labels(
    const std::vector<std::string>& states,
    const std::map<std::string, std::vector<int>>& subsets) {
    std::map<std::string, std::string> out;
    for (const std::string& s : states) {
        auto it = subsets.find(s);
        bool singleton = it != subsets.end() && it->second.size() == 1;
        out[s] = singleton ? it->first : "unknown";
    }
    return out;
}

template <class Scalar>
Vec<Scalar> bayes_init(const ProbModel<Scalar>& pm, const Vec<Scalar>& prior, int y) {
    Vec<Scalar> p = prior.cwiseProduct(pm.obs.row(y).transpose());
    Scalar norm = p.sum();
    if (is_zero(norm))
        fail("ZeroEvidence", "observation " + pm.observations[y] + " has probability zero");
    return p / norm;
}

template <class Scalar>
Vec<Scalar> bayes_step(const ProbModel<Scalar>& pm, const Vec<Scalar>& p, int u, int y) {
    Vec<Scalar> predicted = pm.trans[u] * p;
    Vec<Scalar> posterior = predicted.cwiseProduct(pm.obs.row(y).transpose());
    Scalar norm = posterior.sum();
    if (is_zero(norm))
        fail("ZeroEvidence", "observation " + pm.observations[y] + " has probability zero");
    return posterior / norm;
}

template Vec<Rat> bayes_init<Rat>(const ProbModel<Rat>&, const Vec<Rat>&, int);
template Vec<double> bayes_init<double>(const ProbModel<double>&, const Vec<double>&, int);
template Vec<Rat> bayes_step<Rat>(const ProbModel<Rat>&, const Vec<Rat>&, int, int);
template Vec<double> bayes_step<double>(const ProbModel<double>&, const Vec<double>&, int, int);

std::pair<MovingAverage, double> movavg_step(MovingAverage state, double y) {
    state.window.push_back(y);
    if (static_cast<int>(state.window.size()) > state.window_size) state.window.pop_front();
    double sum = 0;
    for (double v : state.window) sum += v;
    return {state, sum / static_cast<double>(state.window.size())};
}

}  // namespace minbrain
