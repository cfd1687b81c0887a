#include "minbrain/core.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "minbrain/errors.hpp"

namespace minbrain {

namespace {

int sorted_index(const std::vector<std::string>& names, const std::string& name) {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) return -1;
    return static_cast<int>(it - names.begin());
}

std::vector<std::string> sorted_unique(std::vector<std::string> names, const char* what) {
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        fail("InvalidSystem", std::string("duplicate ") + what + " identifier");
    return names;
}

}  // namespace

int TransitionSystem::state_index(const std::string& name) const {
    return sorted_index(states, name);
}

int TransitionSystem::label_index(const std::string& name) const {
    return sorted_index(labels, name);
}

std::vector<std::vector<std::pair<int, int>>> TransitionSystem::out_edges() const {
    std::vector<std::vector<std::pair<int, int>>> out(states.size());
    for (const Transition& t : transitions) out[t.src].emplace_back(t.label, t.dst);
    return out;    // transitions are sorted, so each list is sorted by (label, dst)
}

TransitionSystem make_transition_system(std::vector<std::string> states,
                                        std::vector<std::string> labels,
                                        const std::vector<std::array<std::string, 3>>& triples,
                                        const std::optional<std::string>& initial) {
    TransitionSystem sys;
    sys.states = sorted_unique(std::move(states), "state");
    sys.labels = sorted_unique(std::move(labels), "label");
    sys.transitions.reserve(triples.size());
    for (const auto& [src, label, dst] : triples) {
        Transition t;
        t.src = sys.state_index(src);
        t.label = sys.label_index(label);
        t.dst = sys.state_index(dst);
        if (t.src < 0 || t.dst < 0)
            fail("InvalidSystem", "transition references unknown state: " + src + "/" + dst);
        if (t.label < 0)
            fail("InvalidSystem", "transition references unknown label: " + label);
        sys.transitions.push_back(t);
    }
    std::sort(sys.transitions.begin(), sys.transitions.end());
    sys.transitions.erase(std::unique(sys.transitions.begin(), sys.transitions.end()),
                          sys.transitions.end());
    if (initial) {
        int idx = sys.state_index(*initial);
        if (idx < 0) fail("InvalidSystem", "initial state unknown: " + *initial);
        sys.initial = idx;
    }
    return sys;
}

Labeling make_labeling(const TransitionSystem& sys,
                       const std::map<std::string, std::string>& state_labels) {
    Labeling lab;
    for (const std::string& s : sys.states) {
        if (!state_labels.count(s)) fail("PartialMap", "state has no label: " + s);
    }
    std::vector<std::string> used;
    used.reserve(state_labels.size());
    for (const std::string& s : sys.states) used.push_back(state_labels.at(s));
    lab.codomain = used;
    std::sort(lab.codomain.begin(), lab.codomain.end());
    lab.codomain.erase(std::unique(lab.codomain.begin(), lab.codomain.end()), lab.codomain.end());
    lab.value.reserve(sys.states.size());
    for (const std::string& l : used) lab.value.push_back(sorted_index(lab.codomain, l));
    return lab;
}

StateRelabeledSystem make_srts(TransitionSystem sys,
                               const std::map<std::string, std::string>& state_labels) {
    Labeling lab = make_labeling(sys, state_labels);
    return StateRelabeledSystem{std::move(sys), std::move(lab)};
}

std::vector<std::vector<int>> Partition::blocks() const {
    std::vector<std::vector<int>> out(block_count);
    for (int i = 0; i < static_cast<int>(block_of.size()); ++i) out[block_of[i]].push_back(i);
    return out;
}

std::vector<std::vector<std::string>> Partition::block_names() const {
    std::vector<std::vector<std::string>> out(block_count);
    for (int i = 0; i < static_cast<int>(block_of.size()); ++i)
        out[block_of[i]].push_back(domain[i]);
    return out;
}

bool Partition::same_blocks(const Partition& other) const {
    return domain == other.domain && block_of == other.block_of &&
           block_count == other.block_count;
}

Partition canonicalize(Partition p) {
    std::vector<int> renumber(p.block_count, -1);
    int next = 0;
    for (int& b : p.block_of) {
        if (renumber[b] < 0) renumber[b] = next++;
        b = renumber[b];
    }
    p.block_count = next;
    return p;
}

Partition make_partition(const std::vector<std::vector<std::string>>& blocks) {
    Partition p;
    for (const auto& block : blocks) {
        if (block.empty()) fail("InvalidPartition", "empty block");
        for (const std::string& s : block) p.domain.push_back(s);
    }
    std::sort(p.domain.begin(), p.domain.end());
    if (std::adjacent_find(p.domain.begin(), p.domain.end()) != p.domain.end())
        fail("InvalidPartition", "blocks overlap");
    p.block_of.assign(p.domain.size(), -1);
    p.block_count = static_cast<int>(blocks.size());
    for (int b = 0; b < p.block_count; ++b)
        for (const std::string& s : blocks[b]) p.block_of[sorted_index(p.domain, s)] = b;
    return canonicalize(std::move(p));
}

Partition partition_of(const StateRelabeledSystem& m) {
    Partition p;
    p.domain = m.system.states;
    p.block_of = m.labeling.value;
    p.block_count = static_cast<int>(m.labeling.codomain.size());
    return canonicalize(std::move(p));
}

Partition identity_partition(std::vector<std::string> domain) {
    Partition p;
    p.domain = sorted_unique(std::move(domain), "state");
    p.block_of.resize(p.domain.size());
    for (int i = 0; i < static_cast<int>(p.domain.size()); ++i) p.block_of[i] = i;
    p.block_count = static_cast<int>(p.domain.size());
    return p;
}

Partition constant_partition(std::vector<std::string> domain) {
    Partition p;
    p.domain = sorted_unique(std::move(domain), "state");
    p.block_of.assign(p.domain.size(), 0);
    p.block_count = p.domain.empty() ? 0 : 1;
    return p;
}

bool is_deterministic(const TransitionSystem& sys) {
    // Transitions are sorted by (src, label, dst); duplicates on (src, label)
    // are adjacent.
    for (std::size_t i = 1; i < sys.transitions.size(); ++i) {
        const Transition& a = sys.transitions[i - 1];
        const Transition& b = sys.transitions[i];
        if (a.src == b.src && a.label == b.label) return false;
    }
    return true;
}

bool is_full(const TransitionSystem& sys) {
    std::vector<std::vector<char>> seen(sys.states.size(),
                                        std::vector<char>(sys.labels.size(), 0));
    for (const Transition& t : sys.transitions) seen[t.src][t.label] = 1;
    for (const auto& row : seen)
        for (char c : row)
            if (!c) return false;
    return !sys.states.empty() || sys.labels.empty();
}

std::optional<SufficiencyWitness> sufficiency_counterexample(const StateRelabeledSystem& m) {
    const TransitionSystem& sys = m.system;
    const Labeling& lab = m.labeling;

    // Detection pass: for each (state label, edge label), the successor
    // label must be unique.
    std::unordered_map<long long, int> succ_label;
    std::set<std::pair<int, int>> violating;
    const long long L = static_cast<long long>(sys.labels.size()) + 1;
    for (const Transition& t : sys.transitions) {
        long long key = lab.value[t.src] * L + t.label;
        auto [it, inserted] = succ_label.emplace(key, lab.value[t.dst]);
        if (!inserted && it->second != lab.value[t.dst])
            violating.insert({lab.value[t.src], t.label});
    }
    if (violating.empty()) return std::nullopt;

    // Witness pass: the nested ascending scan below visits candidate tuples
    // (s, t, label, s', t') in lexicographic order of their names, because
    // states and labels are stored sorted.
    auto out = sys.out_edges();
    std::vector<std::vector<int>> states_by_label(lab.codomain.size());
    for (int s = 0; s < static_cast<int>(sys.states.size()); ++s)
        states_by_label[lab.value[s]].push_back(s);

    for (int s = 0; s < static_cast<int>(sys.states.size()); ++s) {
        const int sl = lab.value[s];
        bool relevant = false;
        for (const auto& [lv, lam] : violating)
            if (lv == sl) relevant = true;
        if (!relevant) continue;
        for (int t : states_by_label[sl]) {
            for (int lam = 0; lam < static_cast<int>(sys.labels.size()); ++lam) {
                if (!violating.count({sl, lam})) continue;
                for (const auto& [el1, s_next] : out[s]) {
                    if (el1 != lam) continue;
                    for (const auto& [el2, t_next] : out[t]) {
                        if (el2 != lam) continue;
                        if (lab.value[s_next] != lab.value[t_next]) {
                            return SufficiencyWitness{sys.states[s], sys.states[t],
                                                      sys.labels[lam], sys.states[s_next],
                                                      sys.states[t_next]};
                        }
                    }
                }
            }
        }
    }
    return std::nullopt;    // unreachable: detection found a violation
}

TransitionSystem quotient(const StateRelabeledSystem& m) {
    const TransitionSystem& sys = m.system;
    const Labeling& lab = m.labeling;
    TransitionSystem q;
    q.states = lab.codomain;
    q.labels = sys.labels;
    std::set<Transition> edges;
    for (const Transition& t : sys.transitions)
        edges.insert(Transition{lab.value[t.src], t.label, lab.value[t.dst]});
    q.transitions.assign(edges.begin(), edges.end());
    if (sys.initial) q.initial = lab.value[*sys.initial];
    return q;
}

TransitionSystem quotient(const TransitionSystem& sys, const Partition& p) {
    if (p.domain != sys.states) fail("DomainMismatch", "partition domain differs from state set");
    // Blocks are named by their least member; block numbering is canonical,
    // so block b's least member index is the first i with block_of[i] == b,
    // and names come out sorted in block order.
    std::vector<std::string> names(p.block_count);
    std::vector<char> named(p.block_count, 0);
    for (int i = 0; i < static_cast<int>(p.domain.size()); ++i) {
        if (!named[p.block_of[i]]) {
            names[p.block_of[i]] = p.domain[i];
            named[p.block_of[i]] = 1;
        }
    }
    std::vector<int> block_name_index(p.block_count);
    {
        std::vector<std::string> sorted_names = names;
        std::sort(sorted_names.begin(), sorted_names.end());
        for (int b = 0; b < p.block_count; ++b)
            block_name_index[b] = sorted_index(sorted_names, names[b]);
        TransitionSystem q;
        q.states = std::move(sorted_names);
        q.labels = sys.labels;
        std::set<Transition> edges;
        for (const Transition& t : sys.transitions)
            edges.insert(Transition{block_name_index[p.block_of[t.src]], t.label,
                                    block_name_index[p.block_of[t.dst]]});
        q.transitions.assign(edges.begin(), edges.end());
        if (sys.initial) q.initial = block_name_index[p.block_of[*sys.initial]];
        return q;
    }
}

bool refines(const Partition& p, const Partition& q) {
    if (p.domain != q.domain) fail("DomainMismatch", "partitions over different domains");
    std::vector<int> image(p.block_count, -1);
    for (std::size_t i = 0; i < p.domain.size(); ++i) {
        int& img = image[p.block_of[i]];
        if (img < 0)
            img = q.block_of[i];
        else if (img != q.block_of[i])
            return false;
    }
    return true;
}

Partition common_refinement(std::span<const Partition> ps) {
    if (ps.empty()) fail("DomainMismatch", "common refinement of an empty family");
    for (const Partition& p : ps)
        if (p.domain != ps.front().domain)
            fail("DomainMismatch", "partitions over different domains");
    Partition out;
    out.domain = ps.front().domain;
    const std::size_t n = out.domain.size();
    std::map<std::vector<int>, int> block_ids;
    out.block_of.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> key;
        key.reserve(ps.size());
        for (const Partition& p : ps) key.push_back(p.block_of[i]);
        auto [it, inserted] = block_ids.emplace(std::move(key), static_cast<int>(block_ids.size()));
        out.block_of[i] = it->second;
    }
    out.block_count = static_cast<int>(block_ids.size());
    return canonicalize(std::move(out));
}

namespace {

// Joint signature refinement over both systems; used to prune the
// isomorphism search space.
struct IsoContext {
    const TransitionSystem& sys;
    const Labeling& lab;
    std::vector<std::vector<std::pair<int, int>>> out;
    std::vector<std::vector<std::pair<int, int>>> in;
    std::vector<int> cls;
};

bool refine_classes(IsoContext& a, IsoContext& b) {
    // Returns false when the class histograms of the two systems diverge.
    for (int round = 0;; ++round) {
        std::map<std::tuple<int, std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>>, int>
            sig_ids;
        auto signature_class = [&](const IsoContext& c, int s) {
            std::vector<std::pair<int, int>> os, is;
            for (auto [l, d] : c.out[s]) os.emplace_back(l, c.cls[d]);
            for (auto [l, d] : c.in[s]) is.emplace_back(l, c.cls[d]);
            std::sort(os.begin(), os.end());
            std::sort(is.begin(), is.end());
            auto key = std::make_tuple(c.cls[s], std::move(os), std::move(is));
            auto [it, inserted] = sig_ids.emplace(std::move(key), static_cast<int>(sig_ids.size()));
            return it->second;
        };
        std::vector<int> na(a.sys.states.size()), nb(b.sys.states.size());
        for (std::size_t s = 0; s < na.size(); ++s) na[s] = signature_class(a, s);
        for (std::size_t s = 0; s < nb.size(); ++s) nb[s] = signature_class(b, s);
        std::vector<int> ha(sig_ids.size(), 0), hb(sig_ids.size(), 0);
        for (int c : na) ++ha[c];
        for (int c : nb) ++hb[c];
        if (ha != hb) return false;
        bool changed = na != a.cls || nb != b.cls;
        std::set<int> distinct(na.begin(), na.end());
        a.cls = std::move(na);
        b.cls = std::move(nb);
        if (!changed) return true;
        if (distinct.size() == a.sys.states.size()) return true;
    }
}

struct IsoSearch {
    const IsoContext& a;
    const IsoContext& b;
    std::vector<int> mapping;    // a-state -> b-state or -1
    std::vector<char> used;

    bool consistent(int x, int y) const {
        if (a.cls[x] != b.cls[y]) return false;
        if (a.out[x].size() != b.out[y].size() || a.in[x].size() != b.in[y].size()) return false;
        // Every already-mapped neighbour must carry over exactly.
        for (auto [l, d] : a.out[x]) {
            if (mapping[d] < 0 && d != x) continue;
            int dd = d == x ? y : mapping[d];
            if (!std::binary_search(b.out[y].begin(), b.out[y].end(), std::make_pair(l, dd)))
                return false;
        }
        for (auto [l, s] : a.in[x]) {
            if (mapping[s] < 0 && s != x) continue;
            int ss = s == x ? y : mapping[s];
            if (!std::binary_search(b.in[y].begin(), b.in[y].end(), std::make_pair(l, ss)))
                return false;
        }
        return true;
    }

    bool extend(std::size_t pos, const std::vector<int>& order) {
        if (pos == order.size()) return true;
        int x = order[pos];
        for (int y = 0; y < static_cast<int>(b.sys.states.size()); ++y) {
            if (used[y] || !consistent(x, y)) continue;
            mapping[x] = y;
            used[y] = 1;
            if (extend(pos + 1, order)) return true;
            mapping[x] = -1;
            used[y] = 0;
        }
        return false;
    }
};

}  // namespace

std::optional<StateMapping> isomorphism(const StateRelabeledSystem& a,
                                        const StateRelabeledSystem& b) {
    if (a.system.states.size() != b.system.states.size()) return std::nullopt;
    if (a.system.transitions.size() != b.system.transitions.size()) return std::nullopt;
    if (a.labeling.codomain != b.labeling.codomain) return std::nullopt;
    if (a.system.initial.has_value() != b.system.initial.has_value()) return std::nullopt;

    // Edge labels must correspond by name; compare the used sets.
    auto used_labels = [](const TransitionSystem& sys) {
        std::set<std::string> out;
        for (const Transition& t : sys.transitions) out.insert(sys.labels[t.label]);
        return out;
    };
    if (used_labels(a.system) != used_labels(b.system)) return std::nullopt;

    IsoContext ca{a.system, a.labeling, a.system.out_edges(), {}, {}};
    IsoContext cb{b.system, b.labeling, b.system.out_edges(), {}, {}};
    auto in_edges = [](const TransitionSystem& sys) {
        std::vector<std::vector<std::pair<int, int>>> in(sys.states.size());
        for (const Transition& t : sys.transitions) in[t.dst].emplace_back(t.label, t.src);
        for (auto& v : in) std::sort(v.begin(), v.end());
        return in;
    };
    ca.in = in_edges(a.system);
    cb.in = in_edges(b.system);

    // Align edge-label indices: remap b's labels onto a's index space so the
    // signatures and binary searches compare like with like.
    {
        std::vector<int> remap(b.system.labels.size(), -1);
        for (std::size_t i = 0; i < b.system.labels.size(); ++i)
            remap[i] = a.system.label_index(b.system.labels[i]);
        auto apply = [&](std::vector<std::vector<std::pair<int, int>>>& adj) {
            for (auto& v : adj) {
                for (auto& [l, d] : v) {
                    if (remap[l] < 0) return false;
                    l = remap[l];
                }
                std::sort(v.begin(), v.end());
            }
            return true;
        };
        if (!apply(cb.out) || !apply(cb.in)) return std::nullopt;
        for (auto& v : ca.out) std::sort(v.begin(), v.end());
        for (auto& v : ca.in) std::sort(v.begin(), v.end());
    }

    // Initial classes: state label, plus a distinguished class for roots.
    ca.cls.resize(a.system.states.size());
    cb.cls.resize(b.system.states.size());
    const int root_tag = static_cast<int>(a.labeling.codomain.size());
    for (std::size_t s = 0; s < ca.cls.size(); ++s) ca.cls[s] = a.labeling.value[s];
    for (std::size_t s = 0; s < cb.cls.size(); ++s) cb.cls[s] = b.labeling.value[s];
    if (a.system.initial) {
        if (a.labeling.value[*a.system.initial] != b.labeling.value[*b.system.initial])
            return std::nullopt;
        ca.cls[*a.system.initial] += root_tag;    // roots in a disjoint class range
        cb.cls[*b.system.initial] += root_tag;
    }
    if (!refine_classes(ca, cb)) return std::nullopt;

    IsoSearch search{ca, cb, std::vector<int>(ca.cls.size(), -1),
                     std::vector<char>(cb.cls.size(), 0)};
    std::vector<int> order(ca.cls.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    // Most-constrained first: smaller classes early, root first.
    std::vector<int> class_size(ca.cls.empty() ? 0 : *std::max_element(ca.cls.begin(), ca.cls.end()) + 1, 0);
    for (int c : ca.cls) ++class_size[c];
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return class_size[ca.cls[x]] < class_size[ca.cls[y]];
    });
    if (a.system.initial) {
        auto it = std::find(order.begin(), order.end(), *a.system.initial);
        std::rotate(order.begin(), it, it + 1);
    }
    if (!search.extend(0, order)) return std::nullopt;

    // Final check: the induced edge map must be a bijection on transitions.
    std::set<Transition> mapped;
    for (const Transition& t : a.system.transitions) {
        int l = cb.sys.label_index(a.system.labels[t.label]);
        mapped.insert(Transition{search.mapping[t.src], l, search.mapping[t.dst]});
    }
    std::set<Transition> target(b.system.transitions.begin(), b.system.transitions.end());
    if (mapped != target) return std::nullopt;

    StateMapping result;
    for (std::size_t s = 0; s < ca.cls.size(); ++s)
        result[a.system.states[s]] = b.system.states[search.mapping[s]];
    return result;
}

}  // namespace minbrain
