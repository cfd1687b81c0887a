#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace minbrain {

// Indices into the owning system's state/label tables.
struct Transition {
    int src = 0;
    int label = 0;
    int dst = 0;

    auto operator<=>(const Transition&) const = default;
};

// A transition system (S, Lambda, T). States and labels are opaque strings,
// kept sorted so that every derived artifact has one canonical form.
// Values are immutable after construction; all operations below are pure.
struct TransitionSystem {
    std::vector<std::string> states;        // sorted, unique
    std::vector<std::string> labels;        // sorted, unique
    std::vector<Transition> transitions;    // sorted, unique
    std::optional<int> initial;

    int state_index(const std::string& name) const;    // -1 when absent
    int label_index(const std::string& name) const;

    // Per-source adjacency, each list sorted by (label, dst).
    std::vector<std::vector<std::pair<int, int>>> out_edges() const;
};

TransitionSystem make_transition_system(std::vector<std::string> states,
                                        std::vector<std::string> labels,
                                        const std::vector<std::array<std::string, 3>>& triples,
                                        const std::optional<std::string>& initial = {});

// Total map from the states of a system onto a label set; the codomain is
// exactly the set of used labels, sorted.
struct Labeling {
    std::vector<std::string> codomain;    // sorted, unique
    std::vector<int> value;               // per state index -> codomain index

    const std::string& of(int state) const { return codomain[value[state]]; }
};

Labeling make_labeling(const TransitionSystem& sys,
                       const std::map<std::string, std::string>& state_labels);

struct StateRelabeledSystem {
    TransitionSystem system;
    Labeling labeling;
};

StateRelabeledSystem make_srts(TransitionSystem sys,
                               const std::map<std::string, std::string>& state_labels);

// Partition of a state set. Blocks are numbered canonically by their least
// member, members sorted within a block.
struct Partition {
    std::vector<std::string> domain;    // sorted, unique
    std::vector<int> block_of;          // per domain index
    int block_count = 0;

    std::vector<std::vector<int>> blocks() const;
    std::vector<std::vector<std::string>> block_names() const;
    bool same_blocks(const Partition& other) const;
};

Partition make_partition(const std::vector<std::vector<std::string>>& blocks);
Partition canonicalize(Partition p);

// The partition induced by the labeling's preimages.
Partition partition_of(const StateRelabeledSystem& m);

// Identity and one-block partitions over a domain.
Partition identity_partition(std::vector<std::string> domain);
Partition constant_partition(std::vector<std::string> domain);

bool is_deterministic(const TransitionSystem& sys);
bool is_full(const TransitionSystem& sys);

// Violation of the sufficiency implication: sigma(s)=sigma(t), both have a
// lambda-transition, and the successors carry different labels.
struct SufficiencyWitness {
    std::string s, t, label, s_next, t_next;
};

// Lexicographically least witness over (s, t, label, s', t'), or nullopt
// when the labeling is sufficient.
std::optional<SufficiencyWitness> sufficiency_counterexample(const StateRelabeledSystem& m);

inline bool is_sufficient(const StateRelabeledSystem& m) {
    return !sufficiency_counterexample(m).has_value();
}

// Quotient by the labeling. Block states are named by their labels, which
// makes the quotient the derived system over the label set.
TransitionSystem quotient(const StateRelabeledSystem& m);

// Quotient by an arbitrary partition of the state set; blocks are named by
// their least member.
TransitionSystem quotient(const TransitionSystem& sys, const Partition& p);

// p refines q: every block of p is contained in some block of q.
// Raises DomainMismatch when the partitions do not share a domain.
bool refines(const Partition& p, const Partition& q);

// Coarsest partition refining every element of ps.
Partition common_refinement(std::span<const Partition> ps);

using StateMapping = std::map<std::string, std::string>;

// Label-preserving, transition-commuting bijection between two
// state-relabeled systems. When both systems designate initial states the
// mapping is additionally required to be rooted. Returns nullopt when no
// isomorphism exists. Edge labels and state labels must match by name.
std::optional<StateMapping> isomorphism(const StateRelabeledSystem& a,
                                        const StateRelabeledSystem& b);

}  // namespace minbrain
