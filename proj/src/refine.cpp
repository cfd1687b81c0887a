#include "minbrain/refine.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "minbrain/errors.hpp"

namespace minbrain {

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

RefinementResult minimal_sufficient_refinement(const StateRelabeledSystem& m,
                                               std::uint64_t order_seed) {
    const TransitionSystem& sys = m.system;
    const int n = static_cast<int>(sys.states.size());
    if (n == 0) fail("InvalidSystem", "refinement of an empty system");

    auto out = sys.out_edges();
    for (const auto& edges : out) {
        for (std::size_t i = 1; i < edges.size(); ++i)
            if (edges[i].first == edges[i - 1].first)
                fail("NondeterministicInput",
                     "two distinct successors for one (state, label) pair");
    }

    std::vector<int> scan_order(n);
    std::iota(scan_order.begin(), scan_order.end(), 0);
    if (order_seed != 0) {
        std::mt19937_64 rng(order_seed);
        std::shuffle(scan_order.begin(), scan_order.end(), rng);
    }

    std::vector<int> block_of = m.labeling.value;
    int rounds = 0;
    for (;; ++rounds) {
        // Split pass over states that have outgoing transitions.
        std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> groups;
        std::vector<int> group_of(n, -1);
        for (int s : scan_order) {
            if (out[s].empty()) continue;
            std::vector<std::pair<int, int>> sig;
            sig.reserve(out[s].size());
            for (auto [lam, dst] : out[s]) sig.emplace_back(lam, block_of[dst]);
            auto key = std::make_pair(block_of[s], std::move(sig));
            auto [it, inserted] = groups.emplace(std::move(key), static_cast<int>(groups.size()));
            group_of[s] = it->second;
        }
        int next_group = static_cast<int>(groups.size());

        // Transitionless states: all lambda-successors of one group must end
        // up in one block, so such a state follows any co-successor that was
        // assigned above. Unconstrained ones stay with their current block.
        UnionFind uf(n);
        std::vector<int> pin(n, -1);    // per union-find root, target group
        std::map<std::pair<int, int>, std::vector<int>> successors;    // (group, label) -> dsts
        for (int s = 0; s < n; ++s) {
            if (group_of[s] < 0) continue;
            for (auto [lam, dst] : out[s]) successors[{group_of[s], lam}].push_back(dst);
        }
        for (auto& [key, dsts] : successors) {
            std::sort(dsts.begin(), dsts.end());
            dsts.erase(std::unique(dsts.begin(), dsts.end()), dsts.end());
            // Only members within one current block can be forced together;
            // disagreement across blocks is resolved by later parent splits.
            std::map<int, std::vector<int>> by_block;
            for (int d : dsts) by_block[block_of[d]].push_back(d);
            for (auto& [blk, members] : by_block) {
                int target = -1;
                for (int d : members)
                    if (group_of[d] >= 0 && (target < 0 || group_of[d] < target))
                        target = group_of[d];
                std::vector<int> loose;
                for (int d : members)
                    if (group_of[d] < 0) loose.push_back(d);
                if (loose.empty()) continue;
                for (std::size_t i = 1; i < loose.size(); ++i) uf.unite(loose[0], loose[i]);
                if (target >= 0) {
                    int root = uf.find(loose[0]);
                    if (pin[root] < 0 || target < pin[root]) pin[root] = target;
                }
            }
        }
        // Merge pins across union operations.
        for (int s = 0; s < n; ++s) {
            if (group_of[s] >= 0) continue;
            int root = uf.find(s);
            if (root != s && pin[s] >= 0 && (pin[root] < 0 || pin[s] < pin[root]))
                pin[root] = pin[s];
        }
        std::map<std::pair<int, int>, int> residual;    // (block, uf root) -> group
        for (int s : scan_order) {
            if (group_of[s] >= 0) continue;
            int root = uf.find(s);
            if (pin[root] >= 0) {
                group_of[s] = pin[root];
            } else {
                // Unconstrained: keep one group per current block.
                auto [it, inserted] =
                    residual.emplace(std::make_pair(block_of[s], -1), next_group);
                if (inserted) ++next_group;
                group_of[s] = it->second;
            }
        }

        // Compare as partitions, not as raw ids.
        Partition before{sys.states, block_of,
                         1 + *std::max_element(block_of.begin(), block_of.end())};
        Partition after{sys.states, group_of, next_group};
        if (canonicalize(before).same_blocks(canonicalize(after))) break;
        block_of = group_of;
    }

    RefinementResult result;
    result.iterations = rounds;
    result.partition = canonicalize(Partition{
        sys.states, block_of, 1 + (n ? *std::max_element(block_of.begin(), block_of.end()) : 0)});

    // Fresh block labels: lexicographically least member.
    std::map<std::string, std::string> names;
    auto blocks = result.partition.block_names();
    for (const auto& members : blocks)
        for (const std::string& s : members) names[s] = members.front();
    result.labeling = make_labeling(sys, names);
    return result;
}

bool verify_minimality(const StateRelabeledSystem& m, const RefinementResult& result) {
    const Partition base = partition_of(m);
    if (!refines(result.partition, base)) return false;

    auto sufficient_with = [&](const std::vector<int>& block_of) {
        std::map<std::pair<int, int>, int> succ;
        for (const Transition& t : m.system.transitions) {
            auto [it, inserted] = succ.emplace(std::make_pair(block_of[t.src], t.label),
                                               block_of[t.dst]);
            if (!inserted && it->second != block_of[t.dst]) return false;
        }
        return true;
    };
    if (!sufficient_with(result.partition.block_of)) return false;

    // A coarser sufficient refinement would survive some pairwise merge.
    const int k = result.partition.block_count;
    std::vector<int> base_block(k, -1);
    for (std::size_t i = 0; i < base.domain.size(); ++i)
        base_block[result.partition.block_of[i]] = base.block_of[i];
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            if (base_block[a] != base_block[b]) continue;    // merge would leave the refinement
            std::vector<int> merged = result.partition.block_of;
            for (int& x : merged)
                if (x == b) x = a;
            if (sufficient_with(merged)) return false;
        }
    }
    return true;
}

}  // namespace minbrain
