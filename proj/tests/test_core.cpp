#include <doctest.h>

#include "minbrain/core.hpp"
#include "minbrain/errors.hpp"
#include "minbrain/models.hpp"
#include "oracles.hpp"

using namespace minbrain;
using testing::Rng;

namespace {

StateRelabeledSystem relabel(const TransitionSystem& sys,
                             const std::map<std::string, std::string>& labels) {
    return make_srts(sys, labels);
}

}  // namespace

TEST_CASE("determinism") {
    auto branching = make_transition_system({"a", "b", "s"}, {"l"},
                                            {{"s", "l", "a"}, {"s", "l", "b"}});
    CHECK_FALSE(is_deterministic(branching));
    CHECK(is_deterministic(red_green_filter().system));
    auto empty = make_transition_system({"s"}, {"l"}, {});
    CHECK(is_deterministic(empty));
}

TEST_CASE("fullness") {
    auto complete = make_transition_system(
        {"a", "b", "c"}, {"l", "m"},
        {{"a", "l", "b"}, {"a", "m", "c"}, {"b", "l", "a"}, {"b", "m", "b"},
         {"c", "l", "c"}, {"c", "m", "a"}});
    CHECK(is_full(complete));
    auto missing = make_transition_system(
        {"a", "b"}, {"l", "m"}, {{"a", "l", "b"}, {"a", "m", "a"}, {"b", "l", "a"}});
    CHECK_FALSE(is_full(missing));
}

TEST_CASE("sufficiency verdicts and witnesses") {
    SUBCASE("constant labeling is sufficient") {
        Rng rng(7);
        for (int i = 0; i < 20; ++i) {
            auto sys = testing::random_full_relation(rng);
            std::map<std::string, std::string> constant;
            for (const auto& s : sys.states) constant[s] = "c";
            CHECK(is_sufficient(relabel(sys, constant)));
        }
    }
    SUBCASE("identity labeling is sufficient on deterministic systems") {
        Rng rng(8);
        for (int i = 0; i < 20; ++i) {
            auto sys = testing::random_full_dts(rng);
            std::map<std::string, std::string> identity;
            for (const auto& s : sys.states) identity[s] = s;
            CHECK(is_sufficient(relabel(sys, identity)));
        }
    }
    SUBCASE("witness replays the violation") {
        Rng rng(9);
        int violated = 0;
        for (int i = 0; i < 200; ++i) {
            auto sys = testing::random_full_relation(rng);
            auto m = relabel(sys, testing::random_labels(rng, sys));
            auto witness = sufficiency_counterexample(m);
            if (!witness) continue;
            ++violated;
            int s = sys.state_index(witness->s), t = sys.state_index(witness->t);
            int l = sys.label_index(witness->label);
            int sn = sys.state_index(witness->s_next), tn = sys.state_index(witness->t_next);
            CHECK(m.labeling.value[s] == m.labeling.value[t]);
            CHECK(m.labeling.value[sn] != m.labeling.value[tn]);
            auto has = [&](int a, int b) {
                Transition probe{a, l, b};
                return std::binary_search(sys.transitions.begin(), sys.transitions.end(), probe);
            };
            CHECK(has(s, sn));
            CHECK(has(t, tn));
        }
        CHECK(violated > 50);
    }
    SUBCASE("witness is lexicographically least") {
        auto sys = make_transition_system(
            {"a", "b", "c", "d"}, {"l"},
            {{"a", "l", "c"}, {"b", "l", "d"}, {"c", "l", "c"}, {"d", "l", "d"}});
        auto m = relabel(sys, {{"a", "0"}, {"b", "0"}, {"c", "1"}, {"d", "2"}});
        auto witness = sufficiency_counterexample(m);
        REQUIRE(witness);
        CHECK(witness->s == "a");
        CHECK(witness->t == "b");
        CHECK(witness->label == "l");
        CHECK(witness->s_next == "c");
        CHECK(witness->t_next == "d");
    }
}

TEST_CASE("quotient") {
    SUBCASE("by the identity labeling is isomorphic to the input") {
        Rng rng(11);
        for (int i = 0; i < 20; ++i) {
            auto sys = testing::random_full_relation(rng);
            std::map<std::string, std::string> identity;
            for (const auto& s : sys.states) identity[s] = "q_" + s;
            auto q = quotient(relabel(sys, identity));
            CHECK(q.transitions.size() == sys.transitions.size());
            auto iso = isomorphism(relabel(sys, identity),
                                   relabel(q, [&] {
                                       std::map<std::string, std::string> self;
                                       for (const auto& s : q.states) self[s] = s;
                                       return self;
                                   }()));
            CHECK(iso.has_value());
        }
    }
    SUBCASE("by a constant labeling is one state with self-loops") {
        auto sys = make_transition_system(
            {"a", "b"}, {"l", "m"}, {{"a", "l", "b"}, {"b", "m", "a"}, {"a", "m", "a"}});
        std::map<std::string, std::string> constant{{"a", "c"}, {"b", "c"}};
        auto q = quotient(relabel(sys, constant));
        CHECK(q.states == std::vector<std::string>{"c"});
        REQUIRE(q.transitions.size() == 2);    // one per label appearing in T
        for (const auto& t : q.transitions) {
            CHECK(t.src == 0);
            CHECK(t.dst == 0);
        }
    }
}

TEST_CASE("refines") {
    auto p_id = identity_partition({"a", "b", "c"});
    auto p_const = constant_partition({"a", "b", "c"});
    auto p1 = make_partition({{"a"}, {"b", "c"}});
    auto p2 = make_partition({{"a", "b"}, {"c"}});
    CHECK(refines(p_id, p1));
    CHECK(refines(p_id, p2));
    CHECK(refines(p1, p_const));
    CHECK(refines(p2, p_const));
    CHECK_FALSE(refines(p1, p2));
    CHECK_FALSE(refines(p2, p1));

    auto other_domain = make_partition({{"x"}, {"y"}});
    CHECK_THROWS_WITH_AS(refines(p1, other_domain), doctest::Contains("domain"), Error);

    SUBCASE("partial order on random partitions") {
        Rng rng(13);
        std::vector<std::string> domain{"a", "b", "c", "d", "e"};
        auto random_partition = [&] {
            std::map<int, std::vector<std::string>> blocks;
            for (const auto& s : domain) blocks[testing::pick(rng, 0, 2)].push_back(s);
            std::vector<std::vector<std::string>> list;
            for (auto& [k, v] : blocks) list.push_back(v);
            return make_partition(list);
        };
        for (int i = 0; i < 100; ++i) {
            auto a = random_partition(), b = random_partition(), c = random_partition();
            CHECK(refines(a, a));
            if (refines(a, b) && refines(b, a)) CHECK(a.same_blocks(b));
            if (refines(a, b) && refines(b, c)) CHECK(refines(a, c));
        }
    }
}

TEST_CASE("common refinement") {
    auto p1 = make_partition({{"a", "b"}, {"c"}});
    auto p2 = make_partition({{"a"}, {"b", "c"}});
    std::vector<Partition> ps{p1, p2};
    auto cr = common_refinement(ps);
    CHECK(cr.same_blocks(identity_partition({"a", "b", "c"})));

    std::vector<Partition> once{p1};
    CHECK(common_refinement(once).same_blocks(p1));
    std::vector<Partition> twice{p1, p1};
    CHECK(common_refinement(twice).same_blocks(p1));

    SUBCASE("coarsest among the common lower bounds") {
        Rng rng(17);
        std::vector<std::string> domain{"a", "b", "c", "d", "e", "f"};
        auto random_partition = [&] {
            std::map<int, std::vector<std::string>> blocks;
            for (const auto& s : domain) blocks[testing::pick(rng, 0, 2)].push_back(s);
            std::vector<std::vector<std::string>> list;
            for (auto& [k, v] : blocks) list.push_back(v);
            return make_partition(list);
        };
        for (int i = 0; i < 100; ++i) {
            std::vector<Partition> ps2{random_partition(), random_partition(),
                                       random_partition()};
            auto meet = common_refinement(ps2);
            for (const auto& p : ps2) CHECK(refines(meet, p));
            auto candidate = random_partition();
            bool below_all = true;
            for (const auto& p : ps2) below_all = below_all && refines(candidate, p);
            if (below_all) CHECK(refines(candidate, meet));
        }
    }

    SUBCASE("pairwise intersection oracle") {
        Rng rng(19);
        std::vector<std::string> domain{"a", "b", "c", "d", "e"};
        auto random_partition = [&] {
            std::map<int, std::vector<std::string>> blocks;
            for (const auto& s : domain) blocks[testing::pick(rng, 0, 2)].push_back(s);
            std::vector<std::vector<std::string>> list;
            for (auto& [k, v] : blocks) list.push_back(v);
            return make_partition(list);
        };
        for (int i = 0; i < 50; ++i) {
            auto a = random_partition(), b = random_partition();
            std::vector<Partition> ps2{a, b};
            auto meet = common_refinement(ps2);
            // Oracle: same block iff same block in both inputs.
            for (std::size_t s = 0; s < domain.size(); ++s) {
                for (std::size_t t = 0; t < domain.size(); ++t) {
                    bool together = meet.block_of[s] == meet.block_of[t];
                    bool expected =
                        a.block_of[s] == a.block_of[t] && b.block_of[s] == b.block_of[t];
                    CHECK(together == expected);
                }
            }
        }
    }
}

TEST_CASE("isomorphism") {
    SUBCASE("identity on itself") {
        auto m = red_green_filter();
        auto iso = isomorphism(m, m);
        REQUIRE(iso);
        for (const auto& [a, b] : *iso) CHECK(a == b);
    }
    SUBCASE("renamed copy") {
        auto m = red_green_filter();
        std::vector<std::array<std::string, 3>> triples;
        for (const auto& t : m.system.transitions)
            triples.push_back({"z_" + m.system.states[t.src], m.system.labels[t.label],
                               "z_" + m.system.states[t.dst]});
        std::vector<std::string> states;
        for (const auto& s : m.system.states) states.push_back("z_" + s);
        auto renamed = make_transition_system(states, m.system.labels, triples,
                                              "z_" + m.system.states[*m.system.initial]);
        std::map<std::string, std::string> labels;
        for (std::size_t s = 0; s < m.system.states.size(); ++s)
            labels["z_" + m.system.states[s]] = m.labeling.of(static_cast<int>(s));
        auto iso = isomorphism(m, make_srts(renamed, labels));
        REQUIRE(iso);
        for (const auto& [a, b] : *iso) CHECK(b == "z_" + a);
    }
    SUBCASE("rejects different structure") {
        auto a = make_transition_system({"s", "t"}, {"l"}, {{"s", "l", "t"}, {"t", "l", "t"}});
        auto b = make_transition_system({"s", "t"}, {"l"}, {{"s", "l", "t"}, {"t", "l", "s"}});
        std::map<std::string, std::string> same{{"s", "x"}, {"t", "x"}};
        CHECK_FALSE(isomorphism(make_srts(a, same), make_srts(b, same)));
    }
}

TEST_CASE("quotient by a sufficient labeling is idempotent") {
    Rng rng(29);
    for (int i = 0; i < 50; ++i) {
        auto sys = testing::random_full_dts(rng);
        auto m = relabel(sys, testing::random_labels(rng, sys));
        auto refined_labels = [&] {
            // Coarsen to a sufficient labeling by taking the quotient of the
            // identity when the random one is insufficient.
            if (is_sufficient(m)) return m;
            std::map<std::string, std::string> identity;
            for (const auto& s : sys.states) identity[s] = s;
            return relabel(sys, identity);
        }();
        auto q = quotient(refined_labels);
        std::map<std::string, std::string> identity_q;
        for (const auto& s : q.states) identity_q[s] = s;
        auto qq = quotient(relabel(q, identity_q));
        auto iso = isomorphism(relabel(q, identity_q), relabel(qq, identity_q));
        CHECK(iso.has_value());
    }
}

TEST_CASE("quotient determinism iff sufficiency on full systems") {
    Rng rng(23);
    for (int i = 0; i < 1000; ++i) {
        auto sys = testing::random_full_relation(rng);
        auto m = relabel(sys, testing::random_labels(rng, sys));
        CHECK(is_deterministic(quotient(m)) == is_sufficient(m));
    }
}
