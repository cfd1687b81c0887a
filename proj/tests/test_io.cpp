#include <doctest.h>

#include "minbrain/filters.hpp"
#include "minbrain/json_io.hpp"
#include "minbrain/models.hpp"
#include "minbrain/psr.hpp"
#include "oracles.hpp"

using namespace minbrain;
using testing::Rng;

TEST_CASE("rational literals") {
    CHECK(parse_rational("3/4") == Rat(3, 4));
    CHECK(parse_rational("6/8") == Rat(3, 4));
    CHECK(parse_rational("-2/4") == Rat(-1, 2));
    CHECK(parse_rational("7") == Rat(7));
    CHECK(parse_rational("0.25") == Rat(1, 4));
    CHECK(parse_rational("-0.5") == Rat(-1, 2));
    CHECK(parse_rational("1.20") == Rat(6, 5));
    CHECK(rational_to_string(Rat(3, 4)) == "3/4");
    CHECK(rational_to_string(Rat(5)) == "5");
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK_THROWS_AS(parse_rational("1.2.3"), Error);
    CHECK_THROWS_AS(parse_rational(""), Error);
}

TEST_CASE("system round trips") {
    Rng rng(701);
    for (int i = 0; i < 30; ++i) {
        auto sys = testing::random_full_relation(rng);
        auto m = make_srts(sys, testing::random_labels(rng, sys));
        auto j = srts_to_json(m);
        auto back = srts_from_json(j);
        CHECK(back.system.states == m.system.states);
        CHECK(back.system.labels == m.system.labels);
        CHECK(back.system.transitions == m.system.transitions);
        CHECK(back.labeling.value == m.labeling.value);
        CHECK(srts_to_json(back) == j);    // byte-identical dumps
        CHECK(srts_to_json(back).dump() == j.dump());
    }
}

TEST_CASE("partition round trips") {
    auto p = make_partition({{"a", "c"}, {"b"}, {"d", "e", "f"}});
    auto j = partition_to_json(p);
    CHECK(partition_from_json(j).same_blocks(p));
}

TEST_CASE("task machine round trips") {
    auto m = red_green_task_machine();
    auto j = task_machine_to_json(m);
    auto back = task_machine_from_json(j);
    CHECK(back.states == m.states);
    CHECK(back.delta == m.delta);
    CHECK(back.output == m.output);
    CHECK(task_machine_to_json(back) == j);

    auto plan = red_green_plan_policy_machine();
    auto j2 = task_machine_to_json(plan);
    CHECK(task_machine_to_json(task_machine_from_json(j2)) == j2);
}

TEST_CASE("external systems and moore machines round trip") {
    auto ext = red_green_annulus();
    auto j = external_to_json(ext);
    auto back = external_from_json(j);
    CHECK(back.states == ext.states);
    CHECK(back.f == ext.f);
    CHECK(back.h == ext.h);

    auto moore = make_moore(ext, "a.g");
    auto jm = moore_to_json(moore);
    auto back_m = moore_from_json(jm);
    CHECK(back_m.initial == moore.initial);
    CHECK(moore_to_json(back_m) == jm);
}

TEST_CASE("coupled bundles round trip") {
    auto cs = red_green_coupled();
    auto j = coupled_to_json(cs);
    auto back = coupled_from_json(j);
    CHECK(back.internal.states == cs.internal.states);
    CHECK(back.policy == cs.policy);
    CHECK(coupled_to_json(back) == j);

    SUBCASE("planner-shaped internals are strong-restricted on load") {
        auto planner_json = j;
        // Replace the executor with the binary toy planner and its policy.
        planner_json["external"] = external_to_json(make_external(
            {"e0", "e1"}, {"0", "1"}, {"0", "1"},
            {{{"e0", "0"}, "e0"}, {{"e0", "1"}, "e1"}, {{"e1", "0"}, "e1"},
             {{"e1", "1"}, "e0"}},
            {{"e0", "0"}, {"e1", "1"}}));
        planner_json["internal"] = system_to_json(binary_toy_planner());
        planner_json["policy"] = binary_toy_policy();
        planner_json["initial_internal"] = "0";
        auto loaded = coupled_from_json(planner_json);
        CHECK(loaded.internal.labels == std::vector<std::string>{"0", "1"});
        CHECK(loaded.internal.transitions.size() == 4);
    }
}

TEST_CASE("disturbance models round trip") {
    auto ext = make_external({"x0", "x1"}, {"go"}, {"0", "1"},
                             {{{"x0", "go"}, "x1"}, {{"x1", "go"}, "x0"}},
                             {{"x0", "0"}, {"x1", "1"}});
    DisturbanceModel dm;
    dm.mode = DisturbanceModel::Mode::probabilistic;
    dm.thetas = {"n", "s"};
    dm.psis = {"f", "t"};
    dm.f_theta = {{{1, 0}}, {{0, 1}}};
    dm.h_psi = {{1, 0}, {0, 1}};
    dm.p_theta = {{{Rat(1, 3), Rat(2, 3)}}, {{Rat(1, 2), Rat(1, 2)}}};
    dm.p_psi = {{Rat(1, 10), Rat(9, 10)}, {Rat(1, 4), Rat(3, 4)}};
    validate_disturbances(ext, dm);
    auto j = disturbances_to_json(ext, dm);
    auto back = disturbances_from_json(j, ext);
    CHECK(back.p_theta == dm.p_theta);
    CHECK(back.p_psi == dm.p_psi);
    CHECK(disturbances_to_json(ext, back) == j);
}

TEST_CASE("probability models round trip") {
    Rng rng(709);
    for (int i = 0; i < 10; ++i) {
        auto pm = testing::random_prob_model(rng, 4, 2, 3);
        auto j = prob_model_to_json(pm);
        auto back = prob_model_from_json(j);
        CHECK(back.init == pm.init);
        for (std::size_t u = 0; u < pm.trans.size(); ++u)
            CHECK(back.trans[u] == pm.trans[u]);
        CHECK(prob_model_to_json(back) == j);
    }
    SUBCASE("decimal strings are exact") {
        auto pm = testing::random_prob_model(rng, 2, 1, 2);
        auto j = prob_model_to_json(pm);
        j["init"] = {"0.25", "0.75"};
        auto back = prob_model_from_json(j);
        CHECK(back.init(0) == Rat(1, 4));
        CHECK(back.init(1) == Rat(3, 4));
    }
}

TEST_CASE("dot export mentions every state and edge") {
    auto m = red_green_filter();
    auto dot = to_dot(m, "filter");
    for (const auto& s : m.system.states) CHECK(dot.find("\"" + s + "\"") != std::string::npos);
    CHECK(dot.find("label=\"g\"") != std::string::npos);
    CHECK(dot.find("__start") != std::string::npos);

    auto tree = unroll({}, {"g", "r"}, {}, 2);
    auto dot2 = to_dot(tree.to_system(), "tree");
    CHECK(dot2.find("\"r.g\"") != std::string::npos);
}

TEST_CASE("schema errors carry exit-worthy codes") {
    Json j;
    j["states"] = {"a"};
    CHECK_THROWS_WITH_AS(system_from_json(j), doctest::Contains("missing field"), Error);
    try {
        system_from_json(j);
    } catch (const Error& e) {
        CHECK(e.code() == "SchemaError");
    }
}
