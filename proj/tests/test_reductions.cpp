// Reduction tests: the independent-set game constructions, their witness
// policies, the brute-force MIS oracle, and the objective identities
// (optimal policy value = MIS size / number of vertices).

#include <catch2/catch_amalgamated.hpp>

#include "stackdec/reductions.hpp"
#include "stackdec/solvers.hpp"

using namespace stackdec;

namespace {

Graph path3() { return Graph(3, {{0, 1}, {1, 2}}); }
Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

double opt_value(const Game& g, bool ic) {
    auto rep = solve_opt(g, ic, /*mixed=*/false);
    REQUIRE(rep.status == lp::Status::optimal);
    return rep.objective;
}

}  // namespace

TEST_CASE("graph constructor normalizes and validates") {
    Graph g(3, {{1, 0}, {0, 1}});  // reversed duplicate collapses
    CHECK(g.edges.size() == 1);
    CHECK_THROWS_AS(Graph(2, {{0, 0}}), std::invalid_argument);  // self-loop
    CHECK_THROWS_AS(Graph(2, {{0, 2}}), std::invalid_argument);  // out of range
}

TEST_CASE("brute-force maximum independent set") {
    CHECK(max_independent_set_bruteforce(path3()).size() == 2);
    CHECK(max_independent_set_bruteforce(triangle()).size() == 1);
    CHECK(max_independent_set_bruteforce(Graph(4, {})).size() == 4);
    // C5: maximum independent set has 2 vertices
    Graph c5(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
    CHECK(max_independent_set_bruteforce(c5).size() == 2);
    CHECK_THROWS_AS(max_independent_set_bruteforce(Graph(21, {})), std::invalid_argument);
}

TEST_CASE("game construction shapes") {
    Game opt = build_opt_hardness_game(path3());
    CHECK(opt.num_types() == 4);                // star + one per vertex
    CHECK(opt.num_leader_actions() == 7);       // a0 + a_v + b_v
    CHECK(opt.num_follower_actions() == 3);
    CHECK(opt.types[0].prior == 0.0);           // star carries no prior mass

    Game ic = build_ic_hardness_game(path3());
    CHECK(ic.num_types() == 3);
    CHECK(ic.num_leader_actions() == 6);
    CHECK_THAT(ic.types[0].prior, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
}

TEST_CASE("witness policies realize the independent-set value") {
    Graph g = path3();
    auto mis = max_independent_set_bruteforce(g);  // {0, 2}

    Game opt_game = build_opt_hardness_game(g);
    Policy opt_policy = independent_set_to_policy(g, mis, "opt");
    REQUIRE(validate_policy(opt_game, opt_policy).ok());
    CHECK_THAT(evaluate_policy(opt_game, opt_policy).total_leader_utility,
               Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-9));

    Game ic_game = build_ic_hardness_game(g);
    Policy ic_policy = independent_set_to_policy(g, mis, "ic");
    REQUIRE(validate_policy(ic_game, ic_policy).ok());
    CHECK(is_ic(ic_game, ic_policy));
    CHECK_THAT(evaluate_policy(ic_game, ic_policy).total_leader_utility,
               Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-9));

    // empty set -> value 0; dependent set -> argument error
    Policy empty = independent_set_to_policy(g, {}, "opt");
    CHECK_THAT(evaluate_policy(opt_game, empty).total_leader_utility,
               Catch::Matchers::WithinAbs(0.0, 1e-9));
    CHECK_THROWS_AS(independent_set_to_policy(g, {0, 1}, "opt"), std::invalid_argument);
    CHECK_THROWS_AS(independent_set_to_policy(g, {0}, "bogus"), std::invalid_argument);
}

TEST_CASE("triangle identities: one-vertex independent set") {
    Graph g = triangle();
    CHECK_THAT(opt_value(build_opt_hardness_game(g), false),
               Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-6));
    CHECK_THAT(opt_value(build_ic_hardness_game(g), true),
               Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-6));
    Policy witness = independent_set_to_policy(g, {1}, "ic");
    CHECK(is_ic(build_ic_hardness_game(g), witness));
    CHECK_THAT(evaluate_policy(build_ic_hardness_game(g), witness).total_leader_utility,
               Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-9));
}

TEST_CASE("solver objective equals MIS ratio on small graphs") {
    std::vector<Graph> graphs = {
        path3(),
        triangle(),
        Graph(2, {}),
        Graph(2, {{0, 1}}),
        Graph(4, {{0, 1}, {1, 2}, {2, 3}}),           // P4, MIS 2
        Graph(4, {{0, 1}, {0, 2}, {0, 3}}),           // star, MIS 3
        Graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}),  // C5, MIS 2
    };
    for (const auto& g : graphs) {
        INFO("V=" << g.num_vertices << " E=" << g.edges.size());
        double expect =
            static_cast<double>(max_independent_set_bruteforce(g).size()) / g.num_vertices;
        CHECK_THAT(opt_value(build_opt_hardness_game(g), false),
                   Catch::Matchers::WithinAbs(expect, 1e-6));
        CHECK_THAT(opt_value(build_ic_hardness_game(g), true),
                   Catch::Matchers::WithinAbs(expect, 1e-6));
    }
}

TEST_CASE("mixed policies do not beat pure ones on the star-type family") {
    Graph g = path3();
    Game game = build_opt_hardness_game(g);
    double pure = opt_value(game, false);
    auto mixed = solve_opt(game, false, /*mixed=*/true);
    REQUIRE(mixed.status == lp::Status::optimal);
    CHECK_THAT(mixed.objective, Catch::Matchers::WithinAbs(pure, 1e-6));
}
