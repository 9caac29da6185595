// Solver tests: SSE baselines, BSE, the optimal-policy MILP family against
// the exhaustive enumeration oracle, the per-type approximation guarantee,
// ordering relations between solution concepts, and robust-gap variants.

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "stackdec/gamegen.hpp"
#include "stackdec/solvers.hpp"

using namespace stackdec;

namespace {

// Objective-and-invariant wrapper: every optimal report must re-evaluate to
// its stated objective through the independent game-core path.
double checked_value(const Game& g, bool ic, bool mixed, const SolverOptions& opts = {}) {
    auto rep = solve_opt(g, ic, mixed, opts);
    REQUIRE(rep.status == lp::Status::optimal);
    CHECK_THAT(detail::concept_value(g, rep.policy, ic),
               Catch::Matchers::WithinAbs(rep.objective, 1e-5));
    // Strategic re-evaluation can only add follower-indifference bonuses.
    CHECK(rep.eval.total_leader_utility >= rep.objective - 1e-5);
    return rep.objective;
}

}  // namespace

TEST_CASE("SSE on the worked example") {
    Game g = fixtures::motivating_game();
    auto [oa, va] = solve_sse(g, "A");
    CHECK_THAT(va, Catch::Matchers::WithinAbs(0.5, 1e-7));
    CHECK(oa.induced_action == 0);
    CHECK_THAT(oa.strategy[0], Catch::Matchers::WithinAbs(0.75, 1e-7));
    auto [ob, vb] = solve_sse(g, "B");
    CHECK_THAT(vb, Catch::Matchers::WithinAbs(0.0, 1e-7));
    CHECK_THAT(ob.strategy[0], Catch::Matchers::WithinAbs(0.5, 1e-7));
    CHECK_THAT(truthful_value(g), Catch::Matchers::WithinAbs(0.25, 1e-7));
    CHECK_THAT(deceitful_value(g), Catch::Matchers::WithinAbs(0.0, 1e-7));
}

TEST_CASE("BSE on the worked example is 0") {
    Game g = fixtures::motivating_game();
    auto bse = solve_bse(g);
    REQUIRE(bse.status == lp::Status::optimal);
    CHECK_THAT(bse.value, Catch::Matchers::WithinAbs(0.0, 1e-7));
    Policy sigma = policy_from_bse(g, bse);
    CHECK(validate_policy(g, sigma).ok());
    CHECK(is_ic(g, sigma));  // constant-strategy policies are always IC
}

TEST_CASE("optimal deception-aware policy on the worked example") {
    Game g = fixtures::motivating_game();
    auto rep = solve_opt(g, /*ic=*/false, /*mixed=*/false);
    REQUIRE(rep.status == lp::Status::optimal);
    CHECK_THAT(rep.objective, Catch::Matchers::WithinAbs(0.2475, 1e-6));
    CHECK(is_ic(g, rep.policy));
    auto adv = evaluate_policy_adversarial(g, rep.policy);
    CHECK(adv.total_leader_utility >= 0.2475 - 1e-6);
}

TEST_CASE("near-zero-sum gap example") {
    Game g = fixtures::gap_game(0.01);
    CHECK_THAT(deceitful_value(g), Catch::Matchers::WithinAbs(0.01, 1e-7));
    CHECK(checked_value(g, /*ic=*/true, /*mixed=*/false) >= 0.5 - 1e-6);
}

TEST_CASE("mixed policies strictly beat pure ones on the three-type example") {
    Game g = fixtures::mixed_power_game();
    double mixed_ic = checked_value(g, true, true);    // plain LP
    double mixed = checked_value(g, false, true);      // MILP over reports
    double pure = checked_value(g, false, false);
    CHECK_THAT(mixed_ic, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-6));
    CHECK_THAT(mixed, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-6));
    CHECK(pure <= 1.0 / 3.0 + 1e-6);
}

TEST_CASE("mixed-IC recovery is a compression fixed point") {
    Game g = fixtures::mixed_power_game();
    auto rep = solve_opt(g, true, true);
    REQUIRE(rep.status == lp::Status::optimal);
    for (const auto& t : g.types) {
        const Mixture& phi = rep.policy.at(t.id);
        Mixture compressed = compress_mixture(g, t.id, phi);
        CHECK(compressed.support().size() == phi.support().size());
        std::set<int> actions;
        for (const auto& e : phi.support()) actions.insert(e.outcome.induced_action);
        CHECK(actions.size() == phi.support().size());  // distinct induced actions
    }
}

TEST_CASE("enumeration oracle agreement on small random games") {
    for (std::uint64_t seed : {3u, 11u, 19u}) {
        for (double alpha : {0.0, 0.5}) {
            GenSpec spec;
            spec.num_leader_actions = 3;
            spec.num_follower_actions = 2;
            spec.num_types = 3;
            spec.alphas = {alpha};
            spec.seed = seed;
            Game g = generate(spec);
            for (bool ic : {false, true})
                for (bool mixed : {false, true}) {
                    INFO("seed=" << seed << " alpha=" << alpha << " ic=" << ic
                                 << " mixed=" << mixed);
                    auto fast = solve_opt(g, ic, mixed);
                    auto slow = solve_opt_enumeration(g, ic, mixed);
                    REQUIRE(fast.status == lp::Status::optimal);
                    REQUIRE(slow.status == lp::Status::optimal);
                    CHECK_THAT(fast.objective,
                               Catch::Matchers::WithinAbs(slow.objective, 1e-6));
                }
        }
    }
}

TEST_CASE("enumeration guard rejects large instances unless overridden") {
    GenSpec spec;
    spec.num_leader_actions = 2;
    spec.num_follower_actions = 5;  // > 4 actions in pure mode
    spec.num_types = 2;
    Game g = generate(spec);
    CHECK_THROWS_AS(solve_opt_enumeration(g, false, false), std::invalid_argument);
    SolverOptions opts;
    opts.override_enumeration_guard = true;
    CHECK(solve_opt_enumeration(g, false, false, opts).status == lp::Status::optimal);
}

TEST_CASE("approximation guarantee and ordering chain") {
    for (std::uint64_t seed : {2u, 5u, 8u, 13u}) {
        GenSpec spec;
        spec.num_leader_actions = 3;
        spec.num_follower_actions = 3;
        spec.num_types = 3;
        spec.alphas = {0.5};
        spec.seed = seed;
        Game g = generate(spec);
        INFO("seed=" << seed);

        double opt = checked_value(g, false, false);
        double opt_ic = checked_value(g, true, false);
        double optx = checked_value(g, false, true);
        double optx_ic = checked_value(g, true, true);
        auto bse = solve_bse(g);
        REQUIRE(bse.status == lp::Status::optimal);
        double truthful = truthful_value(g);

        auto approx = solve_approx(g);
        CHECK(approx.objective >= opt / g.num_types() - 1e-6);
        CHECK(validate_policy(g, approx.policy).ok());

        CHECK(optx >= opt - 1e-6);
        CHECK(opt >= opt_ic - 1e-6);
        CHECK(optx >= optx_ic - 1e-6);
        CHECK(optx_ic >= opt_ic - 1e-6);
        CHECK(opt_ic >= bse.value - 1e-6);
        CHECK(truthful >= opt_ic - 1e-6);  // per-type SSE dominates truthful IC play
    }
}

TEST_CASE("deception can be strictly beneficial to the leader") {
    // Truthful play is NOT an upper bound on the deception-aware optimum: a
    // type steered into another type's entry can hand the leader more than
    // its own best-response-constrained optimum allows (ratio > 1 regime).
    GenSpec spec;
    spec.num_leader_actions = 3;
    spec.num_follower_actions = 3;
    spec.num_types = 3;
    spec.alphas = {0.5};
    spec.seed = 2;
    Game g = generate(spec);
    double opt = solve_opt_enumeration(g, false, false).objective;
    CHECK(opt > truthful_value(g) + 1e-3);
}

TEST_CASE("single-type game degenerates to the SSE") {
    GenSpec spec;
    spec.num_leader_actions = 3;
    spec.num_follower_actions = 3;
    spec.num_types = 1;
    spec.seed = 4;
    Game g = generate(spec);
    double sse = solve_sse(g, g.types[0].id).second;
    CHECK_THAT(truthful_value(g), Catch::Matchers::WithinAbs(sse, 1e-7));
    CHECK_THAT(deceitful_value(g), Catch::Matchers::WithinAbs(sse, 1e-7));
    CHECK_THAT(checked_value(g, false, false), Catch::Matchers::WithinAbs(sse, 1e-6));
}

TEST_CASE("robust gap variant: strict gaps remove evaluation ties") {
    GenSpec spec;
    spec.num_leader_actions = 3;
    spec.num_follower_actions = 3;
    spec.num_types = 3;
    spec.alphas = {0.5};
    spec.seed = 17;
    Game g = generate(spec);

    double base = checked_value(g, false, false);
    SolverOptions opts;
    opts.epsilon = 1e-4;
    auto robust = solve_opt(g, false, false, opts);
    REQUIRE(robust.status == lp::Status::optimal);
    CHECK(robust.objective <= base + 1e-9);

    auto optimistic = evaluate_policy(g, robust.policy);
    auto adversarial = evaluate_policy_adversarial(g, robust.policy, opts.epsilon / 2);
    CHECK_THAT(adversarial.total_leader_utility,
               Catch::Matchers::WithinAbs(optimistic.total_leader_utility, 1e-6));
}

TEST_CASE("robust gap variant: infeasible margins are reported, not thrown") {
    // With identical follower types no strict report gap can exist.
    Eigen::MatrixXd leader(2, 2), pay(2, 2);
    leader << 1, 0, 0, 1;
    pay << 1, 0, 0, 1;
    Game g(leader, {{"A", 0.5, pay}, {"B", 0.5, pay}}, "");
    SolverOptions opts;
    opts.epsilon = 0.5;
    auto rep = solve_opt(g, false, false, opts);
    CHECK(rep.status == lp::Status::infeasible);
}

TEST_CASE("epsilon argument validation") {
    Game g = fixtures::motivating_game();
    SolverOptions opts;
    opts.epsilon = -0.1;
    CHECK_THROWS_AS(solve_opt(g, false, false, opts), std::invalid_argument);
}
