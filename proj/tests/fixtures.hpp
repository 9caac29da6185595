// Shared hand-built example games used across the test suites.

#pragma once

#include "stackdec/game.hpp"

namespace fixtures {

// 2x2 two-type game where the optimal policy trades a small amount of
// per-type value to keep reports truthful (optimum 0.2475).
inline stackdec::Game motivating_game() {
    Eigen::MatrixXd leader(2, 2), a(2, 2), b(2, 2);
    leader << 1, -1, -1, 0.99;
    a << -1, 1.0 / 3.0, 3, -1;
    b << -1, 1, 1, -1;
    return stackdec::Game(leader, {{"A", 0.5, a}, {"B", 0.5, b}}, "motivating");
}

// Near-zero-sum 2x2 two-type game with a tiny diagonal perturbation: the
// truthful menu collapses to eps under deception while a simple pooled
// policy obtains 0.5.
inline stackdec::Game gap_game(double eps = 0.01) {
    Eigen::MatrixXd leader(2, 2), a(2, 2), b(2, 2);
    leader << 1, 0, 0, eps;
    a << 0, 0.2, 0.8, 1;
    b << 0.2, 0, 1, 0.8;
    return stackdec::Game(leader, {{"A", 0.5, a}, {"B", 0.5, b}}, "gap");
}

// Three-type matching-pennies-style game separating mixed and pure policy
// power: best mixed IC value 2/3, best pure value at most 1/3.
inline stackdec::Game mixed_power_game() {
    Eigen::MatrixXd leader(2, 2), star(2, 2), a(2, 2), b(2, 2);
    leader << 1, -1, -1, 1;
    star << -1, 1, 1, -1;
    a << 0, 0, 1, -2;
    b << -2, 1, 0, 0;
    const double third = 1.0 / 3.0;
    return stackdec::Game(
        leader, {{"star", third, star}, {"A", third, a}, {"B", third, b}}, "mixed-power");
}

}  // namespace fixtures
