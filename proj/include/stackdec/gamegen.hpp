// Random game generation with a tunable leader-follower payoff correlation.
//
// Leader payoffs are drawn uniformly from [0, 1]. Each follower type's
// payoffs start uniform in [0, 1] and are then blended against the leader's:
//
//     uF <- (1 - alpha) * uF - alpha * uL
//
// so alpha = 0 gives independent payoffs and alpha = 1 a zero-sum game.
// Priors are drawn uniformly and normalized. Generation is deterministic in
// (seed, dimensions, alphas): every matrix is drawn from its own counter-based
// substream, so changing one dimension does not perturb unrelated draws.

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "stackdec/game.hpp"

namespace stackdec {

struct GenSpec {
    int num_leader_actions = 2;
    int num_follower_actions = 2;
    int num_types = 2;
    std::vector<double> alphas = {0.0};  // type t blends with alphas[t % size]
    std::uint64_t seed = 0;
};

namespace detail {

// splitmix64: turns (seed, stream tag) into a well-mixed 64-bit stream seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed * 0x9e3779b97f4a7c15ull + tag;
    return splitmix64(s);
}

// Uniform [0, 1) from the top 53 bits: identical across platforms, unlike
// std::uniform_real_distribution.
inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed,
                                     std::uint64_t tag) {
    std::mt19937_64 rng(stream_seed(seed, tag));
    Eigen::MatrixXd out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out(i, j) = unit_double(rng);
    return out;
}

}  // namespace detail

inline Game generate(const GenSpec& spec) {
    if (spec.num_leader_actions < 1 || spec.num_follower_actions < 1 || spec.num_types < 1)
        throw std::invalid_argument("generate: dimensions must be positive");
    if (spec.alphas.empty()) throw std::invalid_argument("generate: alphas must be nonempty");
    for (double a : spec.alphas)
        if (!(a >= 0.0 && a <= 1.0))
            throw std::invalid_argument("generate: alphas must lie in [0, 1]");

    const int m = spec.num_leader_actions, n = spec.num_follower_actions;
    Eigen::MatrixXd leader = detail::random_matrix(m, n, spec.seed, 1);

    std::mt19937_64 prior_rng(detail::stream_seed(spec.seed, 2));
    std::vector<double> priors(spec.num_types);
    double total = 0.0;
    for (double& p : priors) {
        p = detail::unit_double(prior_rng);
        total += p;
    }
    if (total <= 0.0) { priors.assign(spec.num_types, 1.0); total = spec.num_types; }

    std::vector<FollowerType> types;
    for (int t = 0; t < spec.num_types; ++t) {
        double alpha = spec.alphas[t % spec.alphas.size()];
        Eigen::MatrixXd uf = detail::random_matrix(m, n, spec.seed, 1000 + t);
        uf = (1.0 - alpha) * uf - alpha * leader;
        types.push_back({"t" + std::to_string(t + 1), priors[t] / total, std::move(uf)});
    }
    return Game(std::move(leader), std::move(types),
                "gen-seed" + std::to_string(spec.seed));
}

}  // namespace stackdec
