// Reductions from maximum independent set to policy design, used both as
// hard benchmark instances and as correctness fixtures: the optimal policy
// value of each constructed game encodes the size of a maximum independent
// set of the source graph.

#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "stackdec/game.hpp"

namespace stackdec {

// Simple undirected graph on vertices 0..num_vertices-1.
struct Graph {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;

    Graph() = default;
    Graph(int n, std::vector<std::pair<int, int>> e) : num_vertices(n), edges(std::move(e)) {
        if (n < 1) throw std::invalid_argument("graph must have at least one vertex");
        for (auto& [u, v] : edges) {
            if (u < 0 || v < 0 || u >= n || v >= n || u == v)
                throw std::invalid_argument("graph edge out of range or self-loop");
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }

    std::vector<std::vector<bool>> adjacency() const {
        std::vector<std::vector<bool>> adj(num_vertices,
                                           std::vector<bool>(num_vertices, false));
        for (auto [u, v] : edges) adj[u][v] = adj[v][u] = true;
        return adj;
    }
};

// Exhaustive maximum-independent-set search with branch pruning; guards at
// 20 vertices since it is only intended to certify small fixtures.
inline std::vector<int> max_independent_set_bruteforce(const Graph& g) {
    if (g.num_vertices > 20)
        throw std::invalid_argument("max_independent_set_bruteforce: graph too large (> 20)");
    auto adj = g.adjacency();
    std::vector<int> best, cur;
    auto rec = [&](auto&& self, int v) -> void {
        if (static_cast<int>(cur.size() + (g.num_vertices - v)) <= static_cast<int>(best.size()))
            return;
        if (v == g.num_vertices) {
            if (cur.size() > best.size()) best = cur;
            return;
        }
        bool ok = true;
        for (int u : cur)
            if (adj[u][v]) { ok = false; break; }
        if (ok) {
            cur.push_back(v);
            self(self, v + 1);
            cur.pop_back();
        }
        self(self, v + 1);
    };
    rec(rec, 0);
    return best;
}

namespace detail {

inline std::string vertex_type_id(int v) { return "v" + std::to_string(v + 1); }

}  // namespace detail

// Game whose optimal (deception-aware, pure-policy) value equals k/|V|, with
// k the maximum independent set size of the graph. Types: one zero-prior
// "star" type plus one type per vertex, uniform priors. Leader actions:
// a0, then a_v and b_v per vertex. Follower actions: 3.
inline Game build_opt_hardness_game(const Graph& graph) {
    const int V = graph.num_vertices;
    const int m = 2 * V + 1;
    auto adj = graph.adjacency();

    Eigen::MatrixXd leader = Eigen::MatrixXd::Zero(m, 3);
    leader.col(0).setOnes();  // leader only scores on the first follower action

    std::vector<FollowerType> types;
    {
        // the star type: first action strictly dominant, prior 0
        Eigen::MatrixXd star = Eigen::MatrixXd::Zero(m, 3);
        star.col(0).setOnes();
        types.push_back({"star", 0.0, star});
    }
    for (int w = 0; w < V; ++w) {
        Eigen::MatrixXd pay(m, 3);
        pay.row(0) << 0.5, 1.0, 1.0;                          // a0
        for (int v = 0; v < V; ++v) {
            if (v == w) pay.row(1 + v) << 0.0, 0.5, 0.5;      // own a_w
            else if (adj[v][w]) pay.row(1 + v) << 0.0, 1.0, 1.0;  // neighbor a_v
            else pay.row(1 + v) << 0.0, 0.5, 1.0;             // non-neighbor a_v
            if (v == w) pay.row(1 + V + v) << 0.0, 1.0, 1.0;  // own b_w
            else pay.row(1 + V + v) << 0.0, 0.5, 1.0;         // other b_v
        }
        types.push_back({detail::vertex_type_id(w), 1.0 / V, pay});
    }
    return Game(leader, std::move(types), "mis-opt");
}

// Game whose optimal pure IC policy value equals k/|V|. Types: one per
// vertex, uniform priors. Leader actions: a_v and b_v per vertex. Follower
// actions: 3.
inline Game build_ic_hardness_game(const Graph& graph) {
    const int V = graph.num_vertices;
    const int m = 2 * V;
    auto adj = graph.adjacency();

    Eigen::MatrixXd leader = Eigen::MatrixXd::Zero(m, 3);
    leader.col(0).setOnes();

    std::vector<FollowerType> types;
    for (int w = 0; w < V; ++w) {
        Eigen::MatrixXd pay(m, 3);
        for (int v = 0; v < V; ++v) {
            if (v == w) pay.row(v) << 0.0, 0.0, 0.0;          // own a_w
            else if (adj[v][w]) pay.row(v) << 0.5, 0.0, 1.0;  // neighbor a_v
            else pay.row(v) << 0.0, 0.0, 1.0;                 // non-neighbor a_v
            if (v == w) pay.row(V + v) << 0.0, 1.0, 1.0;      // own b_w
            else pay.row(V + v) << 0.0, 0.0, 1.0;             // other b_v
        }
        types.push_back({detail::vertex_type_id(w), 1.0 / V, pay});
    }
    return Game(leader, std::move(types), "mis-ic");
}

// The hand-built witness policy for an independent set of the source graph.
// kind "opt": value |set|/|V| against strategic reports in the star game.
// kind "ic": an IC policy of value |set|/|V| in the per-vertex game.
inline Policy independent_set_to_policy(const Graph& graph, const std::vector<int>& set,
                                        const std::string& kind) {
    const int V = graph.num_vertices;
    std::vector<bool> in_set(V, false);
    for (int v : set) {
        if (v < 0 || v >= V) throw std::invalid_argument("independent set vertex out of range");
        in_set[v] = true;
    }
    auto adj = graph.adjacency();
    for (int u : set)
        for (int v : set)
            if (u != v && adj[u][v])
                throw std::invalid_argument("vertex set is not independent");

    Policy sigma;
    if (kind == "opt") {
        const int m = 2 * V + 1;
        // Set members are left indifferent between truthful and reporting
        // the star type; the leader-favoring tie lands on the star entry,
        // which pays the leader 1.
        sigma.entries.emplace("star", Mixture(Outcome{MixedStrategy::pure(0, m), 0}));
        for (int v = 0; v < V; ++v) {
            int row = in_set[v] ? (1 + v) : (1 + V + v);
            sigma.entries.emplace(detail::vertex_type_id(v),
                                  Mixture(Outcome{MixedStrategy::pure(row, m), 1}));
        }
    } else if (kind == "ic") {
        const int m = 2 * V;
        for (int v = 0; v < V; ++v) {
            int row = in_set[v] ? v : (V + v);
            int col = in_set[v] ? 0 : 1;
            sigma.entries.emplace(detail::vertex_type_id(v),
                                  Mixture(Outcome{MixedStrategy::pure(row, m), col}));
        }
    } else {
        throw std::invalid_argument("independent_set_to_policy: kind must be 'opt' or 'ic'");
    }
    return sigma;
}

}  // namespace stackdec
