// Solution concepts for Stackelberg games with type-reporting followers:
//
//   solve_sse              single-type strong Stackelberg equilibrium (n LPs)
//   solve_bse              constant-strategy Bayesian Stackelberg MILP
//   solve_opt              optimal policy MILP/LP family (pure/mixed x IC)
//   solve_opt_enumeration  exact oracle via indicator enumeration + LPs
//   solve_approx           1/|types| approximation via per-pair LPs
//   truthful_menu          per-type SSE menu plus its deception evaluation
//
// All solvers are pure functions of (game, options) and safe to run
// concurrently.

#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stackdec/game.hpp"
#include "stackdec/lp.hpp"

namespace stackdec {

struct SolverOptions {
    double epsilon = 0.0;        // strict-gap robustness margin
    double big_m_override = 0.0; // 0 = derive from payoff magnitudes
    long node_limit = 1000000;
    double time_limit_sec = 0.0;  // 0 = no wall-clock budget; exceeded => best policy so far
    bool seed_incumbent = true;  // prime branch-and-bound with a cheap feasible policy
    bool override_enumeration_guard = false;
};

struct SolveReport {
    lp::Status status = lp::Status::infeasible;
    Policy policy;
    double objective = 0.0;
    EvalReport eval;
    std::string method;
    double gap_epsilon = 0.0;
    double wall_time_sec = 0.0;
    long iterations = 0;
    long nodes = 0;
};

struct BseResult {
    lp::Status status = lp::Status::infeasible;
    std::optional<MixedStrategy> strategy;
    std::vector<int> induced_actions;  // one per type, in declaration order
    double value = 0.0;
    long iterations = 0;
    long nodes = 0;
};

// 2 * (max |payoff|) + 1, the smallest constant that safely deactivates the
// indicator constraints of the policy programs.
inline double big_m_follower(const Game& g) { return 2.0 * g.max_abs_follower_payoff() + 1.0; }
inline double big_m_leader(const Game& g) { return 2.0 * g.max_abs_leader_payoff() + 1.0; }

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
private:
    std::chrono::steady_clock::time_point start_;
};

// Sanitizes an LP-round-off strategy vector into a valid simplex point.
inline MixedStrategy recover_strategy(Eigen::VectorXd v) {
    for (int i = 0; i < v.size(); ++i) v[i] = std::max(v[i], 0.0);
    double s = v.sum();
    if (s <= 0.0) throw std::runtime_error("recovered strategy has zero mass");
    return MixedStrategy(v / s);
}

}  // namespace detail

// --- SSE -------------------------------------------------------------------

// Multiple-LP method: one LP per candidate induced action, ties across
// actions broken toward the smallest index.
inline std::pair<Outcome, double> solve_sse(const Game& g, const std::string& type_id) {
    const int m = g.num_leader_actions(), n = g.num_follower_actions();
    const auto& payoff = g.types[g.type_index(type_id)].payoff;

    std::optional<Outcome> best;
    double best_value = -lp::kInf;
    for (int j = 0; j < n; ++j) {
        lp::Model model(m);
        model.sense = lp::Sense::maximize;
        model.objective = g.leader_payoff.col(j);
        for (int i = 0; i < m; ++i) model.upper[i] = 1.0;
        model.add_constraint(Eigen::VectorXd::Ones(m), lp::Relation::eq, 1.0);
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            model.add_constraint(payoff.col(j) - payoff.col(k), lp::Relation::ge, 0.0);
        }
        auto sol = lp::solve_lp(model);
        if (sol.status != lp::Status::optimal) continue;
        if (sol.objective_value > best_value + 1e-9) {
            best_value = sol.objective_value;
            best = Outcome{detail::recover_strategy(sol.values), j};
        }
    }
    if (!best) throw std::runtime_error("solve_sse: no inducible action (unreachable)");
    return {*best, best_value};
}

// --- Truthful menu ---------------------------------------------------------

inline Policy truthful_menu(const Game& g) {
    Policy sigma;
    for (const auto& t : g.types)
        sigma.entries.emplace(t.id, Mixture(solve_sse(g, t.id).first));
    return sigma;
}

// Prior-weighted sum of the per-type SSE values (the no-deception optimum).
inline double truthful_value(const Game& g) {
    double v = 0.0;
    for (const auto& t : g.types) v += t.prior * solve_sse(g, t.id).second;
    return v;
}

// The truthful menu played against a strategically reporting follower.
inline double deceitful_value(const Game& g) {
    return evaluate_policy(g, truthful_menu(g)).total_leader_utility;
}

// --- BSE -------------------------------------------------------------------

// One shared strategy, per-type binary response selection, products
// linearized through xt[t][j][i] = p[t][j] * x[i].
inline BseResult solve_bse(const Game& g, const SolverOptions& opts = {}) {
    const int m = g.num_leader_actions(), n = g.num_follower_actions(), T = g.num_types();
    const int vx = 0, vp = m, vxt = m + T * n, vv = m + T * n + T * n * m;
    const int num_vars = vv + T;
    auto p_at = [&](int t, int j) { return vp + t * n + j; };
    auto xt_at = [&](int t, int j, int i) { return vxt + (t * n + j) * m + i; };

    lp::Model model(num_vars);
    model.sense = lp::Sense::maximize;
    for (int i = 0; i < m; ++i) model.upper[vx + i] = 1.0;
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < n; ++j) {
            model.set_binary(p_at(t, j));
            for (int i = 0; i < m; ++i) model.upper[xt_at(t, j, i)] = 1.0;
        }

    for (int t = 0; t < T; ++t)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < m; ++i)
                model.objective[xt_at(t, j, i)] = g.types[t].prior * g.leader_payoff(i, j);

    Eigen::VectorXd row = Eigen::VectorXd::Zero(num_vars);
    for (int i = 0; i < m; ++i) row[vx + i] = 1.0;
    model.add_constraint(row, lp::Relation::eq, 1.0);

    for (int t = 0; t < T; ++t) {
        row.setZero();
        for (int j = 0; j < n; ++j) row[p_at(t, j)] = 1.0;
        model.add_constraint(row, lp::Relation::eq, 1.0);
        for (int j = 0; j < n; ++j) {
            row.setZero();
            for (int i = 0; i < m; ++i) row[xt_at(t, j, i)] = 1.0;
            row[p_at(t, j)] = -1.0;
            model.add_constraint(row, lp::Relation::eq, 0.0);
        }
        // With exactly one p[t][j] = 1 per type, the aggregated link forces
        // xt[t][j] = x for the selected column and 0 elsewhere.
        for (int i = 0; i < m; ++i) {
            row.setZero();
            for (int j = 0; j < n; ++j) row[xt_at(t, j, i)] = 1.0;
            row[vx + i] = -1.0;
            model.add_constraint(row, lp::Relation::eq, 0.0);
        }
        // Best response via the auxiliary value v[t] = max_k u_t(x, k): the
        // selected column must attain it, enforced with a big-M on p[t][j].
        // The tightest valid constant per column is the gap between the
        // type's best payoff anywhere and its worst payoff in that column.
        const auto& uf = g.types[t].payoff;
        double fhi = uf.maxCoeff();
        model.lower[vv + t] = uf.minCoeff();
        model.upper[vv + t] = fhi;
        for (int k = 0; k < n; ++k) {
            row.setZero();
            row[vv + t] = 1.0;
            for (int i = 0; i < m; ++i) row[vx + i] = -uf(i, k);
            model.add_constraint(row, lp::Relation::ge, 0.0);
        }
        for (int j = 0; j < n; ++j) {
            double mj = opts.big_m_override > 0 ? opts.big_m_override
                                                : fhi - uf.col(j).minCoeff();
            row.setZero();
            row[vv + t] = 1.0;
            for (int i = 0; i < m; ++i) row[vx + i] = -uf(i, j);
            row[p_at(t, j)] = mj;
            model.add_constraint(row, lp::Relation::le, mj);
        }
    }

    lp::Options lp_opts;
    lp_opts.node_limit = opts.node_limit;
    auto sol = lp::solve_milp(model, lp_opts);
    BseResult result;
    result.status = sol.status;
    result.iterations = sol.iterations;
    result.nodes = sol.nodes_explored;
    if (sol.status != lp::Status::optimal && sol.values.size() == 0) return result;
    result.strategy = detail::recover_strategy(sol.values.segment(vx, m));
    for (int t = 0; t < T; ++t) {
        int pick = 0;
        for (int j = 1; j < n; ++j)
            if (sol.values[p_at(t, j)] > sol.values[p_at(t, pick)]) pick = j;
        result.induced_actions.push_back(pick);
    }
    result.value = sol.objective_value;
    return result;
}

// The constant-strategy policy induced by a BSE solution; IC by construction.
inline Policy policy_from_bse(const Game& g, const BseResult& bse) {
    if (!bse.strategy) throw std::invalid_argument("policy_from_bse: no strategy in result");
    Policy sigma;
    for (int t = 0; t < g.num_types(); ++t)
        sigma.entries.emplace(g.types[t].id,
                              Mixture(Outcome{*bse.strategy, bse.induced_actions[t]}));
    return sigma;
}

// --- Optimal policy MILP (pure/mixed, with/without IC) ---------------------

namespace detail {

struct OptLayout {
    int m, n, T;
    bool mixed, ic;
    int v_mu_pos, v_mu_neg, v_x, v_y, v_p, v_xt, v_vbr, v_w, v_fw;
    int num_vars;

    OptLayout(const Game& g, bool mixed_, bool ic_) {
        m = g.num_leader_actions();
        n = g.num_follower_actions();
        T = g.num_types();
        mixed = mixed_;
        ic = ic_;
        v_mu_pos = 0;
        v_mu_neg = T;
        v_x = 2 * T;
        v_y = v_x + (mixed ? 0 : T * m);
        v_p = v_y + T * T;
        v_xt = v_p + T * n;
        v_vbr = v_xt + T * n * m;
        v_w = v_vbr + (mixed ? 0 : T);
        v_fw = v_w + (ic ? 0 : T * T);
        num_vars = v_fw + ((mixed || ic) ? 0 : T * T);
    }
    int mu_pos(int t) const { return v_mu_pos + t; }
    int mu_neg(int t) const { return v_mu_neg + t; }
    int x(int t, int i) const { return v_x + t * m + i; }
    int y(int t, int b) const { return v_y + t * T + b; }
    int p(int t, int j) const { return v_p + t * n + j; }
    int xt(int t, int j, int i) const { return v_xt + (t * n + j) * m + i; }
    int vbr(int t) const { return v_vbr + t; }
    int w(int t, int b) const { return v_w + t * T + b; }
    int fw(int t, int b) const { return v_fw + t * T + b; }
};

inline lp::Model build_opt_model(const Game& g, const OptLayout& L, double eps,
                                 double m_override = 0.0) {
    lp::Model model(L.num_vars);
    model.sense = lp::Sense::maximize;
    const int m = L.m, n = L.n, T = L.T;
    // Tightest valid big-M constants unless the caller overrides: the leader
    // rows only ever span the leader payoff range, the follower rows the
    // per-type payoff range (plus the robustness margin).
    double l_range = g.leader_payoff.maxCoeff() - g.leader_payoff.minCoeff();
    double ml_t = m_override > 0 ? m_override : l_range;
    auto mf_t = [&](int t) {
        if (m_override > 0) return m_override;
        return g.types[t].payoff.maxCoeff() - g.types[t].payoff.minCoeff() + eps;
    };

    double mu_cap = g.max_abs_leader_payoff() + 1.0;
    for (int t = 0; t < T; ++t) {
        model.upper[L.mu_pos(t)] = mu_cap;
        model.upper[L.mu_neg(t)] = mu_cap;
        model.objective[L.mu_pos(t)] = g.types[t].prior;
        model.objective[L.mu_neg(t)] = -g.types[t].prior;
    }
    if (!L.mixed)
        for (int t = 0; t < T; ++t)
            for (int i = 0; i < m; ++i) model.upper[L.x(t, i)] = 1.0;
    for (int t = 0; t < T; ++t)
        for (int b = 0; b < T; ++b) {
            if (L.ic) {  // truthful reporting pinned; the y block becomes constants
                model.lower[L.y(t, b)] = model.upper[L.y(t, b)] = (t == b) ? 1.0 : 0.0;
            } else {
                model.set_binary(L.y(t, b));
            }
        }
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < n; ++j) {
            if (L.mixed) model.upper[L.p(t, j)] = 1.0;
            else model.set_binary(L.p(t, j));
            for (int i = 0; i < m; ++i) model.upper[L.xt(t, j, i)] = 1.0;
        }

    Eigen::VectorXd row = Eigen::VectorXd::Zero(L.num_vars);
    auto reset = [&] { row.setZero(); };

    for (int t = 0; t < T; ++t) {
        // simplex sums
        if (!L.mixed) {
            reset();
            for (int i = 0; i < m; ++i) row[L.x(t, i)] = 1.0;
            model.add_constraint(row, lp::Relation::eq, 1.0);
        }
        reset();
        for (int j = 0; j < n; ++j) row[L.p(t, j)] = 1.0;
        model.add_constraint(row, lp::Relation::eq, 1.0);
        if (!L.ic) {
            reset();
            for (int b = 0; b < T; ++b) row[L.y(t, b)] = 1.0;
            model.add_constraint(row, lp::Relation::eq, 1.0);
        }
        // linearization: sum_i xt[t][j][i] = p[t][j]
        for (int j = 0; j < n; ++j) {
            reset();
            for (int i = 0; i < m; ++i) row[L.xt(t, j, i)] = 1.0;
            row[L.p(t, j)] = -1.0;
            model.add_constraint(row, lp::Relation::eq, 0.0);
        }
        // Pure mode: x[t] is shared across columns.  Since exactly one binary
        // p[t][j] is 1, the aggregated link pins xt[t][j] = x[t] for the
        // selected column and 0 elsewhere.
        if (!L.mixed) {
            for (int i = 0; i < m; ++i) {
                reset();
                for (int j = 0; j < n; ++j) row[L.xt(t, j, i)] = 1.0;
                row[L.x(t, i)] = -1.0;
                model.add_constraint(row, lp::Relation::eq, 0.0);
            }
        }
        // Induced-action optimality, strengthened by eps when robust.  With a
        // shared per-type strategy and exact optimality, the compact form via
        // the auxiliary value vbr[t] = max_k u_t(x_t, k) uses 2n rows instead
        // of n(n-1); the selected column must attain the max, enforced with a
        // big-M on p[t][j].  The strict-margin variant needs the pairwise
        // rows, as does mixed mode where each column has its own strategy.
        if (!L.mixed && eps == 0.0) {
            const auto& uf = g.types[t].payoff;
            double fhi = uf.maxCoeff();
            model.lower[L.vbr(t)] = uf.minCoeff();
            model.upper[L.vbr(t)] = fhi;
            for (int k = 0; k < n; ++k) {
                reset();
                row[L.vbr(t)] = 1.0;
                for (int i = 0; i < m; ++i) row[L.x(t, i)] = -uf(i, k);
                model.add_constraint(row, lp::Relation::ge, 0.0);
            }
            for (int j = 0; j < n; ++j) {
                double mj = m_override > 0 ? m_override : fhi - uf.col(j).minCoeff();
                reset();
                row[L.vbr(t)] = 1.0;
                for (int i = 0; i < m; ++i) row[L.x(t, i)] = -uf(i, j);
                row[L.p(t, j)] = mj;
                model.add_constraint(row, lp::Relation::le, mj);
            }
        } else {
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    if (k == j) continue;
                    reset();
                    for (int i = 0; i < m; ++i)
                        row[L.xt(t, j, i)] = g.types[t].payoff(i, j) - g.types[t].payoff(i, k);
                    if (eps > 0.0) row[L.p(t, j)] = -eps;
                    model.add_constraint(row, lp::Relation::ge, 0.0);
                }
        }
    }

    // mu_t bounded by the leader value of the report the type selects.  With
    // truthful reporting pinned that is a single direct row per type; in the
    // strategic case mu_t = min_ul + sum_b w_tb with w_tb capped both by
    // y_tb * range and by the (shifted) leader value of entry b, which is
    // exact at integer y and far tighter in relaxation than a big-M row.
    double l_lo = g.leader_payoff.minCoeff();
    if (L.ic) {
        for (int t = 0; t < T; ++t) {
            reset();
            row[L.mu_pos(t)] = 1.0;
            row[L.mu_neg(t)] = -1.0;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < m; ++i)
                    row[L.xt(t, j, i)] = -g.leader_payoff(i, j);
            model.add_constraint(row, lp::Relation::le, 0.0);
        }
    } else {
        for (int t = 0; t < T; ++t) {
            reset();
            row[L.mu_pos(t)] = 1.0;
            row[L.mu_neg(t)] = -1.0;
            for (int b = 0; b < T; ++b) row[L.w(t, b)] = -1.0;
            model.add_constraint(row, lp::Relation::eq, l_lo);
            for (int b = 0; b < T; ++b) {
                model.upper[L.w(t, b)] = ml_t;
                reset();
                row[L.w(t, b)] = 1.0;
                row[L.y(t, b)] = -ml_t;
                model.add_constraint(row, lp::Relation::le, 0.0);
                reset();
                row[L.w(t, b)] = 1.0;
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < m; ++i)
                        row[L.xt(b, j, i)] = -(g.leader_payoff(i, j) - l_lo);
                model.add_constraint(row, lp::Relation::le, 0.0);
            }
        }
    }

    // The selected report is follower-optimal (strictly, by eps, when robust).
    if (L.ic) {
        for (int t = 0; t < T; ++t)
            for (int c = 0; c < T; ++c) {
                if (c == t) continue;
                reset();
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < m; ++i) {
                        row[L.xt(t, j, i)] += g.types[t].payoff(i, j);
                        row[L.xt(c, j, i)] -= g.types[t].payoff(i, j);
                    }
                model.add_constraint(row, lp::Relation::ge, eps);
            }
    } else if (L.mixed) {
        // Big-M form: deactivated unless y[t][b] selects report b for type t.
        for (int t = 0; t < T; ++t)
            for (int b = 0; b < T; ++b)
                for (int c = 0; c < T; ++c) {
                    if (c == b) continue;
                    reset();
                    for (int j = 0; j < n; ++j)
                        for (int i = 0; i < m; ++i) {
                            row[L.xt(b, j, i)] += g.types[t].payoff(i, j);
                            row[L.xt(c, j, i)] -= g.types[t].payoff(i, j);
                        }
                    row[L.y(t, b)] -= mf_t(t);
                    model.add_constraint(row, lp::Relation::ge, eps - mf_t(t));
                }
    } else {
        // Product form: fw[t][b] = y[t][b] * (type-t value of reporting b,
        // shifted to be nonnegative), so sum_b fw[t][b] is the value of the
        // report type t actually selects.  Exact once y is integral, and far
        // tighter than the big-M rows at fractional y.
        for (int t = 0; t < T; ++t) {
            const auto& uf = g.types[t].payoff;
            const double f_lo = uf.minCoeff();
            const double rt = uf.maxCoeff() - f_lo;
            for (int b = 0; b < T; ++b) {
                model.upper[L.fw(t, b)] = rt;
                reset();
                row[L.fw(t, b)] = 1.0;
                row[L.y(t, b)] = -rt;
                model.add_constraint(row, lp::Relation::le, 0.0);
                reset();
                row[L.fw(t, b)] = 1.0;
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < m; ++i)
                        row[L.xt(b, j, i)] = -(uf(i, j) - f_lo);
                model.add_constraint(row, lp::Relation::le, 0.0);
                reset();
                row[L.fw(t, b)] = 1.0;
                row[L.y(t, b)] = -rt;
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < m; ++i)
                        row[L.xt(b, j, i)] -= uf(i, j) - f_lo;
                model.add_constraint(row, lp::Relation::ge, -rt);
            }
            // Selected-report value beats every alternative report by eps
            // (the row is slack for the selected report itself).
            for (int c = 0; c < T; ++c) {
                reset();
                for (int b = 0; b < T; ++b) row[L.fw(t, b)] = 1.0;
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < m; ++i)
                        row[L.xt(c, j, i)] -= uf(i, j) - f_lo;
                row[L.y(t, c)] += eps;
                model.add_constraint(row, lp::Relation::ge, eps);
            }
        }
    }

    return model;
}

// Rebuilds a Policy from an optimal solution vector of the opt model.
inline Policy recover_opt_policy(const Game& g, const OptLayout& L,
                                 const Eigen::VectorXd& v) {
    Policy sigma;
    for (int t = 0; t < L.T; ++t) {
        if (!L.mixed) {
            int j = 0;
            for (int k = 1; k < L.n; ++k)
                if (v[L.p(t, k)] > v[L.p(t, j)]) j = k;
            Eigen::VectorXd x(L.m);
            for (int i = 0; i < L.m; ++i) x[i] = v[L.x(t, i)];
            sigma.entries.emplace(g.types[t].id, Mixture(Outcome{recover_strategy(x), j}));
            continue;
        }
        std::vector<WeightedOutcome> support;
        const auto& payoff = g.types[t].payoff;
        for (int j = 0; j < L.n; ++j) {
            double pj = v[L.p(t, j)];
            if (pj <= 1e-8) continue;
            Eigen::VectorXd x(L.m);
            for (int i = 0; i < L.m; ++i) x[i] = v[L.xt(t, j, i)] / pj;
            MixedStrategy xs = recover_strategy(x);
            // A vanishing-weight outcome may be numerically infeasible after
            // the division; dropping it moves the mixture by < 1e-5.
            Eigen::VectorXd fv = payoff.transpose() * xs.probs();
            if (pj < 1e-5 && fv[j] < fv.maxCoeff() - kTieTol) continue;
            support.push_back({pj, Outcome{std::move(xs), j}});
        }
        sigma.entries.emplace(g.types[t].id, Mixture(std::move(support)));
    }
    return sigma;
}

// Cheap feasible policies used to prime branch-and-bound. For the IC variants
// a constant-strategy menu (best responses to one shared strategy) is IC by
// the same argument as for the BSE policy.
// A policy's value in the sense the opt program optimizes: truthful play
// for the IC variants, strategic (leader-favoring) reporting otherwise.
inline double concept_value(const Game& g, const Policy& sigma, bool ic) {
    if (!ic) return evaluate_policy(g, sigma).total_leader_utility;
    double v = 0.0;
    for (const auto& t : g.types) v += t.prior * leader_value(g, sigma.at(t.id));
    return v;
}

inline std::optional<std::pair<double, Policy>> incumbent_seed(const Game& g, bool ic) {
    Policy candidate = truthful_menu(g);
    if (ic) {
        double best = -lp::kInf;
        std::optional<Policy> best_policy;
        for (const auto& t : g.types) {
            MixedStrategy x = solve_sse(g, t.id).first.strategy;
            Policy sigma;
            for (const auto& u : g.types) {
                auto br = best_responses(g, u.id, x, kValidTol);
                int j = br[0];
                for (int cand : br)
                    if (leader_value(g, x, cand) > leader_value(g, x, j)) j = cand;
                sigma.entries.emplace(u.id, Mixture(Outcome{x, j}));
            }
            double v = concept_value(g, sigma, true);
            if (v > best) { best = v; best_policy = std::move(sigma); }
        }
        if (!best_policy) return std::nullopt;
        candidate = std::move(*best_policy);
    }
    double value = concept_value(g, candidate, ic);
    return std::make_pair(value, std::move(candidate));
}

}  // namespace detail

// Optimal-policy solver over the four variants (pure/mixed x IC/no-IC); with
// mixed + IC the program is a plain LP. epsilon > 0 switches to the robust
// variant with strict optimality gaps; such models can be infeasible.
inline SolveReport solve_opt(const Game& g, bool ic, bool mixed,
                             const SolverOptions& opts = {}) {
    detail::Stopwatch clock;
    const detail::OptLayout layout(g, mixed, ic);
    if (opts.epsilon < 0) throw std::invalid_argument("epsilon must be nonnegative");
    lp::Model model =
        detail::build_opt_model(g, layout, opts.epsilon, opts.big_m_override);

    std::optional<std::pair<double, Policy>> seed;
    lp::Options lp_opts;
    lp_opts.node_limit = opts.node_limit;
    bool is_milp = model.has_binaries();
    if (is_milp && opts.seed_incumbent && opts.epsilon == 0.0 && g.num_types() > 1) {
        seed = detail::incumbent_seed(g, ic);
        if (!ic) {
            // The report-pinned variant is far cheaper and its optimal policy
            // stays feasible here; under strategic evaluation it often beats
            // the truthful-menu seed and it sharpens pruning considerably.
            SolverOptions ic_opts = opts;
            ic_opts.time_limit_sec =
                opts.time_limit_sec > 0 ? opts.time_limit_sec / 3 : 0.0;
            auto ic_report = solve_opt(g, true, mixed, ic_opts);
            if (ic_report.policy.entries.size() == g.types.size()) {
                double v = detail::concept_value(g, ic_report.policy, false);
                if (!seed || v > seed->first)
                    seed = std::make_pair(v, ic_report.policy);
            }
        }
        if (seed) lp_opts.initial_incumbent = seed->first - 1e-9;
    }
    if (is_milp && !ic) {
        // Fractional report selectors blend report values across menu entries,
        // which no polynomial relaxation cuts off; settling them first is what
        // makes the node bounds meaningful.
        lp_opts.branch_priority.assign(layout.num_vars, 0);
        for (int t = 0; t < layout.T; ++t)
            for (int b = 0; b < layout.T; ++b)
                lp_opts.branch_priority[layout.y(t, b)] = 1;
    }
    if (opts.time_limit_sec > 0) {
        lp_opts.time_limit_sec =
            std::max(0.1, opts.time_limit_sec - clock.seconds());
    }

    auto sol = is_milp ? lp::solve_milp(model, lp_opts) : lp::solve_lp(model, lp_opts);

    SolveReport report;
    report.method = std::string(mixed ? "OptX" : "Opt") + (ic ? "IC" : "");
    report.gap_epsilon = opts.epsilon;
    report.iterations = sol.iterations;
    report.nodes = sol.nodes_explored;
    report.status = sol.status;

    if (sol.values.size() == 0 && seed &&
        (sol.status == lp::Status::infeasible ||
         sol.status == lp::Status::iteration_limit)) {
        // Either every node was cut off by the seeded incumbent (the seed is
        // optimal up to the branch-and-bound gap) or the budget ran out before
        // the search beat it; the seed policy is the best known either way.
        if (sol.status == lp::Status::infeasible) report.status = lp::Status::optimal;
        report.policy = seed->second;
        report.objective = seed->first;
    } else if (sol.values.size() > 0) {
        report.policy = detail::recover_opt_policy(g, layout, sol.values);
        report.objective = sol.objective_value;
        if (seed && seed->first > report.objective) {
            report.policy = seed->second;
            report.objective = seed->first;
        }
    } else {
        report.wall_time_sec = clock.seconds();
        return report;  // infeasible (robust variant) or limit with no incumbent
    }

    auto check = validate_policy(g, report.policy, kTieTol);
    if (!check.ok())
        throw std::runtime_error("solve_opt: recovered policy invalid: " + check.to_string());
    report.eval = evaluate_policy(g, report.policy);
    // The program's objective equals the policy's value under truthful play
    // (IC variants) or strategic reporting (otherwise). Strategic evaluation
    // of an IC policy may come out higher when follower indifference lets
    // the leader-favoring report tie-break pick a better entry.
    double truthlike = detail::concept_value(g, report.policy, ic);
    if (opts.epsilon == 0.0 && report.status == lp::Status::optimal &&
        std::abs(report.objective - truthlike) > 1e-5)
        throw std::runtime_error(
            "solve_opt: solver objective " + std::to_string(report.objective) +
            " disagrees with re-evaluation " + std::to_string(truthlike));
    report.wall_time_sec = clock.seconds();
    return report;
}

// Exact oracle: enumerates every feasible indicator assignment (reports, and
// induced actions in the pure case) and solves the residual LP for each.
// Guarded to desk scale; intended as ground truth for tests.
inline SolveReport solve_opt_enumeration(const Game& g, bool ic, bool mixed,
                                         const SolverOptions& opts = {}) {
    detail::Stopwatch clock;
    const int m = g.num_leader_actions(), n = g.num_follower_actions(), T = g.num_types();
    if (!opts.override_enumeration_guard &&
        (T > 4 || (!mixed && n > 4)))
        throw std::invalid_argument(
            "solve_opt_enumeration: instance exceeds the size guard (|types| <= 4, "
            "and actions <= 4 for pure); pass the override to force");

    // All report assignments: reports[t] = b for each true type t.
    std::vector<std::vector<int>> report_combos;
    {
        std::vector<int> cur(T, 0);
        long total = 1;
        for (int t = 0; t < T; ++t) total *= ic ? 1 : T;
        for (long c = 0; c < total; ++c) {
            long rest = c;
            for (int t = 0; t < T; ++t) {
                cur[t] = ic ? t : static_cast<int>(rest % T);
                if (!ic) rest /= T;
            }
            report_combos.push_back(cur);
        }
    }

    SolveReport best;
    best.method = std::string(mixed ? "OptX" : "Opt") + (ic ? "IC" : "") + "-enum";
    best.status = lp::Status::infeasible;
    double best_value = -lp::kInf;
    long lp_count = 0;

    auto consider = [&](const lp::Model& model, auto&& rebuild) {
        auto sol = lp::solve_lp(model);
        ++lp_count;
        best.iterations += sol.iterations;
        if (sol.status != lp::Status::optimal) return;
        if (sol.objective_value > best_value + 1e-12) {
            best_value = sol.objective_value;
            best.policy = rebuild(sol.values);
            best.objective = sol.objective_value;
            best.status = lp::Status::optimal;
        }
    };

    if (!mixed) {
        // Residual LP for fixed reports and fixed induced actions: one
        // strategy per reported type.
        std::vector<int> actions(T, 0);
        long total_actions = 1;
        for (int t = 0; t < T; ++t) total_actions *= n;
        for (const auto& reports : report_combos) {
            for (long ac = 0; ac < total_actions; ++ac) {
                long rest = ac;
                for (int t = 0; t < T; ++t) { actions[t] = static_cast<int>(rest % n); rest /= n; }

                lp::Model model(T * m);
                model.sense = lp::Sense::maximize;
                auto x_at = [&](int t, int i) { return t * m + i; };
                for (int i = 0; i < T * m; ++i) model.upper[i] = 1.0;
                for (int t = 0; t < T; ++t) {
                    int b = reports[t];
                    for (int i = 0; i < m; ++i)
                        model.objective[x_at(b, i)] += g.types[t].prior * g.leader_payoff(i, actions[b]);
                }
                Eigen::VectorXd row = Eigen::VectorXd::Zero(T * m);
                for (int t = 0; t < T; ++t) {
                    row.setZero();
                    for (int i = 0; i < m; ++i) row[x_at(t, i)] = 1.0;
                    model.add_constraint(row, lp::Relation::eq, 1.0);
                    for (int k = 0; k < n; ++k) {
                        if (k == actions[t]) continue;
                        row.setZero();
                        for (int i = 0; i < m; ++i)
                            row[x_at(t, i)] = g.types[t].payoff(i, actions[t]) - g.types[t].payoff(i, k);
                        model.add_constraint(row, lp::Relation::ge, 0.0);
                    }
                    // reports[t] must be a globally optimal report for t
                    int b = reports[t];
                    for (int c = 0; c < T; ++c) {
                        if (c == b) continue;
                        row.setZero();
                        for (int i = 0; i < m; ++i) {
                            row[x_at(b, i)] += g.types[t].payoff(i, actions[b]);
                            row[x_at(c, i)] -= g.types[t].payoff(i, actions[c]);
                        }
                        model.add_constraint(row, lp::Relation::ge, 0.0);
                    }
                }
                consider(model, [&](const Eigen::VectorXd& v) {
                    Policy sigma;
                    for (int t = 0; t < T; ++t)
                        sigma.entries.emplace(
                            g.types[t].id,
                            Mixture(Outcome{detail::recover_strategy(v.segment(t * m, m)),
                                            actions[t]}));
                    return sigma;
                });
            }
        }
    } else {
        // Mixed: only reports are enumerated; p stays continuous in the LP.
        const detail::OptLayout L(g, true, true);  // ic=true drops the y block
        for (const auto& reports : report_combos) {
            lp::Model model(L.num_vars);
            model.sense = lp::Sense::maximize;
            double mu_cap = g.max_abs_leader_payoff() + 1.0;
            for (int t = 0; t < T; ++t) {
                model.upper[L.mu_pos(t)] = mu_cap;
                model.upper[L.mu_neg(t)] = mu_cap;
                for (int b = 0; b < T; ++b) model.upper[L.y(t, b)] = 0.0;  // unused block
                model.objective[L.mu_pos(t)] = g.types[t].prior;
                model.objective[L.mu_neg(t)] = -g.types[t].prior;
                for (int j = 0; j < n; ++j) {
                    model.upper[L.p(t, j)] = 1.0;
                    for (int i = 0; i < m; ++i) model.upper[L.xt(t, j, i)] = 1.0;
                }
            }
            Eigen::VectorXd row = Eigen::VectorXd::Zero(L.num_vars);
            for (int t = 0; t < T; ++t) {
                row.setZero();
                for (int j = 0; j < n; ++j) row[L.p(t, j)] = 1.0;
                model.add_constraint(row, lp::Relation::eq, 1.0);
                for (int j = 0; j < n; ++j) {
                    row.setZero();
                    for (int i = 0; i < m; ++i) row[L.xt(t, j, i)] = 1.0;
                    row[L.p(t, j)] = -1.0;
                    model.add_constraint(row, lp::Relation::eq, 0.0);
                    for (int k = 0; k < n; ++k) {
                        if (k == j) continue;
                        row.setZero();
                        for (int i = 0; i < m; ++i)
                            row[L.xt(t, j, i)] = g.types[t].payoff(i, j) - g.types[t].payoff(i, k);
                        model.add_constraint(row, lp::Relation::ge, 0.0);
                    }
                }
                int b = reports[t];
                row.setZero();
                row[L.mu_pos(t)] = 1.0;
                row[L.mu_neg(t)] = -1.0;
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < m; ++i)
                        row[L.xt(b, j, i)] -= g.leader_payoff(i, j);
                model.add_constraint(row, lp::Relation::le, 0.0);
                for (int c = 0; c < T; ++c) {
                    if (c == b) continue;
                    row.setZero();
                    for (int j = 0; j < n; ++j)
                        for (int i = 0; i < m; ++i) {
                            row[L.xt(b, j, i)] += g.types[t].payoff(i, j);
                            row[L.xt(c, j, i)] -= g.types[t].payoff(i, j);
                        }
                    model.add_constraint(row, lp::Relation::ge, 0.0);
                }
            }
            consider(model, [&](const Eigen::VectorXd& v) {
                return detail::recover_opt_policy(g, L, v);
            });
        }
    }

    best.nodes = lp_count;
    if (best.status == lp::Status::optimal) {
        best.eval = evaluate_policy(g, best.policy);
    }
    best.wall_time_sec = clock.seconds();
    return best;
}

// --- 1/|types| approximation ----------------------------------------------

// For each type, maximizes the leader utility obtained on that type alone by
// steering it toward a chosen report; n^2 LPs per ordered type pair. Returns
// the completed policy of the per-type best, re-evaluated by the game core.
inline SolveReport solve_approx(const Game& g) {
    detail::Stopwatch clock;
    const int m = g.num_leader_actions(), n = g.num_follower_actions(), T = g.num_types();

    struct PairPlan {
        MixedStrategy own;
        int own_action;
        int target;       // reported type index (may equal the true type)
        MixedStrategy target_strategy;
        int target_action;
    };

    double best_score = -lp::kInf;
    std::optional<PairPlan> best_plan;
    int best_type = -1;
    long lp_count = 0, iters = 0;

    for (int t = 0; t < T; ++t) {
        double mu_best = -lp::kInf;
        std::optional<PairPlan> plan;
        for (int b = 0; b < T; ++b) {
            const auto& ut = g.types[t].payoff;
            const auto& ub = g.types[b].payoff;
            for (int jt = 0; jt < n; ++jt)
                for (int jb = 0; jb < n; ++jb) {
                    if (b == t && jb != jt) continue;  // truthful pair collapses to one outcome
                    const bool self = (b == t);
                    const int vars = self ? m : 2 * m;
                    lp::Model model(vars);
                    model.sense = lp::Sense::maximize;
                    for (int i = 0; i < vars; ++i) model.upper[i] = 1.0;
                    const int off_b = self ? 0 : m;
                    for (int i = 0; i < m; ++i) model.objective[off_b + i] = g.leader_payoff(i, jb);
                    Eigen::VectorXd row = Eigen::VectorXd::Zero(vars);
                    for (int i = 0; i < m; ++i) row[i] = 1.0;
                    model.add_constraint(row, lp::Relation::eq, 1.0);
                    if (!self) {
                        row.setZero();
                        for (int i = 0; i < m; ++i) row[off_b + i] = 1.0;
                        model.add_constraint(row, lp::Relation::eq, 1.0);
                    }
                    for (int k = 0; k < n; ++k) {  // (1a) own best response
                        if (k == jt) continue;
                        row.setZero();
                        for (int i = 0; i < m; ++i) row[i] = ut(i, jt) - ut(i, k);
                        model.add_constraint(row, lp::Relation::ge, 0.0);
                    }
                    for (int k = 0; k < n; ++k) {  // (1b) target-type best response
                        if (k == jb) continue;
                        row.setZero();
                        for (int i = 0; i < m; ++i) row[off_b + i] = ub(i, jb) - ub(i, k);
                        model.add_constraint(row, lp::Relation::ge, 0.0);
                    }
                    if (!self) {  // (1c) reporting b beats truthful for type t
                        row.setZero();
                        for (int i = 0; i < m; ++i) {
                            row[off_b + i] += ut(i, jb);
                            row[i] -= ut(i, jt);
                        }
                        model.add_constraint(row, lp::Relation::ge, 0.0);
                    }
                    auto sol = lp::solve_lp(model);
                    ++lp_count;
                    iters += sol.iterations;
                    if (sol.status != lp::Status::optimal) continue;
                    if (sol.objective_value > mu_best + 1e-12) {
                        mu_best = sol.objective_value;
                        MixedStrategy own =
                            detail::recover_strategy(sol.values.segment(0, m));
                        MixedStrategy tgt =
                            self ? own : detail::recover_strategy(sol.values.segment(m, m));
                        plan = PairPlan{std::move(own), jt, b, std::move(tgt), jb};
                    }
                }
        }
        double score = g.types[t].prior * mu_best;
        if (plan && score > best_score + 1e-12) {
            best_score = score;
            best_plan = plan;
            best_type = t;
        }
    }

    if (!best_plan) throw std::runtime_error("solve_approx: no feasible plan (unreachable)");

    // Complete: untargeted reports reuse the true-type strategy with the
    // leader-best action inside the reporting type's best-response set.
    Policy sigma;
    sigma.entries.emplace(g.types[best_type].id,
                          Mixture(Outcome{best_plan->own, best_plan->own_action}));
    if (best_plan->target != best_type)
        sigma.entries.emplace(g.types[best_plan->target].id,
                              Mixture(Outcome{best_plan->target_strategy, best_plan->target_action}));
    for (int b = 0; b < T; ++b) {
        if (b == best_type || b == best_plan->target) continue;
        auto br = best_responses(g, g.types[b].id, best_plan->own, kValidTol);
        int j = br[0];
        for (int cand : br)
            if (leader_value(g, best_plan->own, cand) > leader_value(g, best_plan->own, j))
                j = cand;
        sigma.entries.emplace(g.types[b].id, Mixture(Outcome{best_plan->own, j}));
    }

    SolveReport report;
    report.method = "Approx";
    report.status = lp::Status::optimal;
    report.policy = std::move(sigma);
    report.eval = evaluate_policy(g, report.policy);
    report.objective = report.eval.total_leader_utility;
    report.nodes = lp_count;
    report.iterations = iters;
    report.wall_time_sec = clock.seconds();
    return report;
}

}  // namespace stackdec
