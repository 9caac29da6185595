// Dense LP / MILP engine: bounded-variable revised simplex (two-phase,
// Dantzig pricing with Bland fallback on degeneracy stalls) plus best-first
// branch-and-bound over binary variables.
//
// Scope is desk-sized programs (a few hundred rows/columns). Everything is
// dense and deterministic: identical models give identical solutions.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace stackdec::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;   // post-solve residual tolerance
constexpr double kIntTol = 1e-6;    // binary integrality tolerance
constexpr double kMipGap = 1e-7;    // absolute bound-pruning gap

enum class Sense { maximize, minimize };
enum class Relation { le, ge, eq };
enum class VarKind { continuous, binary };
enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Constraint {
    Eigen::VectorXd coeffs;
    Relation rel = Relation::le;
    double rhs = 0.0;
};

// A model in natural form: objective over num_vars variables, a list of
// linear constraints, per-variable bounds (default [0, inf)), and per-variable
// integrality flags. Lower bounds must be finite; binaries must live in [0,1].
struct Model {
    int num_vars = 0;
    Eigen::VectorXd objective;
    Sense sense = Sense::maximize;
    std::vector<Constraint> constraints;
    std::vector<double> lower, upper;
    std::vector<VarKind> kind;

    explicit Model(int n = 0) { resize(n); }

    void resize(int n) {
        num_vars = n;
        objective = Eigen::VectorXd::Zero(n);
        lower.assign(n, 0.0);
        upper.assign(n, kInf);
        kind.assign(n, VarKind::continuous);
    }

    void add_constraint(const Eigen::VectorXd& coeffs, Relation rel, double rhs) {
        if (coeffs.size() != num_vars)
            throw std::invalid_argument("constraint dimension mismatch");
        constraints.push_back({coeffs, rel, rhs});
    }

    void set_binary(int j) {
        kind.at(j) = VarKind::binary;
        lower[j] = std::max(lower[j], 0.0);
        upper[j] = std::min(upper[j], 1.0);
    }

    void check() const {
        if (objective.size() != num_vars)
            throw std::invalid_argument("objective dimension mismatch");
        for (const auto& c : constraints)
            if (c.coeffs.size() != num_vars)
                throw std::invalid_argument("constraint dimension mismatch");
        for (int j = 0; j < num_vars; ++j) {
            if (!std::isfinite(lower[j]))
                throw std::invalid_argument("lower bounds must be finite");
            if (lower[j] > upper[j] + 1e-12)
                throw std::invalid_argument("lower bound exceeds upper bound");
            if (kind[j] == VarKind::binary && (lower[j] < -1e-12 || upper[j] > 1.0 + 1e-12))
                throw std::invalid_argument("binary variable bounds must be within [0,1]");
        }
    }

    bool has_binaries() const {
        return std::any_of(kind.begin(), kind.end(),
                           [](VarKind k) { return k == VarKind::binary; });
    }
};

struct Solution {
    Status status = Status::infeasible;
    Eigen::VectorXd values;
    double objective_value = 0.0;
    long iterations = 0;
    long nodes_explored = 0;
    // Duals per constraint and reduced costs per variable, in the model's
    // orientation: objective coefficients satisfy c = A^T y + d at optimality.
    Eigen::VectorXd duals;
    Eigen::VectorXd reduced_costs;
};

struct Options {
    long iteration_limit = 0;    // 0 = 100 * (vars + constraints)
    long node_limit = 1000000;
    double time_limit_sec = 0.0;  // 0 = no wall-clock budget
    // Per-variable branching priority (missing entries = 0).  Among fractional
    // binaries, only the highest-priority class is considered for branching.
    std::vector<int> branch_priority;
    double initial_incumbent = -kInf;  // known feasible objective (sense-adjusted: higher is better)
};

// One constraint per line: "<coeffs> <rel> <rhs>". For manual differential
// testing against external solvers.
inline void dump(const Model& m, std::ostream& os) {
    os << (m.sense == Sense::maximize ? "max" : "min");
    for (int j = 0; j < m.num_vars; ++j) os << ' ' << m.objective[j];
    os << '\n';
    for (const auto& c : m.constraints) {
        for (int j = 0; j < m.num_vars; ++j) os << c.coeffs[j] << ' ';
        os << (c.rel == Relation::le ? "<=" : c.rel == Relation::ge ? ">=" : "=")
           << ' ' << c.rhs << '\n';
    }
    for (int j = 0; j < m.num_vars; ++j)
        os << "# bound " << j << " [" << m.lower[j] << ", " << m.upper[j] << "]"
           << (m.kind[j] == VarKind::binary ? " binary" : "") << '\n';
}

namespace detail {

// Bounded-variable revised simplex over the equality form
//   min c.x  s.t.  A x = b,  0 <= x <= u,
// with an explicit dense basis inverse, refactorized periodically.
class Simplex {
public:
    Simplex(const Model& model, const std::vector<double>& lo,
            const std::vector<double>& up, long iteration_limit)
        : model_(model), iter_limit_(iteration_limit) {
        build(lo, up);
    }

    Status run() {
        // Phase 1: minimize the sum of artificials.
        if (phase1_needed_) {
            Status s = iterate(phase1_cost_);
            if (s != Status::optimal) return s;
            double infeas = phase1_cost_.dot(x_);
            if (infeas > kFeasTol) return Status::infeasible;
            // Pin artificials at zero for phase 2.
            for (int j = n_struct_slack_; j < n_total_; ++j) u_[j] = 0.0;
        }
        Status s = iterate(cost_);
        // Shed incremental drift before the caller checks residuals.
        if (s == Status::optimal) refactorize();
        return s;
    }

    // Exports the current basis (and its inverse) so a sibling solve with
    // modified bounds can warm start from it.
    void save_basis(std::vector<int>& basis, std::vector<char>& at_upper,
                    Eigen::MatrixXd* binv = nullptr) const {
        basis = basis_;
        at_upper.assign(n_total_, 0);
        for (int j = 0; j < n_total_; ++j) at_upper[j] = at_upper_[j] ? 1 : 0;
        if (binv) *binv = binv_;
    }

    long pivots() const { return pivots_; }

    // Installs a basis saved from a solve of the same constraint matrix with
    // different bounds. A saved inverse is reused as-is (the matrix columns
    // are bound-independent, so it is still exact); otherwise the basis is
    // refactorized and rejected if numerically unusable.
    bool load_basis(const std::vector<int>& basis, const std::vector<char>& at_upper,
                    const Eigen::MatrixXd* binv = nullptr) {
        if (static_cast<int>(basis.size()) != m_ ||
            static_cast<int>(at_upper.size()) != n_total_)
            return false;
        basis_ = basis;
        row_of_.assign(n_total_, -1);
        for (int i = 0; i < m_; ++i) row_of_[basis_[i]] = i;
        for (int j = 0; j < n_total_; ++j) {
            at_upper_[j] = at_upper[j] && row_of_[j] < 0 && std::isfinite(u_[j]);
            if (row_of_[j] < 0) x_[j] = at_upper_[j] ? u_[j] : 0.0;
        }
        // Artificials are admissible in the basis (pinned at zero) but may
        // never re-enter.
        for (int j = n_struct_slack_; j < n_total_; ++j) u_[j] = 0.0;
        phase1_needed_ = false;
        if (binv && binv->rows() == m_ && binv->cols() == m_) {
            binv_ = *binv;
            recompute_x();
            return true;
        }
        refactorize();
        // Reject singular or badly conditioned bases.
        Eigen::MatrixXd bmat(m_, m_);
        for (int i = 0; i < m_; ++i) bmat.col(i) = a_.col(basis_[i]);
        double err = (bmat * binv_ - Eigen::MatrixXd::Identity(m_, m_))
                         .cwiseAbs()
                         .maxCoeff();
        return err < 1e-7;
    }

    // Dual simplex: from a dual-feasible basis (same costs as the solve that
    // produced it), restores primal feasibility. Used to re-solve cheaply
    // after bound changes in branch and bound.
    Status run_dual() {
        int since_refactor = 0;
        while (true) {
            if (++iters_ > iter_limit_) return Status::iteration_limit;

            // Leaving row: the basic variable with the largest bound violation.
            int r = -1;
            double worst = 1e-9;
            bool above = false;
            for (int i = 0; i < m_; ++i) {
                int bj = basis_[i];
                if (-x_[bj] > worst) { worst = -x_[bj]; r = i; above = false; }
                if (std::isfinite(u_[bj]) && x_[bj] - u_[bj] > worst) {
                    worst = x_[bj] - u_[bj];
                    r = i;
                    above = true;
                }
            }
            // Drift is caught by the caller's residual check on the extracted
            // solution and by periodic refactorization keyed on basis age.
            if (r < 0) return Status::optimal;

            Eigen::VectorXd rho = binv_.row(r).transpose();
            Eigen::VectorXd cb(m_);
            for (int i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
            Eigen::VectorXd y = binv_.transpose() * cb;

            // Entering column: dual ratio test among columns that move the
            // leaving variable toward its violated bound; ties prefer the
            // largest pivot element.
            const double s = above ? -1.0 : 1.0;  // wanted movement of x_[basis_[r]]
            int enter = -1;
            bool enter_from_upper = false;
            double best_ratio = kInf, best_alpha = 0.0;
            for (int j = 0; j < n_total_; ++j) {
                if (row_of_[j] >= 0 || u_[j] == 0.0) continue;
                double alpha = rho.dot(a_.col(j));
                if (std::abs(alpha) <= 1e-7) continue;
                bool from_upper = at_upper_[j];
                double eff = from_upper ? alpha : -alpha;  // d x_r per unit step
                if (eff * s <= 0.0) continue;
                double d = cost_[j] - y.dot(a_.col(j));
                double ratio = std::abs(d) / std::abs(alpha);
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 &&
                     std::abs(alpha) > std::abs(best_alpha))) {
                    best_ratio = ratio;
                    best_alpha = alpha;
                    enter = j;
                    enter_from_upper = from_upper;
                }
            }
            if (enter < 0) return Status::infeasible;

            const double dir = enter_from_upper ? -1.0 : 1.0;
            Eigen::VectorXd w = binv_ * a_.col(enter);
            int leave = basis_[r];
            double target = above ? u_[leave] : 0.0;
            double t = (x_[leave] - target) / (dir * w[r]);
            if (t < 0.0) t = 0.0;

            for (int i = 0; i < m_; ++i) x_[basis_[i]] -= dir * t * w[i];
            x_[enter] = enter_from_upper ? u_[enter] - t : t;
            row_of_[leave] = -1;
            at_upper_[leave] = above;
            x_[leave] = target;
            basis_[r] = enter;
            row_of_[enter] = r;
            at_upper_[enter] = false;

            double piv = w[r];
            ++pivots_;
            binv_.row(r) /= piv;
            for (int i = 0; i < m_; ++i)
                if (i != r) binv_.row(i) -= w[i] * binv_.row(r);

            if (++since_refactor >= 200) { refactorize(); since_refactor = 0; }
        }
    }

    Solution extract() const {
        Solution s;
        s.iterations = iters_;
        s.values = Eigen::VectorXd(model_.num_vars);
        for (int j = 0; j < model_.num_vars; ++j)
            s.values[j] = x_[j] + shift_[j];
        // Duals from the final basis: y = c_B B^{-1}; sign-adjust back to the
        // model sense (internally we always minimize).
        Eigen::VectorXd cb(m_);
        for (int i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
        Eigen::VectorXd y = binv_.transpose() * cb;
        double sg = model_.sense == Sense::maximize ? -1.0 : 1.0;
        s.duals = sg * y;
        s.reduced_costs = Eigen::VectorXd(model_.num_vars);
        for (int j = 0; j < model_.num_vars; ++j)
            s.reduced_costs[j] = sg * (cost_[j] - y.dot(a_.col(j)));
        double obj = 0.0;
        for (int j = 0; j < model_.num_vars; ++j)
            obj += model_.objective[j] * s.values[j];
        s.objective_value = obj;
        return s;
    }

private:
    const Model& model_;
    long iter_limit_;
    long iters_ = 0;
    long pivots_ = 0;

    int m_ = 0;               // rows
    int n_struct_slack_ = 0;  // structural + slack count
    int n_total_ = 0;         // including artificials
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    Eigen::VectorXd cost_, phase1_cost_;
    std::vector<double> u_;
    std::vector<double> shift_;
    bool phase1_needed_ = false;

    std::vector<int> basis_;            // var index per row
    std::vector<int> row_of_;           // row per var, -1 if nonbasic
    std::vector<bool> at_upper_;        // nonbasic status
    Eigen::MatrixXd binv_;
    Eigen::VectorXd x_;                 // all variable values (shifted space)

    void build(const std::vector<double>& lo, const std::vector<double>& up) {
        const int n = model_.num_vars;
        m_ = static_cast<int>(model_.constraints.size());
        int n_slack = 0;
        for (const auto& c : model_.constraints)
            if (c.rel != Relation::eq) ++n_slack;
        n_struct_slack_ = n + n_slack;
        n_total_ = n_struct_slack_ + m_;

        a_ = Eigen::MatrixXd::Zero(m_, n_total_);
        b_ = Eigen::VectorXd::Zero(m_);
        u_.assign(n_total_, kInf);
        shift_.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            shift_[j] = lo[j];
            u_[j] = up[j] - lo[j];
            if (u_[j] < 0) u_[j] = 0;  // conflicting fixings: empty box handled via infeasibility
        }

        double sg = model_.sense == Sense::maximize ? -1.0 : 1.0;
        cost_ = Eigen::VectorXd::Zero(n_total_);
        for (int j = 0; j < n; ++j) cost_[j] = sg * model_.objective[j];

        int slack = n;
        for (int i = 0; i < m_; ++i) {
            const auto& c = model_.constraints[i];
            a_.row(i).head(n) = c.coeffs;
            double rhs = c.rhs - c.coeffs.dot(Eigen::Map<const Eigen::VectorXd>(shift_.data(), n));
            if (c.rel == Relation::le) a_(i, slack) = 1.0, ++slack;
            else if (c.rel == Relation::ge) a_(i, slack) = -1.0, ++slack;
            b_[i] = rhs;
        }

        // Artificial identity basis; columns signed so artificial values are
        // nonnegative at the all-at-lower starting point.
        phase1_cost_ = Eigen::VectorXd::Zero(n_total_);
        basis_.resize(m_);
        row_of_.assign(n_total_, -1);
        at_upper_.assign(n_total_, false);
        x_ = Eigen::VectorXd::Zero(n_total_);
        binv_ = Eigen::MatrixXd::Zero(m_, m_);
        for (int i = 0; i < m_; ++i) {
            int aj = n_struct_slack_ + i;
            double sign = b_[i] >= 0 ? 1.0 : -1.0;
            a_(i, aj) = sign;
            phase1_cost_[aj] = 1.0;
            basis_[i] = aj;
            row_of_[aj] = i;
            x_[aj] = std::abs(b_[i]);
            binv_(i, i) = sign;
            if (x_[aj] > kFeasTol) phase1_needed_ = true;
        }
        if (!phase1_needed_)
            for (int i = 0; i < m_; ++i) u_[n_struct_slack_ + i] = 0.0;
    }

    void refactorize() {
        Eigen::MatrixXd bmat(m_, m_);
        for (int i = 0; i < m_; ++i) bmat.col(i) = a_.col(basis_[i]);
        binv_ = bmat.partialPivLu().inverse();
        recompute_x();
    }

    // Recompute basic values from nonbasic ones to shed drift.
    void recompute_x() {
        Eigen::VectorXd rhs = b_;
        for (int j = 0; j < n_total_; ++j)
            if (row_of_[j] < 0 && x_[j] != 0.0) rhs -= a_.col(j) * x_[j];
        Eigen::VectorXd xb = binv_ * rhs;
        for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
#ifdef STACKDEC_LP_DEBUG
        double worst = 0.0;
        for (int i = 0; i < m_; ++i) {
            int bj = basis_[i];
            worst = std::max(worst, -x_[bj]);
            if (std::isfinite(u_[bj])) worst = std::max(worst, x_[bj] - u_[bj]);
        }
        if (worst > 1e-9)
            std::fprintf(stderr, "refactor at iter %ld: basic infeas %g\n", iters_, worst);
#endif
    }

    Status iterate(const Eigen::VectorXd& c) {
        constexpr double kDualTol = 1e-9;
        constexpr double kPivTol = 1e-9;
        int stall = 0;
        bool bland = false;
        int since_refactor = 0;

        while (true) {
            if (++iters_ > iter_limit_) return Status::iteration_limit;

            Eigen::VectorXd cb(m_);
            for (int i = 0; i < m_; ++i) cb[i] = c[basis_[i]];
            Eigen::VectorXd y = binv_.transpose() * cb;

            int enter = -1;
            double best = kDualTol;
            for (int j = 0; j < n_total_; ++j) {
                if (row_of_[j] >= 0) continue;
                if (u_[j] == 0.0) continue;  // fixed variable, cannot move
                double d = c[j] - y.dot(a_.col(j));
                double viol = at_upper_[j] ? d : -d;
                if (viol > kDualTol) {
                    if (bland) { enter = j; break; }
                    if (viol > best) { best = viol; enter = j; }
                }
            }
            if (enter < 0) return Status::optimal;

            const double dir = at_upper_[enter] ? -1.0 : 1.0;
            Eigen::VectorXd w = binv_ * a_.col(enter);

            // Two-pass (Harris) ratio test: entering variable moves by
            // t >= 0 in direction dir; basic values change by -dir * t * w.
            // Pass 1 finds the largest step allowed when basic bounds are
            // relaxed by kHarrisTol; pass 2 picks, among rows blocking at or
            // before that step, the one with the largest pivot element. This
            // keeps near-singular pivots out of the basis inverse.
            constexpr double kHarrisTol = 1e-8;
            const double flip_limit = std::isfinite(u_[enter]) ? u_[enter] : kInf;
            double tmax = flip_limit;
            for (int i = 0; i < m_; ++i) {
                double delta = dir * w[i];
                int bj = basis_[i];
                if (delta > kPivTol) {
                    tmax = std::min(tmax, (x_[bj] + kHarrisTol) / delta);
                } else if (delta < -kPivTol && std::isfinite(u_[bj])) {
                    tmax = std::min(tmax, (x_[bj] - u_[bj] - kHarrisTol) / delta);
                }
            }
            if (!std::isfinite(tmax)) return Status::unbounded;

            int leave_row = -1;
            bool leave_to_upper = false;
            double step = flip_limit, best_piv = 0.0;
            for (int i = 0; i < m_; ++i) {
                double delta = dir * w[i];
                int bj = basis_[i];
                double t;
                bool to_upper;
                if (delta > kPivTol) {
                    t = x_[bj] / delta;  // basic var heads to lower bound 0
                    to_upper = false;
                } else if (delta < -kPivTol && std::isfinite(u_[bj])) {
                    t = (x_[bj] - u_[bj]) / delta;  // heads to its upper bound
                    to_upper = true;
                } else {
                    continue;
                }
                if (t < 0.0) t = 0.0;
                if (t <= tmax && std::abs(delta) > best_piv) {
                    best_piv = std::abs(delta);
                    leave_row = i;
                    leave_to_upper = to_upper;
                    step = t;
                }
            }
            if (leave_row >= 0 && step > flip_limit) leave_row = -1;
            if (leave_row < 0) step = flip_limit;

            // Apply the step.
            for (int i = 0; i < m_; ++i) x_[basis_[i]] -= dir * step * w[i];
            x_[enter] = at_upper_[enter] ? u_[enter] - step : step;

            if (step <= 1e-11) { if (++stall >= 50) bland = true; }
            else { stall = 0; bland = false; }

            if (leave_row < 0) {
                at_upper_[enter] = !at_upper_[enter];  // bound flip
                continue;
            }

            int leave = basis_[leave_row];
            row_of_[leave] = -1;
            at_upper_[leave] = leave_to_upper;
            x_[leave] = leave_to_upper ? u_[leave] : 0.0;
            basis_[leave_row] = enter;
            row_of_[enter] = leave_row;
            at_upper_[enter] = false;

            double piv = w[leave_row];
#ifdef STACKDEC_LP_DEBUG
            if (std::abs(piv) < 1e-6)
                std::fprintf(stderr, "iter %ld: tiny pivot %g (enter %d leave %d t %g)\n",
                             iters_, piv, enter, leave, tmax);
#endif
            ++pivots_;
            binv_.row(leave_row) /= piv;
            for (int i = 0; i < m_; ++i)
                if (i != leave_row) binv_.row(i) -= w[i] * binv_.row(leave_row);

            if (++since_refactor >= 200) { refactorize(); since_refactor = 0; }
        }
    }
};

inline double residual(const Model& m, const Eigen::VectorXd& x) {
    double worst = 0.0;
    for (const auto& c : m.constraints) {
        double v = c.coeffs.dot(x);
        double r = 0.0;
        if (c.rel == Relation::le) r = v - c.rhs;
        else if (c.rel == Relation::ge) r = c.rhs - v;
        else r = std::abs(v - c.rhs);
        worst = std::max(worst, r);
    }
    for (int j = 0; j < m.num_vars; ++j) {
        worst = std::max(worst, m.lower[j] - x[j]);
        if (std::isfinite(m.upper[j])) worst = std::max(worst, x[j] - m.upper[j]);
    }
    return worst;
}

}  // namespace detail

inline Solution solve_lp(const Model& model, const Options& opts = {}) {
    model.check();
    if (model.has_binaries())
        throw std::invalid_argument("solve_lp: model has binary variables");
    long limit = opts.iteration_limit > 0
                     ? opts.iteration_limit
                     : 100L * (model.num_vars + static_cast<long>(model.constraints.size()));
    detail::Simplex simplex(model, model.lower, model.upper, limit);
    Status st = simplex.run();
    Solution sol;
    if (st == Status::optimal) {
        sol = simplex.extract();
        if (detail::residual(model, sol.values) > kFeasTol)
            throw std::runtime_error("solve_lp: optimal solution violates feasibility tolerance");
    } else {
        sol.iterations = 0;
    }
    sol.status = st;
    return sol;
}

// Best-first branch-and-bound on the most-fractional binary variable, with
// LP-relaxation bound pruning. Deterministic given the model.
inline Solution solve_milp(const Model& model, const Options& opts = {}) {
    model.check();
    if (!model.has_binaries()) return solve_lp(model, opts);

    const double sg = model.sense == Sense::maximize ? 1.0 : -1.0;
    long lp_limit = opts.iteration_limit > 0
                        ? opts.iteration_limit
                        : 100L * (model.num_vars + static_cast<long>(model.constraints.size()));

    struct Basis {
        std::vector<int> rows;
        std::vector<char> at_upper;
        Eigen::MatrixXd binv;  // may be empty: refactorize on load instead
        long age = 0;          // pivots since the inverse was last factored
    };
    struct Node {
        double bound;  // sense-adjusted optimistic estimate (higher better)
        long seq;
        std::vector<std::pair<int, int>> fixes;  // (var, 0 or 1)
        std::shared_ptr<const Basis> start;      // parent's optimal basis
        int branch_var = -1;      // the fix added relative to the parent
        int branch_dir = 0;       // 0 = rounded down, 1 = rounded up
        double branch_frac = 0.0; // fractional part at the parent optimum
        bool operator<(const Node& o) const {
            return bound != o.bound ? bound < o.bound : seq > o.seq;
        }
    };

    const auto t_start = std::chrono::steady_clock::now();
    std::priority_queue<Node> open;
    open.push({kInf, 0, {}, nullptr});
    long seq = 1, nodes = 0, total_iters = 0;

    // Pseudo-costs: per binary and direction, the observed average bound
    // degradation per unit of fractional distance. Untrained variables score
    // with unit cost, which reduces to most-fractional selection.
    std::vector<double> pc_sum_dn(model.num_vars, 0.0), pc_sum_up(model.num_vars, 0.0);
    std::vector<long> pc_cnt_dn(model.num_vars, 0), pc_cnt_up(model.num_vars, 0);

    bool have_incumbent = false;
    double best = opts.initial_incumbent;  // sense-adjusted
    Solution incumbent;

    Model node_model = model;
    for (auto& k : node_model.kind) k = VarKind::continuous;

    // Best-first over the queue, but after branching the child on the side
    // the LP optimum leans toward is solved immediately ("plunging"): it
    // reuses the just-computed basis and reaches integer incumbents early.
    Status final_status = Status::infeasible;
    std::optional<Node> plunge;
    while (plunge || !open.empty()) {
        Node node;
        if (plunge) {
            node = std::move(*plunge);
            plunge.reset();
        } else {
            node = open.top();
            open.pop();
        }
        if (node.bound <= best + kMipGap) continue;
        if (nodes >= opts.node_limit ||
            (opts.time_limit_sec > 0.0 &&
             std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                           t_start).count() > opts.time_limit_sec)) {
            final_status = Status::iteration_limit;
            break;
        }
        ++nodes;

        for (int j = 0; j < model.num_vars; ++j) {
            node_model.lower[j] = model.lower[j];
            node_model.upper[j] = model.upper[j];
        }
        for (auto [v, val] : node.fixes) {
            node_model.lower[v] = val;
            node_model.upper[v] = val;
        }

        // Warm start from the parent's optimal basis when available; the
        // child differs only in one variable's bounds, so the basis stays
        // dual feasible and a few dual pivots restore primal feasibility.
        // Any numerical trouble falls back to a cold solve.
        Solution rel;
        std::shared_ptr<Basis> solved_basis;
        bool need_cold = true;
        if (node.start) {
            detail::Simplex warm(node_model, node_model.lower, node_model.upper,
                                 lp_limit);
            // Reuse the saved inverse while fresh; refactorize stale bases.
            const Eigen::MatrixXd* binv =
                node.start->binv.size() > 0 && node.start->age < 100
                    ? &node.start->binv
                    : nullptr;
            if (warm.load_basis(node.start->rows, node.start->at_upper, binv)) {
                Status st = warm.run_dual();
                total_iters += warm.pivots();
                if (st == Status::optimal) {
                    Solution cand = warm.extract();
                    if (detail::residual(node_model, cand.values) <= kFeasTol) {
                        rel = std::move(cand);
                        rel.status = Status::optimal;
                        solved_basis = std::make_shared<Basis>();
                        warm.save_basis(solved_basis->rows, solved_basis->at_upper,
                                        &solved_basis->binv);
                        solved_basis->age =
                            (binv ? node.start->age : 0) + warm.pivots();
                        need_cold = false;
                    }
                } else if (st == Status::infeasible) {
                    rel.status = Status::infeasible;
                    need_cold = false;
                }
            }
        }
        if (need_cold) {
            detail::Simplex cold(node_model, node_model.lower, node_model.upper,
                                 lp_limit);
            Status st = cold.run();
            if (st == Status::optimal) {
                rel = cold.extract();
                if (detail::residual(node_model, rel.values) > kFeasTol)
                    throw std::runtime_error(
                        "solve_milp: node relaxation violates feasibility tolerance");
                solved_basis = std::make_shared<Basis>();
                cold.save_basis(solved_basis->rows, solved_basis->at_upper,
                                &solved_basis->binv);
                solved_basis->age = 0;
            }
            rel.status = st;
            total_iters += rel.iterations;
        }
        if (rel.status == Status::unbounded) {
            // An unbounded relaxation makes the MILP unbounded or infeasible;
            // at our big-M formulations this does not occur. Treat as fatal.
            throw std::runtime_error("solve_milp: unbounded LP relaxation");
        }
        if (rel.status != Status::optimal) continue;
        double bound = sg * rel.objective_value;

        // Train the branched variable's pseudo-cost with the observed bound
        // degradation relative to the parent.
        if (node.branch_var >= 0 && std::isfinite(node.bound)) {
            double dist = node.branch_dir ? 1.0 - node.branch_frac : node.branch_frac;
            if (dist > 1e-6) {
                double unit = std::max(0.0, node.bound - bound) / dist;
                if (node.branch_dir) {
                    pc_sum_up[node.branch_var] += unit;
                    ++pc_cnt_up[node.branch_var];
                } else {
                    pc_sum_dn[node.branch_var] += unit;
                    ++pc_cnt_dn[node.branch_var];
                }
            }
        }
        if (bound <= best + kMipGap) continue;

        // Branching variable: the largest pseudo-cost score among fractional
        // binaries, ties by variable index.
        int branch = -1, prio_best = std::numeric_limits<int>::min();
        double score_best = -1.0, frac_branch = 0.0;
        for (int j = 0; j < model.num_vars; ++j) {
            if (model.kind[j] != VarKind::binary) continue;
            double f = rel.values[j] - std::floor(rel.values[j]);
            double dist = std::min(f, 1.0 - f);
            if (dist <= kIntTol) continue;
            int prio = j < (int)opts.branch_priority.size() ? opts.branch_priority[j] : 0;
            if (prio < prio_best) continue;
            if (prio > prio_best) { prio_best = prio; score_best = -1.0; branch = -1; }
            double cd = pc_cnt_dn[j] ? pc_sum_dn[j] / pc_cnt_dn[j] : 1.0;
            double cu = pc_cnt_up[j] ? pc_sum_up[j] / pc_cnt_up[j] : 1.0;
            double dn = cd * f, up = cu * (1.0 - f);
            // The fractionality term keeps every fractional binary surfaced
            // even when its trained degradation is zero.
            double score = std::min(dn, up) + 1e-6 * std::max(dn, up) + 1e-6 * dist;
            if (score > score_best + 1e-12) {
                score_best = score;
                branch = j;
                frac_branch = f;
            }
        }

        if (branch < 0) {
            if (!have_incumbent || bound > best) {
                best = bound;
                incumbent = rel;
                have_incumbent = true;
            }
            continue;
        }

        // Cap memory held by saved inverses when the frontier grows large;
        // children then refactorize from the basis indices instead.
        // Stored inverses dominate memory on wide frontiers; beyond this depth
        // children refactorize from the basis index lists instead.
        if (solved_basis && open.size() > 500) solved_basis->binv.resize(0, 0);
        Node kids[2];
        for (int val : {0, 1}) {
            Node child{bound, seq++, node.fixes, solved_basis,
                       branch,  val,   frac_branch};
            child.fixes.emplace_back(branch, val);
            kids[val] = std::move(child);
        }
        int dive = frac_branch >= 0.5 ? 1 : 0;
        open.push(std::move(kids[1 - dive]));
        plunge = std::move(kids[dive]);
    }

    if (final_status != Status::iteration_limit) final_status = Status::optimal;
    if (!have_incumbent) {
        Solution sol;
        sol.status = final_status == Status::iteration_limit ? Status::iteration_limit
                                                            : Status::infeasible;
        sol.nodes_explored = nodes;
        sol.iterations = total_iters;
        return sol;
    }
    incumbent.status = final_status;
    incumbent.nodes_explored = nodes;
    incumbent.iterations = total_iters;
    return incumbent;
}

}  // namespace stackdec::lp
