// Game representation and policy arithmetic for Bayesian Stackelberg games
// with type-reporting followers: best-response sets, report incentives,
// policy validity/evaluation, and support compression of outcome mixtures.
//
// Conventions: leader actions (rows) and follower actions (columns) are
// 0-based; follower types are addressed by string id and keep their
// declaration order, which is also the final tie-break order everywhere.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stackdec {

constexpr double kValidTol = 1e-9;  // construction / validation tolerance
constexpr double kTieTol = 1e-6;    // utility-comparison tolerance for tie detection

struct FollowerType {
    std::string id;
    double prior = 0.0;
    Eigen::MatrixXd payoff;  // m x n
};

struct Game {
    Eigen::MatrixXd leader_payoff;  // m x n
    std::vector<FollowerType> types;
    std::string name;

    Game() = default;
    Game(Eigen::MatrixXd leader, std::vector<FollowerType> follower_types,
         std::string label = {})
        : leader_payoff(std::move(leader)), types(std::move(follower_types)),
          name(std::move(label)) {
        validate();
    }

    int num_leader_actions() const { return static_cast<int>(leader_payoff.rows()); }
    int num_follower_actions() const { return static_cast<int>(leader_payoff.cols()); }
    int num_types() const { return static_cast<int>(types.size()); }

    int type_index(const std::string& id) const {
        for (int t = 0; t < num_types(); ++t)
            if (types[t].id == id) return t;
        throw std::invalid_argument("unknown follower type id: " + id);
    }

    double max_abs_follower_payoff() const {
        double v = 0.0;
        for (const auto& t : types) v = std::max(v, t.payoff.cwiseAbs().maxCoeff());
        return v;
    }
    double max_abs_leader_payoff() const { return leader_payoff.cwiseAbs().maxCoeff(); }

    void validate() const {
        const int m = num_leader_actions(), n = num_follower_actions();
        if (m < 1 || n < 1) throw std::invalid_argument("game needs at least one action per player");
        if (types.empty()) throw std::invalid_argument("game needs at least one follower type");
        if (!leader_payoff.allFinite()) throw std::invalid_argument("leader payoffs must be finite");
        double prior_sum = 0.0;
        for (const auto& t : types) {
            if (t.payoff.rows() != m || t.payoff.cols() != n)
                throw std::invalid_argument("type " + t.id + ": payoff dimensions mismatch");
            if (!t.payoff.allFinite())
                throw std::invalid_argument("type " + t.id + ": payoffs must be finite");
            if (t.prior < 0.0 || t.prior > 1.0 + kValidTol)
                throw std::invalid_argument("type " + t.id + ": prior out of [0,1]");
            prior_sum += t.prior;
        }
        if (std::abs(prior_sum - 1.0) > kValidTol)
            throw std::invalid_argument("type priors must sum to 1");
        for (int a = 0; a < num_types(); ++a)
            for (int b = a + 1; b < num_types(); ++b)
                if (types[a].id == types[b].id)
                    throw std::invalid_argument("duplicate type id: " + types[a].id);
    }
};

// A point of the leader's strategy simplex. Entries within -1e-12 of zero are
// clamped; the vector is renormalized to absorb round-off.
class MixedStrategy {
public:
    explicit MixedStrategy(Eigen::VectorXd probs) : probs_(std::move(probs)) {
        if (probs_.size() < 1) throw std::invalid_argument("empty strategy vector");
        for (int i = 0; i < probs_.size(); ++i) {
            if (!(probs_[i] >= -1e-12))
                throw std::invalid_argument("strategy entry below -1e-12");
            if (probs_[i] < 0.0) probs_[i] = 0.0;
        }
        double s = probs_.sum();
        if (std::abs(s - 1.0) > kValidTol)
            throw std::invalid_argument("strategy entries must sum to 1");
        probs_ /= s;
    }

    static MixedStrategy pure(int action, int m) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
        v[action] = 1.0;
        return MixedStrategy(std::move(v));
    }

    const Eigen::VectorXd& probs() const { return probs_; }
    int size() const { return static_cast<int>(probs_.size()); }
    double operator[](int i) const { return probs_[i]; }

private:
    Eigen::VectorXd probs_;
};

struct Outcome {
    MixedStrategy strategy;
    int induced_action = 0;
};

struct WeightedOutcome {
    double weight = 1.0;
    Outcome outcome;
};

// A distribution over outcomes prescribed for one reported type. Zero-weight
// outcomes are dropped on construction.
class Mixture {
public:
    Mixture(std::vector<WeightedOutcome> entries) {
        double s = 0.0;
        for (auto& e : entries) {
            if (e.weight < -1e-12) throw std::invalid_argument("negative mixture weight");
            if (e.weight <= 0.0) continue;
            s += e.weight;
            support_.push_back(std::move(e));
        }
        if (support_.empty()) throw std::invalid_argument("mixture has empty support");
        if (std::abs(s - 1.0) > kValidTol)
            throw std::invalid_argument("mixture weights must sum to 1");
        for (auto& e : support_) e.weight /= s;
    }

    Mixture(Outcome o) : support_{{1.0, std::move(o)}} {}

    const std::vector<WeightedOutcome>& support() const { return support_; }
    bool singleton() const { return support_.size() == 1; }

private:
    std::vector<WeightedOutcome> support_;
};

struct Policy {
    std::map<std::string, Mixture> entries;

    const Mixture& at(const std::string& type_id) const {
        auto it = entries.find(type_id);
        if (it == entries.end())
            throw std::invalid_argument("policy has no entry for type: " + type_id);
        return it->second;
    }

    bool pure() const {
        return std::all_of(entries.begin(), entries.end(),
                           [](const auto& kv) { return kv.second.singleton(); });
    }
};

struct EvalReport {
    std::map<std::string, std::string> best_report;
    std::map<std::string, double> per_type_leader_utility;
    std::map<std::string, double> per_type_follower_utility;
    double total_leader_utility = 0.0;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const {
        std::ostringstream os;
        for (const auto& v : violations) os << v << "; ";
        return os.str();
    }
};

// --- Strategy/utility arithmetic ------------------------------------------

inline void check_action(const Game& g, int j) {
    if (j < 0 || j >= g.num_follower_actions())
        throw std::invalid_argument("follower action index out of range");
}

inline double leader_value(const Game& g, const MixedStrategy& x, int j) {
    check_action(g, j);
    return x.probs().dot(g.leader_payoff.col(j));
}

inline double follower_value(const Game& g, const std::string& type_id,
                             const MixedStrategy& x, int j) {
    check_action(g, j);
    return x.probs().dot(g.types[g.type_index(type_id)].payoff.col(j));
}

inline double leader_value(const Game& g, const Mixture& phi) {
    double v = 0.0;
    for (const auto& e : phi.support())
        v += e.weight * leader_value(g, e.outcome.strategy, e.outcome.induced_action);
    return v;
}

inline double follower_value(const Game& g, const std::string& type_id, const Mixture& phi) {
    double v = 0.0;
    for (const auto& e : phi.support())
        v += e.weight * follower_value(g, type_id, e.outcome.strategy, e.outcome.induced_action);
    return v;
}

// --- Best responses and reports -------------------------------------------

inline std::vector<int> best_responses(const Game& g, const std::string& type_id,
                                       const MixedStrategy& x, double tol = kValidTol) {
    if (tol < 0) throw std::invalid_argument("negative tolerance");
    const auto& payoff = g.types[g.type_index(type_id)].payoff;
    Eigen::VectorXd vals = payoff.transpose() * x.probs();
    double top = vals.maxCoeff();
    std::vector<int> out;
    for (int j = 0; j < vals.size(); ++j)
        if (vals[j] >= top - tol) out.push_back(j);
    return out;
}

inline ValidationReport validate_policy(const Game& g, const Policy& sigma,
                                        double tol = kValidTol) {
    ValidationReport report;
    for (const auto& t : g.types) {
        auto it = sigma.entries.find(t.id);
        if (it == sigma.entries.end()) {
            report.violations.push_back("missing entry for type " + t.id);
            continue;
        }
        int idx = 0;
        for (const auto& e : it->second.support()) {
            const auto& o = e.outcome;
            if (o.strategy.size() != g.num_leader_actions()) {
                report.violations.push_back("type " + t.id + ": strategy dimension mismatch");
                continue;
            }
            if (o.induced_action < 0 || o.induced_action >= g.num_follower_actions()) {
                report.violations.push_back("type " + t.id + ": induced action out of range");
                continue;
            }
            Eigen::VectorXd vals = t.payoff.transpose() * o.strategy.probs();
            if (vals[o.induced_action] < vals.maxCoeff() - tol) {
                std::ostringstream os;
                os << "type " << t.id << ": outcome " << idx << " induces action "
                   << o.induced_action << " which is not a best response (gap "
                   << vals.maxCoeff() - vals[o.induced_action] << ")";
                report.violations.push_back(os.str());
            }
            ++idx;
        }
    }
    for (const auto& [id, mix] : sigma.entries) {
        (void)mix;
        bool known = std::any_of(g.types.begin(), g.types.end(),
                                 [&](const FollowerType& t) { return t.id == id; });
        if (!known) report.violations.push_back("entry for unknown type " + id);
    }
    return report;
}

// Expected true-type utility of submitting a given report.
inline double follower_report_value(const Game& g, const std::string& true_type,
                                    const Policy& sigma, const std::string& reported) {
    g.type_index(reported);  // id check
    return follower_value(g, true_type, sigma.at(reported));
}

// A report maximizing the true type's utility; reports within tol of the
// maximum are broken in the leader's favor, then by type declaration order.
inline std::string best_report(const Game& g, const std::string& true_type,
                               const Policy& sigma, double tol = kTieTol) {
    double best_f = -std::numeric_limits<double>::infinity();
    for (const auto& t : g.types)
        best_f = std::max(best_f, follower_report_value(g, true_type, sigma, t.id));
    std::string pick;
    double best_l = -std::numeric_limits<double>::infinity();
    for (const auto& t : g.types) {
        if (follower_report_value(g, true_type, sigma, t.id) < best_f - tol) continue;
        double lv = leader_value(g, sigma.at(t.id));
        if (pick.empty() || lv > best_l + tol) {
            pick = t.id;
            best_l = lv;
        }
    }
    return pick;
}

// Leader-pessimistic variant: among follower-optimal reports (within tol)
// picks the one minimizing the leader's utility; used for robustness checks.
inline std::string worst_case_report(const Game& g, const std::string& true_type,
                                     const Policy& sigma, double tol = kTieTol) {
    double best_f = -std::numeric_limits<double>::infinity();
    for (const auto& t : g.types)
        best_f = std::max(best_f, follower_report_value(g, true_type, sigma, t.id));
    std::string pick;
    double worst_l = std::numeric_limits<double>::infinity();
    for (const auto& t : g.types) {
        if (follower_report_value(g, true_type, sigma, t.id) < best_f - tol) continue;
        double lv = leader_value(g, sigma.at(t.id));
        if (pick.empty() || lv < worst_l) {
            pick = t.id;
            worst_l = lv;
        }
    }
    return pick;
}

inline EvalReport evaluate_policy(const Game& g, const Policy& sigma, double tol = kTieTol) {
    auto check = validate_policy(g, sigma, std::max(tol, kValidTol));
    if (!check.ok())
        throw std::invalid_argument("invalid policy: " + check.to_string());
    EvalReport report;
    for (const auto& t : g.types) {
        std::string rep = best_report(g, t.id, sigma, tol);
        report.best_report[t.id] = rep;
        report.per_type_leader_utility[t.id] = leader_value(g, sigma.at(rep));
        report.per_type_follower_utility[t.id] = follower_report_value(g, t.id, sigma, rep);
        report.total_leader_utility += t.prior * report.per_type_leader_utility[t.id];
    }
    return report;
}

// Adversarial re-evaluation: ties among follower-optimal reports are
// resolved against the leader. The committed outcomes themselves are kept
// as prescribed — the induced action is part of the leader's commitment.
inline EvalReport evaluate_policy_adversarial(const Game& g, const Policy& sigma,
                                              double tol = kTieTol) {
    auto check = validate_policy(g, sigma, std::max(tol, kValidTol));
    if (!check.ok())
        throw std::invalid_argument("invalid policy: " + check.to_string());
    EvalReport report;
    for (const auto& t : g.types) {
        std::string rep = worst_case_report(g, t.id, sigma, tol);
        report.best_report[t.id] = rep;
        report.per_type_leader_utility[t.id] = leader_value(g, sigma.at(rep));
        report.per_type_follower_utility[t.id] = follower_report_value(g, t.id, sigma, rep);
        report.total_leader_utility += t.prior * report.per_type_leader_utility[t.id];
    }
    return report;
}

// Truthful reporting is weakly dominant for every type.
inline bool is_ic(const Game& g, const Policy& sigma, double tol = kTieTol) {
    for (const auto& t : g.types) {
        double truthful = follower_report_value(g, t.id, sigma, t.id);
        for (const auto& b : g.types)
            if (follower_report_value(g, t.id, sigma, b.id) > truthful + tol)
                return false;
    }
    return true;
}

// Merges outcomes sharing an induced action into their weight-averaged
// strategy; the result is supported on at most n outcomes with distinct
// actions and preserves both players' expected utilities.
inline Mixture compress_mixture(const Game& g, const std::string& type_id,
                                const Mixture& phi) {
    const auto& payoff = g.types[g.type_index(type_id)].payoff;
    const int m = g.num_leader_actions(), n = g.num_follower_actions();
    std::vector<double> weight(n, 0.0);
    std::vector<Eigen::VectorXd> mass(n, Eigen::VectorXd::Zero(m));
    for (const auto& e : phi.support()) {
        int j = e.outcome.induced_action;
        Eigen::VectorXd fv = payoff.transpose() * e.outcome.strategy.probs();
        if (fv[j] < fv.maxCoeff() - kValidTol)
            throw std::invalid_argument("compress_mixture: infeasible input outcome");
        weight[j] += e.weight;
        mass[j] += e.weight * e.outcome.strategy.probs();
    }
    std::vector<WeightedOutcome> out;
    for (int j = 0; j < n; ++j) {
        if (weight[j] <= 0.0) continue;
        out.push_back({weight[j], Outcome{MixedStrategy(mass[j] / weight[j]), j}});
    }
    return Mixture(std::move(out));
}

}  // namespace stackdec
