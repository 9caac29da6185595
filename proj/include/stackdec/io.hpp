// File formats: JSON game files (versioned), JSON policy files, and
// plain-text graph edge lists ("V E" header, then one 1-indexed "u v" pair
// per line). All parse failures throw ParseError with location context.

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stackdec/game.hpp"
#include "stackdec/reductions.hpp"

namespace stackdec {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& mat) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < mat.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < mat.cols(); ++j) row.push_back(mat(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, int m, int n,
                                        const std::string& what) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != m)
        throw ParseError(what + ": expected " + std::to_string(m) + " rows");
    Eigen::MatrixXd mat(m, n);
    for (int i = 0; i < m; ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ParseError(what + ", row " + std::to_string(i + 1) + ": expected " +
                             std::to_string(n) + " entries");
        for (int j = 0; j < n; ++j) {
            if (!row[j].is_number())
                throw ParseError(what + ", row " + std::to_string(i + 1) +
                                 ": non-numeric entry");
            mat(i, j) = row[j].get<double>();
        }
    }
    return mat;
}

}  // namespace detail

inline nlohmann::json game_to_json(const Game& g) {
    nlohmann::json doc;
    doc["format_version"] = "1";
    doc["m"] = g.num_leader_actions();
    doc["n"] = g.num_follower_actions();
    if (!g.name.empty()) doc["name"] = g.name;
    doc["leader"] = detail::matrix_to_json(g.leader_payoff);
    nlohmann::json types = nlohmann::json::array();
    for (const auto& t : g.types) {
        nlohmann::json jt;
        jt["id"] = t.id;
        jt["prior"] = t.prior;
        jt["payoff"] = detail::matrix_to_json(t.payoff);
        types.push_back(std::move(jt));
    }
    doc["types"] = std::move(types);
    return doc;
}

inline Game game_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("game file: top level must be an object");
    if (!doc.contains("format_version") || doc["format_version"] != "1")
        throw ParseError("game file: missing or unsupported format_version (expected \"1\")");
    for (const char* key : {"m", "n", "leader", "types"})
        if (!doc.contains(key))
            throw ParseError(std::string("game file: missing field '") + key + "'");
    if (!doc["m"].is_number_integer() || !doc["n"].is_number_integer())
        throw ParseError("game file: m and n must be integers");
    int m = doc["m"].get<int>(), n = doc["n"].get<int>();
    if (m < 1 || n < 1) throw ParseError("game file: m and n must be positive");

    Eigen::MatrixXd leader = detail::matrix_from_json(doc["leader"], m, n, "leader matrix");
    if (!doc["types"].is_array() || doc["types"].empty())
        throw ParseError("game file: 'types' must be a nonempty array");
    std::vector<FollowerType> types;
    int idx = 0;
    for (const auto& jt : doc["types"]) {
        ++idx;
        std::string where = "type " + std::to_string(idx);
        if (!jt.is_object() || !jt.contains("id") || !jt.contains("prior") ||
            !jt.contains("payoff"))
            throw ParseError(where + ": expected {id, prior, payoff}");
        if (!jt["id"].is_string()) throw ParseError(where + ": id must be a string");
        if (!jt["prior"].is_number()) throw ParseError(where + ": prior must be a number");
        types.push_back({jt["id"].get<std::string>(), jt["prior"].get<double>(),
                         detail::matrix_from_json(jt["payoff"], m, n, where + " payoff")});
    }
    try {
        return Game(std::move(leader), std::move(types),
                    doc.value("name", std::string{}));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("game file: ") + e.what());
    }
}

inline void write_game(const Game& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << game_to_json(g).dump(2) << '\n';
}

inline Game read_game(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open game file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("game file " + path + ": " + e.what());
    }
    return game_from_json(doc);
}

inline nlohmann::json policy_to_json(const Policy& sigma) {
    nlohmann::json doc;
    doc["format_version"] = "1";
    nlohmann::json entries = nlohmann::json::object();
    for (const auto& [id, mixture] : sigma.entries) {
        nlohmann::json outcomes = nlohmann::json::array();
        for (const auto& wo : mixture.support()) {
            nlohmann::json o;
            o["weight"] = wo.weight;
            o["action"] = wo.outcome.induced_action;
            nlohmann::json strat = nlohmann::json::array();
            const auto& probs = wo.outcome.strategy.probs();
            for (int i = 0; i < probs.size(); ++i) strat.push_back(probs[i]);
            o["strategy"] = std::move(strat);
            outcomes.push_back(std::move(o));
        }
        entries[id] = std::move(outcomes);
    }
    doc["entries"] = std::move(entries);
    return doc;
}

inline Policy policy_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("format_version", "") != std::string("1") ||
        !doc.contains("entries") || !doc["entries"].is_object())
        throw ParseError("policy file: expected {format_version: \"1\", entries: {...}}");
    Policy sigma;
    for (const auto& [id, outcomes] : doc["entries"].items()) {
        if (!outcomes.is_array() || outcomes.empty())
            throw ParseError("policy file, type '" + id + "': expected outcome array");
        std::vector<WeightedOutcome> support;
        for (const auto& o : outcomes) {
            if (!o.contains("weight") || !o.contains("action") || !o.contains("strategy"))
                throw ParseError("policy file, type '" + id +
                                 "': outcome needs {weight, action, strategy}");
            Eigen::VectorXd x(o["strategy"].size());
            for (int i = 0; i < x.size(); ++i) x[i] = o["strategy"][i].get<double>();
            support.push_back(
                {o["weight"].get<double>(), Outcome{MixedStrategy(x), o["action"].get<int>()}});
        }
        sigma.entries.emplace(id, Mixture(std::move(support)));
    }
    return sigma;
}

inline void write_policy(const Policy& sigma, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << policy_to_json(sigma).dump(2) << '\n';
}

inline Policy read_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open policy file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("policy file " + path + ": " + e.what());
    }
    return policy_from_json(doc);
}

// Edge-list graph: first line "V E", then E lines "u v" with 1-indexed
// vertices. Blank lines and '#' comments are permitted.
inline Graph parse_graph(std::istream& in) {
    std::vector<std::pair<std::string, int>> lines;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream probe(raw);
        std::string tok;
        if (probe >> tok) lines.push_back({raw, lineno});
    }
    if (lines.empty()) throw ParseError("graph file: empty");

    int V = 0, E = 0;
    {
        std::istringstream header(lines[0].first);
        if (!(header >> V >> E) || V < 1 || E < 0)
            throw ParseError("graph file, line " + std::to_string(lines[0].second) +
                             ": expected header 'V E' with V >= 1");
    }
    if (static_cast<int>(lines.size()) - 1 != E)
        throw ParseError("graph file: header promises " + std::to_string(E) +
                         " edges, found " + std::to_string(lines.size() - 1));
    std::vector<std::pair<int, int>> edges;
    for (int e = 0; e < E; ++e) {
        std::istringstream ls(lines[1 + e].first);
        int u = 0, v = 0;
        if (!(ls >> u >> v) || u < 1 || v < 1 || u > V || v > V || u == v)
            throw ParseError("graph file, line " + std::to_string(lines[1 + e].second) +
                             ": expected edge 'u v' with distinct 1-indexed vertices");
        edges.push_back({u - 1, v - 1});
    }
    return Graph(V, std::move(edges));
}

inline Graph read_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file: " + path);
    return parse_graph(in);
}

}  // namespace stackdec
