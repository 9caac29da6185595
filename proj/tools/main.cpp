// stackdec command-line tool: solve game files, generate random games, run
// benchmark campaigns, and build/verify independent-set reduction instances.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "stackdec/game.hpp"
#include "stackdec/gamegen.hpp"
#include "stackdec/io.hpp"
#include "stackdec/lp.hpp"
#include "stackdec/reductions.hpp"
#include "stackdec/solvers.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitLimit = 3;
constexpr int kExitInput = 4;

const std::vector<std::string> kAllMethods = {"Opt",  "OptIC",    "OptX",      "OptXIC",
                                              "BSE",  "Truthful", "Deceitful", "Approx"};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string status_name(stackdec::lp::Status s) {
    switch (s) {
        case stackdec::lp::Status::optimal: return "optimal";
        case stackdec::lp::Status::infeasible: return "infeasible";
        case stackdec::lp::Status::unbounded: return "unbounded";
        default: return "limit";
    }
}

struct MethodResult {
    stackdec::lp::Status status = stackdec::lp::Status::optimal;
    double value = std::nan("");
    double seconds = 0.0;
    std::optional<stackdec::Policy> policy;
    stackdec::EvalReport eval;
};

MethodResult run_method(const stackdec::Game& g, const std::string& method,
                        const stackdec::SolverOptions& opts) {
    MethodResult r;
    stackdec::detail::Stopwatch clock;
    if (method == "Truthful") {
        r.value = stackdec::truthful_value(g);
    } else if (method == "Deceitful") {
        stackdec::Policy sigma = stackdec::truthful_menu(g);
        r.eval = stackdec::evaluate_policy(g, sigma);
        r.value = r.eval.total_leader_utility;
        r.policy = std::move(sigma);
    } else if (method == "BSE") {
        auto bse = stackdec::solve_bse(g, opts);
        r.status = bse.status;
        if (bse.strategy) {
            stackdec::Policy sigma = stackdec::policy_from_bse(g, bse);
            r.eval = stackdec::evaluate_policy(g, sigma);
            r.value = r.eval.total_leader_utility;
            r.policy = std::move(sigma);
        }
    } else if (method == "Approx") {
        auto rep = stackdec::solve_approx(g);
        r.status = rep.status;
        r.value = rep.objective;
        r.eval = rep.eval;
        r.policy = std::move(rep.policy);
    } else {
        bool ic = method == "OptIC" || method == "OptXIC";
        bool mixed = method == "OptX" || method == "OptXIC";
        if (!(method == "Opt" || method == "OptIC" || method == "OptX" || method == "OptXIC"))
            throw stackdec::ParseError("unknown method: " + method);
        auto rep = stackdec::solve_opt(g, ic, mixed, opts);
        r.status = rep.status;
        if (rep.status == stackdec::lp::Status::optimal ||
            rep.policy.entries.size() == g.types.size()) {
            r.value = rep.objective;
            r.eval = rep.eval;
            r.policy = std::move(rep.policy);
        }
    }
    r.seconds = clock.seconds();
    return r;
}

std::vector<long> parse_seed_list(const std::string& text) {
    std::vector<long> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto dots = item.find("..");
        if (dots != std::string::npos) {
            long a = std::stol(item.substr(0, dots));
            long b = std::stol(item.substr(dots + 2));
            for (long s = a; s <= b; ++s) seeds.push_back(s);
        } else if (!item.empty()) {
            seeds.push_back(std::stol(item));
        }
    }
    if (seeds.empty()) throw stackdec::ParseError("empty seed list");
    return seeds;
}

int do_solve(const std::string& game_path, const std::string& method, double epsilon,
             const stackdec::SolverOptions& base_opts, const std::string& out_policy,
             bool dump_model) {
    stackdec::Game g = stackdec::read_game(game_path);
    stackdec::SolverOptions opts = base_opts;
    opts.epsilon = epsilon;

    if (dump_model && (method == "Opt" || method == "OptIC" || method == "OptX" ||
                       method == "OptXIC")) {
        bool ic = method == "OptIC" || method == "OptXIC";
        bool mixed = method == "OptX" || method == "OptXIC";
        stackdec::detail::OptLayout layout(g, mixed, ic);
        stackdec::lp::dump(
            stackdec::detail::build_opt_model(g, layout, epsilon, opts.big_m_override),
            std::cout);
    }

    MethodResult r = run_method(g, method, opts);
    std::cout << "method: " << method << "\n"
              << "status: " << status_name(r.status) << "\n";
    if (!std::isnan(r.value)) std::cout << "objective: " << fmt(r.value) << "\n";
    if (r.policy) {
        for (const auto& t : g.types) {
            auto it = r.eval.best_report.find(t.id);
            if (it != r.eval.best_report.end())
                std::cout << "report[" << t.id << "]: " << it->second << "\n";
        }
        std::cout << "ic: " << (stackdec::is_ic(g, *r.policy) ? "yes" : "no") << "\n";
        if (!out_policy.empty()) {
            stackdec::write_policy(*r.policy, out_policy);
            std::cout << "policy written: " << out_policy << "\n";
        }
    }
    std::cout << "time_ms: " << fmt(r.seconds * 1000.0) << "\n";
    if (r.status == stackdec::lp::Status::optimal) return kExitOk;
    if (r.status == stackdec::lp::Status::infeasible) return kExitInfeasible;
    return kExitLimit;
}

struct BenchTask {
    double alpha;
    double alpha2 = std::nan("");  // nan = single-alpha blend
    double epsilon;
    long seed;
};

int do_bench(int m, int n, int num_types, const std::vector<double>& alphas, double alpha2,
             bool has_alpha2, const std::vector<long>& seeds,
             const std::vector<std::string>& methods, const std::vector<double>& epsilons,
             int jobs, const std::string& out_path, const stackdec::SolverOptions& base_opts,
             bool no_time) {
    std::vector<BenchTask> tasks;
    for (double a : alphas)
        for (double e : epsilons)
            for (long s : seeds) {
                BenchTask t{a, std::nan(""), e, s};
                if (has_alpha2) t.alpha2 = alpha2;
                tasks.push_back(t);
            }

    struct Row {
        BenchTask task;
        int method_index;
        double value, ratio, time_ms;
        std::string status;
    };
    std::vector<Row> rows(tasks.size() * methods.size());
    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::vector<std::string> errors;

    auto worker = [&] {
        for (;;) {
            size_t ti = next.fetch_add(1);
            if (ti >= tasks.size()) return;
            const BenchTask& task = tasks[ti];
            try {
                stackdec::GenSpec spec;
                spec.num_leader_actions = m;
                spec.num_follower_actions = n;
                spec.num_types = num_types;
                spec.seed = static_cast<std::uint64_t>(task.seed);
                spec.alphas = std::isnan(task.alpha2)
                                  ? std::vector<double>{task.alpha}
                                  : std::vector<double>{task.alpha, task.alpha2};
                stackdec::Game g = stackdec::generate(spec);
                double truthful = stackdec::truthful_value(g);
                for (size_t mi = 0; mi < methods.size(); ++mi) {
                    stackdec::SolverOptions opts = base_opts;
                    opts.epsilon = task.epsilon;
                    MethodResult r = run_method(g, methods[mi], opts);
                    Row& row = rows[ti * methods.size() + mi];
                    row.task = task;
                    row.method_index = static_cast<int>(mi);
                    row.value = r.value;
                    row.ratio = (std::abs(truthful) > 1e-12 && !std::isnan(r.value))
                                    ? r.value / truthful
                                    : std::nan("");
                    row.time_ms = no_time ? 0.0 : r.seconds * 1000.0;
                    row.status = status_name(r.status);
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                errors.push_back("seed " + std::to_string(task.seed) + ": " + e.what());
                for (size_t mi = 0; mi < methods.size(); ++mi) {
                    Row& row = rows[ti * methods.size() + mi];
                    row.task = task;
                    row.method_index = static_cast<int>(mi);
                    row.value = row.ratio = row.time_ms = std::nan("");
                    row.status = "error";
                }
            }
        }
    };
    int workers = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        auto key = [](const Row& r) {
            return std::make_tuple(r.task.alpha, r.task.epsilon, r.task.seed, r.method_index);
        };
        return key(a) < key(b);
    });

    std::ostringstream csv;
    csv << "seed,m,n,types,alpha,alpha2,epsilon,method,value,ratio,time_ms,status\n";
    auto alpha2_str = [](double a2) { return std::isnan(a2) ? std::string{} : fmt(a2); };
    for (const Row& r : rows)
        csv << r.task.seed << ',' << m << ',' << n << ',' << num_types << ','
            << fmt(r.task.alpha) << ',' << alpha2_str(r.task.alpha2) << ','
            << fmt(r.task.epsilon) << ',' << methods[r.method_index] << ',' << fmt(r.value)
            << ',' << fmt(r.ratio) << ',' << fmt(r.time_ms) << ',' << r.status << '\n';

    // aggregate means over seeds, per (alpha, epsilon, method), optimal rows only
    for (double a : alphas)
        for (double e : epsilons)
            for (size_t mi = 0; mi < methods.size(); ++mi) {
                double sv = 0, sr = 0, st = 0;
                long nv = 0, nr = 0;
                for (const Row& r : rows) {
                    if (r.task.alpha != a || r.task.epsilon != e ||
                        r.method_index != static_cast<int>(mi) || r.status != "optimal")
                        continue;
                    if (!std::isnan(r.value)) { sv += r.value; st += r.time_ms; ++nv; }
                    if (!std::isnan(r.ratio)) { sr += r.ratio; ++nr; }
                }
                csv << "mean," << m << ',' << n << ',' << num_types << ',' << fmt(a) << ','
                    << alpha2_str(has_alpha2 ? alpha2 : std::nan("")) << ',' << fmt(e) << ','
                    << methods[mi] << ',' << fmt(nv ? sv / nv : std::nan("")) << ','
                    << fmt(nr ? sr / nr : std::nan("")) << ','
                    << fmt(nv ? st / nv : std::nan("")) << ",mean(" << nv << ")\n";
            }

    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
        out << csv.str();
    }
    for (const auto& e : errors) std::cerr << "warning: " << e << "\n";
    return kExitOk;
}

int do_reduce(const std::string& graph_path, const std::string& variant,
              const std::string& out_path, bool verify,
              const stackdec::SolverOptions& opts) {
    stackdec::Graph graph = stackdec::read_graph(graph_path);
    bool ic = variant == "ic";
    if (!ic && variant != "opt")
        throw stackdec::ParseError("variant must be 'opt' or 'ic'");
    stackdec::Game g = ic ? stackdec::build_ic_hardness_game(graph)
                          : stackdec::build_opt_hardness_game(graph);
    if (!out_path.empty()) {
        stackdec::write_game(g, out_path);
        std::cout << "game written: " << out_path << "\n";
    }
    if (!verify) return kExitOk;

    auto mis = stackdec::max_independent_set_bruteforce(graph);
    auto rep = stackdec::solve_opt(g, ic, /*mixed=*/false, opts);
    double expected = static_cast<double>(mis.size()) / graph.num_vertices;
    bool match = rep.status == stackdec::lp::Status::optimal &&
                 std::abs(rep.objective - expected) <= 1e-6;
    std::cout << "objective " << fmt(rep.objective) << (match ? " = " : " != ") << "MIS "
              << mis.size() << " / " << graph.num_vertices << (match ? " ✓" : " ✗")
              << "\n";
    return match ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solvers for Stackelberg games with type-reporting followers"};
    app.require_subcommand(1);
    stackdec::SolverOptions opts;
    double tol = 1e-6;  // reserved for output comparison; kept for interface stability

    // solve
    auto* solve = app.add_subcommand("solve", "Solve a game file with one method");
    std::string game_path, method = "Opt", out_policy;
    double epsilon = 0.0;
    bool ic_flag = false, mixed_flag = false, dump_model = false;
    solve->add_option("game", game_path, "game file (JSON)")->required();
    solve->add_option("--method", method, "Opt|OptIC|OptX|OptXIC|BSE|Truthful|Deceitful|Approx");
    solve->add_flag("--ic", ic_flag, "restrict to incentive-compatible policies");
    solve->add_flag("--mixed", mixed_flag, "allow mixed policies");
    solve->add_option("--epsilon", epsilon, "robustness margin (strict report gap)");
    solve->add_option("--out", out_policy, "write the solved policy to this file");
    solve->add_flag("--dump-model", dump_model, "print the optimization model");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random covariance game");
    int gm = 2, gn = 2, gtypes = 2;
    long gseed = 0;
    std::vector<double> galphas = {0.0};
    std::string gout;
    gen->add_option("--m", gm, "leader actions");
    gen->add_option("--n", gn, "follower actions");
    gen->add_option("--types", gtypes, "number of follower types");
    gen->add_option("--alphas,--alpha", galphas, "blend parameter(s), cycled over types")
        ->delimiter(',');
    gen->add_option("--seed", gseed, "RNG seed");
    gen->add_option("--out", gout, "output game file")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark campaign, emit CSV");
    int bm = 5, bn = 10, btypes = 5, jobs = 1;
    std::vector<double> balphas = {0.5};
    double balpha2 = 0.0;
    bool has_alpha2 = false, no_time = false;
    std::string bseeds = "1..10", bout;
    std::vector<std::string> bmethods = kAllMethods;
    std::vector<double> bepsilons = {0.0};
    bench->add_option("--m", bm, "leader actions");
    bench->add_option("--n", bn, "follower actions");
    bench->add_option("--types", btypes, "number of follower types");
    bench->add_option("--alphas", balphas, "alpha grid")->delimiter(',');
    auto* a2opt = bench->add_option("--alpha2", balpha2,
                                    "second blend value (alternating with each alpha)");
    bench->add_option("--seeds", bseeds, "seed list: comma separated and/or a..b ranges");
    bench->add_option("--methods", bmethods, "methods to run")->delimiter(',');
    bench->add_option("--epsilons", bepsilons, "epsilon grid")->delimiter(',');
    bench->add_option("--jobs", jobs, "worker threads");
    bench->add_option("--out", bout, "output CSV path (default stdout)");
    bench->add_flag("--no-time", no_time, "zero the time_ms column for reproducible output");

    // reduce
    auto* reduce = app.add_subcommand("reduce", "Build or verify an independent-set game");
    std::string graph_path, variant = "opt", rout;
    bool verify = false;
    reduce->add_option("graph", graph_path, "edge-list graph file")->required();
    reduce->add_option("--variant", variant, "opt|ic");
    reduce->add_option("--out", rout, "output game file");
    reduce->add_flag("--verify", verify, "solve exactly and compare with brute-force MIS");

    for (auto* sub : {solve, bench, reduce}) {
        sub->add_option("--tol", tol, "comparison tolerance");
        sub->add_option("--big-m-override", opts.big_m_override, "fixed big-M constant");
        sub->add_option("--node-limit", opts.node_limit, "branch-and-bound node limit");
        sub->add_option("--time-limit", opts.time_limit_sec,
                        "wall-clock budget in seconds per solve (0 = none)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*solve) {
            if (ic_flag || mixed_flag) {
                if (method != "Opt" && method != "OptIC" && method != "OptX" &&
                    method != "OptXIC")
                    throw stackdec::ParseError("--ic/--mixed only apply to Opt methods");
                method = std::string(mixed_flag || method == "OptX" || method == "OptXIC"
                                         ? "OptX"
                                         : "Opt") +
                         (ic_flag || method == "OptIC" || method == "OptXIC" ? "IC" : "");
            }
            return do_solve(game_path, method, epsilon, opts, out_policy, dump_model);
        }
        if (*gen) {
            stackdec::GenSpec spec;
            spec.num_leader_actions = gm;
            spec.num_follower_actions = gn;
            spec.num_types = gtypes;
            spec.alphas = galphas;
            spec.seed = static_cast<std::uint64_t>(gseed);
            stackdec::write_game(stackdec::generate(spec), gout);
            std::cout << "seed: " << gseed << "\ngame written: " << gout << "\n";
            return kExitOk;
        }
        if (*bench) {
            has_alpha2 = a2opt->count() > 0;
            return do_bench(bm, bn, btypes, balphas, balpha2, has_alpha2,
                            parse_seed_list(bseeds), bmethods, bepsilons, jobs, bout, opts,
                            no_time);
        }
        if (*reduce) return do_reduce(graph_path, variant, rout, verify, opts);
    } catch (const stackdec::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitInput;
}
