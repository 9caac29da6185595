// File-format tests (game/policy JSON, graph edge lists) and end-to-end
// smoke tests of the command-line tool, located via the STACKDEC_CLI
// environment variable.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stackdec/gamegen.hpp"
#include "stackdec/io.hpp"
#include "stackdec/solvers.hpp"

using namespace stackdec;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "stackdec_io_test";
    fs::create_directories(dir);
    return dir;
}

Game small_game() {
    GenSpec spec;
    spec.num_leader_actions = 3;
    spec.num_follower_actions = 3;
    spec.num_types = 2;
    spec.alphas = {0.5};
    spec.seed = 17;
    return generate(spec);
}

struct CliResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

// Runs the CLI binary with the given arguments; requires STACKDEC_CLI.
CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("STACKDEC_CLI");
    REQUIRE(bin != nullptr);
    auto out_file = temp_dir() / "cli_output.txt";
    std::string cmd = std::string("\"") + bin + "\" " + args + " > " +
                      out_file.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

bool have_cli() { return std::getenv("STACKDEC_CLI") != nullptr; }

}  // namespace

TEST_CASE("game file round-trip preserves every matrix and prior") {
    Game g = small_game();
    auto path = temp_dir() / "game.json";
    write_game(g, path.string());
    Game back = read_game(path.string());
    CHECK(back.name == g.name);
    CHECK((back.leader_payoff - g.leader_payoff).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(back.types.size() == g.types.size());
    for (size_t t = 0; t < g.types.size(); ++t) {
        CHECK(back.types[t].id == g.types[t].id);
        CHECK(back.types[t].prior == g.types[t].prior);
        CHECK((back.types[t].payoff - g.types[t].payoff).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("game file parse errors carry location context") {
    nlohmann::json good = game_to_json(small_game());

    auto expect_error = [](nlohmann::json doc, const std::string& fragment) {
        try {
            game_from_json(doc);
            FAIL("expected ParseError for " + fragment);
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };

    nlohmann::json doc = good;
    doc.erase("format_version");
    expect_error(doc, "format_version");

    doc = good;
    doc["format_version"] = "2";
    expect_error(doc, "format_version");

    doc = good;
    doc.erase("leader");
    expect_error(doc, "leader");

    doc = good;
    doc["m"] = 0;
    expect_error(doc, "positive");

    doc = good;
    doc["leader"][0].erase(2);
    expect_error(doc, "row 1");

    doc = good;
    doc["leader"][1][0] = "x";
    expect_error(doc, "non-numeric");

    doc = good;
    doc["types"] = nlohmann::json::array();
    expect_error(doc, "types");

    doc = good;
    doc["types"][0].erase("prior");
    expect_error(doc, "type 1");

    // Structural validation failures surface as parse errors too.
    doc = good;
    doc["types"][0]["prior"] = -0.25;
    expect_error(doc, "game file");
}

TEST_CASE("policy file round-trip preserves evaluation") {
    Game g = small_game();
    Policy sigma = truthful_menu(g);
    auto path = temp_dir() / "policy.json";
    write_policy(sigma, path.string());
    Policy back = read_policy(path.string());
    REQUIRE(back.entries.size() == sigma.entries.size());
    double v0 = evaluate_policy(g, sigma).total_leader_utility;
    double v1 = evaluate_policy(g, back).total_leader_utility;
    CHECK_THAT(v1, Catch::Matchers::WithinAbs(v0, 1e-12));
}

TEST_CASE("policy file parse errors") {
    CHECK_THROWS_AS(policy_from_json(nlohmann::json::array()), ParseError);
    nlohmann::json doc;
    doc["format_version"] = "1";
    doc["entries"] = {{"t1", nlohmann::json::array()}};
    CHECK_THROWS_AS(policy_from_json(doc), ParseError);
    doc["entries"]["t1"] = {{{"weight", 1.0}, {"action", 0}}};  // missing strategy
    CHECK_THROWS_AS(policy_from_json(doc), ParseError);
}

TEST_CASE("graph edge-list parsing") {
    std::istringstream ok("# path on three vertices\n3 2\n1 2\n\n2 3\n");
    Graph g = parse_graph(ok);
    CHECK(g.num_vertices == 3);
    CHECK(g.edges.size() == 2);

    auto bad = [](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_graph(in), ParseError);
    };
    bad("");                      // empty
    bad("# only comments\n");     // effectively empty
    bad("0 0\n");                 // V < 1
    bad("3 2\n1 2\n");            // fewer edges than promised
    bad("3 1\n1 1\n");            // self-loop
    bad("3 1\n1 4\n");            // vertex out of range
    bad("3 1\nx y\n");            // unparsable edge
}

TEST_CASE("cli: gen then solve round-trips") {
    if (!have_cli()) SKIP("STACKDEC_CLI not set");
    auto game = (temp_dir() / "gen.json").string();
    auto r = run_cli("gen --m 3 --n 3 --types 2 --alpha 0.5 --seed 17 --out " + game);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("seed: 17") != std::string::npos);

    // The written file equals the in-process generator output.
    Game direct = small_game();
    Game loaded = read_game(game);
    CHECK((loaded.leader_payoff - direct.leader_payoff).cwiseAbs().maxCoeff() == 0.0);

    auto policy = (temp_dir() / "solved_policy.json").string();
    auto s = run_cli("solve " + game + " --method OptIC --out " + policy);
    CHECK(s.exit_code == 0);
    CHECK(s.output.find("status: optimal") != std::string::npos);
    REQUIRE(s.output.find("objective: ") != std::string::npos);

    // The emitted policy file re-validates and re-evaluates to the printed
    // objective.
    double printed = std::stod(s.output.substr(s.output.find("objective: ") + 11));
    Policy sigma = read_policy(policy);
    CHECK(validate_policy(loaded, sigma, kTieTol).ok());
    double v = 0.0;
    for (const auto& t : loaded.types) v += t.prior * leader_value(loaded, sigma.at(t.id));
    CHECK_THAT(v, Catch::Matchers::WithinAbs(printed, 1e-5));
}

TEST_CASE("cli: reduce --verify reports the independent-set identity") {
    if (!have_cli()) SKIP("STACKDEC_CLI not set");
    auto graph = (temp_dir() / "p3.txt").string();
    std::ofstream(graph) << "3 2\n1 2\n2 3\n";
    auto r = run_cli("reduce " + graph + " --variant opt --verify");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("= MIS 2 / 3") != std::string::npos);

    auto triangle = (temp_dir() / "k3.txt").string();
    std::ofstream(triangle) << "3 3\n1 2\n2 3\n1 3\n";
    auto ric = run_cli("reduce " + triangle + " --variant ic --verify");
    CHECK(ric.exit_code == 0);
    CHECK(ric.output.find("= MIS 1 / 3") != std::string::npos);
}

TEST_CASE("cli: input errors exit with code 4") {
    if (!have_cli()) SKIP("STACKDEC_CLI not set");
    CHECK(run_cli("solve /nonexistent/game.json").exit_code == 4);
    auto bad = (temp_dir() / "bad.json").string();
    std::ofstream(bad) << "{ not json";
    CHECK(run_cli("solve " + bad).exit_code == 4);
    auto empty_graph = (temp_dir() / "empty.txt").string();
    std::ofstream(empty_graph) << "";
    CHECK(run_cli("reduce " + empty_graph + " --verify").exit_code == 4);
    CHECK(run_cli("nonsense").exit_code == 4);
}

TEST_CASE("cli: robust infeasibility exits with code 2") {
    if (!have_cli()) SKIP("STACKDEC_CLI not set");
    // A huge strict gap cannot be met once two reports compete for a type.
    auto game = (temp_dir() / "rob.json").string();
    REQUIRE(run_cli("gen --m 2 --n 2 --types 2 --alpha 1 --seed 1 --out " + game)
                .exit_code == 0);
    auto r = run_cli("solve " + game + " --method Opt --epsilon 10");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("status: infeasible") != std::string::npos);
}

TEST_CASE("cli: bench emits deterministic CSV with --no-time") {
    if (!have_cli()) SKIP("STACKDEC_CLI not set");
    auto csv1 = (temp_dir() / "bench1.csv").string();
    auto csv2 = (temp_dir() / "bench2.csv").string();
    std::string args =
        "bench --m 3 --n 3 --types 2 --alphas 0.5 --seeds 1..3 "
        "--methods BSE,OptIC,Truthful --no-time --out ";
    REQUIRE(run_cli(args + csv1).exit_code == 0);
    REQUIRE(run_cli(args + csv2).exit_code == 0);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string a = slurp(csv1), b = slurp(csv2);
    CHECK(a == b);
    CHECK(a.find("seed,m,n,types,alpha,alpha2,epsilon,method,value,ratio,time_ms,status") == 0);
    // one row per (seed, method) plus one mean row per method
    int lines = 0;
    for (char c : a) lines += c == '\n';
    CHECK(lines == 1 + 3 * 3 + 3);
}
