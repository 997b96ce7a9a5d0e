#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "regopt/io.hpp"
#include "support/test_support.hpp"

using namespace regopt;
using namespace regopt::testing;
using nlohmann::json;

namespace {

std::string tmp_dir() {
    static const std::string dir = [] {
        std::string d = "/tmp/regopt_cli_test_XXXXXX";
        REQUIRE(mkdtemp(d.data()) != nullptr);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string(REGOPT_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

const char* kBaselineVar = REGOPT_CONFIG_DIR "/baseline_var.json";

} // namespace

TEST_CASE("solve: baseline VaR configuration") {
    const std::string out = tmp_dir() + "/var.json";
    CHECK(run(std::string("solve --config ") + kBaselineVar + " --out " + out) == 0);
    const json j = json::parse(slurp(out));
    CHECK(j.at("regime").get<std::string>().rfind("VaR-a", 0) == 0);
    CHECK(std::fabs(j["diagnostics"]["budget"].get<double>() - 100.0) <= 1e-6);
    CHECK(std::fabs(j["diagnostics"]["default_prob"].get<double>() - 0.005) <= 1e-9);
}

TEST_CASE("solve: no constraint gives the benchmark regime") {
    const std::string out = tmp_dir() + "/bench.json";
    CHECK(run(std::string("solve --config ") + REGOPT_CONFIG_DIR
              "/baseline_benchmark.json --out " + out) == 0);
    const json j = json::parse(slurp(out));
    CHECK(j.at("regime").get<std::string>() == "benchmark");
    CHECK(j.at("lambda_risk").is_null());
}

TEST_CASE("verify: four-band structural check on the high-threshold ES case") {
    const std::string out = tmp_dir() + "/verify_c.json";
    CHECK(run(std::string("verify --config ") + REGOPT_CONFIG_DIR
              "/es_case_c.json --n-states 300 --n-paths 1000 --seed 5 --out " +
              out) == 0);
    const json j = json::parse(slurp(out));
    CHECK(j["crosscheck"]["bands"].get<int>() == 4);
    CHECK(j["crosscheck"]["structure_ok"].get<bool>());

    // The four-region VaR case keeps a default region thinner than one atom
    // of probability; the structural check accounts for the atom resolution.
    CHECK(run(std::string("verify --config ") + REGOPT_CONFIG_DIR
              "/var_case_c_four.json --n-states 500 --n-paths 1000 --seed 5 --out " +
              out) == 0);
    const json jv = json::parse(slurp(out));
    CHECK(jv["crosscheck"]["structure_ok"].get<bool>());
    CHECK(jv["pass"].get<bool>());
}

TEST_CASE("solve: matched ES configuration reports the VaR default level") {
    const std::string cfg = tmp_dir() + "/es.json";
    write_file(cfg, R"({
      "market": {"mu": 0.08, "r": 0.03, "sigma": 0.2, "T": 1.0},
      "institution": {"x0": 100.0, "DT": 100.0},
      "utility": {"gamma": 0.5},
      "constraint": {"type": "es", "L": 90.0, "epsilon_pct": 0.87}
    })");
    const std::string out = tmp_dir() + "/es_out.json";
    CHECK(run("solve --config " + cfg + " --out " + out) == 0);
    const json j = json::parse(slurp(out));
    CHECK(j.at("regime").get<std::string>().rfind("ES-a", 0) == 0);
    // 0.87% of x0 is the two-decimal rounding of the exact matched budget, so
    // the default probability lands on 0.5% only to rounding accuracy.
    CHECK(std::fabs(j["diagnostics"]["default_prob"].get<double>() - 0.005) <= 1e-3);
}

TEST_CASE("solve: exit codes") {
    const std::string cfg = tmp_dir() + "/bad.json";
    write_file(cfg, R"({
      "market": {"mu": 0.08, "r": 0.03, "T": 1.0},
      "institution": {"x0": 100.0, "DT": 100.0},
      "utility": {"gamma": 0.5}
    })");
    CHECK(run("solve --config " + cfg) == 1);

    const std::string infeasible = tmp_dir() + "/infeasible.json";
    write_file(infeasible, R"({
      "market": {"mu": 0.08, "r": 0.03, "sigma": 0.2, "T": 1.0},
      "institution": {"x0": 50.0, "DT": 100.0},
      "utility": {"gamma": 0.5},
      "constraint": {"type": "var", "L": 90.0, "alpha": 0.005}
    })");
    CHECK(run("solve --config " + infeasible) == 2);

    CHECK(run("solve --config /nonexistent.json") == 1);
    CHECK(run(std::string("figure --config ") + kBaselineVar + " --figure bogus") == 1);
    CHECK(run(std::string("figure --config ") + kBaselineVar + " --grid 1,2,0") == 1);
}

TEST_CASE("figure: terminal curve is non-increasing with a single default drop") {
    const std::string out = tmp_dir() + "/fig.csv";
    CHECK(run(std::string("figure --config ") + kBaselineVar +
              " --figure terminal --grid 0.05,6.0,400 --out " + out) == 0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "xi,terminal,benchmark");
    double prev = kInfinity;
    int zeros = 0;
    int rows = 0;
    while (std::getline(in, line)) {
        double xi, v, b;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &xi, &v, &b) == 3);
        CHECK(v <= prev * (1.0 + 1e-12) + 1e-12);
        prev = v;
        if (v == 0.0) ++zeros;
        ++rows;
    }
    CHECK(rows == 400);
    CHECK(zeros > 0);
}

TEST_CASE("figure: exposure ratio approaches one in booming states") {
    const std::string cfg = tmp_dir() + "/es_fig.json";
    write_file(cfg, R"({
      "market": {"mu": 0.08, "r": 0.03, "sigma": 0.2, "T": 1.0},
      "institution": {"x0": 100.0, "DT": 100.0},
      "utility": {"gamma": 0.5},
      "constraint": {"type": "es", "L": 90.0, "epsilon_pct": 0.87}
    })");
    const std::string out = tmp_dir() + "/exposure.csv";
    CHECK(run("figure --config " + cfg +
              " --figure exposure_t --t 0.5 --grid 0.0005,3.0,50 --out " + out) == 0);
    std::ifstream in(out);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    double xi, ratio, one;
    REQUIRE(std::sscanf(first.c_str(), "%lf,%lf,%lf", &xi, &ratio, &one) == 3);
    CHECK(std::fabs(ratio - 1.0) <= 1e-2);
}

TEST_CASE("equivalence: table output and the high-threshold warning") {
    const std::string out = tmp_dir() + "/eq.csv";
    CHECK(run(std::string("equivalence --config ") + kBaselineVar + " --out " + out) == 0);
    const std::string body = slurp(out);
    CHECK(body.find("alpha,epsilon,epsilon_pct_of_x0") == 0);
    CHECK(body.find("0.874608837318,0.87") != std::string::npos);
    CHECK(body.find("1.65342616075,1.65") != std::string::npos);
    CHECK(body.find("7.12083747316,7.12") != std::string::npos);
    CHECK(body.find("warning") == std::string::npos);

    CHECK(run(std::string("equivalence --config ") + kBaselineVar +
              " --alphas 0 --out " + out) == 0);
    CHECK(slurp(out).find("0,0,0.00") != std::string::npos);

    const std::string cfg = tmp_dir() + "/high_L.json";
    write_file(cfg, R"({
      "market": {"mu": 0.08, "r": 0.03, "sigma": 0.2, "T": 1.0},
      "institution": {"x0": 250.0, "DT": 100.0},
      "utility": {"gamma": 0.5},
      "constraint": {"type": "var", "L": 250.0, "alpha": 0.005}
    })");
    CHECK(run("equivalence --config " + cfg + " --out " + out) == 0);
    CHECK(slurp(out).find("equivalence not guaranteed") != std::string::npos);
}

TEST_CASE("verify: passes honestly and detects an injected perturbation") {
    const std::string out = tmp_dir() + "/verify.json";
    CHECK(run(std::string("verify --config ") + kBaselineVar +
              " --n-states 300 --n-paths 4000 --seed 11 --out " + out) == 0);
    const json j = json::parse(slurp(out));
    CHECK(j["pass"].get<bool>());
    CHECK(j["crosscheck"]["pass"].get<bool>());
    CHECK(j["fd_delta"]["pass"].get<bool>());
    CHECK(j["replication"]["pass"].get<bool>());

    // Byte determinism given the seed.
    const std::string out2 = tmp_dir() + "/verify2.json";
    CHECK(run(std::string("verify --config ") + kBaselineVar +
              " --n-states 300 --n-paths 4000 --seed 11 --out " + out2) == 0);
    CHECK(slurp(out) == slurp(out2));

    CHECK(run(std::string("verify --config ") + kBaselineVar +
              " --n-states 300 --n-paths 4000 --seed 11 --perturb-lambda 1.05 --out " +
              out2) == 3);
}

TEST_CASE("solution JSON round trip") {
    const RunConfig cfg = load_config(kBaselineVar);
    const Solution sol = solve(cfg.market, cfg.institution, cfg.utility, cfg.constraint);
    const json j = solution_to_json(sol);
    const WealthProfile rebuilt = profile_from_json(j);

    const LognormalLaw law = terminal_density_law(cfg.market);
    CHECK(std::fabs(budget(rebuilt, law) - j["diagnostics"]["budget"].get<double>()) <=
          1e-12 * cfg.institution.x0);
    CHECK(std::fabs(expected_utility(rebuilt, law, cfg.utility, cfg.institution.DT) -
                    j["diagnostics"]["expected_utility"].get<double>()) <= 1e-12 * 10.0);
    CHECK(std::fabs(default_probability(rebuilt, law) -
                    j["diagnostics"]["default_prob"].get<double>()) <= 1e-13);
    for (double xi : log_grid(1e-3, 20.0, 500))
        CHECK(rebuilt.evaluate(xi) == sol.profile.evaluate(xi));
}
