#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "copulalab/registry.hpp"
#include "json.hpp"

#ifndef CLI_BIN
#error "CLI_BIN must point at the copulalab binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

/// Runs the CLI with stdout captured; stderr goes to a scratch file.
RunResult run(const std::string& args) {
    const std::string out_path = "cli_stdout.tmp";
    const std::string command = std::string(CLI_BIN) + " " + args + " > " + out_path + " 2> cli_stderr.tmp";
    const int status = std::system(command.c_str());
    RunResult result;
#ifdef _WIN32
    result.exit_code = status;
#else
    result.exit_code = WEXITSTATUS(status);
#endif
    std::ifstream is(out_path);
    std::ostringstream buffer;
    buffer << is.rdbuf();
    result.output = buffer.str();
    return result;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("registry descriptors resolve nested bases") {
    using copulalab::registry::from_descriptor_text;
    const auto lifted = from_descriptor_text(
        R"({"family":"lift","params":{"base":{"family":"q_c","params":{"base":"pi2"}},"n":4}})");
    CHECK(lifted.dimension() == 4);
    CHECK(lifted.name().find("q_c(pi2") != std::string::npos);

    const auto shuffle = from_descriptor_text(R"({"family":"theta_shuffle","params":{"N":4}})");
    CHECK(shuffle.dimension() == 2);

    CHECK_THROWS_AS(from_descriptor_text(R"({"family":"nope"})"), std::invalid_argument);
    CHECK_THROWS_AS(from_descriptor_text(R"({"family":"c_theta","params":{"theta":"wide"}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(from_descriptor_text("not json at all"), std::invalid_argument);
    CHECK_THROWS_AS(from_descriptor_text(R"({"params":{}})"), std::invalid_argument);
    CHECK_FALSE(copulalab::registry::family_names().empty());
}

TEST_CASE("construct: success, dump format, parameter guards") {
    const RunResult plain = run("construct --family w3");
    CHECK(plain.exit_code == 0);
    CHECK(plain.output.find("\"name\":\"w3\"") != std::string::npos);

    const RunResult dump = run("construct --family c_theta --theta 0.7 --grid 16 --out ct.grid");
    CHECK(dump.exit_code == 0);
    const std::string grid_text = read_file("ct.grid");
    CHECK(grid_text.rfind("2 16\n", 0) == 0);

    CHECK(run("construct --family c_theta --theta 0.9").exit_code == 2);
    CHECK(run("construct --family does_not_exist").exit_code == 2);
    CHECK(run("construct").exit_code == 2);
    CHECK(run("bogus-subcommand").exit_code == 2);
}

TEST_CASE("construct: descriptor config file") {
    {
        std::ofstream cfg("desc.json");
        cfg << R"({"family":"mix","params":{"lambda":0.5,"f":{"family":"phi","params":{"base":"m2"}},"g":"pi2"}})";
    }
    const RunResult from_config = run("construct --config desc.json");
    CHECK(from_config.exit_code == 0);
    CHECK(from_config.output.find("mix") != std::string::npos);
    CHECK(run("construct --config missing.json").exit_code == 2);
}

TEST_CASE("check: exit codes mirror the verdict") {
    const RunResult failed = run("check --family q_c --base m2 --which copula --grid 9");
    CHECK(failed.exit_code == 1);
    const auto failed_json = nlohmann::json::parse(failed.output);
    CHECK(failed_json["passed"] == false);
    CHECK(failed_json["witness"]["box_lower"][0].get<double>() >= 1.0 / 3.0 - 1e-12);

    const RunResult quasi = run("check --family q_c --base m2 --which quasi --grid 33");
    CHECK(quasi.exit_code == 0);
    CHECK(nlohmann::json::parse(quasi.output)["passed"] == true);

    CHECK(run("check --family pi2 --which copula --grid 16").exit_code == 0);
    CHECK(run("check --family m2 --which p-lip --p 8 --grid 32").exit_code == 0);
    CHECK(run("check --family pi2 --which nonsense").exit_code == 2);
}

TEST_CASE("check: grid dumps round-trip through the verifier") {
    REQUIRE(run("construct --family c_theta --theta 0.7 --grid 24 --out round.grid").exit_code == 0);
    const RunResult verified = run("check --dump round.grid --which quasi --tol 1e-6");
    CHECK(verified.exit_code == 0);
    const auto report = nlohmann::json::parse(verified.output);
    CHECK(report["resolution"] == 24);

    {
        std::ofstream broken("broken.grid");
        broken << "2 8\n0.0 0.1\n";
    }
    CHECK(run("check --dump broken.grid --which copula").exit_code == 2);
    CHECK(run("check --dump never_written.grid --which copula").exit_code == 2);
}

TEST_CASE("experiment: tables, formats, determinism") {
    const RunResult unknown = run("experiment warp-drive");
    CHECK(unknown.exit_code == 2);

    const RunResult csv = run("experiment tv-vs-d1 --grid 128 --out tv1.csv");
    CHECK(csv.exit_code == 0);
    std::istringstream lines(read_file("tv1.csv"));
    std::string line;
    int rows = 0;
    bool header_seen = false;
    while (std::getline(lines, line)) {
        if (!header_seen) {
            CHECK(line == "n,d1,d1_bound,tv,tv_limit,grid,tolerance");
            header_seen = true;
        } else if (!line.empty()) {
            ++rows;
        }
    }
    CHECK(rows == 4);

    // Identical config, identical bytes.
    CHECK(run("experiment tv-vs-d1 --grid 128 --out tv2.csv").exit_code == 0);
    CHECK(read_file("tv1.csv") == read_file("tv2.csv"));

    const RunResult as_json = run("experiment quasi-volume --format json");
    CHECK(as_json.exit_code == 0);
    const auto parsed = nlohmann::json::parse(as_json.output);
    REQUIRE(parsed.is_array());
    CHECK(parsed.size() == 3);
    bool w3_seen = false;
    for (const auto& row : parsed)
        if (row["family"] == "w3") {
            w3_seen = true;
            CHECK(std::stod(row["min_volume"].get<std::string>()) == doctest::Approx(-0.5));
        }
    CHECK(w3_seen);
}
