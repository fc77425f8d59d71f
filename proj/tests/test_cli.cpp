#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qres/cli.hpp"
#include "qres/io.hpp"

using namespace qres;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int exit_code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::vector<const char*> argv = {"qres"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string config_path(const std::string& name) {
    return std::string(QRES_CONFIG_DIR) + "/" + name;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("qres_test_" + name);
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p);
    f << content;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("list names the witnesses and free sets") {
    const CliRun r = run({"list"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("coherence") != std::string::npos);
    CHECK(r.out.find("stabilizer") != std::string::npos);
    CHECK(r.out.find("maximally-mixed") != std::string::npos);
}

TEST_CASE("simulate emits the reference table") {
    const CliRun r = run({"simulate", "--config", config_path("coherence-qubit.json"),
                          "--format", "json"});
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["num_y"] == 3);
    CHECK(j["num_x"] == 2);
    CHECK(j["num_j"] == 2);
    CHECK(std::abs(j["probs"][0][0][0].get<double>() - 0.8535533905932737) < 1e-12);

    const CliRun csv = run({"simulate", "--config", config_path("coherence-qubit.json"),
                            "--format", "csv"});
    CHECK(csv.exit_code == 0);
    CHECK(csv.out.rfind("y,x,j,p\n", 0) == 0);
}

TEST_CASE("witness round-trips through a table file") {
    const auto table_path = temp_file("roundtrip_table.json");
    const CliRun sim = run({"simulate", "--config", config_path("coherence-qubit.json"),
                            "--format", "json", "--out", table_path.string()});
    REQUIRE(sim.exit_code == 0);

    const CliRun direct = run({"witness", "--config", config_path("coherence-qubit.json")});
    const CliRun via_file = run({"witness", "--table", table_path.string(), "--witness",
                                 "coherence"});
    REQUIRE(direct.exit_code == 0);
    REQUIRE(via_file.exit_code == 0);
    CHECK(direct.out == via_file.out);
    CHECK(direct.out.find("4.41421356237") != std::string::npos);
    CHECK(direct.out.find("VIOLATED") != std::string::npos);
    fs::remove(table_path);
}

TEST_CASE("witness names the published value for magic") {
    const CliRun r = run({"witness", "--config", config_path("magic.json")});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("certified-numeric") != std::string::npos);
    CHECK(r.out.find("4.32") != std::string::npos);
    CHECK(r.out.find("VIOLATED") != std::string::npos);
}

TEST_CASE("detect reports ranks and the stabilizer warning") {
    const CliRun fired = run({"detect", "--config", config_path("max-rank-d2.json")});
    REQUIRE(fired.exit_code == 0);
    CHECK(fired.out.find("RESOURCE_DETECTED") != std::string::npos);
    CHECK(fired.out.find("singular values") != std::string::npos);

    const CliRun quiet = run({"detect", "--config", config_path("incoherent-free-d2.json")});
    REQUIRE(quiet.exit_code == 0);
    CHECK(quiet.out.find("CONSISTENT_WITH_FREE") != std::string::npos);

    const CliRun warned = run({"detect", "--config", config_path("max-rank-d2.json"),
                               "--free-set", "stabilizer"});
    REQUIRE(warned.exit_code == 0);
    CHECK(warned.out.find("CONSISTENT_WITH_FREE") != std::string::npos);
    CHECK(warned.out.find("d^2") != std::string::npos);
}

TEST_CASE("certify is reproducible for a fixed seed") {
    const std::vector<std::string> args = {"certify", "--witness", "coherence", "--free-set",
                                           "incoherent", "--restarts", "25", "--seed", "99"};
    const CliRun a = run(args);
    const CliRun b = run(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("certified value:     4\n") != std::string::npos);
    CHECK(a.out.find("lower bound") != std::string::npos);
    CHECK(a.out.find("seed:                99") != std::string::npos);
}

TEST_CASE("qres_seed environment variable is the fallback seed") {
    setenv("QRES_SEED", "4242", 1);
    const CliRun r = run({"certify", "--witness", "purity", "--free-set", "maximally-mixed",
                          "--restarts", "3"});
    unsetenv("QRES_SEED");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("seed:                4242") != std::string::npos);
}

TEST_CASE("generic witness estimates epsilon from a free set") {
    const auto ref_path = temp_file("generic_ref.json");
    const CliRun sim = run({"simulate", "--config", config_path("max-rank-d2.json"),
                            "--format", "json", "--out", ref_path.string()});
    REQUIRE(sim.exit_code == 0);

    const CliRun self = run({"witness", "--table", ref_path.string(), "--witness", "generic",
                             "--ref-table", ref_path.string(), "--epsilon", "0.5"});
    REQUIRE(self.exit_code == 0);
    CHECK(self.out.find("value:       0\n") != std::string::npos);
    CHECK(self.out.find("VIOLATED") != std::string::npos); // 0 > -0.5

    const CliRun estimated = run({"witness", "--table", ref_path.string(), "--witness",
                                  "generic", "--ref-table", ref_path.string(), "--free-set",
                                  "incoherent", "--seed", "3"});
    REQUIRE(estimated.exit_code == 0);
    CHECK(estimated.out.find("free bound:  -") != std::string::npos);
    fs::remove(ref_path);
}

TEST_CASE("validation failures exit with code 1 and name the field") {
    const auto bad_path = temp_file("bad_config.json");
    write_file(bad_path, R"({
        "dimension": 2,
        "preparations": ["ket 0"],
        "instruments": [["proj ket 0", "proj ket 0"]]
    })");
    const CliRun r = run({"simulate", "--config", bad_path.string()});
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("x=0") != std::string::npos);
    fs::remove(bad_path);

    const CliRun missing = run({"simulate", "--config", "/nonexistent/config.json"});
    CHECK(missing.exit_code == 1);

    const CliRun unknown = run({"witness", "--config", config_path("coherence-qubit.json"),
                                "--witness", "bogus"});
    CHECK(unknown.exit_code == 1);
    CHECK(unknown.err.find("bogus") != std::string::npos);

    const CliRun badfield = run({"detect", "--config", config_path("coherence-qubit.json"),
                                 "--mode", "sideways"});
    CHECK(badfield.exit_code == 1);

    const auto dust_path = temp_file("unnormalized_table.json");
    write_file(dust_path, R"({"num_y":1,"num_x":1,"num_j":2,"probs":[[[0.6,0.3]]]})");
    const CliRun badtable = run({"witness", "--table", dust_path.string(), "--witness",
                                 "purity"});
    CHECK(badtable.exit_code == 1);
    fs::remove(dust_path);
}

TEST_CASE("named constructors cover the built-in states") {
    const auto cfg_path = temp_file("named_states.json");
    write_file(cfg_path, R"({
        "dimension": 3,
        "preparations": ["qrac d=3 y0=1 y1=2", "ket 2", "fourier 1", "mixed"],
        "instruments": ["zbasis", "xbasis"]
    })");
    const CliRun r = run({"simulate", "--config", cfg_path.string(), "--format", "json"});
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["num_y"] == 4);
    CHECK(j["num_j"] == 3);
    // the maximally mixed preparation sees flat statistics in both bases
    for (int x = 0; x < 2; ++x) {
        for (int out = 0; out < 3; ++out) {
            CHECK(std::abs(j["probs"][3][x][out].get<double>() - 1.0 / 3.0) < 1e-10);
        }
    }
    fs::remove(cfg_path);

    const auto matrix_path = temp_file("matrix_state.json");
    write_file(matrix_path, R"({
        "dimension": 2,
        "preparations": [{"matrix": [[[0.5, 0], [0, -0.5]], [[0, 0.5], [0.5, 0]]]}],
        "instruments": ["ybasis"]
    })");
    const CliRun m = run({"simulate", "--config", matrix_path.string(), "--format", "json"});
    REQUIRE(m.exit_code == 0);
    const auto jm = nlohmann::json::parse(m.out);
    // the state is |+y><+y| written out as a matrix
    CHECK(std::abs(jm["probs"][0][0][0].get<double>() - 1.0) < 1e-10);
    fs::remove(matrix_path);
}

TEST_CASE("json output formats parse") {
    const CliRun w = run({"witness", "--config", config_path("purity-d2.json"), "--format",
                          "json"});
    REQUIRE(w.exit_code == 0);
    const auto jw = nlohmann::json::parse(w.out);
    CHECK(jw["value"] == 1.0);
    CHECK(jw["free_bound"] == 0.5);
    CHECK(jw["verdict"] == "VIOLATED");

    const CliRun d = run({"detect", "--config", config_path("incoherent-free-d2.json"),
                          "--format", "json"});
    REQUIRE(d.exit_code == 0);
    const auto jd = nlohmann::json::parse(d.out);
    CHECK(jd["verdict"] == "CONSISTENT_WITH_FREE");
    CHECK(jd["reports"].size() == 2);

    const CliRun c = run({"certify", "--witness", "coherence-d", "--free-set", "incoherent",
                          "--dimension", "3", "--seed", "1", "--format", "json"});
    REQUIRE(c.exit_code == 0);
    const auto jc = nlohmann::json::parse(c.out);
    CHECK(jc["certified_value"] == 12.0);
    CHECK(jc["paper_value"] == 12.0);
}

TEST_CASE("exhausted optimizer exits with code 3") {
    const CliRun r = run({"certify", "--witness", "imaginarity", "--free-set", "real",
                          "--restarts", "2", "--max-rounds", "1", "--tol", "1e-30", "--seed",
                          "1"});
    CHECK(r.exit_code == 3);
    CHECK(r.out.find("converged restarts:  0 / 2") != std::string::npos);
}

TEST_CASE("help and bad invocations") {
    const CliRun help = run({"--help"});
    CHECK(help.exit_code == 0);
    const CliRun nothing = run({});
    CHECK(nothing.exit_code == 1);
    const CliRun badsub = run({"frobnicate"});
    CHECK(badsub.exit_code == 1);
}

} // TEST_SUITE
