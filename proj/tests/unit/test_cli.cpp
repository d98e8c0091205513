#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gaussvol/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "gaussvol");
    std::ostringstream out, err;
    const int code = gaussvol::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_body(const std::string& name, const std::string& text) {
    const auto path = fs::temp_directory_path() / ("gaussvol_cli_" + name + ".json");
    std::ofstream(path) << text;
    return path.string();
}

const std::string kBox2 = R"({"dim": 2, "type": "box", "lower": [-1, -1], "upper": [1, 1]})";

}  // namespace

TEST_CASE("oracle on a halfspace through the origin") {
    const auto body = write_body("half0", R"({"dim": 3, "type": "halfspace", "a": [1, 0, 0], "b": 0})");
    const auto r = run({"oracle", "--body", body, "--draws", "100000"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["analytic"] == true);
    CHECK(doc["measure"].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
    const double est = doc["monte_carlo"]["estimate"];
    CHECK(std::abs(est - 0.5) <= 4.0 * doc["monte_carlo"]["stderr"].get<double>());
}

TEST_CASE("oracle without a closed form reports a notice") {
    const auto body = write_body("poly", R"({"dim": 2, "type": "polytope",
        "A": [[1, 1], [-1, 0], [0, -1]], "b": [3, 2, 2]})");
    const auto r = run({"oracle", "--body", body, "--draws", "1000", "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("analytic,measure,mc_estimate,mc_stderr,draws\nfalse,,", 0) == 0);
}

TEST_CASE("volume is reproducible for a fixed seed") {
    const auto body = write_body("box2", kBox2);
    const std::vector<std::string> args = {"volume", "--body", body, "--seed", "11", "--eps", "0.5"};
    auto a = json::parse(run(args).out);
    auto b = json::parse(run(args).out);
    a.erase("wall_ms");
    b.erase("wall_ms");
    CHECK(a == b);
    CHECK(a["seed"] == 11);
    CHECK(a["measure"].get<double>() > 0.3);
    CHECK(a["measure"].get<double>() < 0.65);
    CHECK(a["log_integral"].get<double>() ==
          doctest::Approx(a["log_measure"].get<double>() + std::log(2 * M_PI)).epsilon(1e-12));

    const auto c = run({"volume", "--body", body, "--seed", "11", "--eps", "0.5", "--format", "csv"});
    REQUIRE(c.code == 0);
    CHECK(c.out.rfind("log_measure,measure,", 0) == 0);
    std::istringstream lines(c.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(std::stod(row.substr(0, row.find(','))) == a["log_measure"].get<double>());
}

TEST_CASE("seed falls back to the environment") {
    const auto body = write_body("box2", kBox2);
    ::setenv("GAUSSVOL_SEED", "11", 1);
    auto env = json::parse(run({"volume", "--body", body, "--eps", "0.5"}).out);
    ::unsetenv("GAUSSVOL_SEED");
    auto flag = json::parse(run({"volume", "--body", body, "--eps", "0.5", "--seed", "11"}).out);
    CHECK(env["log_measure"] == flag["log_measure"]);

    ::setenv("GAUSSVOL_SEED", "eleven", 1);
    CHECK(run({"volume", "--body", body}).code == gaussvol::kExitInput);
    ::unsetenv("GAUSSVOL_SEED");
}

TEST_CASE("a facet inside the unit ball is rejected") {
    // b/‖a‖ = 0.8 < 1.
    const auto body = write_body("close", R"({"dim": 2, "type": "polytope",
        "A": [[0.6, 0.8], [-1, 0]], "b": [0.8, 2]})");
    const auto r = run({"volume", "--body", body});
    CHECK(r.code == gaussvol::kExitInput);
    CHECK(r.err.find("unit ball") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("exit codes") {
    CHECK(run({"volume"}).code == gaussvol::kExitInput);
    CHECK(run({"volume", "--body", "/nonexistent.json"}).code == gaussvol::kExitInput);
    const auto box = write_body("box2", kBox2);
    CHECK(run({"volume", "--body", box, "--eps", "1.5"}).code == gaussvol::kExitInput);
    CHECK(run({"volume", "--body", box, "--format", "xml"}).code == gaussvol::kExitInput);
    CHECK(run({"volume", "--body", box, "--fail-prob", "0"}).code == gaussvol::kExitInput);

    // Overriding the containment check on a body far from the origin leaves the
    // first phase with nothing to sample.
    const auto far = write_body("far", R"({"dim": 2, "type": "box", "lower": [6, 6], "upper": [7, 7]})");
    const auto r = run({"volume", "--body", far, "--assume-contains-unit-ball"});
    CHECK(r.code == gaussvol::kExitRuntime);
    CHECK(r.err.find("trials") != std::string::npos);
}

TEST_CASE("sample prints one point per line") {
    const auto body = write_body("box2", kBox2);
    const auto r = run({"sample", "--body", body, "--count", "50", "--eps", "0.5"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        const auto p = json::parse(line);
        REQUIRE(p.is_array());
        REQUIRE(p.size() == 2);
        for (const auto& v : p) {
            CHECK(std::abs(v.get<double>()) <= 1.0);
        }
        ++rows;
    }
    CHECK(rows == 50);

    const auto csv = run({"sample", "--body", body, "--count", "3", "--format", "csv"});
    REQUIRE(csv.code == 0);
    CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 3);
    CHECK(std::count(csv.out.begin(), csv.out.end(), ',') == 3);
}

TEST_CASE("diagnose reports every section") {
    const auto body = write_body("box3", R"({"dim": 3, "type": "box", "lower": [-1,-1,-1], "upper": [1,1,1]})");
    const auto r = run({"diagnose", "--body", body, "--points", "50", "--trials", "50", "--samples", "500"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    std::vector<std::string> names;
    for (const auto& rep : doc["reports"]) names.push_back(rep["report"]);
    CHECK(names == std::vector<std::string>{"containment", "warmness_factor", "local_conductance",
                                            "average_local_conductance", "ratio_second_moment", "walk"});
    CHECK(doc["reports"][0]["result"] == "verified");
    CHECK(doc["reports"][2]["ell_hat"] == 1.0);
}

TEST_CASE("installed binary runs") {
    const auto body = write_body("half0", R"({"dim": 3, "type": "halfspace", "a": [1, 0, 0], "b": 0})");
    const std::string cmd = std::string(GAUSSVOL_CLI_PATH) + " oracle --draws 1000 --body " + body;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 256> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    CHECK(::pclose(pipe) == 0);
    CHECK(json::parse(out)["measure"].get<double>() == 0.5);

    const std::string bad = std::string(GAUSSVOL_CLI_PATH) + " oracle --body /nonexistent.json 2>/dev/null";
    const int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == 1);
}
