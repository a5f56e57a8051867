#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"

using namespace opo::cli;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "opo-sim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> v;
    for (const auto& l : lines(csv))
        if (!l.empty() && l[0] != '#') v.push_back(l);
    return v;
}

std::string temp_path(const std::string& name) { return "/tmp/opo_cli_test_" + name; }

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("spectrum CSV for the below-threshold DOPO") {
    const auto r = run_cli({"spectrum", "--model", "dopo", "--sigma", "0.5", "--quadrature", "Y", "--omega", "0:10:0.05"});
    REQUIRE(r.code == 0);
    const auto rows = data_rows(r.out);
    REQUIRE(rows.size() == 202);
    CHECK(rows[0] == "omega,V,stderr,quadrature,method");
    CHECK(rows[1].rfind("0,0.1111111111111111", 0) == 0);
    CHECK(r.out.find("# tool: opo-sim") != std::string::npos);
    CHECK(r.out.find("# config_hash: ") != std::string::npos);
}

TEST_CASE("engine and closed form agree through the CLI") {
    const auto a = run_cli({"spectrum", "--model", "dopo", "--sigma", "0.5", "--omega", "1", "--quadrature", "X"});
    const auto b = run_cli({"spectrum", "--model", "dopo", "--sigma", "0.5", "--omega", "1", "--quadrature", "X",
                            "--method", "engine"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const double va = std::stod(data_rows(a.out)[1].substr(2)), vb = std::stod(data_rows(b.out)[1].substr(2));
    CHECK(std::abs(va - vb) < 1e-12);
}

TEST_CASE("schema errors exit with code 2") {
    CHECK(run_cli({"spectrum", "--bogus", "1"}).code == kSchemaError);
    CHECK(run_cli({"spectrum", "--sigma", "abc"}).code == kSchemaError);
    CHECK(run_cli({"simulate", "--model", "dopo", "--sigma", "0.5"}).code == kSchemaError);
    CHECK(run_cli({"spectrum", "--format", "xml"}).code == kSchemaError);
    const std::string p = temp_path("unknown.json");
    std::ofstream(p) << R"({"sigma": 0.5, "colour": "red"})";
    const auto r = run_cli({"spectrum", "--config", p});
    CHECK(r.code == kSchemaError);
    CHECK(r.err.find("colour") != std::string::npos);
    std::ofstream(p) << R"({"sigma": "half"})";
    CHECK(run_cli({"spectrum", "--config", p}).code == kSchemaError);
    CHECK(run_cli({"spectrum", "--config", "/nonexistent/cfg.json"}).code == kSchemaError);
    std::remove(p.c_str());
    CHECK_THROWS_AS(parse_config_text("{\"sigma\": 1, \"nope\": 2}", "spectrum"), config_error);
    CHECK_THROWS_AS(parse_config_text("[1, 2]", "spectrum"), config_error);
}

TEST_CASE("numeric failures exit with code 3") {
    const auto r = run_cli({"spectrum", "--case", "dopo-below", "--sigma", "1.5", "--omega", "0"});
    CHECK(r.code == kNumericError);
    CHECK(r.err.find("spectra") != std::string::npos);
}

TEST_CASE("unwritable output exits with code 4") {
    CHECK(run_cli({"spectrum", "--model", "dopo", "--sigma", "0.5", "--omega", "0", "--output", "/nonexistent/dir/x.csv"})
              .code == kIoError);
}

TEST_CASE("JSON output: hash re-check and lossless round trip") {
    const std::string p1 = temp_path("a.json"), p2 = temp_path("b.json");
    const auto r = run_cli({"spectrum", "--model", "dopo", "--sigma", "0.25", "--omega", "0,1,2", "--format", "json",
                            "--output", p1});
    REQUIRE(r.code == 0);
    const auto doc = Json::parse(slurp(p1));
    CHECK(doc["tool"] == "opo-sim");
    CHECK(doc["config_hash"] == config_hash(doc["config"]));
    CHECK(doc["columns"].size() == 5);
    CHECK(doc["rows"].size() == 3);
    const auto parsed = parse_config_text(slurp(p1), "spectrum");
    CHECK(parsed["sigma"] == 0.25);
    // Feeding the document back reproduces it; only the echoed output path differs.
    const auto again = run_cli({"spectrum", "--config", p1, "--output", p2});
    REQUIRE(again.code == 0);
    auto doc2 = Json::parse(slurp(p2));
    CHECK(doc2["rows"] == doc["rows"]);
    CHECK(doc2["summary"] == doc["summary"]);
    doc2["config"]["output"] = p1;
    CHECK(doc2["config"] == doc["config"]);
    CHECK(config_hash(doc2["config"]) == doc["config_hash"]);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("simulations are deterministic for a fixed seed") {
    const std::vector<std::string> args{"simulate", "--model", "dopo", "--sigma", "0.5", "--g", "0.1",
                                        "--dt", "0.01", "--t-end", "5", "--trajectories", "300", "--seed", "7"};
    const auto a = run_cli(args);
    auto args3 = args;
    args3.insert(args3.end(), {"--threads", "3"});
    const auto b = run_cli(args3);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(data_rows(a.out) == data_rows(b.out));
    CHECK(a.out == run_cli(args).out);
    auto other = args;
    other.back() = "8";
    CHECK(data_rows(run_cli(other).out) != data_rows(a.out));
}

TEST_CASE("other commands produce their tables") {
    auto r = run_cli({"steady-scan", "--model", "dopo", "--parameter", "sigma", "--lo", "0", "--hi", "2", "--n", "101"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("event:") != std::string::npos);
    r = run_cli({"lattice", "--M", "2", "--xi", "0.5", "--t-end", "1", "--n", "10"});
    REQUIRE(r.code == 0);
    CHECK(data_rows(r.out).size() == 11);
    CHECK(data_rows(r.out)[0] == "t,n_T,R");
    r = run_cli({"entangle", "--lambda", "0.5", "--k-max", "4"});
    REQUIRE(r.code == 0);
    CHECK(data_rows(r.out).size() == 6);
    r = run_cli({"cavity", "--R1", "inf", "--R2", "0.01", "--L", "0.005"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("inf") != std::string::npos);
    r = run_cli({"validate", "--criteria", "3,11"});
    CHECK(r.code == 0);
    CHECK(r.err.find("PASS 3") != std::string::npos);
    CHECK(run_cli({"validate", "--criteria", "13"}).code == kSchemaError);
}

TEST_CASE("helpers") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(config_hash(Json::parse(R"({"b":1,"a":2})")) == config_hash(Json::parse(R"({"a":2,"b":1})")));
    CHECK(config_hash(Json::object()).size() == 16);
    const auto g = parse_grid("0:1:0.25");
    REQUIRE(g.size() == 5);
    CHECK(g.back() == doctest::Approx(1.0));
    CHECK(parse_grid("3,1,2") == std::vector<double>{3, 1, 2});
    CHECK(parse_grid("2.5") == std::vector<double>{2.5});
    CHECK_THROWS(parse_grid("1:0:0.1"));
    CHECK_THROWS(parse_grid("x"));
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0 / 0.0) == "inf");
    CHECK(std::stod(format_double(1.0 / 3)) == 1.0 / 3);
    CHECK(coerce("cavity", "R1", "inf", "--R1") == "inf");
    CHECK_THROWS_AS(coerce("cavity", "L", "inf", "--L"), config_error);
    CHECK(commands().size() == 7);
}
