#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "optcompact/io.hpp"

using namespace optcompact;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int code = optcompact::cli::run_cli(args, o, e);
    return {code, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("optcompact_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string put_config(const fs::path& dir, const std::string& name, const json& j) {
    const fs::path p = dir / name;
    write_text_file(p, j.dump(2), true);
    return p.string();
}

// m -> (a, b) from a coefficients CSV
std::map<int, std::pair<double, double>> read_coeffs(const fs::path& p) {
    std::istringstream in(read_text_file(p));
    std::string line;
    std::getline(in, line);
    std::map<int, std::pair<double, double>> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int m;
        double a, b;
        char c1, c2;
        std::istringstream ls(line);
        ls >> m >> c1 >> a >> c2 >> b;
        out[m] = {a, b};
    }
    return out;
}

const fs::path kGolden = fs::path(OPTCOMPACT_SOURCE_DIR) / "testdata" / "appendix_b";

}  // namespace

TEST_CASE("derive matches the golden second-derivative table") {
    const fs::path dir = scratch("derive");
    const auto cfg = put_config(dir, "c.json", json::parse(R"({"d":2,"stencils":[{"order":4,"M":3}]})"));
    const Run r = invoke({"derive", "--config", cfg, "--out", (dir / "o").string()});
    REQUIRE(r.code == 0);
    const auto got = read_coeffs(dir / "o" / "OFD_3_3_3_3_o4_d2.csv");
    int compared = 0;
    for (const auto& g : read_golden_csv(kGolden / "d2_central.csv")) {
        if (!(g.spec == StencilSpec::equal(2, 4, 3))) continue;
        CHECK(std::abs(got.at(g.m).first - g.a) <= 1e-8);
        CHECK(std::abs(got.at(g.m).second - g.b) <= 1e-8);
        ++compared;
    }
    CHECK(compared == 4);

    const json rep = read_json_file(dir / "o" / "derive_report.json");
    REQUIRE(rep.size() == 1);
    CHECK(rep[0].at("kkt").at("ok") == true);
    CHECK(rep[0].at("kkt").at("perturbations") == 100);
    fs::remove_all(dir);
}

TEST_CASE("derive of an explicit stencil writes a unit b") {
    const fs::path dir = scratch("explicit");
    const auto cfg = put_config(dir, "c.json", json::parse(R"({"stencil":{"d":2,"order":4,"mAL":3,"mAR":3,"mBL":0,"mBR":0}})"));
    REQUIRE(invoke({"derive", "--config", cfg, "--out", (dir / "o").string(), "--format", "json"}).code == 0);
    const json c = read_json_file(dir / "o" / "OFD_3_3_0_0_o4_d2.json");
    const auto b = c.at("b").get<std::vector<double>>();
    REQUIRE(b.size() == 7);
    for (int i = 0; i < 7; ++i) CHECK(b[i] == (i == 3 ? 1.0 : 0.0));
    fs::remove_all(dir);
}

TEST_CASE("derive at M=6 is a numerical failure") {
    const fs::path dir = scratch("m6");
    const auto cfg = put_config(dir, "c.json", json::parse(R"({"stencil":{"d":2,"order":4,"M":6}})"));
    const Run r = invoke({"derive", "--config", cfg, "--out", (dir / "o").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("rank") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("usage errors exit 1") {
    const fs::path dir = scratch("usage");
    CHECK(invoke({"derive", "--out", dir.string()}).code == 1);
    CHECK(invoke({"derive", "--config", (dir / "nope.json").string(), "--out", dir.string()}).code == 1);
    CHECK(invoke({"nonsense"}).code == 1);
    CHECK(invoke({}).code == 1);
    const auto cfg = put_config(dir, "c.json", json::parse(R"({"d":2,"stencils":[{"order":4,"M":2}]})"));
    CHECK(invoke({"derive", "--config", cfg, "--format", "xml", "--out", dir.string()}).code == 1);
    CHECK(invoke({"derive", "--config", cfg, "--threads", "0", "--out", dir.string()}).code == 1);
    const auto bad = put_config(dir, "bad.json", json::parse(R"({"d":2,"stencils":[{"order":4}]})"));
    CHECK(invoke({"derive", "--config", bad, "--out", dir.string()}).code == 1);
    CHECK(invoke({"derive", "--help"}).code == 0);
    fs::remove_all(dir);
}

TEST_CASE("outputs are not overwritten without --force") {
    const fs::path dir = scratch("force");
    const auto cfg = put_config(dir, "c.json", json::parse(R"({"d":1,"stencils":[{"order":4,"M":2}]})"));
    const std::string out = (dir / "o").string();
    REQUIRE(invoke({"derive", "--config", cfg, "--out", out}).code == 0);
    const std::string first = read_text_file(dir / "o" / "OFD_2_2_2_2_o4_d1.csv");
    const Run again = invoke({"derive", "--config", cfg, "--out", out});
    CHECK(again.code == 1);
    CHECK(again.err.find("--force") != std::string::npos);
    REQUIRE(invoke({"derive", "--config", cfg, "--out", out, "--force"}).code == 0);
    CHECK(read_text_file(dir / "o" / "OFD_2_2_2_2_o4_d1.csv") == first);
    fs::remove_all(dir);
}

TEST_CASE("tables diff against golden files") {
    const fs::path dir = scratch("tables");
    fs::create_directories(dir / "g");
    fs::copy_file(kGolden / "d1_central.csv", dir / "g" / "d1_central.csv");
    const auto cfg = put_config(dir, "c.json", json{{"golden", (dir / "g").string()}});
    const Run ok = invoke({"tables", "--config", cfg, "--out", (dir / "o").string()});
    CHECK(ok.code == 0);
    const json diff = read_json_file(dir / "o" / "tables_diff.json");
    CHECK(diff.at("pass") == true);
    CHECK(fs::exists(dir / "o" / "d1_central.csv"));

    auto rows = read_golden_csv(dir / "g" / "d1_central.csv");
    rows.back().a += 1e-6;
    write_text_file(dir / "g" / "d1_central.csv", golden_csv(rows), true);
    const Run bad = invoke({"tables", "--config", cfg, "--out", (dir / "o2").string()});
    CHECK(bad.code == 2);
    CHECK(read_json_file(dir / "o2" / "tables_diff.json").at("files")[0].at("mismatches").size() == 1);

    const auto missing = put_config(dir, "m.json", json{{"golden", (dir / "nowhere").string()}});
    CHECK(invoke({"tables", "--config", missing, "--out", (dir / "o3").string()}).code == 1);
    fs::remove_all(dir);
}

TEST_CASE("stability orders FE below ERK4") {
    const fs::path dir = scratch("stab");
    const auto cfg = put_config(dir, "c.json", json::parse(R"({
        "betas": [-0.1, 0.2], "Np": 31, "tableaux": ["FE", "ERK4", "IRK3"],
        "families": [{"order": 4, "M": 2}], "twoNormFE": true,
        "region": [{"tableau": "ERK4", "n": 11}]})"));
    const Run r = invoke({"stability", "--config", cfg, "--out", (dir / "o").string(), "--format", "json"});
    REQUIRE(r.code == 0);
    const json t = read_json_file(dir / "o" / "stability_dtmax.json");
    const auto& rows = t.at("rows");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][1] == "FE");
    CHECK(rows[1][1] == "ERK4");
    const double fe = rows[0][4], erk4 = rows[1][4];
    CHECK(fe < erk4);
    CHECK(rows[2][3] == 1);
    const json meta = read_json_file(dir / "o" / "stability_meta.json");
    const double fe2 = meta.at("schemes")[0].at("forwardEuler2NormDt");
    CHECK(fe2 <= fe * (1.0 + 1e-6));
    CHECK(fs::exists(dir / "o" / "region_ERK4.json"));
    fs::remove_all(dir);
}

TEST_CASE("solve runs, records the seed and reports aborts") {
    const fs::path dir = scratch("solve");
    const auto zero = put_config(dir, "z.json", json::parse(R"({
        "case": {"betas": [-0.1, 0.2], "Np": 32, "kmax": 4, "amplitude": {"kind": "constant", "scale": 0.0},
                 "horizon": {"kind": "physical", "value": 0.05}},
        "schemes": ["OFD(2,2,2,2)^4"]})"));
    const Run ok = invoke({"solve", "--config", zero, "--out", (dir / "o").string(), "--seed", "17"});
    REQUIRE(ok.code == 0);
    const json meta = read_json_file(dir / "o" / "solve_meta.json");
    CHECK(meta.at("seed") == 17);
    CHECK(meta.at("runs")[0].at("tableau") == "ERK2");
    CHECK(meta.at("runs")[0].at("maxErrorVsAnalytic") == 0.0);
    CHECK(fs::exists(dir / "o" / "OFD_2_2_2_2_o4_snapshots.csv"));

    const auto hot = put_config(dir, "h.json", json::parse(R"({
        "case": {"betas": [-0.1, 0.2], "Np": 32, "kmax": 8, "tableau": "FE", "cfl": 5.0,
                 "horizon": {"kind": "physical", "value": 50}},
        "schemes": ["OFD(2,2,2,2)^4"]})"));
    const Run ab = invoke({"solve", "--config", hot, "--out", (dir / "o2").string()});
    CHECK(ab.code == 3);
    const json m2 = read_json_file(dir / "o2" / "solve_meta.json");
    CHECK(m2.at("runs")[0].at("aborted") == true);
    CHECK(m2.at("runs")[0].at("message").get<std::string>().find("stable limit") != std::string::npos);

    const auto implicitNl = put_config(dir, "i.json", json::parse(R"({
        "case": {"betas": [0.0, 0.04], "nonlinear": true, "Np": 32, "kmax": 4, "tableau": "IRK2",
                 "horizon": {"kind": "physical", "value": 0.01}},
        "schemes": ["OFD(2,2,2,2)^4"]})"));
    CHECK(invoke({"solve", "--config", implicitNl, "--out", (dir / "o3").string()}).code == 1);
    fs::remove_all(dir);
}

TEST_CASE("verify with a small suite") {
    const fs::path dir = scratch("verify");
    const auto cfg = put_config(dir, "c.json", json::parse(R"({"mMax": 2, "dMax": 2, "Np": 32, "convergence": false})"));
    const Run r = invoke({"verify", "--config", cfg, "--out", (dir / "o").string()});
    CHECK(r.code == 0);
    const json v = read_json_file(dir / "o" / "verify.json");
    CHECK(v.at("pass") == true);
    CHECK(v.at("checks").size() > 4);
    fs::remove_all(dir);
}

TEST_CASE("spectrum custom curves") {
    const fs::path dir = scratch("spectrum");
    const auto cfg = put_config(dir, "c.json", json::parse(R"({
        "custom": {"schemes": ["OFD(3,3,3,3)^4", "SFD(1,1,1,1)^4"], "d": 2, "kind": "real_err", "samples": 4}})"));
    REQUIRE(invoke({"spectrum", "--config", cfg, "--out", (dir / "o").string()}).code == 0);
    const std::string csv = read_text_file(dir / "o" / "real_err.csv");
    CHECK(csv.rfind("eta,real_err:OFD_3_3_3_3_o4,real_err:SFD_1_1_1_1_o4\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    const auto none = put_config(dir, "n.json", json::object());
    CHECK(invoke({"spectrum", "--config", none, "--out", (dir / "o2").string()}).code == 1);
    fs::remove_all(dir);
}
