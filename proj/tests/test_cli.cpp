#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <periodlab/elliptic_periods.hpp>

#include "cli.hpp"

using namespace periodlab;
using json = nlohmann::json;

namespace
{

struct Result {
    int code;
    std::string out, err;
    json doc() const
    {
        return json::parse(out);
    }
};

Result call(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

Complex cx(const json &v)
{
    return {v[0].get<double>(), v[1].get<double>()};
}

std::filesystem::path temp_file(const std::string &name, const std::string &content)
{
    const auto p = std::filesystem::temp_directory_path() / ("periodlab_test_" + name);
    std::ofstream(p) << content;
    return p;
}

} // namespace

TEST_CASE("complex number syntax")
{
    CHECK(cli::parse_complex("i") == Complex(0.0, 1.0));
    CHECK(cli::parse_complex("-i") == Complex(0.0, -1.0));
    CHECK(cli::parse_complex("2") == Complex(2.0, 0.0));
    CHECK(cli::parse_complex("1.5-2i") == Complex(1.5, -2.0));
    CHECK(cli::parse_complex("-1e-3+2.5e1i") == Complex(-1e-3, 25.0));
    CHECK(cli::parse_complex(" 3 + i ") == Complex(3.0, 1.0));
    CHECK(cli::parse_complex("[0.25, -4]") == Complex(0.25, -4.0));
    CHECK(cli::parse_complex("+2i") == Complex(0.0, 2.0));
    CHECK_THROWS_AS(cli::parse_complex(""), Error);
    CHECK_THROWS_AS(cli::parse_complex("1+2"), Error);
    CHECK_THROWS_AS(cli::parse_complex("nan"), Error);
    CHECK_THROWS_AS(cli::parse_complex("1..2i"), Error);
}

TEST_CASE("ks-count")
{
    const Result r = call({"ks-count", "--n", "2", "--d", "4"});
    REQUIRE(r.code == 0);
    CHECK(r.doc()["m"] == 19);
    CHECK(r.doc()["inputs"]["n"] == 2);
}

TEST_CASE("j in both normalizations")
{
    const Result r = call({"j", "--tau", "i"});
    REQUIRE(r.code == 0);
    CHECK(std::abs(cx(r.doc()["j"]) - 1.0) < 1e-12);
    CHECK(std::abs(cx(r.doc()["j_1728"]) - 1728.0) < 1e-9);
    CHECK(cx(r.doc()["inputs"]["tau"]) == imag_unit);

    const Result q = call({"j-qexp", "--terms", "4"});
    REQUIRE(q.code == 0);
    CHECK(q.doc()["valuation"] == -1);
    CHECK(q.doc()["coefficients"] == json::array({1.0, 744.0, 196884.0, 21493760.0}));
}

TEST_CASE("exit codes")
{
    CHECK(call({}).code == cli::exit_validation);
    CHECK(call({"no-such-command"}).code == cli::exit_validation);
    CHECK(call({"periods", "--t2", "4"}).code == cli::exit_validation);
    CHECK(call({"periods", "--t2", "four", "--t3", "0"}).code == cli::exit_validation);
    CHECK(call({"j", "--tau", "2"}).code == cli::exit_validation);
    CHECK(call({"ks-count", "--n", "0", "--d", "4"}).code == cli::exit_validation);
    CHECK(call({"periods", "--t2", "4", "--t3", "0", "--tol", "-1"}).code == cli::exit_validation);
    CHECK(call({"--help"}).code == 0);

    // a singular fiber: Delta(3, 1) = 27 - 27
    const Result s = call({"periods", "--t2", "3", "--t3", "1"});
    CHECK(s.code == cli::exit_numerical);
    CHECK(s.out.empty());
    CHECK(json::parse(s.err)["error"] == "NearDiscriminant");
    CHECK(call({"j", "--tau", "6i"}).code == cli::exit_numerical);
}

TEST_CASE("periods round-trip through JSON exactly")
{
    const Result r = call({"periods", "--t2", "1+2i", "--t3", "-3+i"});
    REQUIRE(r.code == 0);
    const PeriodMatrix2 p = period_matrix({Complex(1.0, 2.0), Complex(-3.0, 1.0)});
    const json doc = r.doc();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(cx(doc["periods"][i][j]) == p.entries(i, j));
        }
    }
    CHECK(doc["legendre_sign"] == legendre_sign());
    CHECK(doc["diagnostics"]["det_defect"].get<double>() < 1e-8);
    // identical reruns
    CHECK(call({"periods", "--t2", "1+2i", "--t3", "-3+i"}).out == r.out);

    const Result n = call({"periods", "--t2", "1+2i", "--t3", "-3+i", "--normalize"});
    REQUIRE(n.code == 0);
    const Complex s = std::sqrt(2.0 * pi * imag_unit);
    CHECK(std::abs(cx(n.doc()["periods"][1][0]) * s - p.entries(1, 0)) < 1e-14);
    CHECK(n.doc()["normalized"] == true);
}

TEST_CASE("tolerance from the environment")
{
    ::setenv("PERIODLAB_TOL", "1e-9", 1);
    const Result r = call({"tau", "--t2", "4", "--t3", "0"});
    CHECK(r.doc()["tolerance"] == 1e-9);
    CHECK(call({"tau", "--t2", "4", "--t3", "0", "--tol", "1e-11"}).doc()["tolerance"] == 1e-11);
    ::setenv("PERIODLAB_TOL", "zero", 1);
    CHECK(call({"tau", "--t2", "4", "--t3", "0"}).code == cli::exit_validation);
    ::unsetenv("PERIODLAB_TOL");
    CHECK(call({"tau", "--t2", "4", "--t3", "0"}).doc()["tolerance"] == default_tol);
}

TEST_CASE("monodromy around a t3-root")
{
    const Result r = call({"monodromy", "--center", std::to_string(std::sqrt(64.0 / 27.0)), "--radius", "0.3"});
    REQUIRE(r.code == 0);
    const json doc = r.doc();
    CHECK(doc["trace"] == 2);
    CHECK(doc["det"] == 1);
    CHECK(doc["unipotent"] == true);
    CHECK(doc["matrix"] != json::array({json::array({1, 0}), json::array({0, 1})}));
    CHECK(doc["diagnostics"]["deviation"].get<double>() <= 1e-4);
    CHECK(doc["diagnostics"]["quadrature_agrees"] == true);

    // nothing enclosed
    const Result e = call({"monodromy", "--center", "5", "--radius", "0.3"});
    CHECK(e.doc()["matrix"] == json::array({json::array({1, 0}), json::array({0, 1})}));
    CHECK(call({"monodromy", "--center", "1", "--radius", "-1"}).code == cli::exit_validation);
}

TEST_CASE("pf-transport from path files")
{
    const auto straight = temp_file("straight.json", "[[4, 0], [[4, 0.5], [0.5, 0]]]");
    const Result r = call({"pf-transport", "--path-file", straight.string()});
    REQUIRE(r.code == 0);
    const json doc = r.doc();
    CHECK(doc["diagnostics"]["transport_vs_quadrature"].get<double>() < 1e-8);
    CHECK(doc["diagnostics"]["det_drift"].get<double>() < 1e-8);
    CHECK_FALSE(doc.contains("monodromy"));
    const PeriodMatrix2 end = period_matrix({Complex(4.0, 0.5), 0.5});
    CHECK(std::abs(cx(doc["end_periods"][0][1]) - end.entries(0, 1)) < 1e-8);

    const auto loop = temp_file("loop.json", "{\"loop\": {\"t2\": 4, \"center\": 1.5396, \"radius\": 0.3}}");
    const Result l = call({"pf-transport", "--path-file", loop.string()});
    REQUIRE(l.code == 0);
    CHECK(l.doc()["monodromy"] == json::array({json::array({1, 0}), json::array({-1, 1})}));

    const auto bad = temp_file("bad.json", "[[4, 0]]");
    CHECK(call({"pf-transport", "--path-file", bad.string()}).code == cli::exit_validation);
    const auto garbage = temp_file("garbage.json", "[[4, 0], ");
    CHECK(call({"pf-transport", "--path-file", garbage.string()}).code == cli::exit_validation);
    CHECK(call({"pf-transport", "--path-file", "/nonexistent/path.json"}).code == cli::exit_validation);
    std::filesystem::remove(straight);
    std::filesystem::remove(loop);
    std::filesystem::remove(bad);
    std::filesystem::remove(garbage);
}

TEST_CASE("hodge-check")
{
    const auto up = temp_file("up.json", "{\"tau\": [0.3, 1.2]}");
    const auto down = temp_file("down.json", "{\"tau\": \"0.3-1.2i\"}");
    const Result u = call({"hodge-check", "--point-file", up.string()});
    REQUIRE(u.code == 0);
    CHECK(u.doc()["passed"] == true);
    CHECK(u.doc()["riemann_clauses"] == json::array({true, true, true, true}));
    const Result d = call({"hodge-check", "--point-file", down.string()});
    REQUIRE(d.code == 0);
    CHECK(d.doc()["first_relation"] == true);
    CHECK(d.doc()["second_relation"] == false);

    // weight 2, h = (1, 1, 1), explicit filtration
    const auto w2 = temp_file("w2.json", R"({"weight": 2, "hodge_numbers": [1, 1, 1],
        "psi": [[-1, 0, 0], [0, -1, 0], [0, 0, 1]],
        "filtration": [[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                       [[1, 0], [[0, 1], 0], [0, 1]],
                       [[1], [[0, 1]], [0]]]})");
    const Result w = call({"hodge-check", "--point-file", w2.string()});
    REQUIRE(w.code == 0);
    CHECK(w.doc()["passed"] == true);

    const auto wrong = temp_file("wrong.json", R"({"weight": 2, "hodge_numbers": [1, 1, 1],
        "psi": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "filtration": [[[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[1], [0], [0]]]})");
    CHECK(call({"hodge-check", "--point-file", wrong.string()}).code == cli::exit_validation);
    for (const auto &p : {up, down, w2, wrong}) {
        std::filesystem::remove(p);
    }
}

TEST_CASE("domain-dims")
{
    for (int g = 1; g <= 4; ++g) {
        const std::string h = std::to_string(g) + "," + std::to_string(g);
        const Result r = call({"domain-dims", "--weight", "1", "--hodge-numbers", h});
        REQUIRE(r.code == 0);
        CHECK(r.doc()["dims"]["D"] == g * (g + 1) / 2);
        CHECK(r.doc()["hermitian_case"] == "Case1");
    }
    const Result k3 = call({"domain-dims", "--weight", "2", "--hodge-numbers", "1,19,1"});
    CHECK(k3.doc()["dims"]["D"] == 19);
    CHECK(k3.doc()["hermitian_case"] == "Case2");
    // no built-in base point: the classification is still reported
    const Result w4 = call({"domain-dims", "--weight", "4", "--hodge-numbers", "0,1,3,1,0"});
    REQUIRE(w4.code == 0);
    CHECK(w4.doc()["dims"].is_null());
    CHECK(w4.doc()["hermitian_case"] == "Case2");
    CHECK(call({"domain-dims", "--weight", "2", "--hodge-numbers", "1,2,3"}).code == cli::exit_validation);
}

TEST_CASE("eisenstein")
{
    const Result r = call({"eisenstein", "--k", "4", "--tau", "0.1+1.1i"});
    REQUIRE(r.code == 0);
    CHECK(r.doc()["diagnostics"]["difference"].get<double>() < 1e-8);
    // the lattice 2(Z tau + Z) has E4 scaled by 2^-4
    const Result s = call({"eisenstein", "--k", "4", "--omega1", "0.2+2.2i", "--omega2", "2"});
    REQUIRE(s.code == 0);
    CHECK(std::abs(cx(s.doc()["lattice_sum"]) - cx(r.doc()["lattice_sum"]) / 16.0) < 1e-10);
    const Result k8 = call({"eisenstein", "--k", "8", "--tau", "i"});
    REQUIRE(k8.code == 0);
    CHECK_FALSE(k8.doc().contains("q_series"));
    CHECK(call({"eisenstein", "--k", "4"}).code == cli::exit_validation);
    CHECK(call({"eisenstein", "--k", "4", "--tau", "i", "--omega1", "1"}).code == cli::exit_validation);
    CHECK(call({"eisenstein", "--k", "4", "--tau", "-i"}).code == cli::exit_validation);
}

TEST_CASE("poincare")
{
    const Result d = call({"poincare", "--functional", "det", "--height", "20"});
    REQUIRE(d.code == 0);
    CHECK(std::abs(cx(d.doc()["value"]) - double(legendre_sign()) * 2.0 * pi * imag_unit) < 1e-8);
    const Result p = call({"poincare", "--functional", "x11^-4", "--height", "100", "--t2", "2+0.5i", "--t3", "1"});
    REQUIRE(p.code == 0);
    CHECK(p.doc()["converged"] == true);
    CHECK(std::abs(cx(p.doc()["diagnostics"]["ratio_to_eisenstein"]) - 45.0 / std::pow(pi, 4)) < 1e-3);
    const Result u = call({"poincare", "--functional", "uhp", "--height", "50", "--tau", "0.1+1.2i"});
    REQUIRE(u.code == 0);
    CHECK(u.doc()["partial_sums"].size() == u.doc()["diagnostics"]["shells"]);
    CHECK(call({"poincare", "--functional", "x11^-4", "--height", "10", "--model", "bottom-row"}).code ==
          cli::exit_validation);
    CHECK(call({"poincare", "--functional", "nope", "--height", "10"}).code == cli::exit_validation);
}

TEST_CASE("cubic-family")
{
    const Result r = call({"cubic-family", "--t0", "1", "--t1", "0", "--t2", "4", "--t3", "0"});
    REQUIRE(r.code == 0);
    CHECK(std::abs(cx(r.doc()["tau"]) - imag_unit) < 1e-10);
    CHECK(call({"cubic-family", "--t0", "0", "--t1", "0", "--t2", "4", "--t3", "0"}).code == cli::exit_validation);
}

TEST_CASE("sweeps")
{
    const std::vector<std::string> args{"periods", "--t2", "4", "--sweep", "t3=-1:1:5", "--threads", "1"};
    const Result one = call(args);
    REQUIRE(one.code == 0);
    std::vector<std::string> lines;
    std::istringstream in(one.out);
    for (std::string line; std::getline(in, line);) {
        lines.push_back(line);
    }
    REQUIRE(lines.size() == 6);
    CHECK(lines[0].rfind("t3.re,t3.im,status,periods.0.0.re", 0) == 0);
    CHECK(lines[1].rfind("-1.0,0.0,ok,", 0) == 0);
    CHECK(lines[3].rfind("0.0,0.0,ok,", 0) == 0);

    // the same rows in the same order with more threads
    std::vector<std::string> many = args;
    many.back() = "4";
    CHECK(call(many).out == one.out);

    CHECK(call({"j", "--sweep", "tau=-0.5+i:0.5+i:3", "--sweep", "tau=i:2i:2"}).code == cli::exit_validation);

    // two axes, the last varying fastest
    const Result two = call({"cubic-family", "--t0", "1", "--t1", "0", "--t2", "4", "--sweep", "t1=0:1:2", "--sweep",
                             "t3=0:0.5:3"});
    REQUIRE(two.code == 0);
    std::vector<std::string> rows;
    std::istringstream tin(two.out);
    for (std::string line; std::getline(tin, line);) {
        rows.push_back(line);
    }
    REQUIRE(rows.size() == 7);
    CHECK(rows[0].rfind("t1.re,t1.im,t3.re,t3.im,status", 0) == 0);
    CHECK(rows[1].rfind("0.0,0.0,0.0,0.0,ok", 0) == 0);
    CHECK(rows[2].rfind("0.0,0.0,0.25,0.0,ok", 0) == 0);
    CHECK(rows[4].rfind("1.0,0.0,0.0,0.0,ok", 0) == 0);

    // a singular point inside the grid: reported per row, numerical exit code
    const Result bad = call({"periods", "--t2", "3", "--sweep", "t3=0:2:3"});
    CHECK(bad.code == cli::exit_numerical);
    CHECK(bad.out.find(",NearDiscriminant,") != std::string::npos);

    CHECK(call({"ks-count", "--n", "2", "--d", "4", "--sweep", "n=1:2:2"}).code == cli::exit_validation);
    CHECK(call({"periods", "--t2", "4", "--sweep", "t9=0:1:2"}).code == cli::exit_validation);
    CHECK(call({"periods", "--t2", "4", "--sweep", "t3=0:1"}).code == cli::exit_validation);
}

TEST_CASE("output file")
{
    const auto path = std::filesystem::temp_directory_path() / "periodlab_test_out.json";
    const Result r = call({"ks-count", "--n", "3", "--d", "5", "--output", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    CHECK(json::parse(in)["m"] == 101);
    std::filesystem::remove(path);
}
