#include <cmath>
#include <string>

#include "doctest.h"
#include "semiflow/frontends.hpp"
#include "semiflow/report.hpp"
#include "test_systems.hpp"

using namespace semiflow;

namespace {

std::string problem_path(const char* name) { return std::string(SEMIFLOW_PROBLEM_DIR) + "/" + name; }

bool same_field(const ProblemSystem& a, const ProblemSystem& b) {
    if (a.signature().n != b.signature().n || a.signature().nu != b.signature().nu) return false;
    if (a.field().kind() != b.field().kind() || a.delta() != b.delta()) return false;
    for (double x : {0.0, 0.17, 0.5, 0.83, 1.0})
        if ((a.field().at(x) - b.field().at(x)).max_abs() != 0.0) return false;
    return true;
}

Json explicit_doc() {
    return Json::parse(R"({"schema": "semiflow/1", "n": 2, "nu": 1,
        "field": {"kind": "trig", "matrices": [[[3, 1], [1, -2]], [[1, 0.5], [0.5, 2]]],
                  "sin_matrices": [[[-1, 2], [2, 0.25]]]},
        "o_height": 0.5, "tolerances": {"ode_steps": 1000, "rank_rel_tol": 1e-7}})");
}

}  // namespace

TEST_SUITE("report") {
    TEST_CASE("explicit problem files") {
        const auto osc = load_problem(problem_path("oscillator.json"));
        CHECK(osc.signature().n == 1);
        CHECK(osc.field().kind() == FieldKind::Constant);
        CHECK(osc.field().at(0.5)(0, 0).real() == doctest::Approx(std::pow(1.5 * testsys::kPi, 2)));

        const auto poly = load_problem(problem_path("poly.json"));
        CHECK(poly.field().kind() == FieldKind::Polynomial);
        CHECK(poly.field().terms().size() == 3);
    }

    TEST_CASE("generator problem files") {
        const auto pair = load_problem(problem_path("riemannian_pair.json"));
        CHECK(pair.signature().nu == 0);
        CHECK(pair.field().at(0.0)(1, 1).real() == doctest::Approx(std::pow(2.5 * testsys::kPi, 2)));
        const auto trig = load_problem(problem_path("random_trig_25.json"));
        CHECK(same_field(trig, random_trig(25, 3, 1, 2, 40.0)));
        const auto sphere = load_problem(problem_path("sphere.json"));
        CHECK(same_field(sphere, sphere_like(3, 7.0).system));
    }

    TEST_CASE("explicit form with tolerances") {
        const auto sys = parse_problem(explicit_doc());
        CHECK(sys.field().kind() == FieldKind::Trigonometric);
        CHECK(sys.o_height() == 0.5);
        CHECK(sys.steps() == 1000);
        CHECK(sys.tolerances().rank_rel_tol == 1e-7);
    }

    TEST_CASE("overrides win over the document") {
        ProblemOverrides ov;
        ov.steps = 3000;
        ov.o_height = 2.0;
        ov.delta = 0.25;
        ov.instant_tol = 1e-11;
        const auto sys = parse_problem(explicit_doc(), ov);
        CHECK(sys.steps() == 3000);
        CHECK(sys.o_height() == 2.0);
        CHECK(sys.delta() == 0.25);
        CHECK(sys.tolerances().instant_tol == 1e-11);
    }

    TEST_CASE("malformed documents are rejected") {
        const char* bad[] = {
            R"({"n": 2, "field": {"kind": "constant", "matrices": [[[1, 0], [0, 1]]]}})",
            R"({"n": 2, "nu": 1, "field": {"kind": "constant", "matrices": [[[1, 0]]]}})",
            R"({"n": 2, "nu": 1, "field": {"kind": "wavelet", "matrices": [[[1, 0], [0, 1]]]}})",
            R"({"n": 2, "nu": 1, "field": {"kind": "constant", "matrices": [[[1, 2], [0, 1]]]}})",
            R"({"n": 2, "nu": 1, "field": {"kind": "constant", "matrices": []}})",
            R"({"n": 2, "nu": 1, "field": {"kind": "constant", "matrices": [[["a", 0], [0, 1]]]}})",
            R"({"schema": "other/2", "n": 1, "nu": 0, "field": {"kind": "constant", "matrices": [[[1]]]}})",
            R"({"generator": {"kind": "torus", "n": 2}})",
            R"({"generator": {"kind": "sphere-like", "n": 3}})",
            R"({"n": 1, "nu": 0, "field": {"kind": "constant", "matrices": [[[9.869604401089358]]]}})",
            R"([1, 2, 3])",
        };
        for (const char* text : bad) {
            CAPTURE(text);
            CHECK_THROWS_AS(parse_problem(Json::parse(text)), InvalidInput);
        }
        CHECK_THROWS_AS(load_problem(problem_path("does_not_exist.json")), InvalidInput);
    }

    TEST_CASE("problem round trip") {
        for (const char* name : {"sys0.json", "oscillator.json", "indefinite.json", "poly.json", "random_trig_25.json",
                                 "riemannian_pair.json", "sphere.json"}) {
            CAPTURE(name);
            const auto a = load_problem(problem_path(name));
            const Json emitted = problem_to_json(a);
            const auto b = parse_problem(emitted);
            CHECK(same_field(a, b));
            CHECK(problem_to_json(b) == emitted);
        }
        const auto t = parse_problem(explicit_doc());
        CHECK(same_field(t, parse_problem(problem_to_json(t))));
    }

    TEST_CASE("format_real") {
        CHECK(format_real(0.5) == "0.5");
        CHECK(format_real(-2.0) == "-2");
        CHECK(std::stod(format_real(0.1)) == 0.1);
        CHECK(std::stod(format_real(2.0 / 3.0)) == 2.0 / 3.0);
    }

    TEST_CASE("index report of the indefinite system") {
        const auto r = index_report(testsys::indefinite());
        REQUIRE(r.instants.size() == 3);
        CHECK(r.instants[0].signature == -1);
        CHECK(r.mu_spec == -1);
        CHECK(r.mu_con == -1);
        CHECK(r.mu_maslov == -1);
        CHECK(r.i_con == -1);
        CHECK(r.agreement);
        CHECK(r.diagnostics.delta == 0.0);
        CHECK(r.diagnostics.symplectic_residual < 1e-8);
        CHECK(r.diagnostics.max_phase_step < testsys::kPi / 2);

        const Json j = report_to_json(r);
        CHECK(j.at("schema") == kSchema);
        CHECK(report_from_json(j) == r);
        CHECK(report_from_json(Json::parse(j.dump())) == r);
    }

    TEST_CASE("irregular instants serialise as a string") {
        IndexReport r;
        r.instants.push_back({0.5, 1, std::nullopt});
        r.instants.push_back({0.75, 2, 2});
        const Json j = report_to_json(r);
        CHECK(j.at("instants")[0].at("signature") == "irregular");
        CHECK(j.at("instants")[1].at("signature") == 2);
        CHECK_FALSE(j.contains("i_con"));
        CHECK(report_from_json(j) == r);
    }

    TEST_CASE("instants_to_json") {
        const auto j = instants_to_json(locate_instants(testsys::oscillator()));
        REQUIRE(j.size() == 1);
        CHECK(j[0].at("t").get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
        CHECK(j[0].at("multiplicity") == 1);
        CHECK(j[0].at("signature") == 1);
    }
}
