#include <cmath>

#include "doctest.h"
#include "semiflow/flow.hpp"
#include "semiflow/sturm.hpp"
#include "test_systems.hpp"

using namespace semiflow;

namespace {

HomogeneousPoly hpoly(std::vector<double> c) {
    HomogeneousPoly h;
    h.degree = static_cast<int>(c.size()) - 1;
    h.coeffs = std::move(c);
    return h;
}

bool close(const HomogeneousPoly& h, const std::vector<double>& c, double tol) {
    if (h.coeffs.size() != c.size()) return false;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (std::abs(h.coeffs[k] - c[k]) > tol) return false;
    return true;
}

struct NamedMap {
    const char* name;
    PlanarMap f;
};

std::vector<NamedMap> synthetic_maps() {
    return {
        {"z", [](cplx z) { return z; }},
        {"conj z", [](cplx z) { return std::conj(z); }},
        {"z^2", [](cplx z) { return z * z; }},
        {"conj z^2", [](cplx z) { return std::conj(z * z); }},
        {"z^3", [](cplx z) { return z * z * z; }},
        {"conj z^3", [](cplx z) { return std::conj(z * z * z); }},
        {"z^2 + higher order", [](cplx z) { return z * z + 0.3 * z * z * z; }},
        {"2z - 3 conj z", [](cplx z) { return 2.0 * z - 3.0 * std::conj(z); }},
    };
}

}  // namespace

TEST_SUITE("sturm") {
    TEST_CASE("homogeneous fits of model maps") {
        const auto sq = homogeneous_fit([](cplx z) { return (z - 0.5) * (z - 0.5); }, 0.5, 0.1, 4);
        CHECK(sq.p.degree == 2);
        CHECK(close(sq.p, {1, 0, -1}, 1e-9));
        CHECK(close(sq.q, {0, 2, 0}, 1e-9));

        const auto bar = homogeneous_fit([](cplx z) { return std::conj(z); }, 0.0, 0.1, 4);
        CHECK(close(bar.p, {1, 0}, 1e-9));
        CHECK(close(bar.q, {0, -1}, 1e-9));

        // the lowest order part wins over the cubic term
        const auto mixed = homogeneous_fit([](cplx z) { return z * z + 0.5 * z * z * z; }, 0.0, 0.02, 4);
        CHECK(mixed.p.degree == 2);
        CHECK(close(mixed.p, {1, 0, -1}, 0.05));
    }

    TEST_CASE("fit input checks") {
        const PlanarMap f = [](cplx z) { return z; };
        CHECK_THROWS_AS(homogeneous_fit(f, 0.0, -0.1, 4), InvalidInput);
        CHECK_THROWS_AS(homogeneous_fit(f, 0.0, 0.1, 9), InvalidInput);
        CHECK_THROWS_AS(homogeneous_fit([](cplx z) { return std::pow(z, 5); }, 0.0, 0.1, 3), NumericalFailure);
        CHECK_THROWS_AS(homogeneous_fit(testsys::oscillator(), 0.01, 0.05), InvalidInput);
    }

    TEST_CASE("oscillator rho has a linear homogeneous part matching its derivatives") {
        const auto sys = testsys::oscillator();
        const double t0 = 2.0 / 3.0, h = 1e-5;
        const auto pair = homogeneous_fit(sys, t0, 0.02);
        CHECK(pair.p.degree == 1);
        CHECK(pair.q.degree == 1);
        const cplx dt = (rho(sys, cplx(t0 + h, 0)) - rho(sys, cplx(t0 - h, 0))) / (2 * h);
        const cplx ds = (rho(sys, cplx(t0, h)) - rho(sys, cplx(t0, -h))) / (2 * h);
        CHECK(dt.real() == doctest::Approx(-1.5).epsilon(1e-6));
        CHECK(pair.p.coeffs[0] == doctest::Approx(dt.real()).epsilon(1e-2));
        CHECK(pair.q.coeffs[1] == doctest::Approx(ds.imag()).epsilon(1e-2));
        CHECK(pair.p.coeffs[1] == 0.0);
        CHECK(pair.q.coeffs[0] == 0.0);
    }

    TEST_CASE("h1 hypothesis examples") {
        CHECK(h1_check({hpoly({1, 0, -1}), hpoly({0, 2, 0})}));
        CHECK_FALSE(h1_check({hpoly({0, 1, 0}), hpoly({0, 1, 0})}));
        CHECK(h1_check({hpoly({1, 0}), hpoly({0, 1})}));
        // P(0,1) = Q(0,1) = 0: the vertical direction is a common zero
        CHECK_FALSE(h1_check({hpoly({1, 0}), hpoly({1, 0})}));
        CHECK_FALSE(h1_check({hpoly({0, 0}), hpoly({0, 1})}));
        CHECK_THROWS_AS(kronecker_detail({hpoly({0, 1, 0}), hpoly({0, 1, 0})}), InvalidInput);
    }

    TEST_CASE("real root counts") {
        CHECK(real_root_count(Poly{1, 0, -1}) == 2);
        CHECK(real_root_count(Poly{1, 0, 1}) == 0);
        CHECK(real_root_count(Poly{1, -2, 1}) == 1);
        CHECK(real_root_count(Poly{0, -1, 0, 1}) == 3);
        CHECK(real_root_count(Poly{3}) == 0);
        CHECK_THROWS_AS(real_root_count(Poly{}), InvalidInput);
    }

    TEST_CASE("chain and multiplicity of z^2") {
        const auto kd = kronecker_detail({hpoly({1, 0, -1}), hpoly({0, 2, 0})});
        REQUIRE(kd.chain.size() == 3);
        CHECK(kd.chain[0].coeffs() == std::vector<double>{1, 0, -1});
        CHECK(kd.chain[1].coeffs() == std::vector<double>{0, 2});
        CHECK(kd.chain[2].coeffs() == std::vector<double>{-1});
        CHECK_FALSE(kd.swapped);
        CHECK(kd.m_plus == 2);
        CHECK(kd.m_minus == 0);
        CHECK(kd.raw == -2);
        CHECK(kd.multiplicity == 2);

        const auto bar = kronecker_detail({hpoly({1, 0, -1}), hpoly({0, -2, 0})});
        CHECK(bar.raw == 2);
        CHECK(bar.multiplicity == -2);
    }

    TEST_CASE("simple zeros need the swapped chain") {
        const auto kd = kronecker_detail({hpoly({1, 0}), hpoly({0, 1})});
        CHECK(kd.swapped);
        CHECK(kd.multiplicity == 1);
        CHECK(kronecker_multiplicity({hpoly({1, 0}), hpoly({0, -1})}) == -1);
    }

    TEST_CASE("odd total degree gives zero") {
        // (t^2, s) has local degree 0
        const auto kd = kronecker_detail({hpoly({1, 0, 0}), hpoly({0, 1})});
        CHECK(kd.raw == 0);
        CHECK(kd.multiplicity == 0);
        const Box box{-0.5, 0.5, -0.5, 0.5};
        CHECK(winding([](cplx z) { return cplx(z.real() * z.real(), z.imag()); }, box).winding == 0);
    }

    TEST_CASE("chain is a negated-remainder sequence") {
        const Poly a{2, -1, 0, 3, 1}, b{1, 4, -2};
        const auto chain = sturm_chain(a, b);
        REQUIRE(chain.size() >= 3);
        for (std::size_t i = 2; i < chain.size(); ++i) {
            // N_{i-2} = q N_{i-1} - N_i
            const auto qr = poly_divrem(chain[i - 2], chain[i - 1]);
            const Poly back = qr.quotient * chain[i - 1] - chain[i];
            for (int k = 0; k <= chain[i - 2].degree(); ++k)
                CHECK(std::abs(back.coeff(static_cast<std::size_t>(k)) - chain[i - 2].coeff(static_cast<std::size_t>(k))) <
                      1e-10);
        }
        CHECK(chain.back().degree() == 0);
    }

    TEST_CASE("chain result equals the winding number on synthetic maps") {
        const Box box{-0.5, 0.5, -0.5, 0.5};
        for (const auto& m : synthetic_maps()) {
            CAPTURE(m.name);
            const auto pair = homogeneous_fit(m.f, 0.0, 0.05, 6);
            CHECK(kronecker_multiplicity(pair) == winding(m.f, box).winding);
        }
    }

    TEST_CASE("simple instants: chain result equals the local winding") {
        for (const auto& sys : {testsys::oscillator(), testsys::indefinite()}) {
            const auto inst = locate_instants(sys);
            for (std::size_t k = 0; k < inst.size(); ++k) {
                const auto pair = homogeneous_fit(sys, inst[k].t, fit_radius(inst, k));
                CHECK(kronecker_multiplicity(pair) == local_multiplicity(sys, inst[k].t, isolation_radius(inst, k)));
            }
        }
    }

    TEST_CASE("fit radius") {
        const auto inst = locate_instants(testsys::indefinite());
        CHECK(fit_radius(inst, 0) == doctest::Approx(0.02));
        ConjugateInstant a, b;
        a.t = 0.5;
        b.t = 0.52;
        CHECK(fit_radius({a, b}, 0) == doctest::Approx(0.005));
    }
}
