#include <cmath>

#include "doctest.h"
#include "semiflow/conjugate.hpp"
#include "semiflow/flow.hpp"
#include "test_systems.hpp"

using namespace semiflow;

namespace {

const Box kUnitBox{-0.5, 0.5, -0.5, 0.5};

}  // namespace

TEST_SUITE("conjugate") {
    TEST_CASE("instants of the reference systems") {
        CHECK(locate_instants(testsys::trivial()).empty());

        const auto a = locate_instants(testsys::oscillator());
        REQUIRE(a.size() == 1);
        CHECK(std::abs(a[0].t - 2.0 / 3.0) < 1e-9);
        CHECK(a[0].multiplicity == 1);

        const auto b = locate_instants(testsys::indefinite());
        REQUIRE(b.size() == 3);
        const double expect[3] = {0.4, 2.0 / 3.0, 0.8};
        const int contrib[3] = {-1, 1, -1};
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(b[k].t - expect[k]) < 1e-9);
            CHECK(b[k].multiplicity == 1);
            CHECK(b[k].regular);
            CHECK(instant_signature(b[k], testsys::indefinite().signature()) == contrib[k]);
        }
    }

    TEST_CASE("kernel data at an instant") {
        const auto sys = testsys::indefinite();
        const auto inst = instant_at(sys, 0.4);
        REQUIRE(inst.kernel.size() == 1);
        // the e2 mode vanishes at 0.4; its image vector points along e2 too
        CHECK(std::abs(std::abs(inst.kernel[0][1]) - 1.0) < 1e-9);
        CHECK(std::abs(inst.image_vectors[0][0]) < 1e-8);
        CHECK(inst.signature_contrib == -1);
        CHECK_THROWS_AS(instant_at(sys, 0.5), InvalidInput);
        CHECK_THROWS_AS(instant_at(sys, 1.0), InvalidInput);
    }

    TEST_CASE("irregular instants are rejected by instant_signature") {
        ConjugateInstant inst;
        inst.t = 0.5;
        inst.multiplicity = 1;
        inst.regular = false;
        CHECK_THROWS_AS(instant_signature(inst, MetricSignature{1, 0}), InvalidInput);
    }

    TEST_CASE("regular conjugate index") {
        CHECK(regular_conjugate_index(testsys::oscillator()) == 1);
        CHECK(regular_conjugate_index(testsys::indefinite()) == -1);
        CHECK(regular_conjugate_index(testsys::trivial()) == 0);
    }

    TEST_CASE("double kernel without a sign change is found through the sigma_min dip") {
        // J = Id, S = c^2 Id_2: both modes vanish together, det b_t has a double zero
        const double c = 2.5 * testsys::kPi;
        const auto sys = ProblemSystem::create({2, 0}, CoefficientField::constant(Matrix{{c * c, 0}, {0, c * c}}));
        const auto s = find_instants(sys);
        REQUIRE(s.instants.size() == 2);
        CHECK(std::abs(s.instants[0].t - 0.4) < 1e-8);
        CHECK(std::abs(s.instants[1].t - 0.8) < 1e-8);
        CHECK(s.instants[0].multiplicity == 2);
        CHECK(s.instants[0].signature_contrib == 2);
        CHECK(s.unresolved.empty());
        CHECK(conjugate_index(sys) == 4);
    }

    TEST_CASE("winding of synthetic maps") {
        const cplx z0(0.1, -0.05);
        CHECK(winding([&](cplx z) { return z - z0; }, kUnitBox).winding == 1);
        CHECK(winding([&](cplx z) { return std::conj(z - z0); }, kUnitBox).winding == -1);
        CHECK(winding([](cplx z) { return z * z; }, kUnitBox).winding == 2);
        CHECK(winding([](cplx z) { return z * z * z; }, kUnitBox).winding == 3);
        CHECK(winding([](cplx z) { return z + 3.0; }, kUnitBox).winding == 0);
        const auto w = winding([](cplx z) { return z * z; }, kUnitBox);
        CHECK(w.max_phase_step < testsys::kPi / 2);
        CHECK(w.residue < 1e-6);
    }

    TEST_CASE("zero on the boundary is reported") {
        try {
            winding([](cplx z) { return z - cplx(0.5, 0.1); }, kUnitBox);
            FAIL("expected NumericalFailure");
        } catch (const NumericalFailure& e) {
            CHECK(std::string(e.what()).find("zero too close to boundary") != std::string::npos);
        }
    }

    TEST_CASE("boundary samples carry accumulated phase") {
        std::vector<BoundarySample> samples;
        winding([](cplx z) { return z; }, kUnitBox, &samples);
        REQUIRE(samples.size() > 100);
        CHECK(samples.back().phase == doctest::Approx(2 * testsys::kPi).epsilon(1e-9));
    }

    TEST_CASE("conjugate index") {
        CHECK(conjugate_index(testsys::oscillator()) == 1);
        CHECK(conjugate_index(testsys::indefinite()) == -1);
        CHECK(conjugate_index(testsys::trivial()) == 0);
        CHECK(std::abs(winding(testsys::oscillator(), domain_box(testsys::oscillator())).winding) == 1);
    }

    TEST_CASE("local multiplicities add up to the conjugate index") {
        const auto sys = testsys::indefinite();
        const auto inst = locate_instants(sys);
        int total = 0;
        const int expect[3] = {-1, 1, -1};
        for (std::size_t k = 0; k < inst.size(); ++k) {
            const int m = local_multiplicity(sys, inst[k].t, isolation_radius(inst, k));
            CHECK(m == expect[k]);
            total += m;
        }
        CHECK(total == conjugate_index(sys));
        const auto osc = testsys::oscillator();
        CHECK(local_multiplicity(osc, 2.0 / 3.0, 0.1) == 1);
    }

    TEST_CASE("winding is invariant under box height and step doubling") {
        for (const auto& sys : {testsys::oscillator(), testsys::indefinite(), testsys::riemannian_pair()}) {
            const int base = conjugate_index(sys);
            for (double h : {0.5, 2.0}) CHECK(conjugate_index(sys.with_o_height(h)) == base);
            CHECK(conjugate_index(sys.with_steps(4000)) == base);
        }
    }

    TEST_CASE("rho has no zeros off the real axis") {
        for (const auto& sys : {testsys::oscillator(), testsys::indefinite()}) {
            double lowest = INFINITY;
            for (int i = 0; i <= 20; ++i)
                for (double s : {-1.0, -0.5, -0.05, 0.05, 0.5, 1.0})
                    lowest = std::min(lowest, std::abs(rho(sys, cplx(i / 20.0, s))));
            CHECK(lowest > 1e-6);
        }
    }

    TEST_CASE("Green kernel of the flat system") {
        const auto sys = testsys::trivial();
        const Matrix j = sys.J();
        for (double t : {0.3, 1.0}) {
            for (auto [x, y] : {std::pair{0.2, 0.7}, std::pair{0.8, 0.35}, std::pair{0.5, 0.5}}) {
                const double g = (x <= y) ? -x * (1.0 - y) : -y * (1.0 - x);
                CHECK((green_kernel(sys, t, x, y) - j * g).max_abs() < 1e-8);
            }
        }
    }

    TEST_CASE("Green kernel symmetry for real z") {
        const auto sys = testsys::indefinite();
        for (auto [x, y] : {std::pair{0.1, 0.6}, std::pair{0.45, 0.9}}) {
            const Matrix k1 = green_kernel(sys, 0.9, x, y), k2 = green_kernel(sys, 0.9, y, x);
            CHECK((k1 - k2.adjoint()).max_abs() < 1e-8);
        }
        CHECK_THROWS_AS(green_kernel(sys, 0.4, 0.2, 0.3), InvalidInput);
    }

    TEST_CASE("Green kernel solves the Dirichlet problem") {
        // u(x) = sin(pi x) e  =>  f = J u'' + S_z u; check u = int K f
        for (cplx z : {cplx(0.9, 0.0), cplx(0.6, 0.4)}) {
            const auto sys = testsys::oscillator().with_steps(400);
            const GreenKernelTable table(sys, z);
            const int n = table.steps();
            const double h = 1.0 / n;
            std::vector<cplx> f(static_cast<std::size_t>(n) + 1);
            for (int l = 0; l <= n; ++l) {
                const double x = l * h;
                const cplx sz = s_family(sys, z.real(), x)(0, 0) + cplx(0.0, z.imag());
                const double u = std::sin(testsys::kPi * x);
                f[static_cast<std::size_t>(l)] = -testsys::kPi * testsys::kPi * u + sz * u;
            }
            double worst = 0.0;
            for (int k = 0; k <= n; k += 20) {
                cplx acc = 0.0;
                for (int l = 0; l <= n; ++l) {
                    const double w = (l == 0 || l == n) ? 0.5 * h : h;
                    acc += w * table.at(k, l)(0, 0) * f[static_cast<std::size_t>(l)];
                }
                worst = std::max(worst, std::abs(acc - std::sin(testsys::kPi * k * h)));
            }
            CHECK(worst <= 1e-4);
        }
    }

    TEST_CASE("trace formula agrees with the winding number") {
        const auto a = trace_boundary_check(testsys::oscillator());
        CHECK(a.winding == 1);
        CHECK(a.discrepancy < 1e-3);
        const auto b = trace_boundary_check(testsys::indefinite());
        CHECK(b.winding == -1);
        CHECK(b.discrepancy < 1e-3);
        const auto z = trace_boundary_check(testsys::trivial());
        CHECK(std::abs(z.integral) < 1e-6);
    }
}
