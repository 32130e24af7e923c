// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "semiflow/conjugate.hpp"
#include "semiflow/flow.hpp"
#include "semiflow/frontends.hpp"
#include "semiflow/maslov.hpp"
#include "semiflow/report.hpp"
#include "semiflow/spectral.hpp"
#include "semiflow/sturm.hpp"
#include "test_systems.hpp"

using namespace semiflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects failed expectations for one criterion.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
    }
    bool ok() const { return failures_.empty(); }
    std::string summary() const {
        std::string s;
        for (std::size_t k = 0; k < failures_.size() && k < 4; ++k) s += (k ? "; " : "") + failures_[k];
        if (failures_.size() > 4) s += "; ... (" + std::to_string(failures_.size()) + " failures)";
        return s;
    }

private:
    std::vector<std::string> failures_;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

struct Indices {
    InstantSearch search;
    int spec = 0, con = 0, maslov = 0;
};

Indices all_indices(const ProblemSystem& sys) {
    Indices r;
    r.search = find_instants(sys);
    r.spec = -spectral_flow_detail(sys, &r.search).flow;
    r.maslov = maslov_index_detail(sys, &r.search).index;
    r.con = conjugate_index(sys);
    return r;
}

// Signature agreement of boundary, integral and finite-difference Maslov forms
// at every regular instant of sys.
void crossing_consistency(const ProblemSystem& sys, const std::string& label, Check& c, int& regular_count) {
    for (const auto& inst : find_instants(sys).instants) {
        const auto sf = crossing_form(sys, inst);
        if (!sf.regular) continue;
        ++regular_count;
        const auto m = maslov_crossing_form(sys, inst);
        const std::string where = label + " t=" + fmt("%.6f", inst.t);
        c.expect(sf.signature == sf.integral_signature, where + ": boundary vs integral");
        c.expect(sf.signature == m.fd_signature, where + ": boundary vs finite-difference");
    }
}

std::vector<std::pair<std::string, ProblemSystem>> bundled_systems() {
    std::vector<std::pair<std::string, ProblemSystem>> out{
        {"trivial", testsys::trivial()},
        {"oscillator", testsys::oscillator()},
        {"indefinite", testsys::indefinite()},
        {"riemannian_pair", testsys::riemannian_pair()},
    };
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(SEMIFLOW_PROBLEM_DIR))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) out.emplace_back(p.filename().string(), load_problem(p.string()));
    return out;
}

bool run(int number, const std::function<std::string(Check&)>& body) {
    Check c;
    std::string info;
    try {
        info = body(c);
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    if (c.ok())
        std::printf("AC%d PASS %s\n", number, info.c_str());
    else
        std::printf("AC%d FAIL %s\n", number, c.summary().c_str());
    std::fflush(stdout);
    return c.ok();
}

}  // namespace

int main() {
    bool all = true;

    all &= run(1, [](Check& c) {
        const auto start = Clock::now();
        const auto sys = testsys::trivial();
        const auto ix = all_indices(sys);
        c.expect(ix.search.instants.empty(), "instants found");
        c.expect(ix.spec == 0 && ix.con == 0 && ix.maslov == 0, "indices not all zero");
        double worst = 0.0;
        for (int k = 0; k <= 100; ++k) worst = std::max(worst, std::abs(rho(sys, cplx(k / 100.0, 0.0)) + 1.0));
        c.expect(worst <= 1e-10, "|rho + 1| = " + fmt("%.3g", worst));
        const double secs = seconds_since(start);
        c.expect(secs < 0.5, "runtime " + fmt("%.3f", secs) + " s");
        return "rho dev " + fmt("%.2g", worst) + ", " + fmt("%.3f", secs) + " s";
    });

    all &= run(2, [](Check& c) {
        const auto start = Clock::now();
        const auto sys = testsys::oscillator();
        const auto ix = all_indices(sys);
        const auto& in = ix.search.instants;
        c.expect(in.size() == 1, "instant count " + std::to_string(in.size()));
        if (in.size() == 1) {
            c.expect(std::abs(in[0].t - 2.0 / 3.0) <= 1e-9, "instant at " + fmt("%.12f", in[0].t));
            c.expect(in[0].multiplicity == 1, "multiplicity");
        }
        const int icon = regular_conjugate_index(in, sys.signature());
        c.expect(ix.spec == 1 && ix.con == 1 && ix.maslov == 1 && icon == 1, "indices not all 1");
        const int morse = morse_oracle(sys, 200);
        c.expect(morse == 1, "Morse oracle " + std::to_string(morse));
        const double secs = seconds_since(start);
        c.expect(secs < 1.0, "runtime " + fmt("%.3f", secs) + " s");
        return "indices 1/1/1/1, Morse 1, " + fmt("%.3f", secs) + " s";
    });

    all &= run(3, [](Check& c) {
        const auto start = Clock::now();
        const auto sys = testsys::indefinite();
        const auto ix = all_indices(sys);
        const auto& in = ix.search.instants;
        const double ts[3] = {0.4, 2.0 / 3.0, 0.8};
        const int contrib[3] = {-1, 1, -1};
        c.expect(in.size() == 3, "instant count " + std::to_string(in.size()));
        for (std::size_t k = 0; k < in.size() && k < 3; ++k) {
            c.expect(std::abs(in[k].t - ts[k]) <= 1e-9, "instant at " + fmt("%.12f", in[k].t));
            c.expect(in[k].regular && instant_signature(in[k], sys.signature()) == contrib[k], "signature contribution");
        }
        const int icon = regular_conjugate_index(in, sys.signature());
        c.expect(ix.spec == -1 && ix.con == -1 && ix.maslov == -1 && icon == -1, "indices not all -1");
        int local = 0;
        for (std::size_t k = 0; k < in.size(); ++k) local += local_multiplicity(sys, in[k].t, isolation_radius(in, k));
        c.expect(local == -1, "sum of local multiplicities " + std::to_string(local));
        const double secs = seconds_since(start);
        c.expect(secs < 2.0, "runtime " + fmt("%.3f", secs) + " s");
        return "indices -1/-1/-1/-1, local sum -1, " + fmt("%.3f", secs) + " s";
    });

    all &= run(4, [](Check& c) {
        const auto start = Clock::now();
        int regularized = 0;
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const auto sys = sweep_system(seed);
            const auto search = find_instants(sys);
            const auto sf = spectral_flow_detail(sys, &search);
            const auto ms = maslov_index_detail(sys, &search);
            const int con = conjugate_index(sys);
            if (sf.delta != 0.0 || ms.delta != 0.0) ++regularized;
            c.expect(-sf.flow == con && ms.index == con,
                     "seed " + std::to_string(seed) + ": " + std::to_string(-sf.flow) + "/" + std::to_string(con) + "/" +
                         std::to_string(ms.index));
        }
        const double secs = seconds_since(start);
        c.expect(secs < 60.0, "runtime " + fmt("%.1f", secs) + " s");
        return "50/50 agree, " + std::to_string(regularized) + " regularized, " + fmt("%.1f", secs) + " s";
    });

    all &= run(5, [](Check& c) {
        std::string info;
        for (const auto& [name, sys] : {std::pair{"oscillator", testsys::oscillator()}, std::pair{"indefinite", testsys::indefinite()}}) {
            const auto tc = trace_boundary_check(sys);
            c.expect(tc.discrepancy < 1e-3, std::string(name) + " discrepancy " + fmt("%.3g", tc.discrepancy));
            info += std::string(info.empty() ? "" : ", ") + name + " " + fmt("%.2g", tc.discrepancy);
        }
        return "discrepancy " + info;
    });

    all &= run(6, [](Check& c) {
        const auto sys = testsys::indefinite();
        const double res = symplectic_residual(fundamental_solution(sys, 0.9, 4000), sys.signature());
        c.expect(res <= 1e-8, "residual " + fmt("%.3g", res));
        const Matrix p1 = fundamental_solution(sys, 0.9, 200).psi_end;
        const Matrix p2 = fundamental_solution(sys, 0.9, 400).psi_end;
        const Matrix p4 = fundamental_solution(sys, 0.9, 800).psi_end;
        const double order = std::log2((p1 - p2).frobenius_norm() / (p2 - p4).frobenius_norm());
        c.expect(order >= 3.5 && order <= 4.5, "order " + fmt("%.3f", order));
        return "residual " + fmt("%.2g", res) + ", order " + fmt("%.3f", order);
    });

    all &= run(7, [](Check& c) {
        int regular = 0;
        crossing_consistency(testsys::oscillator(), "oscillator", c, regular);
        crossing_consistency(testsys::indefinite(), "indefinite", c, regular);
        for (std::uint64_t seed = 1; seed <= 50; ++seed)
            crossing_consistency(sweep_system(seed), "seed " + std::to_string(seed), c, regular);
        c.expect(regular > 0, "no regular instants");
        return std::to_string(regular) + " regular instants consistent";
    });

    all &= run(8, [](Check& c) {
        const Box box{-0.5, 0.5, -0.5, 0.5};
        const std::vector<std::pair<const char*, PlanarMap>> maps{
            {"z", [](cplx z) { return z; }},
            {"conj z", [](cplx z) { return std::conj(z); }},
            {"z^2", [](cplx z) { return z * z; }},
            {"conj z^2", [](cplx z) { return std::conj(z * z); }},
            {"z^3", [](cplx z) { return z * z * z; }},
        };
        int cases = 0;
        for (const auto& [name, f] : maps) {
            const int k = kronecker_multiplicity(homogeneous_fit(f, 0.0, 0.05, 6));
            const int w = winding(f, box).winding;
            c.expect(k == w, std::string(name) + ": " + std::to_string(k) + " vs " + std::to_string(w));
            ++cases;
        }
        for (const auto& sys : {testsys::oscillator(), testsys::indefinite()}) {
            const auto in = locate_instants(sys);
            for (std::size_t i = 0; i < in.size(); ++i) {
                const int k = kronecker_multiplicity(homogeneous_fit(sys, in[i].t, fit_radius(in, i)));
                const int w = local_multiplicity(sys, in[i].t, isolation_radius(in, i));
                c.expect(k == w, "instant " + fmt("%.6f", in[i].t) + ": " + std::to_string(k) + " vs " + std::to_string(w));
                ++cases;
            }
        }
        return std::to_string(cases) + " zeros match";
    });

    all &= run(9, [](Check& c) {
        int variants = 0;
        const auto systems = bundled_systems();
        for (const auto& [name, sys] : systems) {
            const int base = conjugate_index(sys);
            for (double h : {0.5, 1.0, 2.0}) {
                for (int steps : {2000, 4000}) {
                    const int v = conjugate_index(sys.with_o_height(h).with_steps(steps));
                    c.expect(v == base, name + " h=" + fmt("%g", h) + " steps=" + std::to_string(steps) + ": " +
                                            std::to_string(v) + " vs " + std::to_string(base));
                    ++variants;
                }
            }
        }
        return std::to_string(systems.size()) + " systems x " + std::to_string(variants / static_cast<int>(systems.size())) +
               " variants invariant";
    });

    return all ? 0 : 1;
}
