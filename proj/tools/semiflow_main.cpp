// semiflow command-line front end.
//
// Exit codes: 0 success, 1 verify disagreement (or a disagreeing sweep
// instance), 2 input/validation error, 3 numerical failure.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "semiflow/conjugate.hpp"
#include "semiflow/frontends.hpp"
#include "semiflow/maslov.hpp"
#include "semiflow/report.hpp"
#include "semiflow/spectral.hpp"

using namespace semiflow;

namespace {

struct Options {
    std::string problem = "-";
    std::string out;
    ProblemOverrides overrides;
    std::optional<int> mesh;
    std::string seed_range = "1..50";
    int jobs = 1;
    std::string frame_csv;
    int frame_points = 201;
};

int emit_error(const char* type, const std::string& message, int code) {
    const Json err{{"schema", kSchema}, {"error", {{"type", type}, {"message", message}}}};
    std::cerr << err.dump() << '\n';
    return code;
}

// Writes to --out when given, else to stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw InvalidInput("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void print_json(const Json& j, const Options& opt) { Output(opt.out).stream() << j.dump(2) << '\n'; }

Json crossing_json(const CrossingData& c) {
    Json b = Json::array(), i = Json::array();
    for (std::size_t r = 0; r < c.form_boundary.rows(); ++r) {
        Json rb = Json::array(), ri = Json::array();
        for (std::size_t k = 0; k < c.form_boundary.cols(); ++k) {
            rb.push_back(c.form_boundary(r, k).real());
            ri.push_back(c.form_integral(r, k).real());
        }
        b.push_back(std::move(rb));
        i.push_back(std::move(ri));
    }
    return Json{{"t", c.t},
                {"form_boundary", std::move(b)},
                {"form_integral", std::move(i)},
                {"signature", c.signature.value()},
                {"integral_signature", c.integral_signature.value()},
                {"regular", c.regular}};
}

int cmd_instants(const Options& opt) {
    const ProblemSystem sys = load_problem(opt.problem, opt.overrides);
    const InstantSearch s = find_instants(sys);
    Json unresolved = Json::array(), near = Json::array();
    for (const auto& d : s.unresolved) unresolved.push_back({{"t", d.t}, {"sigma_rel", d.sigma_rel}});
    for (const auto& d : s.near_misses) near.push_back({{"t", d.t}, {"sigma_rel", d.sigma_rel}});
    print_json({{"schema", kSchema},
                {"instants", instants_to_json(s.instants)},
                {"unresolved", std::move(unresolved)},
                {"near_misses", std::move(near)}},
               opt);
    return 0;
}

int cmd_index(const Options& opt) {
    const ProblemSystem sys = load_problem(opt.problem, opt.overrides);
    const WindingResult w = winding(sys, domain_box(sys));
    Json out{{"schema", kSchema},
             {"mu_con", kOrientationSign * w.winding},
             {"winding", w.winding},
             {"winding_samples", w.samples_used},
             {"max_phase_step", w.max_phase_step},
             {"residue", w.residue}};
    const InstantSearch s = find_instants(sys);
    const bool regular = s.unresolved.empty() &&
                         std::all_of(s.instants.begin(), s.instants.end(), [](const auto& i) { return i.regular; });
    if (regular) out["i_con"] = regular_conjugate_index(s.instants, sys.signature());
    out["instants"] = instants_to_json(s.instants);
    print_json(out, opt);
    return 0;
}

int cmd_spectral(const Options& opt) {
    const ProblemSystem sys = load_problem(opt.problem, opt.overrides);
    const SpectralFlowResult sf = spectral_flow_detail(sys);
    Json crossings = Json::array();
    for (const auto& c : sf.crossings) crossings.push_back(crossing_json(c));
    Json out{{"schema", kSchema},
             {"spectral_flow", sf.flow},
             {"mu_spec", -sf.flow},
             {"delta", sf.delta},
             {"crossings", std::move(crossings)}};
    if (opt.mesh) {
        out["morse_oracle"] = morse_oracle(sys, *opt.mesh);
        out["mesh"] = *opt.mesh;
    }
    print_json(out, opt);
    return 0;
}

int cmd_maslov(const Options& opt) {
    const ProblemSystem sys = load_problem(opt.problem, opt.overrides);
    const MaslovResult ms = maslov_index_detail(sys);
    Json crossings = Json::array();
    for (const auto& c : ms.crossings)
        crossings.push_back({{"t", c.t},
                             {"signature", c.signature.value()},
                             {"fd_signature", c.fd_signature.value()},
                             {"regular", c.regular},
                             {"richardson", c.richardson}});
    print_json({{"schema", kSchema},
                {"mu_maslov", ms.index},
                {"delta", ms.delta},
                {"epsilon", ms.epsilon},
                {"crossings", std::move(crossings)}},
               opt);
    if (!opt.frame_csv.empty()) {
        std::ofstream csv(opt.frame_csv);
        if (!csv) throw InvalidInput("cannot open '" + opt.frame_csv + "'");
        csv << "# schema semiflow/1\nt,sigma_min,intersection_dim\n";
        for (const auto& s : frame_scan(sys, opt.frame_points))
            csv << format_real(s.t) << ',' << format_real(s.sigma_min) << ',' << s.intersection_dim << '\n';
    }
    return 0;
}

int cmd_verify(const Options& opt) {
    const ProblemSystem sys = load_problem(opt.problem, opt.overrides);
    const IndexReport r = index_report(sys);
    print_json(report_to_json(r), opt);
    return r.agreement ? 0 : 1;
}

int cmd_dump_boundary(const Options& opt) {
    const ProblemSystem sys = load_problem(opt.problem, opt.overrides);
    std::vector<BoundarySample> samples;
    winding(sys, domain_box(sys), &samples);
    Output o(opt.out);
    auto& os = o.stream();
    os << "# schema semiflow/1\nt,s,re_rho,im_rho,phase\n";
    for (const auto& s : samples)
        os << format_real(s.t) << ',' << format_real(s.s) << ',' << format_real(s.value.real()) << ','
           << format_real(s.value.imag()) << ',' << format_real(s.phase) << '\n';
    return 0;
}

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& r) {
    const auto dots = r.find("..");
    try {
        if (dots == std::string::npos) {
            const std::uint64_t v = std::stoull(r);
            return {v, v};
        }
        const std::uint64_t a = std::stoull(r.substr(0, dots)), b = std::stoull(r.substr(dots + 2));
        if (b < a) throw InvalidInput("empty seed range '" + r + "'");
        return {a, b};
    } catch (const std::logic_error&) {
        throw InvalidInput("seed range must look like A..B, got '" + r + "'");
    }
}

struct SweepRow {
    std::string line;
    bool agree = false;
    std::string error;
};

SweepRow sweep_one(std::uint64_t seed, const Options& opt) {
    SweepRow row;
    const SweepParams p = sweep_params(seed);
    std::ostringstream os;
    os << seed << ',' << p.n << ',' << p.nu << ',';
    try {
        Tolerances tol;
        if (opt.overrides.steps) tol.ode_steps = *opt.overrides.steps;
        if (opt.overrides.rank_rel_tol) tol.rank_rel_tol = *opt.overrides.rank_rel_tol;
        if (opt.overrides.instant_tol) tol.instant_tol = *opt.overrides.instant_tol;
        ProblemSystem sys = sweep_system(seed, tol);
        if (opt.overrides.o_height) sys = sys.with_o_height(*opt.overrides.o_height);
        const IndexReport r = index_report(sys);
        row.agree = r.agreement;
        os << r.instants.size() << ',' << r.mu_spec << ',' << r.mu_con << ',' << r.mu_maslov << ','
           << (r.agreement ? "true" : "false");
    } catch (const std::exception& e) {
        row.error = e.what();
        os << ",,,,false";
    }
    row.line = os.str();
    return row;
}

int cmd_sweep(const Options& opt) {
    const auto [lo, hi] = parse_range(opt.seed_range);
    const std::size_t count = static_cast<std::size_t>(hi - lo + 1);
    std::vector<SweepRow> rows(count);
    std::atomic<std::size_t> next{0};
    const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(count)));
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) rows[i] = sweep_one(lo + i, opt);
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Output o(opt.out);
    auto& os = o.stream();
    os << "# schema semiflow/1\nseed,n,nu,instants,mu_spec,mu_con,mu_maslov,agree\n";
    bool all = true;
    for (std::size_t i = 0; i < count; ++i) {
        os << rows[i].line << '\n';
        all = all && rows[i].agree;
        if (!rows[i].error.empty())
            std::cerr << Json{{"schema", kSchema}, {"seed", lo + i}, {"error", rows[i].error}}.dump() << '\n';
    }
    return all ? 0 : 1;
}

void add_problem_flags(CLI::App* sub, Options& opt) {
    sub->add_option("problem", opt.problem, "problem JSON file ('-' for stdin)");
    sub->add_option("--steps", opt.overrides.steps, "RK4 steps on [0,1]")->check(CLI::Range(16, 10000000));
    sub->add_option("--rank-tol", opt.overrides.rank_rel_tol, "relative rank tolerance");
    sub->add_option("--instant-tol", opt.overrides.instant_tol, "instant bisection tolerance");
    sub->add_option("--o-height", opt.overrides.o_height, "half-height of the winding box");
    sub->add_option("--delta", opt.overrides.delta, "regularising shift delta");
    sub->add_option("-o,--out", opt.out, "write output to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiflow: conjugate, spectral and Maslov indices of semi-Riemannian Jacobi systems"};
    app.require_subcommand(1);
    Options opt;

    auto* instants = app.add_subcommand("instants", "locate conjugate instants");
    auto* index = app.add_subcommand("index", "conjugate index by winding number");
    auto* spectral = app.add_subcommand("spectral-flow", "spectral flow via crossing forms");
    auto* maslov = app.add_subcommand("maslov", "Maslov index of the Lagrangian path");
    auto* verify = app.add_subcommand("verify", "all indices and their agreement (exit 1 on disagreement)");
    auto* sweep = app.add_subcommand("sweep", "seeded random-trig batch, one CSV row per seed");
    auto* dump = app.add_subcommand("dump-boundary", "CSV of rho along the boundary of the winding box");
    for (auto* sub : {instants, index, spectral, maslov, verify, dump}) add_problem_flags(sub, opt);
    spectral->add_option("--mesh", opt.mesh, "also report the finite-element Morse oracle on this mesh")
        ->check(CLI::Range(16, 100000));
    maslov->add_option("--frame-csv", opt.frame_csv, "write t, sigma_min(b_t), dim(lambda_t cap l) to this CSV");
    maslov->add_option("--frame-points", opt.frame_points, "grid size for --frame-csv")->check(CLI::Range(2, 100000));
    sweep->add_option("--seed-range", opt.seed_range, "seeds A..B (inclusive)");
    sweep->add_option("--jobs", opt.jobs, "parallel workers")->check(CLI::Range(1, 256));
    sweep->add_option("--steps", opt.overrides.steps, "RK4 steps on [0,1]")->check(CLI::Range(16, 10000000));
    sweep->add_option("--rank-tol", opt.overrides.rank_rel_tol, "relative rank tolerance");
    sweep->add_option("--instant-tol", opt.overrides.instant_tol, "instant bisection tolerance");
    sweep->add_option("--o-height", opt.overrides.o_height, "half-height of the winding box");
    sweep->add_option("-o,--out", opt.out, "write CSV to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return emit_error("usage", e.what(), 2);
    }

    try {
        if (*instants) return cmd_instants(opt);
        if (*index) return cmd_index(opt);
        if (*spectral) return cmd_spectral(opt);
        if (*maslov) return cmd_maslov(opt);
        if (*verify) return cmd_verify(opt);
        if (*sweep) return cmd_sweep(opt);
        if (*dump) return cmd_dump_boundary(opt);
    } catch (const InvalidInput& e) {
        return emit_error("invalid_input", e.what(), 2);
    } catch (const NumericalFailure& e) {
        return emit_error("numerical_failure", e.what(), 3);
    } catch (const std::exception& e) {
        return emit_error("internal", e.what(), 3);
    }
    return 2;
}
