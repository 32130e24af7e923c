#include "semiflow/report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>

#include "semiflow/flow.hpp"
#include "semiflow/frontends.hpp"
#include "semiflow/maslov.hpp"
#include "semiflow/spectral.hpp"

namespace semiflow {

namespace {

Matrix parse_matrix(const Json& j, std::size_t n, const std::string& what) {
    if (!j.is_array() || j.size() != n) throw InvalidInput(what + ": expected " + std::to_string(n) + " rows");
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Json& row = j[i];
        if (!row.is_array() || row.size() != n)
            throw InvalidInput(what + ": row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
        for (std::size_t k = 0; k < n; ++k) {
            if (!row[k].is_number()) throw InvalidInput(what + ": entries must be numbers");
            m(i, k) = row[k].get<double>();
        }
    }
    return m;
}

std::vector<Matrix> parse_matrices(const Json& j, std::size_t n, const std::string& what) {
    if (!j.is_array()) throw InvalidInput(what + " must be an array of matrices");
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(parse_matrix(j[k], n, what + "[" + std::to_string(k) + "]"));
    return out;
}

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k).real());
        rows.push_back(std::move(row));
    }
    return rows;
}

CoefficientField parse_field(const Json& f, std::size_t n) {
    if (!f.is_object()) throw InvalidInput("\"field\" must be an object");
    const std::string kind = f.at("kind").get<std::string>();
    const std::vector<Matrix> mats = parse_matrices(f.at("matrices"), n, "field.matrices");
    if (mats.empty()) throw InvalidInput("field.matrices must not be empty");
    if (kind == "constant") {
        if (mats.size() != 1) throw InvalidInput("constant field takes exactly one matrix");
        return CoefficientField::constant(mats.front());
    }
    if (kind == "poly") return CoefficientField::polynomial(mats);
    if (kind == "trig") {
        std::vector<Matrix> sin_terms;
        if (f.contains("sin_matrices")) sin_terms = parse_matrices(f.at("sin_matrices"), n, "field.sin_matrices");
        if (sin_terms.size() + 1 > mats.size()) throw InvalidInput("trig field has more sine than cosine harmonics");
        return CoefficientField::trigonometric(mats, sin_terms);
    }
    throw InvalidInput("unknown field kind '" + kind + "' (expected constant, poly or trig)");
}

Tolerances parse_tolerances(const Json& doc, const ProblemOverrides& ov) {
    Tolerances tol;
    if (doc.contains("tolerances")) {
        const Json& t = doc.at("tolerances");
        if (!t.is_object()) throw InvalidInput("\"tolerances\" must be an object");
        if (t.contains("rank_rel_tol")) tol.rank_rel_tol = t.at("rank_rel_tol").get<double>();
        if (t.contains("instant_tol")) tol.instant_tol = t.at("instant_tol").get<double>();
        if (t.contains("ode_steps")) tol.ode_steps = t.at("ode_steps").get<int>();
    }
    if (ov.steps) tol.ode_steps = *ov.steps;
    if (ov.rank_rel_tol) tol.rank_rel_tol = *ov.rank_rel_tol;
    if (ov.instant_tol) tol.instant_tol = *ov.instant_tol;
    return tol;
}

GeneratorSpec parse_generator(const Json& g, const Json& doc) {
    if (!g.is_object()) throw InvalidInput("\"generator\" must be an object");
    GeneratorSpec spec;
    spec.kind = generator_kind_from_string(g.at("kind").get<std::string>());
    auto int_field = [&](const char* key, int fallback) {
        if (g.contains(key)) return g.at(key).get<int>();
        if (doc.contains(key)) return doc.at(key).get<int>();
        return fallback;
    };
    spec.n = int_field("n", 1);
    spec.nu = int_field("nu", 0);
    switch (spec.kind) {
        case GeneratorKind::ConstantDiagonal:
            spec.diagonal = g.at("diagonal").get<std::vector<double>>();
            break;
        case GeneratorKind::FlatQuadraticPotential:
            spec.potential = parse_matrix(g.at("matrix"), static_cast<std::size_t>(spec.n), "generator.matrix");
            break;
        case GeneratorKind::SphereLike: spec.curvature = g.at("curvature").get<double>(); break;
        case GeneratorKind::RandomTrig:
            spec.seed = g.at("seed").get<std::uint64_t>();
            spec.degree = g.value("degree", 2);
            spec.amplitude = g.value("amplitude", 40.0);
            break;
    }
    if (spec.n < 1 || spec.n > 16) throw InvalidInput("dimension n must be in [1,16]");
    return spec;
}

}  // namespace

ProblemSystem parse_problem(const Json& doc, const ProblemOverrides& ov) {
    try {
        if (!doc.is_object()) throw InvalidInput("problem must be a JSON object");
        if (doc.contains("schema") && doc.at("schema") != kSchema)
            throw InvalidInput("unsupported schema " + doc.at("schema").dump());
        const Tolerances tol = parse_tolerances(doc, ov);
        double o_height = doc.value("o_height", 1.0);
        if (ov.o_height) o_height = *ov.o_height;
        double delta = doc.value("delta", 0.0);
        if (ov.delta) delta = *ov.delta;

        if (doc.contains("generator")) {
            const GeneratorSpec spec = parse_generator(doc.at("generator"), doc);
            if (doc.contains("n") && doc.at("n").get<int>() != spec.n)
                throw InvalidInput("top-level n disagrees with the generator");
            if (doc.contains("nu") && doc.at("nu").get<int>() != spec.nu)
                throw InvalidInput("top-level nu disagrees with the generator");
            const ProblemSystem base = generate(spec, tol).system;
            if (!(o_height > 0.0)) throw InvalidInput("o_height must be positive");
            ProblemSystem sys = base.with_o_height(o_height);
            if (delta != 0.0) {
                sys = sys.with_delta(delta);
                validate_nondegenerate(sys);
            }
            return sys;
        }
        const int n = doc.at("n").get<int>();
        const int nu = doc.at("nu").get<int>();
        if (n < 1 || n > 16) throw InvalidInput("dimension n must be in [1,16]");
        const CoefficientField field = parse_field(doc.at("field"), static_cast<std::size_t>(n)).with_delta(delta);
        return ProblemSystem::create({n, nu}, field, o_height, tol);
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("malformed problem JSON: ") + e.what());
    }
}

ProblemSystem load_problem(const std::string& path, const ProblemOverrides& ov) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
        std::ifstream in(path);
        if (!in) throw InvalidInput("cannot open problem file '" + path + "'");
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("problem file is not valid JSON: ") + e.what());
    }
    return parse_problem(doc, ov);
}

Json problem_to_json(const ProblemSystem& sys) {
    const CoefficientField& f = sys.field();
    Json field{{"kind", to_string(f.kind())}};
    Json mats = Json::array();
    for (const auto& m : f.terms()) mats.push_back(matrix_json(m));
    field["matrices"] = std::move(mats);
    if (f.kind() == FieldKind::Trigonometric) {
        Json sins = Json::array();
        for (const auto& m : f.sin_terms()) sins.push_back(matrix_json(m));
        field["sin_matrices"] = std::move(sins);
    }
    const Tolerances& tol = sys.tolerances();
    return Json{{"schema", kSchema},
                {"n", sys.signature().n},
                {"nu", sys.signature().nu},
                {"field", std::move(field)},
                {"o_height", sys.o_height()},
                {"tolerances",
                 {{"rank_rel_tol", tol.rank_rel_tol}, {"instant_tol", tol.instant_tol}, {"ode_steps", tol.ode_steps}}},
                {"delta", sys.delta()}};
}

// ---------------------------------------------------------------------------

IndexReport index_report(const ProblemSystem& sys) {
    const InstantSearch search = find_instants(sys);
    const SpectralFlowResult sf = spectral_flow_detail(sys, &search);
    const MaslovResult ms = maslov_index_detail(sys, &search);
    const WindingResult w = winding(sys, domain_box(sys));

    IndexReport r;
    bool all_regular = search.unresolved.empty();
    for (const auto& inst : search.instants) {
        InstantEntry e{inst.t, inst.multiplicity, std::nullopt};
        if (inst.regular) e.signature = inst.signature_contrib;
        else all_regular = false;
        r.instants.push_back(e);
    }
    r.mu_spec = -sf.flow;
    r.mu_con = kOrientationSign * w.winding;
    r.mu_maslov = ms.index;
    if (all_regular) r.i_con = regular_conjugate_index(search.instants, sys.signature());
    r.agreement = r.mu_spec == r.mu_con && r.mu_con == r.mu_maslov;
    r.diagnostics.winding_samples = w.samples_used;
    r.diagnostics.max_phase_step = w.max_phase_step;
    r.diagnostics.symplectic_residual =
        symplectic_residual(fundamental_solution(sys, cplx(1.0, 0.0), sys.steps()), sys.signature());
    r.diagnostics.delta = std::max(sf.delta, ms.delta);
    r.diagnostics.unresolved_dips = static_cast<int>(search.unresolved.size());
    return r;
}

Json instants_to_json(const std::vector<ConjugateInstant>& instants) {
    Json arr = Json::array();
    for (const auto& inst : instants) {
        Json e{{"t", inst.t}, {"multiplicity", inst.multiplicity}};
        if (inst.regular) e["signature"] = inst.signature_contrib;
        else e["signature"] = "irregular";
        arr.push_back(std::move(e));
    }
    return arr;
}

Json report_to_json(const IndexReport& r) {
    Json inst = Json::array();
    for (const auto& e : r.instants) {
        Json j{{"t", e.t}, {"multiplicity", e.multiplicity}};
        if (e.signature) j["signature"] = *e.signature;
        else j["signature"] = "irregular";
        inst.push_back(std::move(j));
    }
    Json out{{"schema", kSchema},
             {"instants", std::move(inst)},
             {"mu_spec", r.mu_spec},
             {"mu_con", r.mu_con},
             {"mu_maslov", r.mu_maslov},
             {"agreement", r.agreement},
             {"diagnostics",
              {{"winding_samples", r.diagnostics.winding_samples},
               {"max_phase_step", r.diagnostics.max_phase_step},
               {"symplectic_residual", r.diagnostics.symplectic_residual},
               {"delta", r.diagnostics.delta},
               {"unresolved_dips", r.diagnostics.unresolved_dips}}}};
    if (r.i_con) out["i_con"] = *r.i_con;
    return out;
}

IndexReport report_from_json(const Json& j) {
    try {
        if (j.at("schema") != kSchema) throw InvalidInput("unsupported report schema");
        IndexReport r;
        for (const auto& e : j.at("instants")) {
            InstantEntry ie{e.at("t").get<double>(), e.at("multiplicity").get<int>(), std::nullopt};
            const Json& s = e.at("signature");
            if (s.is_number_integer()) ie.signature = s.get<int>();
            else if (s != "irregular") throw InvalidInput("instant signature must be an integer or \"irregular\"");
            r.instants.push_back(ie);
        }
        r.mu_spec = j.at("mu_spec").get<int>();
        r.mu_con = j.at("mu_con").get<int>();
        r.mu_maslov = j.at("mu_maslov").get<int>();
        if (j.contains("i_con")) r.i_con = j.at("i_con").get<int>();
        r.agreement = j.at("agreement").get<bool>();
        const Json& d = j.at("diagnostics");
        r.diagnostics.winding_samples = d.at("winding_samples").get<int>();
        r.diagnostics.max_phase_step = d.at("max_phase_step").get<double>();
        r.diagnostics.symplectic_residual = d.at("symplectic_residual").get<double>();
        r.diagnostics.delta = d.at("delta").get<double>();
        r.diagnostics.unresolved_dips = d.value("unresolved_dips", 0);
        return r;
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("malformed report JSON: ") + e.what());
    }
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace semiflow
