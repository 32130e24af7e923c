#include "semiflow/frontends.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace semiflow {

namespace {

constexpr double kEndpointMargin = 1e-6;

void add_mode_instants(std::vector<OracleInstant>& out, double omega, int eps) {
    // zeros of sin(omega t) in (0,1)
    for (int k = 1;; ++k) {
        const double t = k * std::numbers::pi / omega;
        if (std::abs(t - 1.0) < kEndpointMargin)
            throw InvalidInput("oracle instant at t = " + std::to_string(t) + " is too close to 1 (degenerate at 1)");
        if (t >= 1.0) break;
        out.push_back({t, 1, eps});
    }
}

Oracle finish(std::vector<OracleInstant> raw) {
    std::sort(raw.begin(), raw.end(), [](const OracleInstant& a, const OracleInstant& b) { return a.t < b.t; });
    Oracle o;
    for (const auto& r : raw) {
        if (!o.instants.empty() && std::abs(o.instants.back().t - r.t) <= 1e-12) {
            o.instants.back().multiplicity += r.multiplicity;
            o.instants.back().contribution += r.contribution;
        } else {
            o.instants.push_back(r);
        }
        o.index += r.contribution;
    }
    return o;
}

}  // namespace

GeneratedSystem constant_diagonal(int n, int nu, const std::vector<double>& a, const Tolerances& tol) {
    if (static_cast<int>(a.size()) != n) throw InvalidInput("constant_diagonal: need exactly n diagonal entries");
    const MetricSignature sig{n, nu};
    std::vector<OracleInstant> raw;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ea = sig.epsilon(i) * a[i];
        if (ea > 0.0) add_mode_instants(raw, std::sqrt(ea), static_cast<int>(sig.epsilon(i)));
    }
    Oracle oracle = finish(std::move(raw));
    return {ProblemSystem::create(sig, CoefficientField::constant(Matrix::diagonal(a)), 1.0, tol), std::move(oracle)};
}

ProblemSystem flat_quadratic_potential(MetricSignature signature, const Matrix& a, const Tolerances& tol) {
    return ProblemSystem::create(signature, CoefficientField::constant(a), 1.0, tol);
}

GeneratedSystem sphere_like(int n, double c, const Tolerances& tol) {
    if (n < 1) throw InvalidInput("sphere_like: n must be positive");
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("sphere_like: curvature parameter must be positive");
    std::vector<double> d(static_cast<std::size_t>(n), c * c);
    d.back() = 0.0;
    std::vector<OracleInstant> raw;
    for (int i = 0; i + 1 < n; ++i) add_mode_instants(raw, c, 1);
    Oracle oracle = finish(std::move(raw));
    return {ProblemSystem::create({n, 0}, CoefficientField::constant(Matrix::diagonal(d)), 1.0, tol),
            std::move(oracle)};
}

// ---------------------------------------------------------------------------

Xorshift64::Xorshift64(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    state_ = z ^ (z >> 31);
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
}

std::uint64_t Xorshift64::next() {
    std::uint64_t x = state_;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    state_ = x;
    return x;
}

double Xorshift64::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

namespace {

Matrix draw_symmetric(Xorshift64& rng, int n, double amplitude) {
    const auto m = static_cast<std::size_t>(n);
    Matrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = rng.uniform(-amplitude, amplitude);
    return (a + a.transpose()) * 0.5;
}

}  // namespace

ProblemSystem random_trig(std::uint64_t seed, int n, int nu, int degree, double amplitude, const Tolerances& tol) {
    if (n < 1 || n > 6) throw InvalidInput("random_trig: n must lie in 1..6");
    if (degree < 0 || degree > 4) throw InvalidInput("random_trig: degree must lie in 0..4");
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw InvalidInput("random_trig: amplitude must be >= 0");
    Xorshift64 rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<Matrix> cos_terms{draw_symmetric(rng, n, amplitude)};
        std::vector<Matrix> sin_terms;
        for (int k = 1; k <= degree; ++k) {
            cos_terms.push_back(draw_symmetric(rng, n, amplitude));
            sin_terms.push_back(draw_symmetric(rng, n, amplitude));
        }
        try {
            return ProblemSystem::create({n, nu}, CoefficientField::trigonometric(cos_terms, sin_terms), 1.0, tol);
        } catch (const InvalidInput&) {
            // degenerate at t = 1: draw again
        }
    }
    throw InvalidInput("random_trig: 100 draws were all degenerate at t = 1 (seed " + std::to_string(seed) + ")");
}

SweepParams sweep_params(std::uint64_t seed) {
    SweepParams p;
    p.seed = seed;
    p.n = 2 + static_cast<int>(seed % 3);
    p.nu = 1 + static_cast<int>((seed / 3) % static_cast<std::uint64_t>(p.n - 1));
    return p;
}

ProblemSystem sweep_system(std::uint64_t seed, const Tolerances& tol) {
    const SweepParams p = sweep_params(seed);
    return random_trig(seed, p.n, p.nu, p.degree, p.amplitude, tol);
}

// ---------------------------------------------------------------------------

const char* to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::ConstantDiagonal: return "constant-diagonal";
        case GeneratorKind::FlatQuadraticPotential: return "flat-quadratic-potential";
        case GeneratorKind::SphereLike: return "sphere-like";
        case GeneratorKind::RandomTrig: return "random-trig";
    }
    return "?";
}

GeneratorKind generator_kind_from_string(const std::string& s) {
    for (auto k : {GeneratorKind::ConstantDiagonal, GeneratorKind::FlatQuadraticPotential, GeneratorKind::SphereLike,
                   GeneratorKind::RandomTrig})
        if (s == to_string(k)) return k;
    throw InvalidInput("unknown generator kind '" + s + "'");
}

GeneratedSystem generate(const GeneratorSpec& spec, const Tolerances& tol) {
    switch (spec.kind) {
        case GeneratorKind::ConstantDiagonal: return constant_diagonal(spec.n, spec.nu, spec.diagonal, tol);
        case GeneratorKind::FlatQuadraticPotential:
            return {flat_quadratic_potential({spec.n, spec.nu}, spec.potential, tol), std::nullopt};
        case GeneratorKind::SphereLike: return sphere_like(spec.n, spec.curvature, tol);
        case GeneratorKind::RandomTrig:
            return {random_trig(spec.seed, spec.n, spec.nu, spec.degree, spec.amplitude, tol), std::nullopt};
    }
    throw InvalidInput("unknown generator kind");
}

}  // namespace semiflow
