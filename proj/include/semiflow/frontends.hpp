#pragma once

// Model problem generators: decoupled systems with closed-form conjugate
// structure, and seeded random trigonometric systems.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semiflow/numkit.hpp"
#include "semiflow/system.hpp"

namespace semiflow {

struct OracleInstant {
    double t = 0.0;
    int multiplicity = 0;
    int contribution = 0;  // sum of epsilon_i over the modes vanishing at t
};

struct Oracle {
    std::vector<OracleInstant> instants;  // ascending
    int index = 0;                        // sum of all contributions
};

struct GeneratedSystem {
    ProblemSystem system;
    std::optional<Oracle> oracle;
};

/// J = diag(eps_i), S = diag(a_i). Mode i oscillates when eps_i a_i > 0 and
/// vanishes at t = k pi / sqrt(eps_i a_i).
GeneratedSystem constant_diagonal(int n, int nu, const std::vector<double>& a, const Tolerances& tol = {});

/// Flat semi-Euclidean space with potential V(m) = <Am, m> / 2: S = A.
ProblemSystem flat_quadratic_potential(MetricSignature signature, const Matrix& a, const Tolerances& tol = {});

/// J = Id, S = c^2 Id_{n-1} (+) 0.
GeneratedSystem sphere_like(int n, double c, const Tolerances& tol = {});

/// xorshift64 (shifts 13, 7, 17) seeded through one splitmix64 step, so any
/// seed including 0 gives a nonzero state.
class Xorshift64 {
public:
    explicit Xorshift64(std::uint64_t seed);
    std::uint64_t next();
    /// (next() >> 11) * 2^-53, in [0, 1)
    double unit();
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

private:
    std::uint64_t state_;
};

/// S(x) = A_0 + sum_{k<=degree} (A_k cos 2 pi k x + B_k sin 2 pi k x), entries
/// uniform in [-amplitude, amplitude] drawn in the order A_0, A_1, B_1, A_2,
/// B_2, ... (each matrix row-major, then symmetrised). Draws continue from the
/// same stream until the system is nondegenerate at t = 1 (at most 100 tries).
ProblemSystem random_trig(std::uint64_t seed, int n, int nu, int degree, double amplitude, const Tolerances& tol = {});

/// Parameters of sweep instance `seed`: n = 2 + seed % 3,
/// nu = 1 + (seed / 3) % (n - 1), degree 2, amplitude 40.
struct SweepParams {
    std::uint64_t seed = 0;
    int n = 2;
    int nu = 1;
    int degree = 2;
    double amplitude = 40.0;
};

SweepParams sweep_params(std::uint64_t seed);
ProblemSystem sweep_system(std::uint64_t seed, const Tolerances& tol = {});

enum class GeneratorKind { ConstantDiagonal, FlatQuadraticPotential, SphereLike, RandomTrig };

const char* to_string(GeneratorKind k);
GeneratorKind generator_kind_from_string(const std::string& s);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::ConstantDiagonal;
    int n = 1;
    int nu = 0;
    std::vector<double> diagonal;  // constant-diagonal
    Matrix potential;              // flat-quadratic-potential
    double curvature = 1.0;        // sphere-like
    std::uint64_t seed = 0;        // random-trig
    int degree = 2;
    double amplitude = 40.0;
};

GeneratedSystem generate(const GeneratorSpec& spec, const Tolerances& tol = {});

}  // namespace semiflow
