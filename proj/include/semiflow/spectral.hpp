#pragma once

// Spectral flow of the Hessian family via crossing forms at conjugate
// instants, delta-regularization for degenerate crossings, and a
// finite-element Morse index oracle.

#include <functional>
#include <optional>
#include <vector>

#include "semiflow/conjugate.hpp"
#include "semiflow/numkit.hpp"
#include "semiflow/system.hpp"

namespace semiflow {

struct CrossingData {
    double t = 0.0;
    Matrix form_boundary;  // -(1/t) <J u_j'(1), u_k'(1)> (+ delta correction)
    Matrix form_integral;  // -int <S_dot_t u_j, u_k> dx
    Signature signature;   // of form_boundary
    Signature integral_signature;
    bool regular = false;
};

/// Kernel Jacobi fields u_k(x) on the integrator grid, u_k(0) = 0, Ju_k'(0) = w_k.
std::vector<std::vector<Vector>> kernel_fields(const ProblemSystem& sys, const ConjugateInstant& inst);

CrossingData crossing_form(const ProblemSystem& sys, const ConjugateInstant& inst);
CrossingData crossing_form(const ProblemSystem& sys, double t);

/// Composite Simpson weights on a uniform grid of `intervals` cells over [0,1]
/// (3/8 rule on the last three cells when the count is odd).
std::vector<double> simpson_weights(int intervals);

/// One delta-ladder attempt: nullopt when some crossing of the shifted family
/// is degenerate or an instant could not be certified.
using CrossingCount = std::function<std::optional<int>(const ProblemSystem&, const InstantSearch&)>;

struct RegularizedCount {
    int value = 0;
    double delta = 0.0;  // shift finally used (0 when no regularization was needed)
    int ladder_steps = 0;
};

/// Evaluates `count` on sys; when it reports a degenerate crossing, retries on
/// the shifted families delta = {1,2,4,8} * 1e-3 * ||S||_inf until two
/// consecutive shifts give the same value. `search` may supply the instants
/// of the unshifted system.
RegularizedCount regularized_count(const ProblemSystem& sys, const CrossingCount& count,
                                   const InstantSearch* search = nullptr);

struct SpectralFlowResult {
    int flow = 0;
    double delta = 0.0;
    std::vector<CrossingData> crossings;  // of the family actually used
};

SpectralFlowResult spectral_flow_detail(const ProblemSystem& sys, const InstantSearch* search = nullptr);
int spectral_flow(const ProblemSystem& sys);
int mu_spec(const ProblemSystem& sys);

/// Galerkin matrix of the index form on piecewise-linear hat functions,
/// stored block-tridiagonally: diag[i] = H(i,i), lower[i] = H(i+1,i).
struct FemHessian {
    int mesh = 0;
    double t = 0.0;
    std::size_t n = 0;
    std::vector<Matrix> diag;
    std::vector<Matrix> lower;

    std::size_t dimension() const { return n * diag.size(); }
    Matrix dense() const;  // only within the numkit dimension cap
    int negative_count(double rel_tol = 1e-10) const;
};

FemHessian fem_hessian(const ProblemSystem& sys, double t, int mesh);

/// mu^-(t = 1) - mu^-(t = 0) on a common mesh.
int morse_oracle(const ProblemSystem& sys, int mesh);

}  // namespace semiflow
