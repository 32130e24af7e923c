#pragma once

// Fundamental solution of the suspended Hamiltonian system
//
//     Psi' = sigma H_z(x) Psi = [[0, J], [-S_z(x), 0]] Psi,   Psi(0) = Id,
//
// by fixed-step classical RK4. Real parameters are integrated in real
// arithmetic; the result is the same matrix path either way.

#include <vector>

#include "semiflow/numkit.hpp"
#include "semiflow/system.hpp"

namespace semiflow {

struct FundamentalSolution {
    cplx z;
    Matrix psi_end;  // Psi_z(1), 2n x 2n
    Matrix a, b, c, d;
    int steps = 0;
};

FundamentalSolution fundamental_solution(const ProblemSystem& sys, cplx z, int steps);

/// Upper-right block b_z of Psi_z(1): maps v(0) to u(1).
Matrix b_block(const ProblemSystem& sys, cplx z, int steps);

/// Right block column [b_t; d_t] of the real Psi_t(1) (image of {0} x R^n).
Matrix right_columns(const ProblemSystem& sys, double t, int steps);

/// rho(z) = det b_z at the system's step count.
cplx rho(const ProblemSystem& sys, cplx z);

/// || Psi^T sigma Psi - sigma ||_F; only defined for real z.
double symplectic_residual(const FundamentalSolution& fs, const MetricSignature& signature);

/// Psi_z(x) for x in [0,1]. The interval [0,x] is split into
/// max(1, ceil(x * steps)) equal RK4 steps.
Matrix psi_at(const ProblemSystem& sys, cplx z, double x, int steps);

/// Solution Y(x) of Y' = sigma H_z Y, Y(0) = initial (2n x m), recorded on
/// every grid point x_k = k / steps.
struct Trajectory {
    std::vector<double> x;
    std::vector<Matrix> states;
};

Trajectory trajectory(const ProblemSystem& sys, cplx z, const Matrix& initial, int steps);
inline Trajectory real_trajectory(const ProblemSystem& sys, double t, const Matrix& initial, int steps) {
    return trajectory(sys, cplx(t, 0.0), initial, steps);
}

}  // namespace semiflow
