#pragma once

// Maslov index of the Lagrangian path lambda_t = Psi_t(1)({0} x R^n) against
// the vertical subspace l = {0} x R^n.

#include <vector>

#include "semiflow/conjugate.hpp"
#include "semiflow/numkit.hpp"
#include "semiflow/system.hpp"

namespace semiflow {

/// Sign relating the summed Maslov crossing signatures to the conjugate
/// index; fixed so that the Riemannian oscillator gives +1.
inline constexpr int kMaslovSign = -1;

struct LagrangianFrame {
    double t = 0.0;
    Matrix frame;  // 2n x n, columns [b_t; d_t]
};

LagrangianFrame lagrangian_frame(const ProblemSystem& sys, double t);

/// || F^T sigma F ||_F; zero for a Lagrangian frame.
double isotropy_residual(const LagrangianFrame& f);

struct MaslovCrossing {
    double t = 0.0;
    Matrix direct_form;  // -<J v_j, v_k> (+ delta correction), v_k = d_t w_k
    Matrix fd_form;      // <sigma M w_j, M_dot w_k> with a central-difference M_dot
    Signature signature;
    Signature fd_signature;
    bool regular = false;
    bool richardson = false;  // the h/2 Richardson estimate replaced the plain difference
};

/// Central-difference step for the frame derivative.
inline constexpr double kFrameStep = 1e-5;

MaslovCrossing maslov_crossing_form(const ProblemSystem& sys, const ConjugateInstant& inst);
MaslovCrossing maslov_crossing_form(const ProblemSystem& sys, double t);

struct MaslovResult {
    int index = 0;
    double delta = 0.0;
    double epsilon = 0.0;  // half the first instant: no crossing in [0, epsilon]
    std::vector<MaslovCrossing> crossings;
};

MaslovResult maslov_index_detail(const ProblemSystem& sys, const InstantSearch* search = nullptr);
int maslov_index(const ProblemSystem& sys);

struct FrameSample {
    double t = 0.0;
    double sigma_min = 0.0;  // smallest singular value of b_t
    int intersection_dim = 0;
};

/// sigma_min(b_t) and dim(lambda_t cap l) on a uniform grid of `points` values in [0,1].
std::vector<FrameSample> frame_scan(const ProblemSystem& sys, int points);

}  // namespace semiflow
