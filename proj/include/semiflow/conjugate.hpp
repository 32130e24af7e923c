#pragma once

// Conjugate instants and the conjugate index.
//
// Instants are the zeros of rho(t) = det b_t on (0,1). The conjugate index is
// the (orientation-normalised) winding number of rho around the boundary of
// the box (0,1) x (-o_height, o_height); zeros lie only on the real axis.

#include <functional>
#include <string>
#include <vector>

#include "semiflow/numkit.hpp"
#include "semiflow/system.hpp"

namespace semiflow {

/// Orientation of the box-boundary winding number relative to the conjugate
/// index. Fixed so that the Riemannian oscillator with one conjugate point
/// has index +1.
inline constexpr int kOrientationSign = +1;

struct ConjugateInstant {
    double t = 0.0;
    int multiplicity = 0;
    std::vector<Vector> kernel;         // orthonormal basis w_k of ker b_t
    std::vector<Vector> image_vectors;  // v_k = d_t w_k
    int signature_contrib = 0;          // signature of v -> <Jv, v> when regular
    bool regular = false;
};

/// A local minimum of sigma_min(b_t) on the scan grid that refinement did not
/// turn into an instant.
struct UnresolvedDip {
    double t = 0.0;
    double sigma_rel = 0.0;  // sigma_min / sigma_max at the refined minimum
};

struct InstantSearch {
    std::vector<ConjugateInstant> instants;
    /// refined minimum too small to rule out a zero, yet no kernel at rank_rel_tol
    std::vector<UnresolvedDip> unresolved;
    /// refined minimum clearly away from zero (b_t stays invertible)
    std::vector<UnresolvedDip> near_misses;
};

/// Refined sigma_min / scale above this certifies that a dip is not a zero.
inline constexpr double kNearMissFloor = 1e-5;

InstantSearch find_instants(const ProblemSystem& sys);
std::vector<ConjugateInstant> locate_instants(const ProblemSystem& sys);

/// Kernel data of b_t at a known instant; throws InvalidInput when b_t is
/// numerically invertible.
ConjugateInstant instant_at(const ProblemSystem& sys, double t);

/// Signature of <Jv, v> on span{v_k} (the metric on I[t]^perp).
int instant_signature(const ConjugateInstant& inst, const MetricSignature& signature);

int regular_conjugate_index(const ProblemSystem& sys);
int regular_conjugate_index(const std::vector<ConjugateInstant>& instants, const MetricSignature& signature);

struct Box {
    double t_min = 0.0;
    double t_max = 1.0;
    double s_min = -1.0;
    double s_max = 1.0;
};

/// (0,1) x (-o_height, o_height)
Box domain_box(const ProblemSystem& sys);

struct WindingResult {
    int winding = 0;
    int samples_used = 0;
    double max_phase_step = 0.0;
    double residue = 0.0;  // |total phase / 2 pi - winding|
};

struct BoundarySample {
    double t = 0.0;
    double s = 0.0;
    cplx value;
    double phase = 0.0;  // accumulated argument up to this sample
};

using PlanarMap = std::function<cplx(cplx)>;

/// Counter-clockwise winding number of f around the boundary of box.
/// Throws NumericalFailure ("zero too close to boundary") when f nearly
/// vanishes on the boundary.
WindingResult winding(const PlanarMap& f, const Box& box, std::vector<BoundarySample>* samples = nullptr);
WindingResult winding(const ProblemSystem& sys, const Box& box, std::vector<BoundarySample>* samples = nullptr);

int conjugate_index(const ProblemSystem& sys);

/// Half-gap to the neighbouring instants (or to 0 and 1), capped at 0.1.
double isolation_radius(const std::vector<ConjugateInstant>& instants, std::size_t index);

/// Orientation-normalised winding over [t0-r, t0+r] x [-r, r].
int local_multiplicity(const ProblemSystem& sys, double t0, double radius);

/// Green kernel of u -> J u'' + S_z u with Dirichlet ends; the diagonal takes
/// the x < y branch.
Matrix green_kernel(const ProblemSystem& sys, cplx z, double x, double y);

/// Green kernel evaluated on the integrator grid x_k = k / steps, sharing a
/// single integration of Psi_z.
class GreenKernelTable {
public:
    GreenKernelTable(const ProblemSystem& sys, cplx z);
    int steps() const { return steps_; }
    Matrix at(int k, int l) const;  // K_z(x_k, x_l)

private:
    std::size_t n_;
    int steps_;
    std::vector<Matrix> psi_;
    std::vector<Matrix> psi_inv_;
    Matrix projector_;
};

struct TraceCheck {
    cplx integral;  // (1 / 2 pi i) * contour integral of Tr(db b^-1)
    int winding = 0;
    double discrepancy = 0.0;
};

TraceCheck trace_boundary_check(const ProblemSystem& sys);

}  // namespace semiflow
