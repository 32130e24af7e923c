#pragma once

// Local degree of a planar map at an isolated zero from the lowest-order
// homogeneous parts of its two components, via Sturm remainder chains.

#include <vector>

#include "semiflow/conjugate.hpp"
#include "semiflow/numkit.hpp"
#include "semiflow/system.hpp"

namespace semiflow {

/// Sign fixed so that the chain result for z^2 equals its winding number.
inline constexpr int kKroneckerSign = -1;

/// Homogeneous polynomial of degree `degree` in (t, s):
/// sum_k coeffs[k] * t^(degree - k) * s^k.
struct HomogeneousPoly {
    int degree = 0;
    std::vector<double> coeffs;

    double operator()(double t, double s) const;
    Poly at_t_one() const;  // s -> H(1, s)
    bool is_zero() const;
};

struct HomogeneousPair {
    HomogeneousPoly p;  // lowest-order part of the real component
    HomogeneousPoly q;  // lowest-order part of the imaginary component
};

/// Fits the lowest-order homogeneous parts of f around (t0, 0) from samples on
/// circles of radius r, r/2, r/4. Throws NumericalFailure "no stable
/// homogeneous part up to max_degree" when the fits do not settle.
HomogeneousPair homogeneous_fit(const PlanarMap& f, double t0, double radius, int max_degree);
HomogeneousPair homogeneous_fit(const ProblemSystem& sys, double t0, double radius, int max_degree = 6);

/// Fit radius min(gap / 4, 0.02) from the distance to the neighbouring
/// instants and to the ends of (0,1).
double fit_radius(const std::vector<ConjugateInstant>& instants, std::size_t index);

/// P(1,s), Q(1,s) share no real root and |P(0,1)| + |Q(0,1)| > 0.
bool h1_check(const HomogeneousPair& pair);

/// Number of distinct real roots of p (Sturm's theorem on the whole line).
int real_root_count(const Poly& p);

/// Chain N_0, N_1, N_{i+1} = -rem(N_{i-1}, N_i), stopping at a constant or
/// zero remainder. Remainders below rel_tol times the largest input
/// coefficient are treated as zero.
std::vector<Poly> sturm_chain(const Poly& n0, const Poly& n1, double rel_tol = 1e-9);

/// Sign changes of the chain at +infinity / -infinity.
int sign_changes_at_infinity(const std::vector<Poly>& chain, bool positive);

struct KroneckerDetail {
    std::vector<Poly> chain;
    bool swapped = false;  // deg P(1,s) < deg Q(1,s): chain started from (N_1, N_0)
    int m_plus = 0;
    int m_minus = 0;
    int raw = 0;  // -(1 + (-1)^(m+n)) (m_plus - m_minus) / 2
    int multiplicity = 0;
};

KroneckerDetail kronecker_detail(const HomogeneousPair& pair);
int kronecker_multiplicity(const HomogeneousPair& pair);

}  // namespace semiflow
