#include "semiflow/sturm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "semiflow/flow.hpp"

namespace semiflow {

double HomogeneousPoly::operator()(double t, double s) const {
    double v = 0.0;
    for (int k = 0; k <= degree; ++k) v += coeffs[static_cast<std::size_t>(k)] * std::pow(t, degree - k) * std::pow(s, k);
    return v;
}

Poly HomogeneousPoly::at_t_one() const { return Poly(coeffs); }

bool HomogeneousPoly::is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
}

namespace {

constexpr int kAngles = 48;
constexpr double kStability = 0.05;
constexpr double kZeroCoeff = 1e-9;

struct CircleSamples {
    double radius;
    std::vector<double> theta;
    std::vector<double> re, im;
};

// Least-squares coefficients of g(theta) / r^d on cos^(d-k) sin^k, k = 0..d.
std::vector<double> fit_degree(const CircleSamples& cs, const std::vector<double>& g, int d, double* residual_ratio) {
    const auto cols = static_cast<std::size_t>(d) + 1;
    Matrix normal(cols, cols);
    Matrix rhs(cols, 1);
    std::vector<std::vector<double>> basis(cs.theta.size(), std::vector<double>(cols));
    const double scale = std::pow(cs.radius, d);
    for (std::size_t i = 0; i < cs.theta.size(); ++i) {
        const double c = std::cos(cs.theta[i]), s = std::sin(cs.theta[i]);
        for (std::size_t k = 0; k < cols; ++k)
            basis[i][k] = std::pow(c, static_cast<double>(cols - 1 - k)) * std::pow(s, static_cast<double>(k));
        for (std::size_t a = 0; a < cols; ++a) {
            rhs(a, 0) += basis[i][a] * g[i] / scale;
            for (std::size_t b = 0; b < cols; ++b) normal(a, b) += basis[i][a] * basis[i][b];
        }
    }
    const Matrix sol = solve(lu_decompose(normal), rhs);
    std::vector<double> coeffs(cols);
    for (std::size_t k = 0; k < cols; ++k) coeffs[k] = sol(k, 0).real();
    double res2 = 0.0, fit2 = 0.0;
    for (std::size_t i = 0; i < cs.theta.size(); ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k < cols; ++k) v += coeffs[k] * basis[i][k];
        res2 += std::pow(g[i] / scale - v, 2);
        fit2 += v * v;
    }
    *residual_ratio = fit2 > 0.0 ? std::sqrt(res2 / fit2) : INFINITY;
    return coeffs;
}

double coeff_norm(const std::vector<double>& c) {
    double s = 0.0;
    for (double x : c) s += x * x;
    return std::sqrt(s);
}

HomogeneousPoly fit_component(const std::vector<CircleSamples>& circles, bool imaginary, int max_degree) {
    for (int d = 1; d <= max_degree; ++d) {
        std::vector<std::vector<double>> fits;
        double residual = 0.0;
        for (const auto& cs : circles) {
            // higher-order terms leave an O(r) residual; only the smallest circle is judged
            fits.push_back(fit_degree(cs, imaginary ? cs.im : cs.re, d, &residual));
        }
        const std::vector<double>& best = fits.back();
        const double nb = coeff_norm(best);
        if (!(nb > 0.0) || residual > kStability) continue;
        bool stable = true;
        for (std::size_t r = 0; r + 1 < fits.size(); ++r) {
            std::vector<double> diff(best.size());
            for (std::size_t k = 0; k < best.size(); ++k) diff[k] = fits[r][k] - best[k];
            if (coeff_norm(diff) > kStability * nb) stable = false;
        }
        if (!stable) continue;
        HomogeneousPoly h;
        h.degree = d;
        h.coeffs = best;
        double lead = 0.0;
        for (double c : h.coeffs) lead = std::max(lead, std::abs(c));
        for (double& c : h.coeffs)
            if (std::abs(c) <= kZeroCoeff * lead) c = 0.0;
        return h;
    }
    throw NumericalFailure("no stable homogeneous part up to max_degree " + std::to_string(max_degree));
}

}  // namespace

HomogeneousPair homogeneous_fit(const PlanarMap& f, double t0, double radius, int max_degree) {
    if (!(radius > 0.0)) throw InvalidInput("homogeneous_fit: radius must be positive");
    if (max_degree < 1 || max_degree > 8) throw InvalidInput("homogeneous_fit: max_degree must lie in 1..8");
    std::vector<CircleSamples> circles;
    for (double r : {radius, radius / 2.0, radius / 4.0}) {
        CircleSamples cs{r, {}, {}, {}};
        for (int k = 0; k < kAngles; ++k) {
            const double th = 2.0 * std::numbers::pi * (k + 0.5) / kAngles;
            const cplx v = f(cplx(t0 + r * std::cos(th), r * std::sin(th)));
            cs.theta.push_back(th);
            cs.re.push_back(v.real());
            cs.im.push_back(v.imag());
        }
        circles.push_back(std::move(cs));
    }
    return {fit_component(circles, false, max_degree), fit_component(circles, true, max_degree)};
}

HomogeneousPair homogeneous_fit(const ProblemSystem& sys, double t0, double radius, int max_degree) {
    if (!(t0 - radius > 0.0 && t0 + radius < 1.0)) throw InvalidInput("homogeneous_fit: circle must lie inside 0 < t < 1");
    HomogeneousPair pair = homogeneous_fit([&sys](cplx z) { return rho(sys, z); }, t0, radius, max_degree);
    // rho(conj z) = conj rho(z): Re rho is even in s, Im rho odd
    for (std::size_t k = 1; k < pair.p.coeffs.size(); k += 2) pair.p.coeffs[k] = 0.0;
    for (std::size_t k = 0; k < pair.q.coeffs.size(); k += 2) pair.q.coeffs[k] = 0.0;
    return pair;
}

double fit_radius(const std::vector<ConjugateInstant>& instants, std::size_t index) {
    const double t0 = instants.at(index).t;
    double gap = std::min(t0, 1.0 - t0);
    if (index > 0) gap = std::min(gap, t0 - instants[index - 1].t);
    if (index + 1 < instants.size()) gap = std::min(gap, instants[index + 1].t - t0);
    return std::min(gap / 4.0, 0.02);
}

// ---------------------------------------------------------------------------

namespace {

double max_coeff(const Poly& p) {
    double m = 0.0;
    for (double c : p.coeffs()) m = std::max(m, std::abs(c));
    return m;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

std::vector<Poly> sturm_chain(const Poly& n0, const Poly& n1, double rel_tol) {
    const double tol = rel_tol * std::max(max_coeff(n0), max_coeff(n1));
    std::vector<Poly> chain{n0.trimmed(tol), n1.trimmed(tol)};
    if (chain[1].is_zero()) {
        chain.pop_back();
        return chain;
    }
    while (chain.back().degree() > 0) {
        const PolyDivision qr = poly_divrem(chain[chain.size() - 2], chain.back());
        const Poly next = ((-1.0) * qr.remainder).trimmed(tol);
        if (next.is_zero()) break;
        chain.push_back(next);
    }
    return chain;
}

int sign_changes_at_infinity(const std::vector<Poly>& chain, bool positive) {
    int changes = 0, last = 0;
    for (const auto& p : chain) {
        if (p.is_zero()) continue;
        int s = sign_of(p.leading());
        if (!positive && p.degree() % 2 == 1) s = -s;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

int real_root_count(const Poly& p) {
    if (p.is_zero()) throw InvalidInput("real_root_count: zero polynomial");
    if (p.degree() == 0) return 0;
    std::vector<double> dc;
    for (std::size_t k = 1; k < p.coeffs().size(); ++k) dc.push_back(static_cast<double>(k) * p.coeffs()[k]);
    const std::vector<Poly> chain = sturm_chain(p, Poly(dc));
    return sign_changes_at_infinity(chain, false) - sign_changes_at_infinity(chain, true);
}

bool h1_check(const HomogeneousPair& pair) {
    if (pair.p.is_zero() || pair.q.is_zero()) return false;
    const double at_vertical = std::abs(pair.p(0.0, 1.0)) + std::abs(pair.q(0.0, 1.0));
    if (!(at_vertical > 0.0)) return false;
    const Poly a = pair.p.at_t_one(), b = pair.q.at_t_one();
    const double tol = 1e-9 * std::max(max_coeff(a), max_coeff(b));
    // Euclid: the last nonzero remainder is the gcd
    Poly x = a.trimmed(tol), y = b.trimmed(tol);
    if (x.degree() < y.degree()) std::swap(x, y);
    while (!y.is_zero()) {
        Poly r = poly_divrem(x, y).remainder.trimmed(tol);
        x = std::move(y);
        y = std::move(r);
    }
    return real_root_count(x) == 0;
}

KroneckerDetail kronecker_detail(const HomogeneousPair& pair) {
    if (!h1_check(pair)) throw InvalidInput("hypothesis (H1) violated; use winding-based local_multiplicity");
    KroneckerDetail kd;
    Poly n0 = pair.p.at_t_one(), n1 = pair.q.at_t_one();
    const double tol = 1e-9 * std::max(max_coeff(n0), max_coeff(n1));
    n0 = n0.trimmed(tol);
    n1 = n1.trimmed(tol);
    if (n0.degree() < n1.degree()) {
        std::swap(n0, n1);
        kd.swapped = true;
    }
    kd.chain = sturm_chain(n0, n1);
    kd.m_plus = sign_changes_at_infinity(kd.chain, true);
    kd.m_minus = sign_changes_at_infinity(kd.chain, false);
    const int parity = ((pair.p.degree + pair.q.degree) % 2 == 0) ? 2 : 0;
    kd.raw = -parity * (kd.m_plus - kd.m_minus) / 2;
    kd.multiplicity = kKroneckerSign * (kd.swapped ? -1 : 1) * kd.raw;
    return kd;
}

int kronecker_multiplicity(const HomogeneousPair& pair) { return kronecker_detail(pair).multiplicity; }

}  // namespace semiflow
