#include "semiflow/spectral.hpp"

#include <cmath>
#include <sstream>

#include "semiflow/flow.hpp"

namespace semiflow {

std::vector<double> simpson_weights(int intervals) {
    if (intervals < 3) throw InvalidInput("simpson_weights needs at least 3 intervals");
    const double h = 1.0 / intervals;
    std::vector<double> w(static_cast<std::size_t>(intervals) + 1, 0.0);
    const int even = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (int i = 0; i < even; i += 2) {
        w[static_cast<std::size_t>(i)] += h / 3.0;
        w[static_cast<std::size_t>(i) + 1] += 4.0 * h / 3.0;
        w[static_cast<std::size_t>(i) + 2] += h / 3.0;
    }
    if (even != intervals) {
        const double c = 3.0 * h / 8.0;
        const auto i = static_cast<std::size_t>(even);
        w[i] += c;
        w[i + 1] += 3.0 * c;
        w[i + 2] += 3.0 * c;
        w[i + 3] += c;
    }
    return w;
}

namespace {

Trajectory kernel_trajectory(const ProblemSystem& sys, const ConjugateInstant& inst) {
    const std::size_t n = sys.n();
    const std::size_t m = inst.kernel.size();
    Matrix init(2 * n, m);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < n; ++i) init(n + i, k) = inst.kernel[k][i].real();
    return real_trajectory(sys, inst.t, init, sys.steps());
}

double euclid(const Matrix& y, std::size_t r0, std::size_t n, std::size_t j, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += y(r0 + i, j).real() * y(r0 + i, k).real();
    return s;
}

}  // namespace

std::vector<std::vector<Vector>> kernel_fields(const ProblemSystem& sys, const ConjugateInstant& inst) {
    const std::size_t n = sys.n();
    const Trajectory traj = kernel_trajectory(sys, inst);
    std::vector<std::vector<Vector>> out(inst.kernel.size());
    for (std::size_t k = 0; k < inst.kernel.size(); ++k) {
        out[k].reserve(traj.states.size());
        for (const auto& y : traj.states) {
            Vector u(n);
            for (std::size_t i = 0; i < n; ++i) u[i] = y(i, k);
            out[k].push_back(std::move(u));
        }
    }
    return out;
}

CrossingData crossing_form(const ProblemSystem& sys, const ConjugateInstant& inst) {
    if (inst.kernel.empty()) throw InvalidInput("crossing_form: empty kernel");
    const std::size_t n = sys.n();
    const std::size_t m = inst.kernel.size();
    const double t = inst.t;
    const double delta = sys.delta();
    const Trajectory traj = kernel_trajectory(sys, inst);
    const std::vector<double> w = simpson_weights(static_cast<int>(traj.states.size()) - 1);
    const Matrix& end = traj.states.back();

    CrossingData cd;
    cd.t = t;
    cd.form_boundary = Matrix(m, m);
    cd.form_integral = Matrix(m, m);
    Matrix gram(m, m);  // int <u_j, u_k>
    for (std::size_t xi = 0; xi < traj.states.size(); ++xi) {
        const Matrix& y = traj.states[xi];
        const Matrix sdot = s_family_dot(sys, t, traj.x[xi]);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < m; ++k) {
                double q = 0.0;
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b) q += sdot(a, b).real() * y(a, j).real() * y(b, k).real();
                cd.form_integral(j, k) -= w[xi] * q;
                gram(j, k) += w[xi] * euclid(y, 0, n, j, k);
            }
        }
    }
    double scale = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        scale += euclid(end, n, n, j, j) / t;
        for (std::size_t k = 0; k < m; ++k) {
            double jv = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                jv += sys.signature().epsilon(i) * end(n + i, j).real() * end(n + i, k).real();
            cd.form_boundary(j, k) = -jv / t + 2.0 * delta / t * gram(j, k).real();
        }
    }
    // exact symmetry for the eigen-solver
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) {
            const cplx b = 0.5 * (cd.form_boundary(j, k) + cd.form_boundary(k, j));
            const cplx i = 0.5 * (cd.form_integral(j, k) + cd.form_integral(k, j));
            cd.form_boundary(j, k) = cd.form_boundary(k, j) = b;
            cd.form_integral(j, k) = cd.form_integral(k, j) = i;
        }
    const double tol = sys.tolerances().form_rel_tol;
    cd.signature = sym_signature(cd.form_boundary, tol, scale);
    cd.integral_signature = sym_signature(cd.form_integral, tol, scale);
    cd.regular = cd.signature.nondegenerate();
    return cd;
}

CrossingData crossing_form(const ProblemSystem& sys, double t) { return crossing_form(sys, instant_at(sys, t)); }

// ---------------------------------------------------------------------------

namespace {

constexpr double kLadder[] = {1e-3, 2e-3, 4e-3, 8e-3};
constexpr double kEndpointFloor = 1e-10;

std::optional<int> attempt(const ProblemSystem& shifted, const CrossingCount& count) {
    if (endpoint_conditioning(shifted, 1.0) <= kEndpointFloor || endpoint_conditioning(shifted, 0.0) <= kEndpointFloor)
        return std::nullopt;
    return count(shifted, find_instants(shifted));
}

}  // namespace

RegularizedCount regularized_count(const ProblemSystem& sys, const CrossingCount& count, const InstantSearch* search) {
    RegularizedCount out;
    {
        const std::optional<int> v = search ? count(sys, *search) : count(sys, find_instants(sys));
        if (v) {
            out.value = *v;
            return out;
        }
    }
    const double norm_s = sys.field().sup_norm();
    if (!(norm_s > 0.0)) throw NumericalFailure("delta-regularization failed: S vanishes identically");
    std::optional<int> previous;
    double previous_delta = 0.0;
    std::ostringstream trail;
    for (double f : kLadder) {
        const double delta = sys.delta() + f * norm_s;
        const ProblemSystem shifted = sys.with_delta(delta);
        ++out.ladder_steps;
        const std::optional<int> v = attempt(shifted, count);
        trail << " delta=" << delta << (v ? " -> " + std::to_string(*v) : std::string(" -> degenerate"));
        if (v && previous && *v == *previous) {
            out.value = *v;
            out.delta = previous_delta;
            return out;
        }
        previous = v;
        previous_delta = delta;
    }
    throw NumericalFailure("delta-regularization failed:" + trail.str());
}

SpectralFlowResult spectral_flow_detail(const ProblemSystem& sys, const InstantSearch* search) {
    SpectralFlowResult res;
    std::vector<CrossingData> last;
    const CrossingCount count = [&last](const ProblemSystem& s, const InstantSearch& found) -> std::optional<int> {
        last.clear();
        if (!found.unresolved.empty()) return std::nullopt;
        int total = 0;
        for (const auto& inst : found.instants) {
            last.push_back(crossing_form(s, inst));
            if (!last.back().regular) return std::nullopt;
            total += last.back().signature.value();
        }
        return total;
    };
    const RegularizedCount rc = regularized_count(sys, count, search);
    res.flow = rc.value;
    res.delta = rc.delta;
    if (rc.ladder_steps == 0) {
        res.crossings = std::move(last);
    } else {
        // crossings of the first shift of the agreeing pair
        InstantSearch found = find_instants(sys.with_delta(rc.delta));
        count(sys.with_delta(rc.delta), found);
        res.crossings = std::move(last);
    }
    return res;
}

int spectral_flow(const ProblemSystem& sys) { return spectral_flow_detail(sys).flow; }

int mu_spec(const ProblemSystem& sys) { return -spectral_flow(sys); }

// ---------------------------------------------------------------------------
// Finite elements

FemHessian fem_hessian(const ProblemSystem& sys, double t, int mesh) {
    if (mesh < 16) throw InvalidInput("fem_hessian needs mesh >= 16");
    if (t < 0.0 || t > 1.0) throw InvalidInput("fem_hessian: t must lie in [0,1]");
    const std::size_t n = sys.n();
    const double h = 1.0 / mesh;
    const Matrix J = sys.J();
    FemHessian fh;
    fh.mesh = mesh;
    fh.t = t;
    fh.n = n;
    const auto nodes = static_cast<std::size_t>(mesh - 1);
    fh.diag.assign(nodes, J * (2.0 / h));
    fh.lower.assign(nodes - 1, J * (-1.0 / h));

    const double g = 0.5 / std::sqrt(3.0);
    const double gauss[2] = {0.5 - g, 0.5 + g};  // on the reference cell [0,1]
    for (int e = 0; e < mesh; ++e) {
        // element [x_e, x_{e+1}]; interior node i carries hat index i - 1
        for (double q : gauss) {
            const double x = (e + q) * h;
            const Matrix s = s_family(sys, t, x) * (0.5 * h);
            const double phi_l = 1.0 - q, phi_r = q;
            const bool left = e >= 1, right = e + 1 <= mesh - 1;
            if (left) fh.diag[static_cast<std::size_t>(e - 1)] -= s * (phi_l * phi_l);
            if (right) fh.diag[static_cast<std::size_t>(e)] -= s * (phi_r * phi_r);
            if (left && right) fh.lower[static_cast<std::size_t>(e - 1)] -= s * (phi_l * phi_r);
        }
    }
    return fh;
}

Matrix FemHessian::dense() const {
    const std::size_t dim = dimension();
    if (dim > kMaxDim) throw InvalidInput("FemHessian::dense: dimension exceeds the dense cap");
    Matrix m(dim, dim);
    for (std::size_t i = 0; i < diag.size(); ++i) m.set_block(i * n, i * n, diag[i]);
    for (std::size_t i = 0; i < lower.size(); ++i) {
        m.set_block((i + 1) * n, i * n, lower[i]);
        m.set_block(i * n, (i + 1) * n, lower[i].transpose());
    }
    return m;
}

int FemHessian::negative_count(double rel_tol) const {
    // block LDL^T: pivots P_0 = D_0, P_{i+1} = D_{i+1} - L_i P_i^{-1} L_i^T;
    // inertia of H is the sum of pivot inertias
    int negatives = 0;
    Matrix pivot = diag.front();
    for (std::size_t i = 0;; ++i) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) pivot(a, b) = pivot(b, a) = 0.5 * (pivot(a, b) + pivot(b, a));
        const Signature sig = sym_signature(pivot, rel_tol);
        if (sig.n_zero > 0) throw NumericalFailure("FemHessian: singular pivot block (t is a discrete conjugate instant)");
        negatives += sig.n_minus;
        if (i + 1 == diag.size()) break;
        const Matrix x = solve(lu_decompose(pivot), lower[i].transpose());  // P_i^{-1} L_i^T
        pivot = diag[i + 1] - lower[i] * x;
    }
    return negatives;
}

int morse_oracle(const ProblemSystem& sys, int mesh) {
    return fem_hessian(sys, 1.0, mesh).negative_count() - fem_hessian(sys, 0.0, mesh).negative_count();
}

}  // namespace semiflow
