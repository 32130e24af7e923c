#include "semiflow/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "semiflow/flow.hpp"

namespace semiflow {

namespace {

constexpr double kPi = std::numbers::pi;
// grid minima of sigma_min / sigma_max below this are refined
constexpr double kDipThreshold = 0.05;
// a bisection root whose b_t has no kernel at rank_rel_tol may still use its
// smallest singular direction when it is below this
constexpr double kSignChangeRankTol = 1e-6;

struct ScanPoint {
    double t;
    double det;
    double sigma_rel;
};

// sigma_min(b_t) relative to the scale of the whole frame [b_t; d_t], which
// has full rank; relative to sigma_max(b_t) alone the ratio is 1 when n = 1.
double frame_scale(const Matrix& b, const Matrix& d) {
    double s = 0.0;
    for (std::size_t j = 0; j < b.cols(); ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < b.rows(); ++i) c += std::norm(b(i, j)) + std::norm(d(i, j));
        s = std::max(s, std::sqrt(c));
    }
    return s;
}

double sigma_rel(const Matrix& b, const Matrix& d) {
    const std::vector<double> sv = singular_values(b);
    const double scale = std::max(sv.front(), frame_scale(b, d));
    return scale > 0.0 ? sv.back() / scale : 0.0;
}

ScanPoint scan_point(double t, const Matrix& b, const Matrix& d) { return {t, det(b).real(), sigma_rel(b, d)}; }

// b_t on the uniform scan grid. Without a delta shift, b_t = b(t) / t where
// b(y) is the upper-right block of the unsuspended fundamental solution at y,
// so one integration covers the whole grid.
std::vector<ScanPoint> scan_grid(const ProblemSystem& sys) {
    const int intervals = sys.tolerances().scan_points - 1;
    const std::size_t n = sys.n();
    std::vector<ScanPoint> out;
    out.reserve(static_cast<std::size_t>(intervals) + 1);
    if (sys.delta() == 0.0) {
        const int per = (sys.steps() + intervals - 1) / intervals;
        Matrix init(2 * n, n);
        for (std::size_t i = 0; i < n; ++i) init(n + i, i) = 1.0;
        const Trajectory traj = real_trajectory(sys, 1.0, init, per * intervals);
        out.push_back(scan_point(0.0, sys.J(), Matrix::identity(n)));
        for (int k = 1; k <= intervals; ++k) {
            const double t = static_cast<double>(k) / intervals;
            const Matrix& y = traj.states[static_cast<std::size_t>(k * per)];
            Matrix b = y.block(0, 0, n, n);
            b *= 1.0 / t;
            out.push_back(scan_point(t, b, y.block(n, 0, n, n)));
        }
    } else {
        for (int k = 0; k <= intervals; ++k) {
            const double t = static_cast<double>(k) / intervals;
            const Matrix frame = right_columns(sys, t, sys.steps());
            out.push_back(scan_point(t, frame.block(0, 0, n, n), frame.block(n, 0, n, n)));
        }
    }
    return out;
}

double rho_real(const ProblemSystem& sys, double t) { return rho(sys, cplx(t, 0.0)).real(); }

double sigma_rel_at(const ProblemSystem& sys, double t) {
    const std::size_t n = sys.n();
    const Matrix frame = right_columns(sys, t, sys.steps());
    return sigma_rel(frame.block(0, 0, n, n), frame.block(n, 0, n, n));
}

double bisect(const ProblemSystem& sys, double a, double b, double fa, double tol) {
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = rho_real(sys, m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

double golden_min(const ProblemSystem& sys, double a, double b, double tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = sigma_rel_at(sys, c);
    double fd = sigma_rel_at(sys, d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = sigma_rel_at(sys, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = sigma_rel_at(sys, d);
        }
    }
    return 0.5 * (a + b);
}

ConjugateInstant build_instant(const ProblemSystem& sys, double t, double fallback_tol) {
    const std::size_t n = sys.n();
    const Matrix frame = right_columns(sys, t, sys.steps());
    const Matrix b = frame.block(0, 0, n, n);
    const Matrix d = frame.block(n, 0, n, n);
    ConjugateInstant inst;
    inst.t = t;
    const SvdRight svd = svd_right(b);
    const double smax = std::max(svd.sigma.front(), frame_scale(b, d));
    for (std::size_t k = 0; k < n; ++k)
        if (svd.sigma[k] <= sys.tolerances().rank_rel_tol * smax) inst.kernel.push_back(svd.v.column(k));
    if (inst.kernel.empty() && svd.sigma.back() <= fallback_tol * smax) inst.kernel.push_back(svd.v.column(n - 1));
    inst.multiplicity = static_cast<int>(inst.kernel.size());
    if (inst.multiplicity == 0) return inst;
    for (const auto& w : inst.kernel) {
        Vector v = d * w;
        for (auto& x : v) x = x.real();
        inst.image_vectors.push_back(std::move(v));
    }
    const std::size_t m = inst.image_vectors.size();
    Matrix form(m, m);
    double scale = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        scale += std::norm(norm(inst.image_vectors[j]));
        for (std::size_t k = 0; k < m; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += sys.signature().epsilon(i) * inst.image_vectors[j][i].real() * inst.image_vectors[k][i].real();
            form(j, k) = s;
        }
    }
    const Signature sig = sym_signature(form, sys.tolerances().form_rel_tol, scale);
    inst.regular = sig.nondegenerate();
    inst.signature_contrib = inst.regular ? sig.value() : 0;
    return inst;
}

}  // namespace

ConjugateInstant instant_at(const ProblemSystem& sys, double t) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidInput("conjugate instants lie in (0,1)");
    ConjugateInstant inst = build_instant(sys, t, 0.0);
    if (inst.multiplicity == 0) {
        std::ostringstream os;
        os << "t = " << t << " is not a conjugate instant (b_t is invertible)";
        throw InvalidInput(os.str());
    }
    return inst;
}

InstantSearch find_instants(const ProblemSystem& sys) {
    const auto& tol = sys.tolerances();
    const std::vector<ScanPoint> grid = scan_grid(sys);
    InstantSearch out;
    std::vector<double> roots;        // certified by a sign change
    std::vector<double> dip_roots;    // certified by a kernel at a sigma_min minimum
    std::vector<std::size_t> dip_cells;

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double fa = grid[k].det, fb = grid[k + 1].det;
        if (k > 0 && fa == 0.0) {
            roots.push_back(grid[k].t);
            continue;
        }
        if (fa * fb >= 0.0) continue;
        const double a = grid[k].t, b = grid[k + 1].t;
        const double da = rho_real(sys, a), db = rho_real(sys, b);
        if (da * db < 0.0) {
            roots.push_back(bisect(sys, a, b, da, tol.instant_tol));
        } else {
            dip_cells.push_back(grid[k].sigma_rel < grid[k + 1].sigma_rel ? k : k + 1);
        }
    }

    auto near_root = [&](double a, double b) {
        return std::any_of(roots.begin(), roots.end(), [&](double r) { return r >= a && r <= b; });
    };
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
        if (grid[k].sigma_rel > kDipThreshold) continue;
        if (grid[k].sigma_rel > grid[k - 1].sigma_rel || grid[k].sigma_rel > grid[k + 1].sigma_rel) continue;
        if (near_root(grid[k - 1].t, grid[k + 1].t)) continue;
        dip_cells.push_back(k);
    }
    std::sort(dip_cells.begin(), dip_cells.end());
    dip_cells.erase(std::unique(dip_cells.begin(), dip_cells.end()), dip_cells.end());

    for (std::size_t k : dip_cells) {
        if (k == 0 || k + 1 >= grid.size()) continue;
        const double a = grid[k - 1].t, b = grid[k + 1].t;
        const double tmin = golden_min(sys, a, b, tol.instant_tol);
        const ConjugateInstant probe = build_instant(sys, tmin, 0.0);
        if (probe.multiplicity > 0) {
            dip_roots.push_back(tmin);
            continue;
        }
        const UnresolvedDip dip{tmin, sigma_rel_at(sys, tmin)};
        (dip.sigma_rel > kNearMissFloor ? out.near_misses : out.unresolved).push_back(dip);
    }

    struct Candidate {
        double t;
        bool sign_change;
    };
    std::vector<Candidate> cands;
    for (double r : roots) cands.push_back({r, true});
    for (double r : dip_roots) cands.push_back({r, false});
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) { return x.t < y.t; });
    std::vector<Candidate> merged;
    for (const auto& c : cands) {
        if (!merged.empty() && c.t - merged.back().t < 10.0 * tol.instant_tol) {
            if (c.sign_change && !merged.back().sign_change) merged.back() = c;
            continue;
        }
        merged.push_back(c);
    }
    for (const auto& c : merged) {
        ConjugateInstant inst = build_instant(sys, c.t, c.sign_change ? kSignChangeRankTol : 0.0);
        if (inst.multiplicity == 0) {
            out.unresolved.push_back({c.t, sigma_rel_at(sys, c.t)});
            continue;
        }
        out.instants.push_back(std::move(inst));
    }
    return out;
}

std::vector<ConjugateInstant> locate_instants(const ProblemSystem& sys) { return find_instants(sys).instants; }

int instant_signature(const ConjugateInstant& inst, const MetricSignature&) {
    if (!inst.regular)
        throw InvalidInput("conjugate instant at t = " + std::to_string(inst.t) +
                           " is not regular; use local_multiplicity");
    return inst.signature_contrib;
}

int regular_conjugate_index(const std::vector<ConjugateInstant>& instants, const MetricSignature& signature) {
    int total = 0;
    for (const auto& inst : instants) total += instant_signature(inst, signature);
    return total;
}

int regular_conjugate_index(const ProblemSystem& sys) {
    return regular_conjugate_index(locate_instants(sys), sys.signature());
}

// ---------------------------------------------------------------------------
// Winding numbers

Box domain_box(const ProblemSystem& sys) { return {0.0, 1.0, -sys.o_height(), sys.o_height()}; }

namespace {

constexpr int kInitialPerEdge = 32;
constexpr double kMaxPhaseStep = kPi / 4.0;
constexpr std::size_t kMaxSamples = 1u << 16;

// Boundary parameter u in [0,4): edge e = floor(u), traversed counter-clockwise
// starting at (t_min, s_min).
cplx boundary_point(const Box& box, double u) {
    const int e = std::min(3, static_cast<int>(std::floor(u)));
    const double f = u - e;
    switch (e) {
        case 0: return {box.t_min + f * (box.t_max - box.t_min), box.s_min};
        case 1: return {box.t_max, box.s_min + f * (box.s_max - box.s_min)};
        case 2: return {box.t_max - f * (box.t_max - box.t_min), box.s_max};
        default: return {box.t_min, box.s_max - f * (box.s_max - box.s_min)};
    }
}

double phase_step(cplx from, cplx to) { return std::arg(to / from); }

// Throws when |f| on the samples drops below 1e-8 of its maximum (or
// unconditionally when `force`), naming the closest sample.
void check_boundary_clearance(const Box& box, const std::vector<double>& u, const std::vector<cplx>& val, bool force) {
    double vmax = 0.0, vmin = INFINITY;
    std::size_t imin = 0;
    for (std::size_t i = 0; i < val.size(); ++i) {
        vmax = std::max(vmax, std::abs(val[i]));
        if (std::abs(val[i]) < vmin) {
            vmin = std::abs(val[i]);
            imin = i;
        }
    }
    if (!force && vmin > 1e-8 * vmax) return;
    const cplx z = boundary_point(box, u[imin]);
    std::ostringstream os;
    os.precision(17);
    os << "zero too close to boundary at z = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
       << "i";
    throw NumericalFailure(os.str());
}

}  // namespace

WindingResult winding(const PlanarMap& f, const Box& box, std::vector<BoundarySample>* samples) {
    if (!(box.t_max > box.t_min && box.s_max > box.s_min)) throw InvalidInput("winding: empty box");
    std::vector<double> u;
    std::vector<cplx> val;
    for (int k = 0; k <= 4 * kInitialPerEdge; ++k) {
        u.push_back(static_cast<double>(k) / kInitialPerEdge);
        val.push_back(k == 4 * kInitialPerEdge ? val.front() : f(boundary_point(box, u.back())));
    }
    while (true) {
        std::vector<double> nu;
        std::vector<cplx> nval;
        bool refined = false;
        for (std::size_t i = 0; i + 1 < u.size(); ++i) {
            nu.push_back(u[i]);
            nval.push_back(val[i]);
            if (std::abs(phase_step(val[i], val[i + 1])) >= kMaxPhaseStep) {
                const double um = 0.5 * (u[i] + u[i + 1]);
                nu.push_back(um);
                nval.push_back(f(boundary_point(box, um)));
                refined = true;
            }
        }
        nu.push_back(u.back());
        nval.push_back(val.back());
        u = std::move(nu);
        val = std::move(nval);
        if (!refined) break;
        // a phase jump that survives this much bisection sits on a boundary zero
        if (u.size() > kMaxSamples) check_boundary_clearance(box, u, val, true);
    }

    check_boundary_clearance(box, u, val, false);

    WindingResult res;
    double total = 0.0;
    if (samples) samples->clear();
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i > 0) {
            const double d = phase_step(val[i - 1], val[i]);
            res.max_phase_step = std::max(res.max_phase_step, std::abs(d));
            total += d;
        }
        if (samples) {
            const cplx z = boundary_point(box, u[i]);
            samples->push_back({z.real(), z.imag(), val[i], total});
        }
    }
    const double turns = total / (2.0 * kPi);
    res.winding = static_cast<int>(std::lround(turns));
    res.residue = std::abs(turns - res.winding);
    res.samples_used = static_cast<int>(u.size() - 1);
    if (res.residue > 1e-6) throw NumericalFailure("winding: accumulated phase is not a whole number of turns");
    return res;
}

WindingResult winding(const ProblemSystem& sys, const Box& box, std::vector<BoundarySample>* samples) {
    if (box.t_min < 0.0 || box.t_max > 1.0) throw InvalidInput("winding: box must lie in 0 <= t <= 1");
    return winding([&sys](cplx z) { return rho(sys, z); }, box, samples);
}

int conjugate_index(const ProblemSystem& sys) { return kOrientationSign * winding(sys, domain_box(sys)).winding; }

double isolation_radius(const std::vector<ConjugateInstant>& instants, std::size_t index) {
    const double t0 = instants.at(index).t;
    double gap = std::min(t0, 1.0 - t0);
    if (index > 0) gap = std::min(gap, t0 - instants[index - 1].t);
    if (index + 1 < instants.size()) gap = std::min(gap, instants[index + 1].t - t0);
    return std::min(0.5 * gap, 0.1);
}

int local_multiplicity(const ProblemSystem& sys, double t0, double radius) {
    if (!(t0 > 0.0 && t0 < 1.0)) throw InvalidInput("local_multiplicity: t0 must lie in (0,1)");
    const double r = std::min(radius, 0.999 * std::min(t0, 1.0 - t0));
    if (!(r > 0.0)) throw InvalidInput("local_multiplicity: radius must be positive");
    const Box box{t0 - r, t0 + r, -r, r};
    return kOrientationSign * winding(sys, box).winding;
}

// ---------------------------------------------------------------------------
// Green kernel

namespace {

// P_z = [[0, 0], [b^-1, 0]] Psi_z(1): lower block rows are b^-1 times the
// upper block rows of Psi_z(1).
Matrix green_projector(const Matrix& psi1, std::size_t n) {
    const Matrix b = psi1.block(0, n, n, n);
    const LU lu = lu_decompose(b);
    const std::vector<double> sv = singular_values(b);
    if (lu.singular || sv.back() <= 1e-12 * sv.front())
        throw InvalidInput("green_kernel: b_z is singular (z is a conjugate instant)");
    const Matrix top = psi1.block(0, 0, n, 2 * n);
    Matrix p(2 * n, 2 * n);
    p.set_block(n, 0, solve(lu, top));
    return p;
}

Matrix kernel_from(const Matrix& psi_x, const Matrix& proj, const Matrix& psi_y_inv, bool lower, std::size_t n) {
    Matrix mid = proj;
    if (lower) {
        mid *= -1.0;
        for (std::size_t i = 0; i < 2 * n; ++i) mid(i, i) += 1.0;
    } else {
        mid *= -1.0;
    }
    return (psi_x * mid * psi_y_inv).block(0, n, n, n);
}

}  // namespace

Matrix green_kernel(const ProblemSystem& sys, cplx z, double x, double y) {
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) throw InvalidInput("green_kernel: x, y must lie in [0,1]");
    const std::size_t n = sys.n();
    const int steps = sys.steps();
    const Matrix psi1 = psi_at(sys, z, 1.0, steps);
    const Matrix proj = green_projector(psi1, n);
    const Matrix psi_x = psi_at(sys, z, x, steps);
    const Matrix psi_y_inv = inverse(psi_at(sys, z, y, steps));
    return kernel_from(psi_x, proj, psi_y_inv, y < x, n);
}

GreenKernelTable::GreenKernelTable(const ProblemSystem& sys, cplx z) : n_(sys.n()), steps_(sys.steps()) {
    const Trajectory traj = trajectory(sys, z, Matrix::identity(2 * n_), steps_);
    psi_ = traj.states;
    psi_inv_.reserve(psi_.size());
    for (const auto& p : psi_) psi_inv_.push_back(inverse(p));
    projector_ = green_projector(psi_.back(), n_);
}

Matrix GreenKernelTable::at(int k, int l) const {
    return kernel_from(psi_.at(static_cast<std::size_t>(k)), projector_, psi_inv_.at(static_cast<std::size_t>(l)),
                       l < k, n_);
}

// ---------------------------------------------------------------------------
// Trace formula cross-check

namespace {

// Tr(d b / du * b^-1) along a boundary edge parametrised by u in [0,1].
class EdgeIntegrand {
public:
    EdgeIntegrand(const ProblemSystem& sys, cplx from, cplx to) : sys_(sys), from_(from), dir_(to - from) {}

    cplx operator()(double u) const {
        const double h = 1e-4;
        const cplx z = from_ + u * dir_;
        const Matrix b0 = b_at(z);
        Matrix db;
        const bool horizontal = dir_.imag() == 0.0;
        const double step_t = h * std::abs(dir_.real());
        if (horizontal && (z.real() - step_t < 0.0 || z.real() + step_t > 1.0)) {
            // one-sided second-order difference, pointing into the edge
            const double sgn = (u < 0.5) ? 1.0 : -1.0;
            const Matrix b1 = b_at(z + sgn * h * dir_);
            const Matrix b2 = b_at(z + sgn * 2.0 * h * dir_);
            db = (b0 * -3.0 + b1 * 4.0 - b2) * (sgn / (2.0 * h));
        } else {
            db = (b_at(z + h * dir_) - b_at(z - h * dir_)) * (1.0 / (2.0 * h));
        }
        const Matrix x = solve(lu_decompose(b0), db);  // b^-1 db has the same trace
        cplx tr{};
        for (std::size_t i = 0; i < x.rows(); ++i) tr += x(i, i);
        return tr;
    }

private:
    Matrix b_at(cplx z) const { return b_block(sys_, z, sys_.steps()); }

    const ProblemSystem& sys_;
    cplx from_, dir_;
};

cplx simpson_edge(const EdgeIntegrand& g) {
    int n = 16;
    std::vector<cplx> vals(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) vals[static_cast<std::size_t>(k)] = g(static_cast<double>(k) / n);
    auto simpson = [](const std::vector<cplx>& v) {
        const std::size_t m = v.size() - 1;
        cplx s = v.front() + v.back();
        for (std::size_t k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * v[k];
        return s / (3.0 * static_cast<double>(m));
    };
    cplx prev = simpson(vals);
    while (n < 2048) {
        std::vector<cplx> next(2 * static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) next[2 * static_cast<std::size_t>(k)] = vals[static_cast<std::size_t>(k)];
        for (int k = 0; k < n; ++k)
            next[2 * static_cast<std::size_t>(k) + 1] = g((k + 0.5) / n);
        vals = std::move(next);
        n *= 2;
        const cplx cur = simpson(vals);
        if (std::abs(cur - prev) < 1e-6) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace

TraceCheck trace_boundary_check(const ProblemSystem& sys) {
    const Box box = domain_box(sys);
    TraceCheck out;
    out.winding = winding(sys, box).winding;
    const cplx corners[4] = {{box.t_min, box.s_min}, {box.t_max, box.s_min}, {box.t_max, box.s_max},
                             {box.t_min, box.s_max}};
    cplx total{};
    for (int e = 0; e < 4; ++e) total += simpson_edge(EdgeIntegrand(sys, corners[e], corners[(e + 1) % 4]));
    out.integral = total / cplx(0.0, 2.0 * kPi);
    out.discrepancy = std::abs(out.integral - static_cast<double>(out.winding));
    return out;
}

}  // namespace semiflow
