#include "semiflow/maslov.hpp"

#include "semiflow/flow.hpp"
#include "semiflow/spectral.hpp"

namespace semiflow {

LagrangianFrame lagrangian_frame(const ProblemSystem& sys, double t) {
    if (t < 0.0 || t > 1.0) throw InvalidInput("lagrangian_frame: t must lie in [0,1]");
    return {t, right_columns(sys, t, sys.steps())};
}

double isotropy_residual(const LagrangianFrame& f) {
    const Matrix sigma = symplectic_unit(f.frame.cols());
    return (f.frame.transpose() * sigma * f.frame).frobenius_norm();
}

namespace {

Matrix kernel_matrix(const ConjugateInstant& inst, std::size_t n) {
    Matrix w(n, inst.kernel.size());
    for (std::size_t k = 0; k < inst.kernel.size(); ++k)
        for (std::size_t i = 0; i < n; ++i) w(i, k) = inst.kernel[k][i].real();
    return w;
}

// <sigma M w_j, D w_k>, symmetrised; sigma = [[0, -I], [I, 0]]
Matrix mascr_form(const Matrix& mw, const Matrix& dw, std::size_t n) {
    const std::size_t m = mw.cols();
    Matrix f(m, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += -mw(n + i, j).real() * dw(i, k).real() + mw(i, j).real() * dw(n + i, k).real();
            f(j, k) = s;
        }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) f(j, k) = f(k, j) = 0.5 * (f(j, k) + f(k, j));
    return f;
}

Matrix frame_derivative(const ProblemSystem& sys, double t, double h) {
    const Matrix plus = right_columns(sys, t + h, sys.steps());
    const Matrix minus = right_columns(sys, t - h, sys.steps());
    return (plus - minus) * (0.5 / h);
}

}  // namespace

MaslovCrossing maslov_crossing_form(const ProblemSystem& sys, const ConjugateInstant& inst) {
    if (inst.kernel.empty()) throw InvalidInput("maslov_crossing_form: empty kernel");
    const std::size_t n = sys.n();
    const std::size_t m = inst.kernel.size();
    const double t = inst.t;
    MaslovCrossing mc;
    mc.t = t;

    const Matrix w = kernel_matrix(inst, n);
    const Matrix mw = right_columns(sys, t, sys.steps()) * w;
    Matrix gram(m, m);
    if (sys.delta() != 0.0) {
        const auto fields = kernel_fields(sys, inst);
        const std::vector<double> q = simpson_weights(static_cast<int>(fields.front().size()) - 1);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t x = 0; x < q.size(); ++x) gram(j, k) += q[x] * dot(fields[j][x], fields[k][x]).real();
    }
    mc.direct_form = Matrix(m, m);
    double scale = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) scale += std::norm(mw(n + i, j));
        for (std::size_t k = 0; k < m; ++k) {
            double jv = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                jv += sys.signature().epsilon(i) * mw(n + i, j).real() * mw(n + i, k).real();
            mc.direct_form(j, k) = -jv + 2.0 * sys.delta() * gram(j, k).real();
        }
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k)
            mc.direct_form(j, k) = mc.direct_form(k, j) = 0.5 * (mc.direct_form(j, k) + mc.direct_form(k, j));

    const double tol = sys.tolerances().form_rel_tol;
    mc.signature = sym_signature(mc.direct_form, tol, scale);
    mc.regular = mc.signature.nondegenerate();

    const Matrix d1 = frame_derivative(sys, t, kFrameStep);
    mc.fd_form = mascr_form(mw, d1 * w, n);
    mc.fd_signature = sym_signature(mc.fd_form, tol, scale / t);
    if (mc.fd_signature != mc.signature) {
        const Matrix d2 = frame_derivative(sys, t, 0.5 * kFrameStep);
        const Matrix rich = (d2 * 4.0 - d1) * (1.0 / 3.0);
        mc.fd_form = mascr_form(mw, rich * w, n);
        mc.fd_signature = sym_signature(mc.fd_form, tol, scale / t);
        mc.richardson = true;
    }
    return mc;
}

MaslovCrossing maslov_crossing_form(const ProblemSystem& sys, double t) {
    return maslov_crossing_form(sys, instant_at(sys, t));
}

MaslovResult maslov_index_detail(const ProblemSystem& sys, const InstantSearch* search) {
    std::vector<MaslovCrossing> last;
    const CrossingCount count = [&last](const ProblemSystem& s, const InstantSearch& found) -> std::optional<int> {
        last.clear();
        if (!found.unresolved.empty()) return std::nullopt;
        int total = 0;
        for (const auto& inst : found.instants) {
            last.push_back(maslov_crossing_form(s, inst));
            if (!last.back().regular) return std::nullopt;
            total += last.back().signature.value();
        }
        return total;
    };
    const RegularizedCount rc = regularized_count(sys, count, search);
    MaslovResult res;
    res.index = kMaslovSign * rc.value;
    res.delta = rc.delta;
    if (rc.ladder_steps > 0) {
        const ProblemSystem shifted = sys.with_delta(rc.delta);
        count(shifted, find_instants(shifted));
    }
    res.crossings = std::move(last);
    res.epsilon = res.crossings.empty() ? 0.5 : 0.5 * res.crossings.front().t;
    return res;
}

int maslov_index(const ProblemSystem& sys) { return maslov_index_detail(sys).index; }

std::vector<FrameSample> frame_scan(const ProblemSystem& sys, int points) {
    if (points < 2) throw InvalidInput("frame_scan needs at least 2 points");
    const std::size_t n = sys.n();
    std::vector<FrameSample> out;
    for (int k = 0; k < points; ++k) {
        const double t = static_cast<double>(k) / (points - 1);
        const Matrix f = right_columns(sys, t, sys.steps());
        const std::vector<double> sv = singular_values(f.block(0, 0, n, n));
        const std::vector<double> fv = singular_values(f);
        FrameSample s;
        s.t = t;
        s.sigma_min = sv.back();
        for (double x : sv)
            if (x <= sys.tolerances().rank_rel_tol * fv.front()) ++s.intersection_dim;
        out.push_back(s);
    }
    return out;
}

}  // namespace semiflow
