#include "semiflow/system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "semiflow/flow.hpp"

namespace semiflow {

namespace {

constexpr double kRangeSlack = 1e-12;

void check_unit(double v, const char* name) {
    if (!std::isfinite(v) || v < -kRangeSlack || v > 1.0 + kRangeSlack)
        throw InvalidInput(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
}

}  // namespace

Matrix MetricSignature::J() const {
    std::vector<double> d(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = epsilon(i);
    return Matrix::diagonal(d);
}

Matrix symplectic_unit(std::size_t n) {
    Matrix s(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        s(i, n + i) = -1.0;
        s(n + i, i) = 1.0;
    }
    return s;
}

const char* to_string(FieldKind k) {
    switch (k) {
        case FieldKind::Constant: return "constant";
        case FieldKind::Polynomial: return "poly";
        case FieldKind::Trigonometric: return "trig";
    }
    return "?";
}

// ---------------------------------------------------------------------------

std::vector<double> CoefficientField::checked_real(const Matrix& m, std::size_t n) {
    if (m.rows() != n || m.cols() != n) throw InvalidInput("coefficient matrix has wrong shape");
    if (!m.all_finite()) throw InvalidInput("coefficient matrix has non-finite entries");
    const double scale = std::max(1.0, m.max_abs());
    if (m.max_imag() > 0.0) throw InvalidInput("coefficient matrix must be real");
    std::vector<double> out(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(m(i, j).real() - m(j, i).real()) > 1e-12 * scale)
                throw InvalidInput("coefficient matrix is not symmetric");
            out[i * n + j] = m(i, j).real();
        }
    return out;
}

CoefficientField CoefficientField::constant(const Matrix& a) {
    CoefficientField f;
    f.kind_ = FieldKind::Constant;
    f.n_ = a.rows();
    if (f.n_ == 0) throw InvalidInput("empty coefficient matrix");
    f.terms_.push_back(checked_real(a, f.n_));
    return f;
}

CoefficientField CoefficientField::polynomial(const std::vector<Matrix>& coeffs) {
    if (coeffs.empty()) throw InvalidInput("polynomial field needs at least one coefficient");
    CoefficientField f;
    f.kind_ = FieldKind::Polynomial;
    f.n_ = coeffs.front().rows();
    if (f.n_ == 0) throw InvalidInput("empty coefficient matrix");
    for (const auto& c : coeffs) f.terms_.push_back(checked_real(c, f.n_));
    return f;
}

CoefficientField CoefficientField::trigonometric(const std::vector<Matrix>& cos_terms,
                                                 const std::vector<Matrix>& sin_terms) {
    if (cos_terms.empty()) throw InvalidInput("trigonometric field needs the constant term A_0");
    if (sin_terms.size() > cos_terms.size() - 1)
        throw InvalidInput("trigonometric field: more sine terms than cosine harmonics");
    CoefficientField f;
    f.kind_ = FieldKind::Trigonometric;
    f.n_ = cos_terms.front().rows();
    if (f.n_ == 0) throw InvalidInput("empty coefficient matrix");
    for (const auto& c : cos_terms) f.terms_.push_back(checked_real(c, f.n_));
    for (const auto& s : sin_terms) f.sin_terms_.push_back(checked_real(s, f.n_));
    f.sin_terms_.resize(f.terms_.size() - 1, std::vector<double>(f.n_ * f.n_, 0.0));
    return f;
}

CoefficientField CoefficientField::with_delta(double delta) const {
    if (!std::isfinite(delta)) throw InvalidInput("delta must be finite");
    CoefficientField f = *this;
    f.delta_ = delta;
    return f;
}

void CoefficientField::eval(double x, double* out) const {
    const std::size_t nn = n_ * n_;
    switch (kind_) {
        case FieldKind::Constant:
            std::copy(terms_[0].begin(), terms_[0].end(), out);
            return;
        case FieldKind::Polynomial: {
            // Horner
            std::copy(terms_.back().begin(), terms_.back().end(), out);
            for (std::size_t k = terms_.size() - 1; k-- > 0;)
                for (std::size_t e = 0; e < nn; ++e) out[e] = out[e] * x + terms_[k][e];
            return;
        }
        case FieldKind::Trigonometric: {
            std::copy(terms_[0].begin(), terms_[0].end(), out);
            const double theta = 2.0 * std::numbers::pi * x;
            const double c1 = std::cos(theta), s1 = std::sin(theta);
            double ck = 1.0, sk = 0.0;
            for (std::size_t k = 1; k < terms_.size(); ++k) {
                const double cn = ck * c1 - sk * s1;
                sk = sk * c1 + ck * s1;
                ck = cn;
                const auto& a = terms_[k];
                const auto& b = sin_terms_[k - 1];
                for (std::size_t e = 0; e < nn; ++e) out[e] += a[e] * ck + b[e] * sk;
            }
            return;
        }
    }
}

void CoefficientField::eval_derivative(double x, double* out) const {
    const std::size_t nn = n_ * n_;
    std::fill(out, out + nn, 0.0);
    switch (kind_) {
        case FieldKind::Constant:
            return;
        case FieldKind::Polynomial: {
            const std::size_t deg = terms_.size() - 1;
            if (deg == 0) return;
            for (std::size_t e = 0; e < nn; ++e) out[e] = static_cast<double>(deg) * terms_[deg][e];
            for (std::size_t k = deg - 1; k >= 1; --k)
                for (std::size_t e = 0; e < nn; ++e) out[e] = out[e] * x + static_cast<double>(k) * terms_[k][e];
            return;
        }
        case FieldKind::Trigonometric: {
            const double w = 2.0 * std::numbers::pi;
            const double c1 = std::cos(w * x), s1 = std::sin(w * x);
            double ck = 1.0, sk = 0.0;
            for (std::size_t k = 1; k < terms_.size(); ++k) {
                const double cn = ck * c1 - sk * s1;
                sk = sk * c1 + ck * s1;
                ck = cn;
                const double f = w * static_cast<double>(k);
                const auto& a = terms_[k];
                const auto& b = sin_terms_[k - 1];
                for (std::size_t e = 0; e < nn; ++e) out[e] += f * (-a[e] * sk + b[e] * ck);
            }
            return;
        }
    }
}

Matrix CoefficientField::at(double x) const {
    std::vector<double> buf(n_ * n_);
    eval(x, buf.data());
    return Matrix::from_real(n_, n_, buf);
}

Matrix CoefficientField::derivative_at(double x) const {
    std::vector<double> buf(n_ * n_);
    eval_derivative(x, buf.data());
    return Matrix::from_real(n_, n_, buf);
}

double CoefficientField::sup_norm() const {
    std::vector<double> buf(n_ * n_);
    double best = 0.0;
    constexpr int kSamples = 256;
    for (int k = 0; k <= kSamples; ++k) {
        eval(static_cast<double>(k) / kSamples, buf.data());
        for (std::size_t i = 0; i < n_; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n_; ++j) row += std::abs(buf[i * n_ + j]);
            best = std::max(best, row);
        }
    }
    return best;
}

std::vector<Matrix> CoefficientField::terms() const {
    std::vector<Matrix> out;
    for (const auto& t : terms_) out.push_back(Matrix::from_real(n_, n_, t));
    return out;
}

std::vector<Matrix> CoefficientField::sin_terms() const {
    std::vector<Matrix> out;
    for (const auto& t : sin_terms_) out.push_back(Matrix::from_real(n_, n_, t));
    return out;
}

// ---------------------------------------------------------------------------

ProblemSystem::ProblemSystem(MetricSignature sig, CoefficientField field, double o_height, Tolerances tol)
    : sig_(sig), field_(std::move(field)), o_height_(o_height), tol_(tol) {}

ProblemSystem ProblemSystem::unchecked(MetricSignature sig, CoefficientField field, double o_height,
                                       Tolerances tol) {
    if (sig.n < 1 || sig.n > 16) throw InvalidInput("dimension n must be in [1,16]");
    if (sig.nu < 0 || sig.nu > sig.n) throw InvalidInput("index nu must satisfy 0 <= nu <= n");
    if (field.dim() != static_cast<std::size_t>(sig.n)) throw InvalidInput("field dimension does not match n");
    if (!(o_height > 0.0) || !std::isfinite(o_height)) throw InvalidInput("o_height must be positive");
    if (!(tol.rank_rel_tol > 0.0 && tol.rank_rel_tol < 1.0)) throw InvalidInput("rank_rel_tol must be in (0,1)");
    if (!(tol.instant_tol > 0.0 && tol.instant_tol < 1e-2)) throw InvalidInput("instant_tol must be in (0,1e-2)");
    if (tol.ode_steps < 16) throw InvalidInput("ode_steps must be >= 16");
    if (tol.scan_points < 8) throw InvalidInput("scan_points must be >= 8");
    if (!(tol.form_rel_tol > 0.0 && tol.form_rel_tol < 1.0)) throw InvalidInput("form_rel_tol must be in (0,1)");
    return ProblemSystem(sig, std::move(field), o_height, tol);
}

ProblemSystem ProblemSystem::create(MetricSignature sig, CoefficientField field, double o_height,
                                    Tolerances tol) {
    ProblemSystem sys = unchecked(sig, std::move(field), o_height, tol);
    validate_nondegenerate(sys);
    return sys;
}

ProblemSystem ProblemSystem::with_delta(double delta) const {
    ProblemSystem s = *this;
    s.field_ = field_.with_delta(delta);
    return s;
}

ProblemSystem ProblemSystem::with_steps(int steps) const {
    Tolerances t = tol_;
    t.ode_steps = steps;
    return with_tolerances(t);
}

ProblemSystem ProblemSystem::with_o_height(double h) const {
    return unchecked(sig_, field_, h, tol_);
}

ProblemSystem ProblemSystem::with_tolerances(const Tolerances& tol) const {
    return unchecked(sig_, field_, o_height_, tol);
}

double endpoint_conditioning(const ProblemSystem& sys, double t) {
    // scale by the whole frame [b_t; d_t]: sigma_max(b_t) alone makes the
    // ratio identically 1 when n = 1
    const Matrix frame = right_columns(sys, t, sys.steps());
    const std::size_t n = sys.n();
    const Matrix b = frame.block(0, 0, n, n);
    const double smax = std::max(singular_values(b).front(), singular_values(frame).front());
    if (smax == 0.0) return 0.0;
    return std::abs(det(b)) / std::pow(smax, static_cast<double>(b.rows()));
}

void validate_nondegenerate(const ProblemSystem& sys) {
    const double c = endpoint_conditioning(sys, 1.0);
    if (!(c > 1e-10)) {
        throw InvalidInput("system is degenerate at t = 1 (|det b_1| / sigma_max([b_1; d_1])^n = " + std::to_string(c) +
                           "); t = 1 is a conjugate instant");
    }
}

Matrix s_family(const ProblemSystem& sys, double t, double x) {
    check_unit(t, "t");
    check_unit(x, "x");
    const std::size_t n = sys.n();
    Matrix s = sys.field().at(t * x);
    s *= t * t;
    for (std::size_t i = 0; i < n; ++i) s(i, i) += sys.delta();
    return s;
}

Matrix s_family_dot(const ProblemSystem& sys, double t, double x) {
    check_unit(t, "t");
    check_unit(x, "x");
    Matrix a = sys.field().at(t * x);
    a *= 2.0 * t;
    Matrix b = sys.field().derivative_at(t * x);
    b *= t * t * x;
    return a + b;
}

Matrix hamiltonian(const ProblemSystem& sys, cplx z, double x) {
    check_unit(z.real(), "Re z");
    const std::size_t n = sys.n();
    Matrix sz = s_family(sys, z.real(), x);
    for (std::size_t i = 0; i < n; ++i) sz(i, i) += cplx(0.0, z.imag());
    Matrix h(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        h(i, n + i) = sys.signature().epsilon(i);
        for (std::size_t j = 0; j < n; ++j) h(n + i, j) = -sz(i, j);
    }
    return h;
}

}  // namespace semiflow
