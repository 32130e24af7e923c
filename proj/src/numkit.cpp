#include "semiflow/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace semiflow {

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
    if (rows > kMaxDim || cols > kMaxDim) {
        throw std::invalid_argument("matrix dimension " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " exceeds limit " +
                                    std::to_string(kMaxDim));
    }
}

void require_square(const Matrix& m, const char* what) {
    if (!m.square()) throw std::invalid_argument(std::string(what) + ": matrix is not square");
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.all_finite()) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    check_dims(rows, cols);
    data_.assign(rows * cols, cplx{});
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    check_dims(rows_, cols_);
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
        for (double v : r) data_.emplace_back(v, 0.0);
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::from_real(std::size_t rows, std::size_t cols, std::span<const double> values) {
    if (values.size() != rows * cols) throw std::invalid_argument("from_real: size mismatch");
    Matrix m(rows, cols);
    std::copy(values.begin(), values.end(), m.data_.begin());
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::adjoint() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
    return t;
}

Matrix Matrix::conj() const {
    Matrix c = *this;
    for (auto& v : c.data_) v = std::conj(v);
    return c;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const {
    if (r0 + rows > rows_ || c0 + cols > cols_) throw std::out_of_range("Matrix::block");
    Matrix b(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw std::out_of_range("Matrix::set_block");
    for (std::size_t i = 0; i < b.rows_; ++i)
        for (std::size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Vector Matrix::column(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

double Matrix::max_imag() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v.imag()));
    return m;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& v) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
}

bool Matrix::is_real(double tol) const { return max_imag() <= tol; }

Matrix& Matrix::operator+=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sum: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix difference: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector operator*(const Matrix& a, const Vector& v) {
    if (a.cols_ != v.size()) throw std::invalid_argument("matrix-vector product: shape mismatch");
    Vector r(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        cplx s{};
        for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

double norm(const Vector& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

cplx dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// ---------------------------------------------------------------------------
// LU

LU lu_decompose(const Matrix& m) {
    require_square(m, "lu_decompose");
    require_finite(m, "lu_decompose");
    const std::size_t n = m.rows();
    LU lu{m, std::vector<std::size_t>(n), 1, false};
    std::iota(lu.perm.begin(), lu.perm.end(), std::size_t{0});
    Matrix& a = lu.factors;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        }
        if (best == 0.0) {
            lu.singular = true;
            continue;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(lu.perm[k], lu.perm[piv]);
            lu.perm_sign = -lu.perm_sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = a(i, k) / a(k, k);
            a(i, k) = f;
            if (f == cplx{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return lu;
}

cplx det(const Matrix& m) {
    const LU lu = lu_decompose(m);
    if (lu.singular) return cplx{};
    cplx d = static_cast<double>(lu.perm_sign);
    for (std::size_t i = 0; i < m.rows(); ++i) d *= lu.factors(i, i);
    return d;
}

Matrix solve(const LU& lu, const Matrix& rhs) {
    const Matrix& a = lu.factors;
    const std::size_t n = a.rows();
    if (rhs.rows() != n) throw std::invalid_argument("solve: shape mismatch");
    if (lu.singular) throw std::domain_error("solve: singular matrix");
    Matrix x(n, rhs.cols());
    for (std::size_t c = 0; c < rhs.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = rhs(lu.perm[i], c);
            for (std::size_t j = 0; j < i; ++j) s -= a(i, j) * x(j, c);
            x(i, c) = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            cplx s = x(i, c);
            for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x(j, c);
            x(i, c) = s / a(i, i);
        }
    }
    return x;
}

Matrix inverse(const Matrix& m) { return solve(lu_decompose(m), Matrix::identity(m.rows())); }

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD (Hestenes). Columns of the working copy are rotated
// until pairwise orthogonal; their norms are the singular values.

SvdRight svd_right(const Matrix& m) {
    require_finite(m, "svd");
    const std::size_t rows = m.rows();
    const std::size_t n = m.cols();
    Matrix a = m;
    Matrix v = Matrix::identity(n);
    constexpr double eps = 1e-15;
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0;
                cplx gamma{};
                for (std::size_t i = 0; i < rows; ++i) {
                    alpha += std::norm(a(i, p));
                    beta += std::norm(a(i, q));
                    gamma += std::conj(a(i, p)) * a(i, q);
                }
                const double g = std::abs(gamma);
                if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const cplx phase = gamma / g;
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const cplx sp = s * std::conj(phase);
                for (std::size_t i = 0; i < rows; ++i) {
                    const cplx ap = a(i, p);
                    const cplx aq = a(i, q) * std::conj(phase);
                    a(i, p) = c * ap - s * aq;
                    a(i, q) = s * ap + c * aq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx vp = v(i, p);
                    const cplx vq = v(i, q);
                    v(i, p) = c * vp - sp * vq;
                    v(i, q) = s * vp + c * std::conj(phase) * vq;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += std::norm(a(i, j));
        sigma[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return sigma[x] > sigma[y]; });
    SvdRight out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.sigma[k] = sigma[order[k]];
        for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, order[k]);
    }
    return out;
}

std::vector<double> singular_values(const Matrix& m) { return svd_right(m).sigma; }

std::vector<Vector> kernel_basis(const Matrix& m, double rel_tol) {
    require_square(m, "kernel_basis");
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("kernel_basis: rel_tol must be in (0,1)");
    const SvdRight svd = svd_right(m);
    std::vector<Vector> basis;
    const double smax = svd.sigma.empty() ? 0.0 : svd.sigma.front();
    for (std::size_t k = 0; k < svd.sigma.size(); ++k) {
        if (svd.sigma[k] <= rel_tol * smax) basis.push_back(svd.v.column(k));
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi for real symmetric matrices.

namespace {

std::vector<double> symmetric_real_copy(const Matrix& s) {
    require_square(s, "symmetric eigen");
    require_finite(s, "symmetric eigen");
    const std::size_t n = s.rows();
    const double scale = std::max(1.0, s.max_abs());
    if (s.max_imag() > 1e-12 * scale) throw std::invalid_argument("symmetric eigen: matrix is not real");
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(s(i, j).real() - s(j, i).real()) > 1e-12 * scale)
                throw std::invalid_argument("symmetric eigen: matrix is not symmetric");
            a[i * n + j] = 0.5 * (s(i, j).real() + s(j, i).real());
        }
    return a;
}

}  // namespace

std::vector<double> sym_eigenvalues(const Matrix& s) {
    std::vector<double> a = symmetric_real_copy(s);
    const std::size_t n = s.rows();
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    double total = 0.0;
    for (double x : a) total += x * x;
    const double target = 1e-14 * std::sqrt(total);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) off += at(i, j) * at(i, j);
        if (std::sqrt(off) <= target) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - sn * akq;
                    at(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - sn * aqk;
                    at(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

Signature sym_signature(const Matrix& s, double rel_tol, double scale) {
    const std::vector<double> ev = sym_eigenvalues(s);
    double lmax = scale;
    for (double l : ev) lmax = std::max(lmax, std::abs(l));
    const double thr = rel_tol * lmax;
    Signature sig;
    for (double l : ev) {
        if (lmax > 0.0 && l > thr) ++sig.n_plus;
        else if (lmax > 0.0 && l < -thr) ++sig.n_minus;
        else ++sig.n_zero;
    }
    return sig;
}

// ---------------------------------------------------------------------------
// Polynomials

Poly::Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Poly::operator()(double x) const {
    double r = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) r = r * x + c_[k];
    return r;
}

Poly Poly::trimmed(double tol) const {
    std::vector<double> c = c_;
    while (!c.empty() && std::abs(c.back()) <= tol) c.pop_back();
    return Poly(std::move(c));
}

Poly operator+(const Poly& a, const Poly& b) {
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
    return Poly(std::move(c));
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-1.0) * b; }

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly{};
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(c));
}

Poly operator*(double s, const Poly& a) {
    std::vector<double> c = a.c_;
    for (auto& v : c) v *= s;
    return Poly(std::move(c));
}

PolyDivision poly_divrem(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::invalid_argument("poly_divrem: division by the zero polynomial");
    const int db = b.degree();
    std::vector<double> r = a.coeffs();
    if (a.degree() < db) return {Poly{}, a};
    std::vector<double> q(static_cast<std::size_t>(a.degree() - db + 1), 0.0);
    for (int k = a.degree(); k >= db; --k) {
        const double f = r[static_cast<std::size_t>(k)] / b.leading();
        q[static_cast<std::size_t>(k - db)] = f;
        for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k - db + j)] -= f * b.coeff(static_cast<std::size_t>(j));
        r[static_cast<std::size_t>(k)] = 0.0;
    }
    r.resize(static_cast<std::size_t>(db));
    return {Poly(std::move(q)), Poly(std::move(r))};
}

}  // namespace semiflow
