#pragma once

// Small dense linear algebra and polynomial helpers.
//
// Everything here is sized for matrices of dimension at most kMaxDim; the
// index computations never need more than that.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace semiflow {

using cplx = std::complex<double>;
using Vector = std::vector<cplx>;

inline constexpr std::size_t kMaxDim = 64;

/// Dense row-major complex matrix. Real matrices have zero imaginary parts.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix diagonal(std::span<const double> d);
    static Matrix from_real(std::size_t rows, std::size_t cols, std::span<const double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<cplx> data() { return data_; }
    std::span<const cplx> data() const { return data_; }

    Matrix transpose() const;
    Matrix adjoint() const;
    Matrix conj() const;
    Matrix block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const;
    void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
    Vector column(std::size_t j) const;

    double frobenius_norm() const;
    double max_abs() const;
    double max_imag() const;
    bool all_finite() const;
    bool is_real(double tol = 0.0) const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(cplx s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
    friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Vector operator*(const Matrix& a, const Vector& v);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

double norm(const Vector& v);
cplx dot(const Vector& a, const Vector& b);  // sum conj(a_i) b_i

/// Eigenvalue sign counts of a real symmetric form.
struct Signature {
    int n_plus = 0;
    int n_minus = 0;
    int n_zero = 0;

    int value() const { return n_plus - n_minus; }
    int dimension() const { return n_plus + n_minus + n_zero; }
    bool nondegenerate() const { return n_zero == 0; }
    friend bool operator==(const Signature&, const Signature&) = default;
};

/// LU factorisation with partial pivoting.
struct LU {
    Matrix factors;
    std::vector<std::size_t> perm;
    int perm_sign = 1;
    bool singular = false;
};

LU lu_decompose(const Matrix& m);
cplx det(const Matrix& m);
Matrix solve(const LU& lu, const Matrix& rhs);
Matrix inverse(const Matrix& m);

/// Singular values (descending) and the matching right singular vectors
/// (columns of v), from one-sided Jacobi.
struct SvdRight {
    std::vector<double> sigma;
    Matrix v;
};

SvdRight svd_right(const Matrix& m);
std::vector<double> singular_values(const Matrix& m);

/// Orthonormal basis of {x : |m x| small}, i.e. the right singular vectors
/// with sigma_i <= rel_tol * sigma_max. Empty when m is numerically invertible.
std::vector<Vector> kernel_basis(const Matrix& m, double rel_tol);

/// Eigenvalues (ascending) of a real symmetric matrix by cyclic Jacobi.
std::vector<double> sym_eigenvalues(const Matrix& s);

/// Counts eigenvalues above rel_tol * max(max|lambda|, scale), below its
/// negative, and in between. `scale` lets callers supply an external
/// magnitude so that a uniformly tiny form is still classified as zero.
Signature sym_signature(const Matrix& s, double rel_tol, double scale = 0.0);

/// Real polynomial, coefficients in ascending degree.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<double> coeffs);
    Poly(std::initializer_list<double> coeffs) : Poly(std::vector<double>(coeffs)) {}

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    double leading() const { return c_.empty() ? 0.0 : c_.back(); }
    double coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
    const std::vector<double>& coeffs() const { return c_; }

    double operator()(double x) const;

    /// Drops trailing coefficients with |c| <= tol.
    Poly trimmed(double tol) const;

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(double s, const Poly& a);

private:
    std::vector<double> c_;
};

struct PolyDivision {
    Poly quotient;
    Poly remainder;
};

PolyDivision poly_divrem(const Poly& a, const Poly& b);

}  // namespace semiflow
