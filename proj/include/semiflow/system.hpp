#pragma once

// Trivialised Jacobi data: the metric symmetry J and the coefficient field
// S(x) of  J u'' + S(x) u = 0  on [0,1], plus the t-suspended family
// S_t(x) = t^2 S(t x) + delta * Id and its complexification S_t + i s Id.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "semiflow/numkit.hpp"

namespace semiflow {

/// Input that fails validation (shape, range, symmetry, degeneracy).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that could not be completed reliably.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MetricSignature {
    int n = 1;
    int nu = 0;

    /// +1 for the first n - nu coordinates, -1 for the last nu.
    double epsilon(std::size_t i) const { return static_cast<int>(i) < n - nu ? 1.0 : -1.0; }
    Matrix J() const;
};

/// sigma = [[0, -Id], [Id, 0]] of size 2n.
Matrix symplectic_unit(std::size_t n);

enum class FieldKind { Constant, Polynomial, Trigonometric };

const char* to_string(FieldKind k);

/// Symmetric matrix-valued S(x) with an analytic derivative.
///
///   Constant:      S(x) = A
///   Polynomial:    S(x) = sum_k C_k x^k
///   Trigonometric: S(x) = A_0 + sum_{k>=1} (A_k cos 2 pi k x + B_k sin 2 pi k x)
class CoefficientField {
public:
    static CoefficientField constant(const Matrix& a);
    static CoefficientField polynomial(const std::vector<Matrix>& coeffs);
    static CoefficientField trigonometric(const std::vector<Matrix>& cos_terms,
                                          const std::vector<Matrix>& sin_terms);

    FieldKind kind() const { return kind_; }
    std::size_t dim() const { return n_; }
    double delta() const { return delta_; }
    CoefficientField with_delta(double delta) const;

    /// S(x) (no delta) written row-major into out[0 .. n*n).
    void eval(double x, double* out) const;
    /// S'(x) written row-major into out.
    void eval_derivative(double x, double* out) const;

    Matrix at(double x) const;
    Matrix derivative_at(double x) const;

    /// max over a fine x-grid of the row-sum norm of S(x).
    double sup_norm() const;

    /// Coefficient matrices as given (cos terms include A_0 first).
    std::vector<Matrix> terms() const;
    std::vector<Matrix> sin_terms() const;

private:
    CoefficientField() = default;
    static std::vector<double> checked_real(const Matrix& m, std::size_t n);

    FieldKind kind_ = FieldKind::Constant;
    std::size_t n_ = 0;
    std::vector<std::vector<double>> terms_;
    std::vector<std::vector<double>> sin_terms_;
    double delta_ = 0.0;
};

struct Tolerances {
    double rank_rel_tol = 1e-8;
    double instant_tol = 1e-10;
    int ode_steps = 2000;
    int scan_points = 512;
    /// relative threshold below which a crossing-form eigenvalue counts as zero
    double form_rel_tol = 1e-6;
};

class ProblemSystem {
public:
    /// Validates shapes, symmetry and nondegeneracy at t = 1.
    static ProblemSystem create(MetricSignature sig, CoefficientField field, double o_height = 1.0,
                                Tolerances tol = {});
    /// Shape and symmetry checks only; the t = 1 endpoint is not examined.
    static ProblemSystem unchecked(MetricSignature sig, CoefficientField field, double o_height = 1.0,
                                   Tolerances tol = {});

    const MetricSignature& signature() const { return sig_; }
    const CoefficientField& field() const { return field_; }
    std::size_t n() const { return static_cast<std::size_t>(sig_.n); }
    double o_height() const { return o_height_; }
    const Tolerances& tolerances() const { return tol_; }
    int steps() const { return tol_.ode_steps; }
    double delta() const { return field_.delta(); }
    Matrix J() const { return sig_.J(); }

    ProblemSystem with_delta(double delta) const;
    ProblemSystem with_steps(int steps) const;
    ProblemSystem with_o_height(double h) const;
    ProblemSystem with_tolerances(const Tolerances& tol) const;

private:
    ProblemSystem(MetricSignature sig, CoefficientField field, double o_height, Tolerances tol);

    MetricSignature sig_;
    CoefficientField field_;
    double o_height_;
    Tolerances tol_;
};

/// |det b_t| relative to sigma_max([b_t; d_t])^n; the system is nondegenerate at 1
/// when this exceeds 1e-10.
double endpoint_conditioning(const ProblemSystem& sys, double t = 1.0);
void validate_nondegenerate(const ProblemSystem& sys);

/// S_t(x) = t^2 S(t x) + delta Id.
Matrix s_family(const ProblemSystem& sys, double t, double x);
/// d/dt S_t(x) = 2 t S(t x) + t^2 x S'(t x).
Matrix s_family_dot(const ProblemSystem& sys, double t, double x);
/// sigma H_z(x) = [[0, J], [-S_z(x), 0]] with S_z = S_t + i s Id, z = t + i s.
Matrix hamiltonian(const ProblemSystem& sys, cplx z, double x);

}  // namespace semiflow
