#include "semiflow/flow.hpp"

#include <cmath>
#include <string>
#include <type_traits>

namespace semiflow {

namespace {

template <class T>
bool finite(const T& v) {
    if constexpr (std::is_same_v<T, double>) return std::isfinite(v);
    else return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// Right-hand side of the first-order Jacobi system for a block of columns.
// State layout: 2n rows x `cols` columns, row-major; rows [0,n) hold u,
// rows [n,2n) hold v = J u'.
template <class T>
class JacobiRhs {
public:
    JacobiRhs(const ProblemSystem& sys, cplx z, std::size_t cols)
        : field_(sys.field()), n_(sys.n()), cols_(cols), t_(z.real()), s_(z.imag()), delta_(sys.delta()),
          raw_(n_ * n_), eps_(n_) {
        for (std::size_t i = 0; i < n_; ++i) eps_[i] = sys.signature().epsilon(i);
    }

    // S_z(x) into sz
    void coefficients(double x, std::vector<T>& sz) {
        field_.eval(t_ * x, raw_.data());
        const double t2 = t_ * t_;
        for (std::size_t e = 0; e < n_ * n_; ++e) sz[e] = T(t2 * raw_[e]);
        for (std::size_t i = 0; i < n_; ++i) {
            if constexpr (std::is_same_v<T, double>) sz[i * n_ + i] += delta_;
            else sz[i * n_ + i] += cplx(delta_, s_);
        }
    }

    void apply(const std::vector<T>& sz, const T* y, T* out) const {
        const std::size_t c = cols_;
        for (std::size_t i = 0; i < n_; ++i) {
            const double e = eps_[i];
            const T* vrow = y + (n_ + i) * c;
            T* urow = out + i * c;
            for (std::size_t j = 0; j < c; ++j) urow[j] = e * vrow[j];
        }
        for (std::size_t i = 0; i < n_; ++i) {
            T* vout = out + (n_ + i) * c;
            for (std::size_t j = 0; j < c; ++j) vout[j] = T{};
            for (std::size_t k = 0; k < n_; ++k) {
                const T sik = sz[i * n_ + k];
                if (sik == T{}) continue;
                const T* urow = y + k * c;
                for (std::size_t j = 0; j < c; ++j) vout[j] -= sik * urow[j];
            }
        }
    }

    std::size_t n() const { return n_; }

private:
    const CoefficientField& field_;
    std::size_t n_, cols_;
    double t_, s_, delta_;
    std::vector<double> raw_;
    std::vector<double> eps_;
};

// Classical RK4 over [0, x_end] in `steps` equal steps; obs(k, x, y) is
// invoked at x_0 = 0 and after every step.
template <class T, class Observer>
void integrate(const ProblemSystem& sys, cplx z, double x_end, int steps, std::vector<T>& y, std::size_t cols,
               Observer&& obs) {
    if (z.real() < -1e-12 || z.real() > 1.0 + 1e-12)
        throw InvalidInput("Re z must lie in [0,1], got " + std::to_string(z.real()));
    if (steps < 1) throw InvalidInput("step count must be positive");
    JacobiRhs<T> rhs(sys, z, cols);
    const std::size_t n = rhs.n();
    const std::size_t size = 2 * n * cols;
    std::vector<T> s0(n * n), s_mid(n * n), s1(n * n);
    std::vector<T> k1(size), k2(size), k3(size), k4(size), tmp(size);
    const double h = x_end / steps;
    rhs.coefficients(0.0, s0);
    obs(0, 0.0, y);
    for (int k = 0; k < steps; ++k) {
        const double x = k * h;
        const double x_next = (k + 1 == steps) ? x_end : (k + 1) * h;
        rhs.coefficients(x + 0.5 * h, s_mid);
        rhs.coefficients(x_next, s1);

        rhs.apply(s0, y.data(), k1.data());
        for (std::size_t e = 0; e < size; ++e) tmp[e] = y[e] + (0.5 * h) * k1[e];
        rhs.apply(s_mid, tmp.data(), k2.data());
        for (std::size_t e = 0; e < size; ++e) tmp[e] = y[e] + (0.5 * h) * k2[e];
        rhs.apply(s_mid, tmp.data(), k3.data());
        for (std::size_t e = 0; e < size; ++e) tmp[e] = y[e] + h * k3[e];
        rhs.apply(s1, tmp.data(), k4.data());
        for (std::size_t e = 0; e < size; ++e) y[e] += (h / 6.0) * (k1[e] + 2.0 * k2[e] + 2.0 * k3[e] + k4[e]);

        std::swap(s0, s1);
        if ((k & 63) == 63 || k + 1 == steps) {
            for (const auto& v : y) {
                if (!finite(v))
                    throw NumericalFailure("fundamental solution blew up near x = " + std::to_string(x_next) +
                                           " (z = " + std::to_string(z.real()) + " + " + std::to_string(z.imag()) +
                                           "i); check the scale of S");
            }
        }
        obs(k + 1, x_next, y);
    }
}

struct NoObserver {
    template <class Y>
    void operator()(int, double, const Y&) const {}
};

template <class T>
Matrix to_matrix(const std::vector<T>& y, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = y[i * cols + j];
    return m;
}

bool is_real_param(cplx z) { return z.imag() == 0.0; }

// Integrates the columns [first_col, 2n) of the identity.
template <class T>
Matrix propagate_identity_columns(const ProblemSystem& sys, cplx z, double x_end, int steps, std::size_t first_col) {
    const std::size_t n2 = 2 * sys.n();
    const std::size_t cols = n2 - first_col;
    std::vector<T> y(n2 * cols, T{});
    for (std::size_t j = 0; j < cols; ++j) y[(first_col + j) * cols + j] = T(1.0);
    integrate<T>(sys, z, x_end, steps, y, cols, NoObserver{});
    return to_matrix(y, n2, cols);
}

Matrix propagate(const ProblemSystem& sys, cplx z, double x_end, int steps, std::size_t first_col) {
    if (is_real_param(z)) return propagate_identity_columns<double>(sys, z, x_end, steps, first_col);
    return propagate_identity_columns<cplx>(sys, z, x_end, steps, first_col);
}

}  // namespace

FundamentalSolution fundamental_solution(const ProblemSystem& sys, cplx z, int steps) {
    if (steps < 16) throw InvalidInput("fundamental_solution needs at least 16 steps");
    const std::size_t n = sys.n();
    FundamentalSolution fs;
    fs.z = z;
    fs.steps = steps;
    fs.psi_end = propagate(sys, z, 1.0, steps, 0);
    fs.a = fs.psi_end.block(0, 0, n, n);
    fs.b = fs.psi_end.block(0, n, n, n);
    fs.c = fs.psi_end.block(n, 0, n, n);
    fs.d = fs.psi_end.block(n, n, n, n);
    return fs;
}

Matrix b_block(const ProblemSystem& sys, cplx z, int steps) {
    if (steps < 16) throw InvalidInput("b_block needs at least 16 steps");
    const std::size_t n = sys.n();
    return propagate(sys, z, 1.0, steps, n).block(0, 0, n, n);
}

Matrix right_columns(const ProblemSystem& sys, double t, int steps) {
    if (steps < 16) throw InvalidInput("right_columns needs at least 16 steps");
    return propagate_identity_columns<double>(sys, cplx(t, 0.0), 1.0, steps, sys.n());
}

cplx rho(const ProblemSystem& sys, cplx z) { return det(b_block(sys, z, sys.steps())); }

double symplectic_residual(const FundamentalSolution& fs, const MetricSignature& signature) {
    if (fs.z.imag() != 0.0) throw InvalidInput("symplectic_residual is defined for real parameters only");
    const Matrix sigma = symplectic_unit(static_cast<std::size_t>(signature.n));
    if (fs.psi_end.rows() != sigma.rows()) throw InvalidInput("symplectic_residual: dimension mismatch");
    return (fs.psi_end.transpose() * sigma * fs.psi_end - sigma).frobenius_norm();
}

Matrix psi_at(const ProblemSystem& sys, cplx z, double x, int steps) {
    if (x < 0.0 || x > 1.0) throw InvalidInput("psi_at: x must lie in [0,1]");
    if (x == 0.0) return Matrix::identity(2 * sys.n());
    const int k = std::max(1, static_cast<int>(std::ceil(x * steps - 1e-9)));
    return propagate(sys, z, x, k, 0);
}

namespace {

template <class T>
Trajectory record_trajectory(const ProblemSystem& sys, cplx z, const Matrix& initial, int steps) {
    const std::size_t n2 = 2 * sys.n();
    const std::size_t cols = initial.cols();
    std::vector<T> y(n2 * cols);
    for (std::size_t i = 0; i < n2; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            if constexpr (std::is_same_v<T, double>) y[i * cols + j] = initial(i, j).real();
            else y[i * cols + j] = initial(i, j);
        }
    Trajectory traj;
    traj.x.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    integrate<T>(sys, z, 1.0, steps, y, cols, [&](int, double x, const std::vector<T>& state) {
        traj.x.push_back(x);
        traj.states.push_back(to_matrix(state, n2, cols));
    });
    return traj;
}

}  // namespace

Trajectory trajectory(const ProblemSystem& sys, cplx z, const Matrix& initial, int steps) {
    if (initial.rows() != 2 * sys.n()) throw InvalidInput("trajectory: initial data must have 2n rows");
    if (steps < 1) throw InvalidInput("trajectory: step count must be positive");
    if (is_real_param(z) && initial.is_real()) return record_trajectory<double>(sys, z, initial, steps);
    return record_trajectory<cplx>(sys, z, initial, steps);
}

}  // namespace semiflow
