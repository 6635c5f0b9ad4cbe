#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polarity {

/// Raised when a linear solve or an update produces an unusable result.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Tridiagonal system  lower[i] u[i-1] + diag[i] u[i] + upper[i] u[i+1] = rhs[i].
 * lower[0] and upper[n-1] are ignored.
 */
struct TridiagonalSystem {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> rhs;

    explicit TridiagonalSystem(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }
};

/// Thomas algorithm, no pivoting; the steppers only assemble column-diagonally-dominant M-matrices.
/// Throws SolverError on a zero or non-finite pivot. Non-finite solutions are returned as-is.
inline std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys) {
    const std::size_t n = sys.size();
    if (n == 0) return {};
    std::vector<double> c_prime(n, 0.0);
    std::vector<double> d_prime(n, 0.0);

    double pivot = sys.diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot)) throw SolverError("tridiagonal solve: zero pivot at row 0");
    c_prime[0] = sys.upper[0] / pivot;
    d_prime[0] = sys.rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = sys.diag[i] - sys.lower[i] * c_prime[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw SolverError("tridiagonal solve: singular pivot at row " + std::to_string(i));
        }
        c_prime[i] = (i + 1 < n) ? sys.upper[i] / pivot : 0.0;
        d_prime[i] = (sys.rhs[i] - sys.lower[i] * d_prime[i - 1]) / pivot;
    }

    std::vector<double> u(n);
    u[n - 1] = d_prime[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) u[i] = d_prime[i] - c_prime[i] * u[i + 1];
    return u;
}

/// One step of iterative refinement: u += A^{-1} r(u), where `residual` returns rhs - A u
/// evaluated more accurately than the elimination itself.
template <typename Residual>
void refine_solution(const TridiagonalSystem& sys, std::vector<double>& u, Residual&& residual) {
    TridiagonalSystem correction = sys;
    correction.rhs = residual(u);
    const std::vector<double> du = solve_tridiagonal(correction);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += du[i];
}

}  // namespace polarity
