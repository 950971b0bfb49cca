#pragma once

// Banded solvers used by the PDE and eigenvalue code. No pivoting: callers
// only hand in diagonally dominant (M-matrix) systems.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace wnv::linalg {

/// Solves a tridiagonal system in place (Thomas algorithm).
///
/// `lower[i]` multiplies x[i-1] in row i (lower[0] unused), `upper[i]`
/// multiplies x[i+1] (upper[n-1] unused). `rhs` is overwritten with x.
inline void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<double> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n)
        throw std::invalid_argument("solve_tridiagonal: size mismatch");
    if (n == 0) return;
    std::vector<double> c(n);
    double denom = diag[0];
    if (denom == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
    c[0] = upper[0] / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        if (denom == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
        c[i] = upper[i] / denom;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

using Mat2 = std::array<double, 4>; // row-major {a00, a01, a10, a11}
using Vec2 = std::array<double, 2>;

inline Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}
inline Vec2 mul(const Mat2& a, const Vec2& x) {
    return {a[0] * x[0] + a[1] * x[1], a[2] * x[0] + a[3] * x[1]};
}
inline Mat2 inverse(const Mat2& a) {
    const double det = a[0] * a[3] - a[1] * a[2];
    if (det == 0.0) throw std::runtime_error("singular 2x2 block");
    return {a[3] / det, -a[1] / det, -a[2] / det, a[0] / det};
}

/// Block-tridiagonal system with 2x2 blocks, solved by block elimination.
/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
struct BlockTridiagonal2 {
    std::vector<Mat2> lower, diag, upper;

    explicit BlockTridiagonal2(std::size_t n) : lower(n), diag(n), upper(n) {}
    std::size_t size() const noexcept { return diag.size(); }

    std::vector<Vec2> solve(std::vector<Vec2> rhs) const {
        const std::size_t n = size();
        if (rhs.size() != n) throw std::invalid_argument("BlockTridiagonal2: size mismatch");
        if (n == 0) return rhs;
        std::vector<Mat2> c(n);
        Mat2 inv = inverse(diag[0]);
        c[0] = mul(inv, upper[0]);
        rhs[0] = mul(inv, rhs[0]);
        for (std::size_t i = 1; i < n; ++i) {
            const Mat2 lc = mul(lower[i], c[i - 1]);
            const Mat2 d{diag[i][0] - lc[0], diag[i][1] - lc[1], diag[i][2] - lc[2],
                         diag[i][3] - lc[3]};
            inv = inverse(d);
            c[i] = mul(inv, upper[i]);
            const Vec2 lr = mul(lower[i], rhs[i - 1]);
            rhs[i] = mul(inv, Vec2{rhs[i][0] - lr[0], rhs[i][1] - lr[1]});
        }
        for (std::size_t i = n - 1; i-- > 0;) {
            const Vec2 cx = mul(c[i], rhs[i + 1]);
            rhs[i][0] -= cx[0];
            rhs[i][1] -= cx[1];
        }
        return rhs;
    }

    std::vector<Vec2> apply(const std::vector<Vec2>& x) const {
        const std::size_t n = size();
        std::vector<Vec2> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 r = mul(diag[i], x[i]);
            if (i > 0) {
                const Vec2 l = mul(lower[i], x[i - 1]);
                r[0] += l[0];
                r[1] += l[1];
            }
            if (i + 1 < n) {
                const Vec2 u = mul(upper[i], x[i + 1]);
                r[0] += u[0];
                r[1] += u[1];
            }
            y[i] = r;
        }
        return y;
    }
};

} // namespace wnv::linalg
