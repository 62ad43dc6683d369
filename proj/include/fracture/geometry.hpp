#pragma once

#include <array>
#include <cmath>

namespace fracture {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// 2x2 matrix, row-major entries a11 a12 a21 a22.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    Mat2() = default;
    Mat2(double m11, double m12, double m21, double m22)
        : a11(m11), a12(m12), a21(m21), a22(m22) {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 rotation(double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        return {c, -s, s, c};
    }
    /// Generator of rotations: J = [[0,-1],[1,0]], so skew A = spin * J.
    static Mat2 spin_generator() { return {0.0, -1.0, 1.0, 0.0}; }
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }
    static Mat2 outer(const Vec2& a, const Vec2& b) {
        return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
    }

    Mat2 operator+(const Mat2& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
    Mat2 operator-(const Mat2& o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    Mat2& operator+=(const Mat2& o) { a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22; return *this; }
    Mat2& operator-=(const Mat2& o) { a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22; return *this; }

    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Vec2 operator*(const Vec2& v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }

    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }
    double frobenius() const { return std::sqrt(frobenius2()); }
    double frobenius2() const { return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22; }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

/// Symmetric part e(G) = (G + G^T)/2.
inline Mat2 sym(const Mat2& g) {
    const double off = 0.5 * (g.a12 + g.a21);
    return {g.a11, off, off, g.a22};
}

/// Nearest rotation to F in Frobenius norm, exact for every F (including
/// det F <= 0): the optimal angle maximizes tr(R^T F), i.e. aligns with
/// (tr F, F21 - F12). Returns the identity when that vector vanishes.
inline Mat2 polar_rotation(const Mat2& f) {
    const double c = f.a11 + f.a22;
    const double s = f.a21 - f.a12;
    const double r = std::hypot(c, s);
    if (r == 0.0) return Mat2::identity();
    return {c / r, -s / r, s / r, c / r};
}

inline double polar_angle(const Mat2& f) {
    const double c = f.a11 + f.a22;
    const double s = f.a21 - f.a12;
    if (c == 0.0 && s == 0.0) return 0.0;
    return std::atan2(s, c);
}

/// Affine map x -> F x + d.
struct AffineMap {
    Mat2 grad;
    Vec2 shift;

    Vec2 operator()(const Vec2& x) const { return grad * x + shift; }
};

/// Wrap an angle difference into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::acos(-1.0));
    return a;
}

/// Solve a small dense linear system in place by Gaussian elimination with
/// partial pivoting. Returns false if the pivot degenerates.
template <int N>
bool solve_dense(std::array<std::array<double, N>, N>& a, std::array<double, N>& b) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-300) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        const double inv = 1.0 / a[col][col];
        for (int r = 0; r < N; ++r) {
            if (r == col) continue;
            const double f = a[r][col] * inv;
            if (f == 0.0) continue;
            for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int i = 0; i < N; ++i) b[i] /= a[i][i];
    return true;
}

}  // namespace fracture
