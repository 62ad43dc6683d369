#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "fracture/geometry.hpp"

namespace fracture {

inline constexpr double kDefaultBoxBound = 10.0;  // sup-norm box for deformations

/// Quadratic form Q = D^2 W(Id) acting on 2x2 matrices through their
/// symmetric part, stored as a symmetric 3x3 matrix in the orthonormal
/// coordinates (E11, E22, sqrt(2) E12).
struct QuadraticForm {
    std::array<std::array<double, 3>, 3> m{};

    double operator()(const Mat2& g) const {
        const Mat2 e = sym(g);
        const double q0 = e.a11, q1 = e.a22, q2 = std::sqrt(2.0) * e.a12;
        const std::array<double, 3> q{q0, q1, q2};
        double v = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) v += q[i] * m[i][j] * q[j];
        return v;
    }

    bool positive_definite() const;
};

/// Stored energy density: frame indifferent, zero exactly on SO(2), with
/// quadratic growth dist^2(F, SO(2)) on the box |F| <= M.
struct EnergyDensity {
    std::string id;
    std::function<double(const Mat2&)> w;
    std::function<Mat2(const Mat2&)> dw;            // gradient dW/dF
    std::optional<QuadraticForm> closed_form_hessian;
    double growth_constant = 1.0;                   // c in W >= c dist^2
};

/// Registered densities: "dist2" (default, W = dist^2(F,SO(2))) and "stvk"
/// (Green-strain quadratic with an orientation term).
EnergyDensity make_density(const std::string& id);

/// Frobenius distance from F to SO(2), closed form.
double dist_so2(const Mat2& f);

/// W(F); rejects |F| > M (Frobenius) with std::invalid_argument.
double eval_w(const EnergyDensity& density, const Mat2& f, double box_m = kDefaultBoxBound);

/// Central finite differences at the identity with Richardson extrapolation
/// (steps h and 2h). Throws std::invalid_argument when the numerical Hessian
/// is not symmetric within tolerance. Assumes W is C^3 near SO(2).
QuadraticForm hessian_q_fd(const EnergyDensity& density, double h = 1e-4);

/// Closed form when registered, finite differences otherwise.
QuadraticForm hessian_q(const EnergyDensity& density);

struct UniaxialOptimum {
    double alpha = 0.0;       // inf { Q(F) : e1^T F e1 = 1 }
    Mat2 fa;                  // unique symmetric minimizer at strain a
    double kkt_residual = 0.0;
};

/// alpha and F^a from the equality-constrained quadratic program
/// min Q(E) over symmetric E with E11 = a. Throws if Q is not positive
/// definite on symmetric matrices.
UniaxialOptimum alpha_and_fa(const QuadraticForm& q, double a);

/// max over t_grid of |W(Id + tG) - Q(e(tG))/2| / t^3; certifies the cubic
/// Taylor remainder at the sampled points.
double taylor_remainder_bound(const EnergyDensity& density, const Mat2& g,
                              std::span<const double> t_grid);

}  // namespace fracture
