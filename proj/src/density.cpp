#include "fracture/density.hpp"

#include <cmath>
#include <stdexcept>

namespace fracture {

bool QuadraticForm::positive_definite() const {
    // Sylvester on the 3x3 coefficient matrix.
    const auto& a = m;
    const double d1 = a[0][0];
    const double d2 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    const double d3 = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                      a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                      a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    return d1 > 0.0 && d2 > 0.0 && d3 > 0.0;
}

double dist_so2(const Mat2& f) {
    // |F - R*| against the closed-form polar rotation; free of the
    // cancellation that the expanded form |F|^2 - 2 tr(R*^T F) + 2 suffers
    // near SO(2). polar_rotation is the exact minimizer for every F,
    // including det F <= 0.
    return (f - polar_rotation(f)).frobenius();
}

namespace {

double w_dist2(const Mat2& f) {
    const double d = dist_so2(f);
    return d * d;
}

Mat2 dw_dist2(const Mat2& f) {
    // d/dF [ |F|^2 - 2 sqrt(c^2+s^2) + 2 ] = 2F - 2 R*(F) away from c=s=0.
    const double c = f.a11 + f.a22;
    const double s = f.a21 - f.a12;
    const double r = std::hypot(c, s);
    if (r == 0.0) return 2.0 * f;
    return 2.0 * (f - polar_rotation(f));
}

// Green strain E = (F^T F - Id)/2.
Mat2 green_strain(const Mat2& f) {
    const Mat2 c = f.transpose() * f;
    return {0.5 * (c.a11 - 1.0), 0.5 * c.a12, 0.5 * c.a21, 0.5 * (c.a22 - 1.0)};
}

// St.Venant-Kirchhoff with an orientation term so the zero set is exactly
// SO(2), not all of O(2):  W = |E|^2 + (tr E)^2 / 2 + (det F - 1)^2.
double w_stvk(const Mat2& f) {
    const Mat2 e = green_strain(f);
    const double tr = e.trace();
    const double dd = f.det() - 1.0;
    return e.frobenius2() + 0.5 * tr * tr + dd * dd;
}

Mat2 dw_stvk(const Mat2& f) {
    const Mat2 e = green_strain(f);
    const double tr = e.trace();
    const double dd = f.det() - 1.0;
    const Mat2 adj_t{f.a22, -f.a21, -f.a12, f.a11};  // d(det F)/dF
    return 2.0 * (f * e) + tr * f + 2.0 * dd * adj_t;
}

QuadraticForm q_scaled_identity(double s) {
    QuadraticForm q;
    q.m = {{{s, 0.0, 0.0}, {0.0, s, 0.0}, {0.0, 0.0, s}}};
    return q;
}

}  // namespace

EnergyDensity make_density(const std::string& id) {
    if (id == "dist2") {
        EnergyDensity d;
        d.id = id;
        d.w = w_dist2;
        d.dw = dw_dist2;
        d.closed_form_hessian = q_scaled_identity(2.0);  // Q(E) = 2|E|^2
        d.growth_constant = 1.0;
        return d;
    }
    if (id == "stvk") {
        EnergyDensity d;
        d.id = id;
        d.w = w_stvk;
        d.dw = dw_stvk;
        // Q(E) = 2|E|^2 + 3 (tr E)^2.
        QuadraticForm q;
        q.m = {{{5.0, 3.0, 0.0}, {3.0, 5.0, 0.0}, {0.0, 0.0, 2.0}}};
        d.closed_form_hessian = q;
        d.growth_constant = 0.5;
        return d;
    }
    throw std::invalid_argument("unknown density id: " + id);
}

double eval_w(const EnergyDensity& density, const Mat2& f, double box_m) {
    if (f.frobenius() > box_m)
        throw std::invalid_argument("eval_w: |F| exceeds the gradient bound M");
    return density.w(f);
}

QuadraticForm hessian_q_fd(const EnergyDensity& density, double h) {
    const double s2 = std::sqrt(2.0);
    const std::array<Mat2, 3> basis{Mat2{1, 0, 0, 0}, Mat2{0, 0, 0, 1},
                                    Mat2{0, 1.0 / s2, 1.0 / s2, 0}};
    const Mat2 id = Mat2::identity();
    auto hess_at = [&](double step) {
        std::array<std::array<double, 3>, 3> m{};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i == j) {
                    const double wp = density.w(id + step * basis[i]);
                    const double wm = density.w(id - step * basis[i]);
                    m[i][j] = (wp - 2.0 * density.w(id) + wm) / (step * step);
                } else {
                    const Mat2 ep = basis[i] + basis[j];
                    const Mat2 em = basis[i] - basis[j];
                    const double a = density.w(id + step * ep) + density.w(id - step * ep);
                    const double b = density.w(id + step * em) + density.w(id - step * em);
                    m[i][j] = (a - b) / (4.0 * step * step);
                }
            }
        }
        return m;
    };

    const auto mh = hess_at(h);
    const auto m2h = hess_at(2.0 * h);
    QuadraticForm q;
    double scale = 0.0, asym = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            q.m[i][j] = (4.0 * mh[i][j] - m2h[i][j]) / 3.0;
            scale = std::max(scale, std::fabs(q.m[i][j]));
        }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            asym = std::max(asym, std::fabs(q.m[i][j] - q.m[j][i]));
            const double avg = 0.5 * (q.m[i][j] + q.m[j][i]);
            q.m[i][j] = q.m[j][i] = avg;
        }
    if (asym > 1e-5 * (1.0 + scale))
        throw std::invalid_argument("hessian_q: numerical Hessian is not symmetric; density invalid");
    return q;
}

QuadraticForm hessian_q(const EnergyDensity& density) {
    if (density.closed_form_hessian) return *density.closed_form_hessian;
    return hessian_q_fd(density);
}

UniaxialOptimum alpha_and_fa(const QuadraticForm& q, double a) {
    if (!q.positive_definite())
        throw std::invalid_argument("alpha_and_fa: Q is not positive definite on symmetric matrices");

    // min x^T M x subject to x1 = a, KKT in (x1,x2,x3,mu).
    auto solve_for = [&](double rhs) {
        std::array<std::array<double, 4>, 4> k{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) k[i][j] = 2.0 * q.m[i][j];
        k[0][3] = 1.0;
        k[3][0] = 1.0;
        std::array<double, 4> b{0.0, 0.0, 0.0, rhs};
        if (!solve_dense<4>(k, b))
            throw std::invalid_argument("alpha_and_fa: degenerate KKT system");
        return b;
    };

    const auto unit = solve_for(1.0);
    const auto sol = solve_for(a);
    const double s2 = std::sqrt(2.0);
    UniaxialOptimum out;
    out.fa = Mat2{sol[0], sol[2] / s2, sol[2] / s2, sol[1]};
    {
        const Mat2 f1{unit[0], unit[2] / s2, unit[2] / s2, unit[1]};
        out.alpha = q(f1);
    }
    // KKT residual: |2 M x + mu e1| + |x1 - a|.
    std::array<double, 3> grad{};
    const std::array<double, 3> x{sol[0], sol[1], sol[2]};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) grad[i] += 2.0 * q.m[i][j] * x[j];
    grad[0] += sol[3];
    out.kkt_residual = std::sqrt(grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]) +
                       std::fabs(x[0] - a);
    return out;
}

double taylor_remainder_bound(const EnergyDensity& density, const Mat2& g,
                              std::span<const double> t_grid) {
    const QuadraticForm q = hessian_q(density);
    const Mat2 id = Mat2::identity();
    double worst = 0.0;
    for (double t : t_grid) {
        if (t <= 0.0) continue;
        const double w = density.w(id + t * g);
        const double lead = 0.5 * q(t * g);
        worst = std::max(worst, std::fabs(w - lead) / (t * t * t));
    }
    return worst;
}

}  // namespace fracture
