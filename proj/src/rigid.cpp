#include "fracture/rigid.hpp"

#include <cmath>
#include <stdexcept>

namespace fracture {

RigidFit fit_rigid(std::span<const int> cells, const DiscreteDeformation& y) {
    if (cells.empty()) throw std::invalid_argument("fit_rigid: empty component");
    const GridMesh& m = y.mesh;
    RigidFit out;

    if (cells.size() == 1) {
        const int c = cells[0];
        out.degenerate = true;
        out.motion.angle = polar_angle(y.grad[static_cast<size_t>(c)]);
        const Vec2 xc = m.cell_center(c);
        out.motion.shift = y.value(c, xc) - out.motion.rotation() * xc;
        out.residual = 0.0;
        return out;
    }

    const double w = m.cell_area();
    double wsum = 0.0;
    Vec2 xbar, ybar;
    for (int c : cells) {
        const Vec2 xc = m.cell_center(c);
        xbar += w * xc;
        ybar += w * y.value(c, xc);
        wsum += w;
    }
    xbar = (1.0 / wsum) * xbar;
    ybar = (1.0 / wsum) * ybar;

    // Cross-covariance H = sum w (y - ybar)(x - xbar)^T; the optimal angle
    // maximizes tr(R^T H).
    Mat2 h = Mat2::zero();
    for (int c : cells) {
        const Vec2 xc = m.cell_center(c);
        h += w * Mat2::outer(y.value(c, xc) - ybar, xc - xbar);
    }
    const double tc = h.a11 + h.a22;
    const double ts = h.a21 - h.a12;
    if (std::hypot(tc, ts) < 1e-300) {
        out.degenerate = true;
        out.motion.angle = 0.0;
    } else {
        out.motion.angle = std::atan2(ts, tc);
    }
    out.motion.shift = ybar - out.motion.rotation() * xbar;

    double res = 0.0;
    for (int c : cells) {
        const Vec2 xc = m.cell_center(c);
        res += w * (y.value(c, xc) - out.motion.apply(xc)).norm2();
    }
    out.residual = std::sqrt(res);
    return out;
}

SkewExtract skew_from_pair(const RigidMotion& r1, const RigidMotion& r2, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("skew_from_pair: eps must be positive");
    SkewExtract out;
    const double delta = wrap_angle(r2.angle - r1.angle);
    out.spin = delta / std::sqrt(eps);
    const Mat2 lin = r1.rotation() * (Mat2::identity() + std::sqrt(eps) * out.spin * Mat2::spin_generator());
    out.remainder = (r2.rotation() - lin).frobenius();
    return out;
}

namespace {

/// Per-component normal equations for v = u + R (spin J x + d) closest to g.
struct ComponentFit {
    double spin = 0.0;
    Vec2 shift;
    bool degenerate = false;
};

ComponentFit fit_component(const DisplacementField& u, const DisplacementField& g,
                           const Mat2& r, std::span<const int> cells, double w) {
    // Basis (all rotated by R): phi1 = J x, phi2 = e1, phi3 = e2. Target
    // z = R^T (g - u). Gram and rhs accumulated over cell centers.
    std::array<std::array<double, 3>, 3> gram{};
    std::array<double, 3> rhs{};
    const Mat2 rt = r.transpose();
    for (int c : cells) {
        const Vec2 xc = u.mesh.cell_center(c);
        const Vec2 jx{-xc.y, xc.x};
        const Vec2 z = rt * (g.value(c, xc) - u.value(c, xc));
        // columns: (jx, e1, e2)
        gram[0][0] += w * jx.dot(jx);
        gram[0][1] += w * jx.x;
        gram[0][2] += w * jx.y;
        gram[1][1] += w;
        gram[2][2] += w;
        rhs[0] += w * jx.dot(z);
        rhs[1] += w * z.x;
        rhs[2] += w * z.y;
    }
    gram[1][0] = gram[0][1];
    gram[2][0] = gram[0][2];
    gram[1][2] = gram[2][1] = 0.0;

    ComponentFit fit;
    // The Gram matrix is singular only when the centered second moment of
    // the cell centers vanishes (single cell). Fall back to translation.
    const double n = gram[1][1];
    const double det_reduced =
        gram[0][0] - (gram[0][1] * gram[0][1] + gram[0][2] * gram[0][2]) / n;
    if (det_reduced < 1e-12 * (1.0 + gram[0][0])) {
        fit.degenerate = true;
        fit.shift = {rhs[1] / n, rhs[2] / n};
        return fit;
    }
    auto a = gram;
    auto b = rhs;
    if (!solve_dense<3>(a, b)) {
        fit.degenerate = true;
        fit.shift = {rhs[1] / n, rhs[2] / n};
        return fit;
    }
    fit.spin = b[0];
    fit.shift = {b[1], b[2]};
    return fit;
}

}  // namespace

InfinitesimalProjection project_infinitesimal(const DisplacementField& u,
                                              const CacciopPartition& p,
                                              const PiecewiseRigidMotion& t,
                                              const DisplacementField& g) {
    if (!(u.mesh == p.mesh) || !(g.mesh == p.mesh))
        throw std::invalid_argument("project_infinitesimal: mesh mismatch");
    if (static_cast<int>(t.comp.size()) != p.count)
        throw std::invalid_argument("project_infinitesimal: component mismatch between P and T");

    InfinitesimalProjection out;
    out.motion.comp.resize(static_cast<size_t>(p.count));
    const double w = p.mesh.cell_area();
    for (int j = 0; j < p.count; ++j) {
        const auto cells = component_cells(p, j);
        const ComponentFit fit =
            fit_component(u, g, t.comp[static_cast<size_t>(j)].rotation(), cells, w);
        out.motion.comp[static_cast<size_t>(j)] = {fit.spin, fit.shift};
        out.degenerate = out.degenerate || fit.degenerate;
    }
    out.field = add_infinitesimal(u, p, t, out.motion);
    double d2 = 0.0;
    for (int c = 0; c < p.mesh.cell_count(); ++c) {
        const Vec2 xc = p.mesh.cell_center(c);
        d2 += w * (out.field.value(c, xc) - g.value(c, xc)).norm2();
    }
    out.distance = std::sqrt(d2);
    return out;
}

DiscreteDeformation piecewise_motion_field(const CacciopPartition& p,
                                           const PiecewiseRigidMotion& t) {
    if (static_cast<int>(t.comp.size()) != p.count)
        throw std::invalid_argument("piecewise_motion_field: component mismatch");
    DiscreteDeformation y = make_field(p.mesh);
    for (int c = 0; c < p.mesh.cell_count(); ++c) {
        const RigidMotion& rm = t.comp[static_cast<size_t>(p.label[static_cast<size_t>(c)])];
        y.grad[static_cast<size_t>(c)] = rm.rotation();
        y.shift[static_cast<size_t>(c)] = rm.shift;
    }
    y.open = interface_facets(p);
    return y;
}

DisplacementField add_infinitesimal(const DisplacementField& u, const CacciopPartition& p,
                                    const PiecewiseRigidMotion& t,
                                    const PiecewiseInfinitesimalMotion& m) {
    if (static_cast<int>(t.comp.size()) != p.count ||
        static_cast<int>(m.comp.size()) != p.count)
        throw std::invalid_argument("add_infinitesimal: component mismatch");
    DisplacementField v = u;
    for (int c = 0; c < p.mesh.cell_count(); ++c) {
        const int j = p.label[static_cast<size_t>(c)];
        const Mat2 r = t.comp[static_cast<size_t>(j)].rotation();
        const auto& mc = m.comp[static_cast<size_t>(j)];
        // grad(R (spin J x + d)) = spin R J, value shift R d.
        v.grad[static_cast<size_t>(c)] += mc.spin * (r * Mat2::spin_generator());
        v.shift[static_cast<size_t>(c)] += r * mc.shift;
    }
    return v;
}

}  // namespace fracture
