#include "fracture/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fracture/parallel.hpp"

namespace fracture {

namespace {

/// Largest s >= 0 with |A + s B| <= M (Frobenius), by solving the quadratic.
double max_scale(double a2, double ab, double b2, double m) {
    // |A|^2 + 2 s (A:B) + s^2 |B|^2 = M^2
    if (b2 <= 0.0) return std::numeric_limits<double>::infinity();
    const double c = a2 - m * m;
    const double disc = ab * ab - b2 * c;
    if (disc < 0.0) return 0.0;
    const double s = (-ab + std::sqrt(disc)) / b2;
    return std::max(s, 0.0);
}

}  // namespace

double recovery_admissible_eps(const LimitTriple& t, double box_m) {
    const GridMesh& m = t.u.mesh;
    double s_max = std::numeric_limits<double>::infinity();
    for (int c = 0; c < m.cell_count(); ++c) {
        const auto sc = static_cast<size_t>(c);
        const RigidMotion& rm = t.motion.comp[static_cast<size_t>(t.part.label[sc])];
        const Mat2 r = rm.rotation();
        const Mat2& fu = t.u.grad[sc];
        s_max = std::min(s_max, max_scale(r.frobenius2(),
                                          r.a11 * fu.a11 + r.a12 * fu.a12 + r.a21 * fu.a21 +
                                              r.a22 * fu.a22,
                                          fu.frobenius2(), box_m));
        const Vec2 ctr = m.cell_center(c);
        for (int dx = -1; dx <= 1; dx += 2)
            for (int dy = -1; dy <= 1; dy += 2) {
                const Vec2 corner{ctr.x + 0.5 * dx * m.hx, ctr.y + 0.5 * dy * m.hy};
                const Vec2 a = rm.apply(corner);
                const Vec2 b = t.u.value(c, corner);
                s_max = std::min(s_max, max_scale(a.norm2(), a.dot(b), b.norm2(), box_m));
            }
    }
    return s_max * s_max;  // scale acts as sqrt(eps)
}

std::vector<DiscreteDeformation> recovery_sequence(const LimitTriple& t,
                                                   std::span<const double> eps_list,
                                                   double box_m) {
    if (static_cast<int>(t.motion.comp.size()) != t.part.count)
        throw std::invalid_argument("recovery_sequence: component mismatch");
    if (!(t.u.mesh == t.part.mesh))
        throw std::invalid_argument("recovery_sequence: mesh mismatch");
    const double eps_ok = recovery_admissible_eps(t, box_m);
    for (double eps : eps_list) {
        if (eps <= 0.0) throw std::invalid_argument("recovery_sequence: eps must be positive");
        if (eps > eps_ok) {
            std::ostringstream msg;
            msg << "recovery_sequence: eps = " << eps
                << " violates the SBV_M bound; admissible range is (0, " << eps_ok << "]";
            throw std::invalid_argument(msg.str());
        }
    }

    const GridMesh& m = t.u.mesh;
    const std::vector<uint8_t> iface = interface_facets(t.part);
    std::vector<DiscreteDeformation> out;
    out.reserve(eps_list.size());
    for (double eps : eps_list) {
        const double s = std::sqrt(eps);
        DiscreteDeformation y = make_field(m);
        for (int c = 0; c < m.cell_count(); ++c) {
            const auto sc = static_cast<size_t>(c);
            const RigidMotion& rm = t.motion.comp[static_cast<size_t>(t.part.label[sc])];
            y.grad[sc] = rm.rotation() + s * t.u.grad[sc];
            y.shift[sc] = rm.shift + s * t.u.shift[sc];
        }
        for (size_t f = 0; f < y.open.size(); ++f) y.open[f] = t.u.open[f] || iface[f];
        out.push_back(std::move(y));
    }
    return out;
}

RateFit rate_fit(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 3) throw std::invalid_argument("rate_fit: need at least 3 pairs");
    std::vector<double> lx, ly;
    RateFit out;
    for (const auto& [eps, gap] : pairs) {
        if (gap <= 0.0) {
            ++out.dropped;
            continue;
        }
        lx.push_back(std::log(eps));
        ly.push_back(std::log(gap));
    }
    if (lx.empty()) {
        out.exact = true;
        out.slope = std::numeric_limits<double>::infinity();
        return out;
    }
    if (lx.size() < 2) {
        out.slope = std::numeric_limits<double>::infinity();
        out.exact = true;
        return out;
    }
    const size_t n = lx.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double r2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (out.intercept + out.slope * lx[i]);
        r2 += r * r;
    }
    out.residual = std::sqrt(r2 / static_cast<double>(n));
    return out;
}

LiminfReport liminf_check(const LimitTriple& limit, std::span<const LiminfEntry> seq,
                          const EnergyDensity& density, double tol, double grad_bound_c,
                          int tail) {
    LiminfReport rep;
    if (seq.empty()) {
        rep.applicable = false;
        rep.reason = "empty sequence";
        return rep;
    }
    const GridMesh& m = limit.u.mesh;

    for (const LiminfEntry& e : seq) {
        const DisplacementField resc = [&] {
            DisplacementField r = make_field(m);
            const double inv = 1.0 / std::sqrt(e.eps);
            for (int c = 0; c < m.cell_count(); ++c) {
                const auto sc = static_cast<size_t>(c);
                const RigidMotion& rm =
                    e.triple.motion.comp[static_cast<size_t>(e.triple.part.label[sc])];
                r.grad[sc] = inv * (e.y.grad[sc] - rm.rotation());
                r.shift[sc] = inv * (e.y.shift[sc] - rm.shift);
            }
            return r;
        }();
        double gap = 0.0, gmax = 0.0;
        for (int c = 0; c < m.cell_count(); ++c) {
            const auto sc = static_cast<size_t>(c);
            gap = std::max(gap, (e.triple.u.value_at_center(c) - resc.value_at_center(c)).norm());
            gmax = std::max(gmax, e.triple.u.grad[sc].frobenius());
        }
        rep.max_ae_gap = std::max(rep.max_ae_gap, gap);
        rep.max_grad_ratio =
            std::max(rep.max_grad_ratio, gmax / (grad_bound_c * std::pow(e.eps, -0.125)));
    }
    if (rep.max_ae_gap > 1e-6 * (1.0 + field_scale(limit.u))) {
        rep.applicable = false;
        rep.reason = "u_k does not track eps^{-1/2}(y_k - T_k)";
    }
    if (rep.max_grad_ratio > 1.0) {
        rep.applicable = false;
        rep.reason = "gradient bound c eps^{-1/8} violated";
    }

    const QuadraticForm q = hessian_q(density);
    const EnergyBreakdown rhs = energy_limit(limit, q);
    rep.rhs = rhs.total();
    rep.bulk_rhs = rhs.bulk;
    rep.surface_rhs = rhs.inner_crack + rhs.segmentation;

    const size_t first = seq.size() > static_cast<size_t>(tail) ? seq.size() - static_cast<size_t>(tail) : 0;
    rep.lhs_tail_min = std::numeric_limits<double>::max();
    rep.bulk_lhs_tail = std::numeric_limits<double>::max();
    rep.surface_lhs_tail = std::numeric_limits<double>::max();
    for (size_t i = first; i < seq.size(); ++i) {
        const EnergyBreakdown e = energy_nonlinear(seq[i].y, seq[i].eps, density);
        rep.lhs_tail_min = std::min(rep.lhs_tail_min, e.total());
        rep.bulk_lhs_tail = std::min(rep.bulk_lhs_tail, e.bulk);
        rep.surface_lhs_tail = std::min(rep.surface_lhs_tail, e.inner_crack + e.segmentation);
    }
    rep.holds = rep.applicable && rep.lhs_tail_min >= rep.rhs - tol * (1.0 + rep.rhs);
    return rep;
}

double theta_sigma(double t, double sigma) {
    if (sigma == 0.0) return 1.0;
    return std::min(t / sigma, 1.0);
}

double slice_measure(const DisplacementField& u, Axis xi, double sigma,
                     const SliceRegion& region) {
    if (sigma < 0.0) throw std::invalid_argument("slice_measure: sigma must be nonnegative");
    const GridMesh& m = u.mesh;
    const double jump_floor = 1e-13 * (1.0 + field_scale(u));
    // Only facets normal to xi intersect the slice family transversally;
    // the transverse weight is the slice spacing.
    const double weight = xi == Axis::X1 ? m.hy : m.hx;
    return par::sum(static_cast<size_t>(m.facet_count()), [&](size_t f) {
        if (!u.open[f]) return 0.0;
        const int fi = static_cast<int>(f);
        const bool match = (xi == Axis::X1) == m.facet_is_vertical(fi);
        if (!match) return 0.0;
        if (!region.contains(m.facet_midpoint(fi))) return 0.0;
        const JumpRecord r = jump_record(u, fi);
        const double h = xi == Axis::X1 ? std::fabs(r.jump.x) : std::fabs(r.jump.y);
        if (h <= jump_floor) return 0.0;  // not a jump of the scalar slice
        return theta_sigma(h, sigma) * weight;
    });
}

LscReport lsc_spotcheck(std::span<const DisplacementField> seq, const DisplacementField& u,
                        Axis xi, double sigma, double tol, int tail) {
    if (seq.empty()) throw std::invalid_argument("lsc_spotcheck: empty sequence");
    LscReport rep;
    rep.limit_measure = slice_measure(u, xi, sigma);
    const size_t first = seq.size() > static_cast<size_t>(tail) ? seq.size() - static_cast<size_t>(tail) : 0;
    rep.tail_min = std::numeric_limits<double>::max();
    for (size_t i = first; i < seq.size(); ++i)
        rep.tail_min = std::min(rep.tail_min, slice_measure(seq[i], xi, sigma));
    const DisplacementField& last = seq.back();
    for (int c = 0; c < u.mesh.cell_count(); ++c)
        rep.max_cell_gap =
            std::max(rep.max_cell_gap, (last.value_at_center(c) - u.value_at_center(c)).norm());
    rep.holds = rep.limit_measure <= rep.tail_min + tol * (1.0 + rep.limit_measure);
    return rep;
}

}  // namespace fracture
