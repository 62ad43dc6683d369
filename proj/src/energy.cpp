#include "fracture/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "fracture/parallel.hpp"

namespace fracture {

namespace {

void require_component_match(const LimitTriple& t) {
    if (static_cast<int>(t.motion.comp.size()) != t.part.count)
        throw std::invalid_argument("energy_limit: component mismatch between P and T");
    if (!(t.u.mesh == t.part.mesh))
        throw std::invalid_argument("energy_limit: mesh mismatch between u and P");
}

double bulk_nonlinear(const DiscreteDeformation& y, double eps, const EnergyDensity& density,
                      double box_m) {
    const GridMesh& m = y.mesh;
    const double area = m.cell_area();
    double max_grad = 0.0;
    for (const Mat2& f : y.grad) max_grad = std::max(max_grad, f.frobenius());
    if (max_grad > box_m)
        throw std::invalid_argument("energy: gradient bound |F| <= M violated");
    return par::sum(static_cast<size_t>(m.cell_count()), [&](size_t c) {
        if (m.is_collar(static_cast<int>(c))) return 0.0;
        return density.w(y.grad[c]) * area / eps;
    });
}

}  // namespace

EnergyBreakdown energy_nonlinear(const DiscreteDeformation& y, double eps,
                                 const EnergyDensity& density, double box_m) {
    if (eps <= 0.0) throw std::invalid_argument("energy_nonlinear: eps must be positive");
    EnergyBreakdown e;
    e.bulk = bulk_nonlinear(y, eps, density, box_m);
    e.inner_crack = jump_set_measure(y);
    return e;
}

EnergyBreakdown energy_auxiliary(const DiscreteDeformation& y, double eps, double rho,
                                 bool shrink, const EnergyDensity& density, double box_m) {
    if (eps <= 0.0 || rho <= 0.0)
        throw std::invalid_argument("energy_auxiliary: eps and rho must be positive");
    const GridMesh& m = y.mesh;
    if (rho > 0.5 * std::min(m.length + 2.0 * m.collar, 1.0))
        throw std::invalid_argument("energy_auxiliary: rho exceeds half the domain width");

    const double area = m.cell_area();
    double max_grad = 0.0;
    for (const Mat2& f : y.grad) max_grad = std::max(max_grad, f.frobenius());
    if (max_grad > box_m)
        throw std::invalid_argument("energy: gradient bound |F| <= M violated");

    EnergyBreakdown e;
    e.bulk = par::sum(static_cast<size_t>(m.cell_count()), [&](size_t c) {
        const int cell = static_cast<int>(c);
        if (m.is_collar(cell)) return 0.0;
        if (shrink && m.boundary_distance(m.cell_center(cell)) <= rho) return 0.0;
        return density.w(y.grad[c]) * area / eps;
    });
    const double cutoff = std::sqrt(eps) * rho;
    e.inner_crack = par::sum(static_cast<size_t>(m.facet_count()), [&](size_t f) {
        if (!y.open[f]) return 0.0;
        const int facet = static_cast<int>(f);
        if (shrink && m.boundary_distance(m.facet_midpoint(facet)) <= rho) return 0.0;
        const JumpRecord r = jump_record(y, facet);
        return std::min(r.jump.norm() / cutoff, 1.0) * r.length;
    });
    return e;
}

EnergyBreakdown energy_limit(const LimitTriple& t, const QuadraticForm& q) {
    require_component_match(t);
    const GridMesh& m = t.u.mesh;
    const double area = m.cell_area();
    const std::vector<uint8_t> iface = interface_facets(t.part);

    EnergyBreakdown e;
    e.bulk = par::sum(static_cast<size_t>(m.cell_count()), [&](size_t c) {
        if (m.is_collar(static_cast<int>(c))) return 0.0;
        const int j = t.part.label[c];
        const Mat2 rt = t.motion.comp[static_cast<size_t>(j)].rotation().transpose();
        return 0.5 * q(rt * t.u.grad[c]) * area;
    });
    e.inner_crack = par::sum(static_cast<size_t>(m.facet_count()), [&](size_t f) {
        return (t.u.open[f] && !iface[f]) ? m.facet_length(static_cast<int>(f)) : 0.0;
    });
    e.segmentation = par::sum(static_cast<size_t>(m.facet_count()), [&](size_t f) {
        return iface[f] ? m.facet_length(static_cast<int>(f)) : 0.0;
    });

    const EnergyBreakdown pc = energy_limit_percomponent(t, q);
    const double gap = std::fabs(pc.total() - e.total());
    if (gap > 1e-9 * (1.0 + e.total()))
        throw std::logic_error("energy_limit: per-component route disagrees with three-term route");
    return e;
}

EnergyBreakdown energy_limit_percomponent(const LimitTriple& t, const QuadraticForm& q) {
    require_component_match(t);
    const GridMesh& m = t.u.mesh;
    const double area = m.cell_area();
    EnergyBreakdown e;
    for (int j = 0; j < t.part.count; ++j) {
        const Mat2 rt = t.motion.comp[static_cast<size_t>(j)].rotation().transpose();
        double bulk_j = 0.0;
        for (int c = 0; c < m.cell_count(); ++c) {
            if (m.is_collar(c) || t.part.label[static_cast<size_t>(c)] != j) continue;
            bulk_j += 0.5 * q(rt * t.u.grad[static_cast<size_t>(c)]) * area;
        }
        double inner_j = 0.0;   // J_u inside the component interior (P_j)^1
        double shared_j = 0.0;  // d*P_j cap Omega, shared with the neighbour
        for (int f = 0; f < m.facet_count(); ++f) {
            const int a = t.part.label[static_cast<size_t>(m.facet_minus_cell(f))];
            const int b = t.part.label[static_cast<size_t>(m.facet_plus_cell(f))];
            if (a == j && b == j) {
                if (t.u.open[static_cast<size_t>(f)]) inner_j += m.facet_length(f);
            } else if (a == j || b == j) {
                shared_j += m.facet_length(f);
            }
        }
        e.bulk += bulk_j;
        e.inner_crack += inner_j;
        e.segmentation += 0.5 * shared_j;
    }
    return e;
}

SegmentationEnergy energy_seg(const DiscreteDeformation& y, double tol) {
    SegmentationEnergy out;
    for (const Mat2& f : y.grad) out.max_dist_so2 = std::max(out.max_dist_so2, dist_so2(f));
    if (out.max_dist_so2 > tol) return out;  // not piecewise rigid: +infinity flag
    out.piecewise_rigid = true;
    const GridMesh& m = y.mesh;
    const double jump_tol = continuity_tolerance(y);
    out.value = par::sum(static_cast<size_t>(m.facet_count()), [&](size_t f) {
        if (!y.open[f]) return 0.0;
        const JumpRecord r = jump_record(y, static_cast<int>(f));
        return r.jump.norm() > jump_tol ? r.length : 0.0;
    });
    return out;
}

EnergyBreakdown energy_loaded(const DiscreteDeformation& y, double eps, double lambda,
                              const DiscreteDeformation& f, const EnergyDensity& density,
                              double box_m) {
    if (!(y.mesh == f.mesh)) throw std::invalid_argument("energy_loaded: mesh mismatch");
    EnergyBreakdown e = energy_nonlinear(y, eps, density, box_m);
    const GridMesh& m = y.mesh;
    const double area = m.cell_area();
    e.load = (lambda / eps) * par::sum(static_cast<size_t>(m.cell_count()), [&](size_t c) {
        if (m.is_collar(static_cast<int>(c))) return 0.0;
        const int cell = static_cast<int>(c);
        const Vec2 xc = m.cell_center(cell);
        return (y.value(cell, xc) - f.value(cell, xc)).norm2() * area;
    });
    return e;
}

EnergyBreakdown energy_loaded_limit(const LimitTriple& t, double lambda,
                                    const DisplacementField& g, const LoadConstraint& constraint,
                                    const QuadraticForm& q) {
    EnergyBreakdown inf;
    inf.infinite = true;

    // Membership in C_g: T = T_g as a map and P_g coarser than P.
    if (!is_coarser(constraint.part_g, t.part)) return inf;
    // Host component of each P-component inside P_g.
    std::vector<int> host(static_cast<size_t>(t.part.count), -1);
    for (size_t c = 0; c < t.part.label.size(); ++c)
        host[static_cast<size_t>(t.part.label[c])] = constraint.part_g.label[c];
    for (int j = 0; j < t.part.count; ++j) {
        const RigidMotion& a = t.motion.comp[static_cast<size_t>(j)];
        const RigidMotion& b = constraint.motion_g.comp[static_cast<size_t>(host[static_cast<size_t>(j)])];
        const double gap = std::fabs(wrap_angle(a.angle - b.angle)) + (a.shift - b.shift).norm();
        if (gap > 1e-9) return inf;
    }

    EnergyBreakdown e = energy_limit(t, q);
    const InfinitesimalProjection proj = project_infinitesimal(t.u, t.part, t.motion, g);
    e.load = lambda * proj.distance * proj.distance;
    return e;
}

}  // namespace fracture
