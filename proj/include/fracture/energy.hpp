#pragma once

#include "fracture/density.hpp"
#include "fracture/field.hpp"
#include "fracture/partition.hpp"
#include "fracture/rigid.hpp"

namespace fracture {

struct EnergyBreakdown {
    double bulk = 0.0;
    double inner_crack = 0.0;
    double segmentation = 0.0;
    double load = 0.0;
    bool infinite = false;

    double total() const { return bulk + inner_crack + segmentation + load; }
};

/// (u, P, T): displacement, Caccioppoli partition, piecewise rigid motion.
struct LimitTriple {
    DisplacementField u;
    CacciopPartition part;
    PiecewiseRigidMotion motion;
};

/// E_eps(y) = eps^-1 int W(grad y) + H^1(J_y). The bulk integral runs over
/// the core cells (the collar carries boundary data only); the surface term
/// counts every flagged facet, collar included.
EnergyBreakdown energy_nonlinear(const DiscreteDeformation& y, double eps,
                                 const EnergyDensity& density,
                                 double box_m = kDefaultBoxBound);

/// Auxiliary functional with truncated surface weight
/// f_eps_rho(t) = min{ t / (sqrt(eps) rho), 1 }. With shrink set, both terms
/// are restricted to cells/facets at distance > rho from the boundary.
EnergyBreakdown energy_auxiliary(const DiscreteDeformation& y, double eps, double rho,
                                 bool shrink, const EnergyDensity& density,
                                 double box_m = kDefaultBoxBound);

/// Linearized limit: bulk = int Q(e(grad(T)^T grad u))/2, inner crack =
/// open u-facets off the partition interfaces, segmentation = interior
/// interface length. Evaluates the per-component form as a cross-check and
/// throws std::logic_error if the two routes disagree.
EnergyBreakdown energy_limit(const LimitTriple& t, const QuadraticForm& q);

/// Per-component route: sum_j ( int_{P_j} Q(e(R_j^T grad u))/2
/// + H^1(J_u in the component interior) + H^1(d*P_j cap Omega)/2 ).
EnergyBreakdown energy_limit_percomponent(const LimitTriple& t, const QuadraticForm& q);

struct SegmentationEnergy {
    bool piecewise_rigid = false;  // false means the +infinity flag
    double value = 0.0;            // H^1(J_T) when piecewise rigid
    double max_dist_so2 = 0.0;
};

/// Finite iff every cell gradient is a rotation within tol; then returns the
/// length of facets carrying a genuine trace jump.
SegmentationEnergy energy_seg(const DiscreteDeformation& y, double tol = 1e-8);

/// F_eps(y) = E_eps(y) + (lambda/eps) ||y - f||^2_L2.
EnergyBreakdown energy_loaded(const DiscreteDeformation& y, double eps, double lambda,
                              const DiscreteDeformation& f, const EnergyDensity& density,
                              double box_m = kDefaultBoxBound);

struct LoadConstraint {
    CacciopPartition part_g;
    PiecewiseRigidMotion motion_g;
};

/// F_g: infinite unless T = T_g and P_g is coarser than P; otherwise
/// energy_limit + lambda * (projection distance)^2.
EnergyBreakdown energy_loaded_limit(const LimitTriple& t, double lambda,
                                    const DisplacementField& g, const LoadConstraint& constraint,
                                    const QuadraticForm& q);

}  // namespace fracture
