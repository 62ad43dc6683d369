#pragma once

#include <span>
#include <vector>

#include "fracture/field.hpp"
#include "fracture/partition.hpp"

namespace fracture {

/// Rotation stored as an angle so R in SO(2) holds by construction.
struct RigidMotion {
    double angle = 0.0;
    Vec2 shift;

    Mat2 rotation() const { return Mat2::rotation(angle); }
    Vec2 apply(const Vec2& x) const { return rotation() * x + shift; }
};

struct PiecewiseRigidMotion {
    std::vector<RigidMotion> comp;  // one per partition component
};

/// Per component a spin coefficient (A = spin * J, J the rotation generator)
/// and a translation; A = -A^T by construction.
struct PiecewiseInfinitesimalMotion {
    struct Component {
        double spin = 0.0;
        Vec2 shift;
    };
    std::vector<Component> comp;
};

struct RigidFit {
    RigidMotion motion;
    double residual = 0.0;   // weighted L2 residual of the fit
    bool degenerate = false; // single-cell fallback through the polar factor
};

/// Area-weighted 2D Procrustes over cell centers: (R, b) minimizing
/// sum_c |y(x_c) - (R x_c + b)|^2 area. A single-cell component is fitted
/// exactly through the polar factor of its gradient.
RigidFit fit_rigid(std::span<const int> cells, const DiscreteDeformation& y);

struct SkewExtract {
    double spin = 0.0;       // omega with R2 = R1 (Id + sqrt(eps) omega J) + O(eps)
    double remainder = 0.0;  // Frobenius norm of the O(eps) remainder
};

SkewExtract skew_from_pair(const RigidMotion& r1, const RigidMotion& r2, double eps);

struct InfinitesimalProjection {
    DisplacementField field;              // v = u + grad(T) m, closest to g
    double distance = 0.0;                // L2 distance from g
    PiecewiseInfinitesimalMotion motion;  // the minimizing m
    bool degenerate = false;              // translation-only fallback used
};

/// Least-squares projection onto u + grad(T) A(P): per component a
/// 3-parameter (spin, shift) linear fit minimizing ||v - g||_L2.
InfinitesimalProjection project_infinitesimal(const DisplacementField& u,
                                              const CacciopPartition& p,
                                              const PiecewiseRigidMotion& t,
                                              const DisplacementField& g);

/// The field T itself, with facet flags on the partition interfaces.
DiscreteDeformation piecewise_motion_field(const CacciopPartition& p,
                                           const PiecewiseRigidMotion& t);

/// The field u + grad(T) m on the components of p.
DisplacementField add_infinitesimal(const DisplacementField& u, const CacciopPartition& p,
                                    const PiecewiseRigidMotion& t,
                                    const PiecewiseInfinitesimalMotion& m);

}  // namespace fracture
