#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "fracture/energy.hpp"

namespace fracture {

struct not_piecewise_rigid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Decomposition {
    CacciopPartition part;
    PiecewiseRigidMotion motion;
};

/// Region growing over the facet graph: adjacent cells join iff the facet is
/// closed and the two affine maps agree on its midpoint within tol. Each
/// component is then fitted by fit_rigid. Throws not_piecewise_rigid when a
/// cell gradient strays from SO(2) by more than tol.
Decomposition piecewise_rigid_decompose(const DiscreteDeformation& y, double tol);

/// u = eps^{-1/2} (y - T) cell-wise; facet flags inherited from y plus the
/// partition interfaces.
DisplacementField rescaled_displacement(const DiscreteDeformation& y, const CacciopPartition& p,
                                        const PiecewiseRigidMotion& t, double eps);

struct SequenceEntry {
    double eps = 0.0;
    CacciopPartition part;
    PiecewiseRigidMotion motion;
};

struct MergeDecision {
    int comp_i = 0;
    int comp_j = 0;
    bool merged = false;
    std::vector<double> scaled_separation;  // per sequence entry in the tail
};

struct CoarsestResult {
    CacciopPartition part;
    /// Motions of the merged components per sequence entry; a merged class
    /// inherits the motion of its smallest original index.
    std::vector<PiecewiseRigidMotion> motions;
    std::vector<MergeDecision> trace;
    /// Largest tail ratio among merged pairs and smallest among kept pairs:
    /// any threshold in between yields the same partition.
    double band_low = 0.0;
    double band_high = 0.0;
};

/// Finite-sequence stand-in for the coarsest-partition test: components i, j
/// merge when (|R_i - R_j| + |b_i - b_j|) / sqrt(eps_k) stays <= c_star over
/// the last `tail` entries. Components correspond across k by ordered index.
CoarsestResult coarsest_partition(std::span<const SequenceEntry> seq, double c_star = 10.0,
                                  int tail = 3);

/// Increasing piecewise-linear function given by breakpoints; extended
/// affinely beyond the last breakpoint.
struct PiecewiseLinear {
    std::vector<double> x;
    std::vector<double> y;

    double operator()(double t) const;
    double slope(size_t segment) const;
    size_t segments() const { return x.size() - 1; }
};

/// Constructive concave majorant bound: given strictly increasing (b_i),
/// builds an increasing concave psi with psi(b_i) <= 2^i (i starting at 1),
/// psi <= f for the piecewise-affine f with f(0) = 0, f(b_i) = 2^i, by
/// extending the incoming tangent across every convex kink of f.
PiecewiseLinear build_concave_majorant(std::span<const double> b);

}  // namespace fracture
