#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fracture/energy.hpp"

namespace fracture {

/// Largest eps for which T + sqrt(eps) u stays inside the SBV_M box.
double recovery_admissible_eps(const LimitTriple& t, double box_m = kDefaultBoxBound);

/// y_k = T + sqrt(eps_k) u cell-wise, facet flags = u-flags plus partition
/// interfaces. Throws when the largest eps violates the M bound, reporting
/// the admissible range.
std::vector<DiscreteDeformation> recovery_sequence(const LimitTriple& t,
                                                   std::span<const double> eps_list,
                                                   double box_m = kDefaultBoxBound);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms of log-log residuals
    int dropped = 0;        // non-positive gaps removed
    bool exact = false;     // every gap vanished
};

/// Least-squares slope of log(gap) against log(eps).
RateFit rate_fit(std::span<const std::pair<double, double>> pairs);

struct LiminfEntry {
    double eps = 0.0;
    DiscreteDeformation y;
    LimitTriple triple;  // (u_k, P_k, T_k) compatible with y_k
};

struct LiminfReport {
    bool applicable = true;
    std::string reason;
    double max_ae_gap = 0.0;        // sup |u_k - eps^{-1/2}(y_k - T_k)| at centers
    double max_grad_ratio = 0.0;    // ||grad u_k||_inf / eps^{-1/8}
    double lhs_tail_min = 0.0;      // min of E_eps(y_k) over the tail
    double rhs = 0.0;               // E(u, P, T)
    bool holds = false;             // lhs_tail_min >= rhs - tol
    double bulk_lhs_tail = 0.0;
    double surface_lhs_tail = 0.0;
    double bulk_rhs = 0.0;
    double surface_rhs = 0.0;
};

/// Spot check of the liminf inequality along a supplied sequence. The
/// compatibility diagnostics (a.e. gap, gradient bound) gate the verdict:
/// when they fail the check reports "inapplicable" rather than a false pass.
LiminfReport liminf_check(const LimitTriple& limit, std::span<const LiminfEntry> seq,
                          const EnergyDensity& density, double tol = 1e-9,
                          double grad_bound_c = 10.0, int tail = 3);

/// theta_sigma(t) = min(t/sigma, 1) for sigma > 0, theta_0 = 1.
double theta_sigma(double t, double sigma);

struct SliceRegion {
    double x_lo = -std::numeric_limits<double>::infinity();
    double x_hi = std::numeric_limits<double>::infinity();
    double y_lo = -std::numeric_limits<double>::infinity();
    double y_hi = std::numeric_limits<double>::infinity();

    bool contains(const Vec2& p) const {
        return p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi;
    }
};

/// Slicing measure mu^{sigma,xi}(region): sum over slices of
/// theta_sigma(|[u] . xi|) at the slice jumps, weighted by the transverse
/// cell size. Counts only facets normal to xi whose jump has a nonzero xi
/// component, matching the scalar slice jump set.
double slice_measure(const DisplacementField& u, Axis xi, double sigma,
                     const SliceRegion& region = {});

struct LscReport {
    double limit_measure = 0.0;
    double tail_min = 0.0;
    bool holds = false;
    double max_cell_gap = 0.0;  // convergence diagnostic
};

/// Lower-semicontinuity spot check: slice_measure(u) <= tail min + tol.
LscReport lsc_spotcheck(std::span<const DisplacementField> seq, const DisplacementField& u,
                        Axis xi, double sigma, double tol = 1e-9, int tail = 3);

}  // namespace fracture
