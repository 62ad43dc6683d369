#pragma once

#include <string>
#include <vector>

#include "fracture/energy.hpp"

namespace fracture {

/// Uniaxial tension/compression boundary-value problem on (0,l) x (0,1)
/// with collar columns carrying the boundary condition y1 = (1 + a_eps) x1.
/// Collar cells have the first row of their affine map pinned; the second
/// row stays free, matching the constraint class which restricts y1 only.
struct CleavageProblem {
    GridMesh mesh;           // must have collar_cols >= 1
    double a = 0.0;          // limit strain, a_eps = a sqrt(eps)
    double a_eps = 0.0;
    double eps = 0.0;
    EnergyDensity density;
    QuadraticForm q;
    double alpha = 0.0;
    Mat2 fa;                 // F^a for this problem's a
    double box_m = kDefaultBoxBound;
};

CleavageProblem make_cleavage_problem(double l, int nx_core, int ny, int collar_cols, double a,
                                      double eps, const EnergyDensity& density,
                                      double box_m = kDefaultBoxBound);

/// min{ alpha l a^2 / 2, 1 }.
double limit_energy_formula(double a, double alpha, double l);

/// Crossover strain of the energy formula, sqrt(2 / (alpha l)).
double formula_crossover(double alpha, double l);
/// The printed critical strain sqrt(2 alpha / l); kept in reports beside the
/// formula crossover because the two disagree unless alpha = 1.
double printed_crossover(double alpha, double l);

enum class MinimizerKind { Elastic, Cracked, Other };

std::string to_string(MinimizerKind k);

struct Classification {
    MinimizerKind kind = MinimizerKind::Other;
    double crack_x = 0.0;  // p for Cracked
    double s = 0.0;        // vertical offset (left piece / whole body)
    double t = 0.0;        // vertical offset of the right piece
    double jump1 = 0.0;    // first-component jump across the crack
    double max_strain_gap = 0.0;
};

struct ClassifyContext {
    Mat2 fa;          // expected strain F^a
    double a = 0.0;   // expected crack opening l a
    double l = 1.0;
    double tol = 0.02;
};

/// Tags a rescaled displacement as Elastic (e(grad u) = F^a, no cracks),
/// Cracked (one full vertical open column, rigid sides, opening l a), or
/// Other. Collar cells carry boundary data and are ignored.
Classification classify(const DisplacementField& u, const ClassifyContext& ctx);

struct MinimizerReport {
    EnergyBreakdown energy;
    Classification cls;
    DisplacementField rescaled;     // eps^{-1/2}(y - id), mean of u2 quotiented out
    DiscreteDeformation deformation;
    double elastic_total = 0.0;     // candidate branch values (candidates solver)
    double cracked_total = 0.0;
    bool converged = true;
    int outer_iterations = 0;
    double continuity_residual = 0.0;
};

/// Evaluates the elastic branch (homogeneous affine competitor, descent from
/// the linearized strain sqrt(eps) F^a) and the cracked branch (rigid pieces
/// with one open facet column) and returns the lower of the two.
MinimizerReport solve_candidates(const CleavageProblem& prob);

struct AlternatingSchedule {
    int outer_max = 12;          // crack-flip rounds
    int flip_batch = 1;          // flips accepted per round
    double descent_tol = 1e-8;   // relative objective decrease cutoff
    int descent_max = 400;       // inner iterations per augmented-Lagrangian round
    int al_rounds = 24;          // multiplier updates per continuous solve
    bool column_moves = true;    // batch flips by facet column
    int facet_candidates = 8;    // facet-level trials per round in fallback mode
};

/// Alternating minimization: (a) descent over cell affine maps with closed
/// facets tied by an augmented Lagrangian, collar pinned; (b) trial crack
/// flips (whole columns, or single facets in fallback mode) accepted greedily
/// when the relaxed total energy drops.
MinimizerReport solve_alternating(const CleavageProblem& prob,
                                  const AlternatingSchedule& schedule = {});

struct SweepRow {
    double eps = 0.0;
    double a = 0.0;
    double candidate_total = 0.0;
    double alternating_total = 0.0;  // NaN when not run
    std::string candidate_kind;
    std::string alternating_kind;
    double crack_x = 0.0;
    double jump1 = 0.0;
    double formula = 0.0;
    double rel_gap = 0.0;  // |candidate - formula| / max(formula, 1e-12)
};

enum class SolveMode { Candidates, Alternating, Both };

struct SweepTable {
    std::vector<SweepRow> rows;
    double alpha = 0.0;
    double a_star = 0.0;
    double a_crit_printed = 0.0;
};

/// Per (a, eps): both solver energies, classification, limit formula value
/// and discrepancy. Rows ordered by (eps, a); cells run independently.
SweepTable sweep_cleavage(const std::vector<double>& a_grid, const std::vector<double>& eps_grid,
                          const CleavageProblem& prototype, SolveMode mode,
                          const AlternatingSchedule& schedule = {});

std::string sweep_to_csv(const SweepTable& table, const CleavageProblem& prototype,
                         SolveMode mode);
/// Whitespace-separated (a, energy, formula) rows for plotting.
std::string sweep_to_dat(const SweepTable& table);

}  // namespace fracture
