#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracture/density.hpp"
#include "fracture/mesh.hpp"

namespace fracture {

/// Cell-wise affine field y(x) = F_c x + d_c with an open/closed flag per
/// interior facet. The crack set lives on facets; flagged facets carry the
/// jump, all others must be continuous at the facet midpoint.
struct CellwiseAffineField {
    GridMesh mesh;
    std::vector<Mat2> grad;      // per cell
    std::vector<Vec2> shift;     // per cell
    std::vector<uint8_t> open;   // per facet

    Vec2 value(int cell, const Vec2& x) const { return grad[cell] * x + shift[cell]; }
    Vec2 value_at_center(int cell) const { return value(cell, mesh.cell_center(cell)); }
};

/// y in the nonlinear model: bounded values and gradients (SBV_M stand-in).
using DiscreteDeformation = CellwiseAffineField;
/// u in the limiting model: no magnitude bound.
using DisplacementField = CellwiseAffineField;

struct JumpRecord {
    int facet = -1;
    Vec2 jump;       // plus-side trace minus minus-side trace at the midpoint
    Vec2 normal;
    double length = 0.0;
};

CellwiseAffineField make_field(const GridMesh& mesh);

/// Trace difference across a facet, evaluated at the facet midpoint.
JumpRecord jump_record(const CellwiseAffineField& y, int facet);

/// Scale used for relative tolerances: max over cells of |F_c| + |d_c|.
double field_scale(const CellwiseAffineField& y);

/// Continuity tolerance tau_cont = 1e-9 (1 + field scale).
double continuity_tolerance(const CellwiseAffineField& y);

struct FieldDiagnostics {
    bool ok = true;
    double max_grad_norm = 0.0;
    double max_value_norm = 0.0;       // over cell corners
    double max_closed_residual = 0.0;  // midpoint mismatch on closed facets
    int negative_det_cells = 0;        // flagged: such gradients are far from SO(2)
    std::string problem;
};

/// Checks the SBV_M invariants: |F_c| <= M, corner values <= M, and midpoint
/// continuity across every closed facet.
FieldDiagnostics validate_deformation(const DiscreteDeformation& y, double box_m = kDefaultBoxBound);

/// H^1 surrogate of the jump set: total length of flagged facets.
double jump_set_measure(const CellwiseAffineField& y);

/// Globally affine field x -> F x + d, no open facets. Rejects |F| > M.
DiscreteDeformation build_affine(const GridMesh& mesh, const Mat2& f, const Vec2& d,
                                 double box_m = kDefaultBoxBound);

/// Piecewise affine field with open facets exactly on the vertical facet
/// column nearest to x1 = p; p must lie strictly inside (0, l).
DiscreteDeformation build_cracked(const GridMesh& mesh, double p, const AffineMap& left,
                                  const AffineMap& right, double box_m = kDefaultBoxBound);

/// Index of the vertical facet column nearest to x1 = p, strictly inside (0,l).
int crack_column_near(const GridMesh& mesh, double p);
double column_x(const GridMesh& mesh, int v);

struct SliceJump {
    double t = 0.0;
    double height = 0.0;  // [u . xi] at the crossing
};

/// One-dimensional restriction t -> u(s + t xi) . xi along a row (xi = e1)
/// or column (xi = e2) of cell centers.
struct SliceRestriction {
    std::vector<double> t;       // cell-center coordinates along the slice
    std::vector<double> value;   // u . xi at the centers
    std::vector<double> slope;   // xi^T F xi per cell
    std::vector<SliceJump> jumps;
};

enum class Axis { X1, X2 };

SliceRestriction slice_restriction(const DisplacementField& u, Axis xi, int index);

/// CSV export of a slice (t, value, slope) plus a jump table.
std::string slice_to_csv(const SliceRestriction& s);

// JSON (de)serialization of fields: mesh header + per-cell maps + open facets.
std::string field_to_json(const CellwiseAffineField& y);
CellwiseAffineField field_from_json(const std::string& text);

}  // namespace fracture
