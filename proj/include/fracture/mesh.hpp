#pragma once

#include <cstdint>

#include "fracture/geometry.hpp"

namespace fracture {

/// Rectangular grid over (0,l) x (0,1), optionally widened by a boundary
/// collar of whole cell columns on the left and right:
/// (-eta, l+eta) x (0,1) with eta = collar_cols * hx. The lines x = 0 and
/// x = l then fall exactly on facet columns. Cells are indexed row-major,
/// cell = j*nx + i.
struct GridMesh {
    double length = 1.0;   // l
    int nx = 0;            // total cell columns, collar included
    int ny = 0;
    int collar_cols = 0;   // per side
    double collar = 0.0;   // eta
    double hx = 0.0;
    double hy = 0.0;

    GridMesh() = default;
    /// nx_core x ny cells over (0,l) x (0,1), plus collar_cols columns per side.
    GridMesh(double l, int nx_core, int ny_cells, int collar_columns = 0);

    int cell_count() const { return nx * ny; }
    int cell_index(int i, int j) const { return j * nx + i; }
    int cell_i(int cell) const { return cell % nx; }
    int cell_j(int cell) const { return cell / nx; }
    double x_min() const { return -collar; }

    Vec2 cell_center(int cell) const {
        return {x_min() + (cell_i(cell) + 0.5) * hx, (cell_j(cell) + 0.5) * hy};
    }
    double cell_area() const { return hx * hy; }
    bool is_collar(int cell) const {
        const int i = cell_i(cell);
        return i < collar_cols || i >= nx - collar_cols;
    }
    int core_cell_count() const { return (nx - 2 * collar_cols) * ny; }

    // Interior facets: vertical ones first (normal e1), id = v*ny + j for the
    // facet between cells (v,j) and (v+1,j); then horizontal ones (normal e2),
    // id = base + w*nx + i between (i,w) and (i,w+1).
    int vertical_facet_count() const { return (nx - 1) * ny; }
    int horizontal_facet_count() const { return nx * (ny - 1); }
    int facet_count() const { return vertical_facet_count() + horizontal_facet_count(); }
    bool facet_is_vertical(int f) const { return f < vertical_facet_count(); }

    int facet_minus_cell(int f) const {
        if (facet_is_vertical(f)) {
            const int v = f / ny, j = f % ny;
            return cell_index(v, j);
        }
        const int g = f - vertical_facet_count();
        const int w = g / nx, i = g % nx;
        return cell_index(i, w);
    }
    int facet_plus_cell(int f) const {
        if (facet_is_vertical(f)) {
            const int v = f / ny, j = f % ny;
            return cell_index(v + 1, j);
        }
        const int g = f - vertical_facet_count();
        const int w = g / nx, i = g % nx;
        return cell_index(i, w + 1);
    }
    Vec2 facet_normal(int f) const {
        return facet_is_vertical(f) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    }
    double facet_length(int f) const { return facet_is_vertical(f) ? hy : hx; }
    Vec2 facet_midpoint(int f) const {
        if (facet_is_vertical(f)) {
            const int v = f / ny, j = f % ny;
            return {x_min() + (v + 1) * hx, (j + 0.5) * hy};
        }
        const int g = f - vertical_facet_count();
        const int w = g / nx, i = g % nx;
        return {x_min() + (i + 0.5) * hx, (w + 1.0) * hy};
    }

    /// Facet id of the vertical facet in column v (x = x_min + (v+1) hx), row j.
    int vertical_facet(int v, int j) const { return v * ny + j; }
    int horizontal_facet(int i, int w) const { return vertical_facet_count() + w * nx + i; }

    /// Distance from a point to the boundary of the full rectangle.
    double boundary_distance(const Vec2& p) const;

    bool operator==(const GridMesh& o) const {
        return length == o.length && nx == o.nx && ny == o.ny && collar_cols == o.collar_cols;
    }
};

}  // namespace fracture
