#include "fracture/mesh.hpp"

#include <algorithm>
#include <stdexcept>

namespace fracture {

GridMesh::GridMesh(double l, int nx_core, int ny_cells, int collar_columns) {
    if (l <= 0.0) throw std::invalid_argument("GridMesh: width must be positive");
    if (nx_core < 2 || ny_cells < 2) throw std::invalid_argument("GridMesh: need nx, ny >= 2");
    if (collar_columns < 0) throw std::invalid_argument("GridMesh: negative collar");
    length = l;
    ny = ny_cells;
    collar_cols = collar_columns;
    nx = nx_core + 2 * collar_columns;
    hx = l / nx_core;
    hy = 1.0 / ny;
    collar = collar_cols * hx;
}

double GridMesh::boundary_distance(const Vec2& p) const {
    const double dx = std::min(p.x - x_min(), (length + collar) - p.x);
    const double dy = std::min(p.y, 1.0 - p.y);
    return std::min(dx, dy);
}

}  // namespace fracture
