#pragma once

// Shared fixtures and generators for the test suites.

#include <queue>
#include <random>
#include <vector>

#include "fracture/energy.hpp"
#include "fracture/rigid.hpp"

namespace testsupport {

using namespace fracture;

/// Connected partition with up to max_components components: multi-source
/// growth from random seed cells over the facet graph.
inline CacciopPartition random_connected_partition(const GridMesh& mesh, int max_components,
                                                   std::mt19937& rng) {
    const int n = mesh.cell_count();
    std::uniform_int_distribution<int> comp_count(1, max_components);
    const int k = comp_count(rng);
    std::vector<int> raw(static_cast<size_t>(n), -1);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> frontier;
    for (int j = 0; j < k; ++j) {
        int seed = pick(rng);
        while (raw[static_cast<size_t>(seed)] >= 0) seed = pick(rng);
        raw[static_cast<size_t>(seed)] = j;
        frontier.push_back(seed);
    }
    // Randomized multi-source flood fill.
    while (!frontier.empty()) {
        std::uniform_int_distribution<size_t> fpick(0, frontier.size() - 1);
        const size_t fi = fpick(rng);
        const int c = frontier[fi];
        const int i = mesh.cell_i(c), j = mesh.cell_j(c);
        const int nbrs[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
        bool any = false;
        for (const auto& nb : nbrs) {
            if (nb[0] < 0 || nb[0] >= mesh.nx || nb[1] < 0 || nb[1] >= mesh.ny) continue;
            const int cn = mesh.cell_index(nb[0], nb[1]);
            if (raw[static_cast<size_t>(cn)] >= 0) continue;
            raw[static_cast<size_t>(cn)] = raw[static_cast<size_t>(c)];
            frontier.push_back(cn);
            any = true;
            break;
        }
        if (!any) {
            frontier[fi] = frontier.back();
            frontier.pop_back();
        }
    }
    return make_partition(mesh, raw);
}

inline PiecewiseRigidMotion random_motion(int components, std::mt19937& rng, double angle_scale = 0.3,
                                          double shift_scale = 0.5) {
    std::uniform_real_distribution<double> ang(-angle_scale, angle_scale);
    std::uniform_real_distribution<double> sh(-shift_scale, shift_scale);
    PiecewiseRigidMotion t;
    for (int j = 0; j < components; ++j) t.comp.push_back({ang(rng), Vec2{sh(rng), sh(rng)}});
    return t;
}

/// Piecewise-affine displacement subordinate to a second random connected
/// partition: per piece an affine map, facets flagged where traces differ.
/// Rescaled so the sup over cell corners stays below sup_bound.
inline DisplacementField random_displacement(const GridMesh& mesh, std::mt19937& rng,
                                             double sup_bound = 1.0, int max_pieces = 6) {
    const CacciopPartition pieces = random_connected_partition(mesh, max_pieces, rng);
    std::uniform_real_distribution<double> entry(-0.5, 0.5);
    std::vector<Mat2> g(static_cast<size_t>(pieces.count));
    std::vector<Vec2> d(static_cast<size_t>(pieces.count));
    for (int j = 0; j < pieces.count; ++j) {
        g[static_cast<size_t>(j)] = Mat2{entry(rng), entry(rng), entry(rng), entry(rng)};
        d[static_cast<size_t>(j)] = Vec2{entry(rng), entry(rng)};
    }
    DisplacementField u = make_field(mesh);
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const auto sc = static_cast<size_t>(c);
        const int j = pieces.label[sc];
        u.grad[sc] = g[static_cast<size_t>(j)];
        u.shift[sc] = d[static_cast<size_t>(j)];
    }
    double sup = 0.0;
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const Vec2 ctr = mesh.cell_center(c);
        for (int dx = -1; dx <= 1; dx += 2)
            for (int dy = -1; dy <= 1; dy += 2)
                sup = std::max(sup, u.value(c, {ctr.x + 0.5 * dx * mesh.hx,
                                                ctr.y + 0.5 * dy * mesh.hy})
                                        .norm());
    }
    if (sup > sup_bound) {
        const double s = sup_bound / sup * 0.95;
        for (auto& m : u.grad) m = s * m;
        for (auto& v : u.shift) v = s * v;
    }
    // Flag genuine trace mismatches so closed facets stay continuous.
    for (int f = 0; f < mesh.facet_count(); ++f) {
        const Vec2 mid = mesh.facet_midpoint(f);
        const Vec2 gap =
            u.value(mesh.facet_plus_cell(f), mid) - u.value(mesh.facet_minus_cell(f), mid);
        if (gap.norm() > 1e-12) u.open[static_cast<size_t>(f)] = 1;
    }
    return u;
}

/// Random bounded limit triple for recovery/energy-identity experiments.
inline LimitTriple random_triple(const GridMesh& mesh, std::mt19937& rng, int max_components = 4) {
    LimitTriple t;
    t.part = random_connected_partition(mesh, max_components, rng);
    t.motion = random_motion(t.part.count, rng);
    t.u = random_displacement(mesh, rng);
    return t;
}

}  // namespace testsupport
