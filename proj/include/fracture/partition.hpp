#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fracture/mesh.hpp"

namespace fracture {

/// Caccioppoli partition as a cell label field. Components are label
/// classes (not necessarily connected) and are kept ordered by area,
/// ties broken by the smallest original label.
struct CacciopPartition {
    GridMesh mesh;
    std::vector<int> label;      // per cell, in [0, count)
    int count = 0;
    std::vector<double> area;    // per component, non-increasing

    bool valid_component(int j) const { return j >= 0 && j < count; }
};

/// Builds an ordered partition from raw labels (any integers).
CacciopPartition make_partition(const GridMesh& mesh, const std::vector<int>& raw_labels);

/// Single-component partition covering the whole mesh.
CacciopPartition trivial_partition(const GridMesh& mesh);

/// Cells of one component.
std::vector<int> component_cells(const CacciopPartition& p, int j);

struct PerimeterReport {
    /// Per component: length of facets separating it from other components
    /// plus its share of the domain boundary.
    std::vector<double> boundary_length;
    /// Per component: essential boundary inside the domain only.
    std::vector<double> perimeter_in_domain;
    /// Symmetric matrix of interface lengths H^1(d*P_i cap d*P_j), i != j.
    std::vector<std::vector<double>> interface;
    double interior_interface_total = 0.0;
};

PerimeterReport perimeters(const CacciopPartition& p);

/// Subordination partial order: true iff every p1-component is contained in
/// a single p2-component (p2 >= p1). Throws on mesh mismatch.
bool is_coarser(const CacciopPartition& p2, const CacciopPartition& p1);

/// Union-find closure of the given component pairs; result reordered by area.
CacciopPartition merge(const CacciopPartition& p, const std::vector<std::pair<int, int>>& pairs);

struct LocalStructureReport {
    bool pass = true;
    int max_components_per_facet = 0;  // always <= 2 on a facet mesh
    bool interface_symmetric = true;
    /// sum_j perimeter_in_domain(j) == 2 * interior_interface_total
    double doubling_identity_gap = 0.0;
};

LocalStructureReport local_structure_check(const CacciopPartition& p);

/// Partition interfaces as facet flags (1 on facets whose incident cells
/// carry different labels).
std::vector<uint8_t> interface_facets(const CacciopPartition& p);

// Run-length encoded label rows (JSON) and interface matrix (CSV).
std::string partition_to_json(const CacciopPartition& p);
CacciopPartition partition_from_json(const std::string& text);
std::string interface_matrix_csv(const PerimeterReport& r);

}  // namespace fracture
