#include "fracture/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fracture {

namespace {

/// Compress arbitrary labels to 0..k-1 ordered by area (desc). Ties break by
/// the smallest cell index in the component: intrinsic to the geometry, so
/// independently constructed partitions of the same regions get identical
/// label fields.
CacciopPartition order_labels(const GridMesh& mesh, const std::vector<int>& raw) {
    if (static_cast<int>(raw.size()) != mesh.cell_count())
        throw std::invalid_argument("partition: label count != cell count");
    struct Info {
        double area = 0.0;
        int first_cell = std::numeric_limits<int>::max();
    };
    std::map<int, Info> by_label;
    for (size_t c = 0; c < raw.size(); ++c) {
        Info& info = by_label[raw[c]];
        info.area += mesh.cell_area();
        info.first_cell = std::min(info.first_cell, static_cast<int>(c));
    }

    std::vector<std::pair<int, Info>> order(by_label.begin(), by_label.end());
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second.area != b.second.area) return a.second.area > b.second.area;
        return a.second.first_cell < b.second.first_cell;
    });

    std::map<int, int> remap;
    CacciopPartition p;
    p.mesh = mesh;
    p.count = static_cast<int>(order.size());
    p.area.reserve(order.size());
    for (size_t k = 0; k < order.size(); ++k) {
        remap[order[k].first] = static_cast<int>(k);
        p.area.push_back(order[k].second.area);
    }
    p.label.resize(raw.size());
    for (size_t c = 0; c < raw.size(); ++c) p.label[c] = remap[raw[c]];
    return p;
}

}  // namespace

CacciopPartition make_partition(const GridMesh& mesh, const std::vector<int>& raw_labels) {
    return order_labels(mesh, raw_labels);
}

CacciopPartition trivial_partition(const GridMesh& mesh) {
    return order_labels(mesh, std::vector<int>(static_cast<size_t>(mesh.cell_count()), 0));
}

std::vector<int> component_cells(const CacciopPartition& p, int j) {
    std::vector<int> cells;
    for (int c = 0; c < p.mesh.cell_count(); ++c)
        if (p.label[static_cast<size_t>(c)] == j) cells.push_back(c);
    return cells;
}

PerimeterReport perimeters(const CacciopPartition& p) {
    PerimeterReport r;
    const int k = p.count;
    r.boundary_length.assign(static_cast<size_t>(k), 0.0);
    r.perimeter_in_domain.assign(static_cast<size_t>(k), 0.0);
    r.interface.assign(static_cast<size_t>(k), std::vector<double>(static_cast<size_t>(k), 0.0));

    const GridMesh& m = p.mesh;
    for (int f = 0; f < m.facet_count(); ++f) {
        const int a = p.label[static_cast<size_t>(m.facet_minus_cell(f))];
        const int b = p.label[static_cast<size_t>(m.facet_plus_cell(f))];
        if (a == b) continue;
        const double len = m.facet_length(f);
        r.interface[static_cast<size_t>(a)][static_cast<size_t>(b)] += len;
        r.interface[static_cast<size_t>(b)][static_cast<size_t>(a)] += len;
        r.perimeter_in_domain[static_cast<size_t>(a)] += len;
        r.perimeter_in_domain[static_cast<size_t>(b)] += len;
        r.interior_interface_total += len;
    }
    // Domain boundary share: boundary cell edges with no neighbour.
    for (int c = 0; c < m.cell_count(); ++c) {
        const int i = m.cell_i(c), j = m.cell_j(c);
        const int lab = p.label[static_cast<size_t>(c)];
        double edge = 0.0;
        if (i == 0) edge += m.hy;
        if (i == m.nx - 1) edge += m.hy;
        if (j == 0) edge += m.hx;
        if (j == m.ny - 1) edge += m.hx;
        r.boundary_length[static_cast<size_t>(lab)] += edge;
    }
    for (int j = 0; j < k; ++j)
        r.boundary_length[static_cast<size_t>(j)] += r.perimeter_in_domain[static_cast<size_t>(j)];
    return r;
}

bool is_coarser(const CacciopPartition& p2, const CacciopPartition& p1) {
    if (!(p1.mesh == p2.mesh)) throw std::invalid_argument("is_coarser: mesh mismatch");
    std::vector<int> host(static_cast<size_t>(p1.count), -1);
    for (size_t c = 0; c < p1.label.size(); ++c) {
        const int j1 = p1.label[c];
        const int j2 = p2.label[c];
        if (host[static_cast<size_t>(j1)] < 0)
            host[static_cast<size_t>(j1)] = j2;
        else if (host[static_cast<size_t>(j1)] != j2)
            return false;
    }
    return true;
}

CacciopPartition merge(const CacciopPartition& p, const std::vector<std::pair<int, int>>& pairs) {
    std::vector<int> parent(static_cast<size_t>(p.count));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[static_cast<size_t>(a)] != a) {
            parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
            a = parent[static_cast<size_t>(a)];
        }
        return a;
    };
    for (const auto& [a, b] : pairs) {
        if (!p.valid_component(a) || !p.valid_component(b))
            throw std::invalid_argument("merge: unknown component id");
        const int ra = find(a), rb = find(b);
        if (ra != rb) parent[static_cast<size_t>(std::max(ra, rb))] = std::min(ra, rb);
    }
    std::vector<int> raw(p.label.size());
    for (size_t c = 0; c < p.label.size(); ++c) raw[c] = find(p.label[c]);
    return make_partition(p.mesh, raw);
}

LocalStructureReport local_structure_check(const CacciopPartition& p) {
    LocalStructureReport r;
    const GridMesh& m = p.mesh;
    for (int f = 0; f < m.facet_count(); ++f) {
        const int a = p.label[static_cast<size_t>(m.facet_minus_cell(f))];
        const int b = p.label[static_cast<size_t>(m.facet_plus_cell(f))];
        r.max_components_per_facet = std::max(r.max_components_per_facet, a == b ? 1 : 2);
    }
    const PerimeterReport per = perimeters(p);
    for (int i = 0; i < p.count; ++i)
        for (int j = 0; j < p.count; ++j)
            if (per.interface[static_cast<size_t>(i)][static_cast<size_t>(j)] !=
                per.interface[static_cast<size_t>(j)][static_cast<size_t>(i)])
                r.interface_symmetric = false;
    const double sum =
        std::accumulate(per.perimeter_in_domain.begin(), per.perimeter_in_domain.end(), 0.0);
    r.doubling_identity_gap = std::fabs(sum - 2.0 * per.interior_interface_total);
    r.pass = r.interface_symmetric && r.max_components_per_facet <= 2 &&
             r.doubling_identity_gap <= 1e-12 * (1.0 + sum);
    return r;
}

std::vector<uint8_t> interface_facets(const CacciopPartition& p) {
    const GridMesh& m = p.mesh;
    std::vector<uint8_t> flags(static_cast<size_t>(m.facet_count()), 0);
    for (int f = 0; f < m.facet_count(); ++f) {
        const int a = p.label[static_cast<size_t>(m.facet_minus_cell(f))];
        const int b = p.label[static_cast<size_t>(m.facet_plus_cell(f))];
        if (a != b) flags[static_cast<size_t>(f)] = 1;
    }
    return flags;
}

std::string partition_to_json(const CacciopPartition& p) {
    nlohmann::json j;
    j["mesh"] = {{"l", p.mesh.length},
                 {"nx_core", p.mesh.nx - 2 * p.mesh.collar_cols},
                 {"ny", p.mesh.ny},
                 {"collar_cols", p.mesh.collar_cols}};
    auto& rows = j["rle_rows"];
    rows = nlohmann::json::array();
    for (int row = 0; row < p.mesh.ny; ++row) {
        nlohmann::json runs = nlohmann::json::array();
        int i = 0;
        while (i < p.mesh.nx) {
            const int lab = p.label[static_cast<size_t>(p.mesh.cell_index(i, row))];
            int len = 1;
            while (i + len < p.mesh.nx &&
                   p.label[static_cast<size_t>(p.mesh.cell_index(i + len, row))] == lab)
                ++len;
            runs.push_back({lab, len});
            i += len;
        }
        rows.push_back(runs);
    }
    return j.dump();
}

CacciopPartition partition_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const auto& jm = j.at("mesh");
    GridMesh mesh(jm.at("l").get<double>(), jm.at("nx_core").get<int>(), jm.at("ny").get<int>(),
                  jm.value("collar_cols", 0));
    std::vector<int> raw(static_cast<size_t>(mesh.cell_count()), 0);
    const auto& rows = j.at("rle_rows");
    if (static_cast<int>(rows.size()) != mesh.ny)
        throw std::invalid_argument("partition_from_json: row count mismatch");
    for (int row = 0; row < mesh.ny; ++row) {
        int i = 0;
        for (const auto& run : rows[static_cast<size_t>(row)]) {
            const int lab = run[0].get<int>();
            const int len = run[1].get<int>();
            for (int k = 0; k < len; ++k, ++i)
                raw[static_cast<size_t>(mesh.cell_index(i, row))] = lab;
        }
        if (i != mesh.nx) throw std::invalid_argument("partition_from_json: bad row length");
    }
    return make_partition(mesh, raw);
}

std::string interface_matrix_csv(const PerimeterReport& r) {
    std::ostringstream out;
    out.precision(12);
    const size_t k = r.interface.size();
    out << "component";
    for (size_t j = 0; j < k; ++j) out << ",P" << j;
    out << "\n";
    for (size_t i = 0; i < k; ++i) {
        out << 'P' << i;
        for (size_t j = 0; j < k; ++j) out << ',' << r.interface[i][j];
        out << "\n";
    }
    return out.str();
}

}  // namespace fracture
