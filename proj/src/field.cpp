#include "fracture/field.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fracture/parallel.hpp"

namespace fracture {

CellwiseAffineField make_field(const GridMesh& mesh) {
    CellwiseAffineField y;
    y.mesh = mesh;
    y.grad.assign(static_cast<size_t>(mesh.cell_count()), Mat2::identity());
    y.shift.assign(static_cast<size_t>(mesh.cell_count()), Vec2{});
    y.open.assign(static_cast<size_t>(mesh.facet_count()), 0);
    return y;
}

JumpRecord jump_record(const CellwiseAffineField& y, int facet) {
    JumpRecord r;
    r.facet = facet;
    const Vec2 mid = y.mesh.facet_midpoint(facet);
    const int cm = y.mesh.facet_minus_cell(facet);
    const int cp = y.mesh.facet_plus_cell(facet);
    r.jump = y.value(cp, mid) - y.value(cm, mid);
    r.normal = y.mesh.facet_normal(facet);
    r.length = y.mesh.facet_length(facet);
    if (!y.open[static_cast<size_t>(facet)]) r.jump = Vec2{};
    return r;
}

double field_scale(const CellwiseAffineField& y) {
    double s = 0.0;
    for (size_t c = 0; c < y.grad.size(); ++c)
        s = std::max(s, y.grad[c].frobenius() + y.shift[c].norm());
    return s;
}

double continuity_tolerance(const CellwiseAffineField& y) {
    return 1e-9 * (1.0 + field_scale(y));
}

FieldDiagnostics validate_deformation(const DiscreteDeformation& y, double box_m) {
    FieldDiagnostics d;
    const GridMesh& m = y.mesh;
    for (int c = 0; c < m.cell_count(); ++c) {
        const auto sc = static_cast<size_t>(c);
        d.max_grad_norm = std::max(d.max_grad_norm, y.grad[sc].frobenius());
        if (y.grad[sc].det() <= 0.0) ++d.negative_det_cells;
        const Vec2 ctr = m.cell_center(c);
        for (int dx = -1; dx <= 1; dx += 2)
            for (int dy = -1; dy <= 1; dy += 2) {
                const Vec2 corner{ctr.x + 0.5 * dx * m.hx, ctr.y + 0.5 * dy * m.hy};
                d.max_value_norm = std::max(d.max_value_norm, y.value(c, corner).norm());
            }
    }
    const double tau = continuity_tolerance(y);
    for (int f = 0; f < m.facet_count(); ++f) {
        if (y.open[static_cast<size_t>(f)]) continue;
        const Vec2 mid = m.facet_midpoint(f);
        const Vec2 gap = y.value(m.facet_plus_cell(f), mid) - y.value(m.facet_minus_cell(f), mid);
        d.max_closed_residual = std::max(d.max_closed_residual, gap.norm());
    }
    if (d.max_grad_norm > box_m) {
        d.ok = false;
        d.problem = "gradient bound |F| <= M violated";
    } else if (d.max_value_norm > box_m) {
        d.ok = false;
        d.problem = "value bound |y| <= M violated";
    } else if (d.max_closed_residual > tau) {
        d.ok = false;
        d.problem = "closed facet violates continuity tolerance";
    }
    return d;
}

double jump_set_measure(const CellwiseAffineField& y) {
    const GridMesh& m = y.mesh;
    return par::sum(static_cast<size_t>(m.facet_count()), [&](size_t f) {
        return y.open[f] ? m.facet_length(static_cast<int>(f)) : 0.0;
    });
}

DiscreteDeformation build_affine(const GridMesh& mesh, const Mat2& f, const Vec2& d, double box_m) {
    if (f.frobenius() > box_m)
        throw std::invalid_argument("build_affine: |F| exceeds the gradient bound M");
    CellwiseAffineField y = make_field(mesh);
    for (auto& g : y.grad) g = f;
    for (auto& s : y.shift) s = d;
    return y;
}

double column_x(const GridMesh& mesh, int v) { return mesh.x_min() + (v + 1) * mesh.hx; }

int crack_column_near(const GridMesh& mesh, double p) {
    if (!(p > 0.0 && p < mesh.length))
        throw std::invalid_argument("crack position must lie strictly inside (0, l)");
    int best = -1;
    double best_d = std::numeric_limits<double>::max();
    for (int v = 0; v < mesh.nx - 1; ++v) {
        const double x = column_x(mesh, v);
        if (x <= 0.0 + 0.25 * mesh.hx || x >= mesh.length - 0.25 * mesh.hx) continue;
        const double dist = std::fabs(x - p);
        if (dist < best_d) {
            best_d = dist;
            best = v;
        }
    }
    if (best < 0) throw std::invalid_argument("mesh has no interior facet column inside (0, l)");
    return best;
}

DiscreteDeformation build_cracked(const GridMesh& mesh, double p, const AffineMap& left,
                                  const AffineMap& right, double box_m) {
    if (left.grad.frobenius() > box_m || right.grad.frobenius() > box_m)
        throw std::invalid_argument("build_cracked: |F| exceeds the gradient bound M");
    const int v = crack_column_near(mesh, p);
    const double xs = column_x(mesh, v);
    CellwiseAffineField y = make_field(mesh);
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const bool is_left = mesh.cell_center(c).x < xs;
        y.grad[static_cast<size_t>(c)] = is_left ? left.grad : right.grad;
        y.shift[static_cast<size_t>(c)] = is_left ? left.shift : right.shift;
    }
    for (int j = 0; j < mesh.ny; ++j) y.open[static_cast<size_t>(mesh.vertical_facet(v, j))] = 1;
    return y;
}

SliceRestriction slice_restriction(const DisplacementField& u, Axis xi, int index) {
    const GridMesh& m = u.mesh;
    SliceRestriction s;
    if (xi == Axis::X1) {
        const int j = index;
        const double y0 = (j + 0.5) * m.hy;
        for (int i = 0; i < m.nx; ++i) {
            const int c = m.cell_index(i, j);
            const Vec2 ctr = m.cell_center(c);
            s.t.push_back(ctr.x);
            s.value.push_back(u.value_at_center(c).x);
            s.slope.push_back(u.grad[static_cast<size_t>(c)].a11);
        }
        for (int v = 0; v < m.nx - 1; ++v) {
            const int f = m.vertical_facet(v, j);
            if (!u.open[static_cast<size_t>(f)]) continue;
            const Vec2 mid{column_x(m, v), y0};
            const Vec2 gap = u.value(m.facet_plus_cell(f), mid) - u.value(m.facet_minus_cell(f), mid);
            s.jumps.push_back({mid.x, gap.x});
        }
    } else {
        const int i = index;
        for (int j = 0; j < m.ny; ++j) {
            const int c = m.cell_index(i, j);
            const Vec2 ctr = m.cell_center(c);
            s.t.push_back(ctr.y);
            s.value.push_back(u.value_at_center(c).y);
            s.slope.push_back(u.grad[static_cast<size_t>(c)].a22);
        }
        for (int w = 0; w < m.ny - 1; ++w) {
            const int f = m.horizontal_facet(i, w);
            if (!u.open[static_cast<size_t>(f)]) continue;
            const Vec2 mid = m.facet_midpoint(f);
            const Vec2 gap = u.value(m.facet_plus_cell(f), mid) - u.value(m.facet_minus_cell(f), mid);
            s.jumps.push_back({mid.y, gap.y});
        }
    }
    return s;
}

std::string slice_to_csv(const SliceRestriction& s) {
    std::ostringstream out;
    out.precision(12);
    out << "t,value,slope\n";
    for (size_t i = 0; i < s.t.size(); ++i)
        out << s.t[i] << ',' << s.value[i] << ',' << s.slope[i] << '\n';
    out << "jump_t,jump_height\n";
    for (const auto& j : s.jumps) out << j.t << ',' << j.height << '\n';
    return out.str();
}

std::string field_to_json(const CellwiseAffineField& y) {
    nlohmann::json j;
    j["mesh"] = {{"l", y.mesh.length},
                 {"nx_core", y.mesh.nx - 2 * y.mesh.collar_cols},
                 {"ny", y.mesh.ny},
                 {"collar_cols", y.mesh.collar_cols}};
    auto& cells = j["cells"];
    cells = nlohmann::json::array();
    for (size_t c = 0; c < y.grad.size(); ++c) {
        const Mat2& f = y.grad[c];
        cells.push_back({f.a11, f.a12, f.a21, f.a22, y.shift[c].x, y.shift[c].y});
    }
    auto& open = j["open_facets"];
    open = nlohmann::json::array();
    for (size_t f = 0; f < y.open.size(); ++f)
        if (y.open[f]) open.push_back(static_cast<int>(f));
    return j.dump();
}

CellwiseAffineField field_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const auto& jm = j.at("mesh");
    GridMesh mesh(jm.at("l").get<double>(), jm.at("nx_core").get<int>(), jm.at("ny").get<int>(),
                  jm.value("collar_cols", 0));
    CellwiseAffineField y = make_field(mesh);
    const auto& cells = j.at("cells");
    if (static_cast<int>(cells.size()) != mesh.cell_count())
        throw std::invalid_argument("field_from_json: cell count mismatch");
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const auto& e = cells[static_cast<size_t>(c)];
        y.grad[static_cast<size_t>(c)] = Mat2{e[0], e[1], e[2], e[3]};
        y.shift[static_cast<size_t>(c)] = Vec2{e[4], e[5]};
    }
    for (const auto& f : j.at("open_facets")) {
        const int id = f.get<int>();
        if (id < 0 || id >= mesh.facet_count())
            throw std::invalid_argument("field_from_json: facet id out of range");
        y.open[static_cast<size_t>(id)] = 1;
    }
    return y;
}

}  // namespace fracture
