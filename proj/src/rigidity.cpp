#include "fracture/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fracture {

Decomposition piecewise_rigid_decompose(const DiscreteDeformation& y, double tol) {
    const GridMesh& m = y.mesh;
    for (int c = 0; c < m.cell_count(); ++c)
        if (dist_so2(y.grad[static_cast<size_t>(c)]) > tol)
            throw not_piecewise_rigid("cell gradient is not a rotation within tolerance");

    std::vector<int> parent(static_cast<size_t>(m.cell_count()));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[static_cast<size_t>(a)] != a) {
            parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
            a = parent[static_cast<size_t>(a)];
        }
        return a;
    };
    for (int f = 0; f < m.facet_count(); ++f) {
        if (y.open[static_cast<size_t>(f)]) continue;
        const int cm = m.facet_minus_cell(f);
        const int cp = m.facet_plus_cell(f);
        const Vec2 mid = m.facet_midpoint(f);
        if ((y.value(cp, mid) - y.value(cm, mid)).norm() <= tol) {
            const int ra = find(cm), rb = find(cp);
            if (ra != rb) parent[static_cast<size_t>(std::max(ra, rb))] = std::min(ra, rb);
        }
    }
    std::vector<int> raw(static_cast<size_t>(m.cell_count()));
    for (int c = 0; c < m.cell_count(); ++c) raw[static_cast<size_t>(c)] = find(c);

    Decomposition out;
    out.part = make_partition(m, raw);
    out.motion.comp.resize(static_cast<size_t>(out.part.count));
    for (int j = 0; j < out.part.count; ++j) {
        const auto cells = component_cells(out.part, j);
        out.motion.comp[static_cast<size_t>(j)] = fit_rigid(cells, y).motion;
    }
    return out;
}

DisplacementField rescaled_displacement(const DiscreteDeformation& y, const CacciopPartition& p,
                                        const PiecewiseRigidMotion& t, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("rescaled_displacement: eps must be positive");
    if (!(y.mesh == p.mesh)) throw std::invalid_argument("rescaled_displacement: mesh mismatch");
    if (static_cast<int>(t.comp.size()) != p.count)
        throw std::invalid_argument("rescaled_displacement: component mismatch");
    const double inv = 1.0 / std::sqrt(eps);
    DisplacementField u = make_field(y.mesh);
    for (int c = 0; c < y.mesh.cell_count(); ++c) {
        const auto sc = static_cast<size_t>(c);
        const RigidMotion& rm = t.comp[static_cast<size_t>(p.label[sc])];
        u.grad[sc] = inv * (y.grad[sc] - rm.rotation());
        u.shift[sc] = inv * (y.shift[sc] - rm.shift);
    }
    const std::vector<uint8_t> iface = interface_facets(p);
    for (size_t f = 0; f < u.open.size(); ++f) u.open[f] = y.open[f] || iface[f];
    return u;
}

CoarsestResult coarsest_partition(std::span<const SequenceEntry> seq, double c_star, int tail) {
    if (seq.empty()) throw std::invalid_argument("coarsest_partition: empty sequence");
    const int k = seq[0].part.count;
    for (const auto& e : seq) {
        if (e.part.count != k || static_cast<int>(e.motion.comp.size()) != k)
            throw std::invalid_argument("coarsest_partition: inconsistent component counts");
        if (!(e.part.mesh == seq[0].part.mesh))
            throw std::invalid_argument("coarsest_partition: mesh mismatch");
    }
    const size_t first = seq.size() > static_cast<size_t>(tail) ? seq.size() - static_cast<size_t>(tail) : 0;

    CoarsestResult out;
    out.band_low = 0.0;
    out.band_high = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> to_merge;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            MergeDecision d;
            d.comp_i = i;
            d.comp_j = j;
            double worst = 0.0;
            for (size_t e = first; e < seq.size(); ++e) {
                const RigidMotion& a = seq[e].motion.comp[static_cast<size_t>(i)];
                const RigidMotion& b = seq[e].motion.comp[static_cast<size_t>(j)];
                const double sep =
                    (a.rotation() - b.rotation()).frobenius() + (a.shift - b.shift).norm();
                d.scaled_separation.push_back(sep / std::sqrt(seq[e].eps));
                worst = std::max(worst, d.scaled_separation.back());
            }
            d.merged = worst <= c_star;
            if (d.merged) {
                to_merge.emplace_back(i, j);
                out.band_low = std::max(out.band_low, worst);
            } else {
                out.band_high = std::min(out.band_high, worst);
            }
            out.trace.push_back(std::move(d));
        }
    }

    // Merge classes on the last (smallest-eps) partition; a class inherits
    // the motion of its smallest original index.
    const CacciopPartition& base = seq.back().part;
    out.part = merge(base, to_merge);

    std::vector<int> rep(static_cast<size_t>(out.part.count), k);
    for (size_t c = 0; c < base.label.size(); ++c) {
        const int merged_label = out.part.label[c];
        rep[static_cast<size_t>(merged_label)] =
            std::min(rep[static_cast<size_t>(merged_label)], base.label[c]);
    }
    out.motions.reserve(seq.size());
    for (const auto& e : seq) {
        PiecewiseRigidMotion t;
        t.comp.reserve(rep.size());
        for (int r : rep) t.comp.push_back(e.motion.comp[static_cast<size_t>(r)]);
        out.motions.push_back(std::move(t));
    }
    return out;
}

double PiecewiseLinear::operator()(double t) const {
    if (t <= x.front()) return y.front();
    for (size_t s = 0; s + 1 < x.size(); ++s)
        if (t <= x[s + 1])
            return y[s] + (y[s + 1] - y[s]) * (t - x[s]) / (x[s + 1] - x[s]);
    const size_t n = x.size() - 1;
    return y[n] + slope(n - 1) * (t - x[n]);
}

double PiecewiseLinear::slope(size_t segment) const {
    return (y[segment + 1] - y[segment]) / (x[segment + 1] - x[segment]);
}

PiecewiseLinear build_concave_majorant(std::span<const double> b) {
    if (b.empty()) throw std::invalid_argument("build_concave_majorant: empty input");
    double prev = 0.0;
    for (double v : b) {
        if (!(v > prev)) throw std::invalid_argument("build_concave_majorant: input not strictly increasing positive");
        prev = v;
    }

    // f(0) = 0, f(b_i) = 2^i, affine in between.
    const size_t n = b.size();
    std::vector<double> fx(n + 1), fy(n + 1);
    fx[0] = 0.0;
    fy[0] = 0.0;
    for (size_t i = 0; i < n; ++i) {
        fx[i + 1] = b[i];
        fy[i + 1] = std::ldexp(1.0, static_cast<int>(i) + 1);  // 2^{i+1} with i 0-based
    }
    auto fslope = [&](size_t seg) { return (fy[seg + 1] - fy[seg]) / (fx[seg + 1] - fx[seg]); };

    PiecewiseLinear psi;
    psi.x.push_back(fx[0]);
    psi.y.push_back(fy[0]);
    auto append = [&](double px, double py) {
        if (px <= psi.x.back() + 1e-15 * (1.0 + std::fabs(psi.x.back()))) return;
        psi.x.push_back(px);
        psi.y.push_back(py);
    };

    // Walk along f; at a convex kink extend the incoming tangent until it
    // meets f again (or runs out), then resume following f.
    size_t k = 0;                                        // current f-segment
    double prev_slope = std::numeric_limits<double>::infinity();
    while (k < n) {
        const double s = fslope(k);
        if (s <= prev_slope) {
            append(fx[k + 1], fy[k + 1]);
            prev_slope = s;
            ++k;
            continue;
        }
        // Tangent g(t) = f(fx[k]) + prev_slope (t - fx[k]) from the kink.
        const double x0 = fx[k];
        const double y0 = fy[k];
        auto g = [&](double t) { return y0 + prev_slope * (t - x0); };
        bool met = false;
        for (size_t s2 = k; s2 < n; ++s2) {
            const double gap_a = fy[s2] - g(fx[s2]);
            const double gap_b = fy[s2 + 1] - g(fx[s2 + 1]);
            if (s2 > k && gap_b <= 0.0) {
                // First return of f to the tangent; gap decreases linearly.
                const double fs = fslope(s2);
                const double tc = fx[s2] + gap_a / (prev_slope - fs);
                append(tc, g(tc));
                append(fx[s2 + 1], fy[s2 + 1]);
                prev_slope = fs;
                k = s2 + 1;
                met = true;
                break;
            }
        }
        if (!met) {
            append(fx[n], g(fx[n]));
            break;
        }
    }
    return psi;
}

}  // namespace fracture
