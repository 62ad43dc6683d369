#include "fracture/cleavage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "fracture/parallel.hpp"
#include "fracture/rigidity.hpp"

namespace fracture {

CleavageProblem make_cleavage_problem(double l, int nx_core, int ny, int collar_cols, double a,
                                      double eps, const EnergyDensity& density, double box_m) {
    if (collar_cols < 1)
        throw std::invalid_argument("cleavage: need at least one collar column per side");
    if (eps <= 0.0) throw std::invalid_argument("cleavage: eps must be positive");
    CleavageProblem p;
    p.mesh = GridMesh(l, nx_core, ny, collar_cols);
    p.a = a;
    p.eps = eps;
    p.a_eps = a * std::sqrt(eps);
    p.density = density;
    p.q = hessian_q(density);
    const UniaxialOptimum opt = alpha_and_fa(p.q, a);
    p.alpha = opt.alpha;
    p.fa = opt.fa;
    p.box_m = box_m;
    if (std::fabs(1.0 + p.a_eps) + std::fabs(p.fa.frobenius() * std::sqrt(eps)) > box_m)
        throw std::invalid_argument("cleavage: boundary strain exceeds the box bound M");
    return p;
}

double limit_energy_formula(double a, double alpha, double l) {
    return std::min(0.5 * alpha * l * a * a, 1.0);
}

double formula_crossover(double alpha, double l) { return std::sqrt(2.0 / (alpha * l)); }
double printed_crossover(double alpha, double l) { return std::sqrt(2.0 * alpha / l); }

std::string to_string(MinimizerKind k) {
    switch (k) {
        case MinimizerKind::Elastic: return "elastic";
        case MinimizerKind::Cracked: return "cracked";
        default: return "other";
    }
}

namespace {

Mat2 collar_pin_grad(const CleavageProblem& prob, const Mat2& current) {
    return {1.0 + prob.a_eps, 0.0, current.a21, current.a22};
}

void apply_pin(const CleavageProblem& prob, DiscreteDeformation& y) {
    const GridMesh& m = y.mesh;
    for (int c = 0; c < m.cell_count(); ++c) {
        if (!m.is_collar(c)) continue;
        const auto sc = static_cast<size_t>(c);
        y.grad[sc] = collar_pin_grad(prob, y.grad[sc]);
        y.shift[sc].x = 0.0;
    }
}

/// Stretched collar map satisfying the boundary condition with y2 = x2 + t.
AffineMap collar_map(const CleavageProblem& prob, double vertical_shift) {
    return {Mat2::diag(1.0 + prob.a_eps, 1.0), Vec2{0.0, vertical_shift}};
}

DiscreteDeformation homogeneous_elastic_field(const CleavageProblem& prob, const Mat2& g) {
    DiscreteDeformation y = make_field(prob.mesh);
    const Mat2 f = Mat2::identity() + g;
    for (auto& gc : y.grad) gc = f;
    return y;
}

/// Minimize W(Id + G) over the two free entries of the second row, the first
/// row being fixed to (a_eps, 0) by the boundary condition.
Mat2 elastic_strain(const CleavageProblem& prob) {
    Mat2 g{prob.a_eps, 0.0, std::sqrt(prob.eps) * prob.fa.a21, std::sqrt(prob.eps) * prob.fa.a22};
    const Mat2 id = Mat2::identity();
    double w = prob.density.w(id + g);
    for (int it = 0; it < 400; ++it) {
        const Mat2 dw = prob.density.dw(id + g);
        const Vec2 grad{dw.a21, dw.a22};
        if (grad.norm() < 1e-14 * (1.0 + w)) break;
        double step = 0.25;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            Mat2 trial = g;
            trial.a21 -= step * grad.x;
            trial.a22 -= step * grad.y;
            const double wt = prob.density.w(id + trial);
            if (wt < w - 1e-4 * step * grad.norm2()) {
                g = trial;
                w = wt;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return g;
}

/// Two rigid pieces joined by one open facet column, collars stretched.
DiscreteDeformation cracked_field(const CleavageProblem& prob, int column, double s_left,
                                  double t_right) {
    const GridMesh& m = prob.mesh;
    const double xs = column_x(m, column);
    const double opening = m.length * prob.a_eps;
    DiscreteDeformation y = make_field(m);
    const AffineMap left_collar = collar_map(prob, s_left);
    const AffineMap right_collar = collar_map(prob, t_right);
    for (int c = 0; c < m.cell_count(); ++c) {
        const auto sc = static_cast<size_t>(c);
        const double x = m.cell_center(c).x;
        if (m.is_collar(c)) {
            const AffineMap& map = x < 0.5 * m.length ? left_collar : right_collar;
            y.grad[sc] = map.grad;
            y.shift[sc] = map.shift;
        } else if (x < xs) {
            y.shift[sc] = Vec2{0.0, s_left};
        } else {
            y.shift[sc] = Vec2{opening, t_right};
        }
    }
    for (int j = 0; j < m.ny; ++j) y.open[static_cast<size_t>(m.vertical_facet(column, j))] = 1;
    return y;
}

// ---------------------------------------------------------------------------
// Augmented-Lagrangian descent for the continuous step: minimize the bulk
// energy over cell affine maps with closed facets tied at their midpoints.

struct GradientArrays {
    std::vector<Mat2> f;
    std::vector<Vec2> d;
};

double al_objective(const CleavageProblem& prob, const DiscreteDeformation& y,
                    const std::vector<Vec2>& lam, double kappa) {
    const GridMesh& m = y.mesh;
    const double area = m.cell_area();
    const double bulk = par::sum(static_cast<size_t>(m.cell_count()), [&](size_t c) {
        if (m.is_collar(static_cast<int>(c))) return 0.0;
        return prob.density.w(y.grad[c]) * area / prob.eps;
    });
    const double cons = par::sum(static_cast<size_t>(m.facet_count()), [&](size_t f) {
        if (y.open[f]) return 0.0;
        const int fi = static_cast<int>(f);
        const Vec2 mid = m.facet_midpoint(fi);
        const Vec2 gap =
            y.value(m.facet_plus_cell(fi), mid) - y.value(m.facet_minus_cell(fi), mid);
        return m.facet_length(fi) * (lam[f].dot(gap) + kappa * gap.norm2());
    });
    return bulk + cons;
}

void al_gradient(const CleavageProblem& prob, const DiscreteDeformation& y,
                 const std::vector<Vec2>& lam, double kappa, GradientArrays& g) {
    const GridMesh& m = y.mesh;
    const double area = m.cell_area();
    g.f.assign(static_cast<size_t>(m.cell_count()), Mat2::zero());
    g.d.assign(static_cast<size_t>(m.cell_count()), Vec2{});
    par::for_each(static_cast<size_t>(m.cell_count()), [&](size_t c) {
        if (!m.is_collar(static_cast<int>(c)))
            g.f[c] = (area / prob.eps) * prob.density.dw(y.grad[c]);
    });
    // Facet terms touch two cells; accumulate serially to stay deterministic.
    for (int f = 0; f < m.facet_count(); ++f) {
        const auto sf = static_cast<size_t>(f);
        if (y.open[sf]) continue;
        const Vec2 mid = m.facet_midpoint(f);
        const int cp = m.facet_plus_cell(f);
        const int cm = m.facet_minus_cell(f);
        const Vec2 gap = y.value(cp, mid) - y.value(cm, mid);
        const Vec2 q = m.facet_length(f) * (lam[sf] + 2.0 * kappa * gap);
        g.d[static_cast<size_t>(cp)] += q;
        g.f[static_cast<size_t>(cp)] += Mat2::outer(q, mid);
        g.d[static_cast<size_t>(cm)] -= q;
        g.f[static_cast<size_t>(cm)] -= Mat2::outer(q, mid);
    }
    for (int c = 0; c < m.cell_count(); ++c) {
        if (!m.is_collar(c)) continue;
        const auto sc = static_cast<size_t>(c);
        g.f[sc].a11 = g.f[sc].a12 = 0.0;
        g.d[sc].x = 0.0;
    }
}

double grad_norm2(const GradientArrays& g) {
    double s = 0.0;
    for (size_t c = 0; c < g.f.size(); ++c) s += g.f[c].frobenius2() + g.d[c].norm2();
    return s;
}

double arrays_dot(const GradientArrays& a, const GradientArrays& b) {
    double s = 0.0;
    for (size_t c = 0; c < a.f.size(); ++c) {
        s += a.f[c].a11 * b.f[c].a11 + a.f[c].a12 * b.f[c].a12 + a.f[c].a21 * b.f[c].a21 +
             a.f[c].a22 * b.f[c].a22 + a.d[c].dot(b.d[c]);
    }
    return s;
}

void project_pinned(const CleavageProblem& prob, GradientArrays& g) {
    const GridMesh& m = prob.mesh;
    for (int c = 0; c < m.cell_count(); ++c) {
        if (!m.is_collar(c)) continue;
        const auto sc = static_cast<size_t>(c);
        g.f[sc].a11 = g.f[sc].a12 = 0.0;
        g.d[sc].x = 0.0;
    }
}

/// Surrogate Hessian: exact quadratic penalty part plus a curvature bound
/// L on the bulk (the bulk depends on the gradients only). Pinned collar
/// components are projected out.
void apply_hessian(const CleavageProblem& prob, const DiscreteDeformation& y, double kappa,
                   double bulk_l, const GradientArrays& in, GradientArrays& out) {
    const GridMesh& m = prob.mesh;
    const double wb = bulk_l * m.cell_area() / prob.eps;
    out.f.assign(in.f.size(), Mat2::zero());
    out.d.assign(in.d.size(), Vec2{});
    for (int c = 0; c < m.cell_count(); ++c) {
        const auto sc = static_cast<size_t>(c);
        if (!m.is_collar(c)) out.f[sc] = wb * in.f[sc];
    }
    for (int f = 0; f < m.facet_count(); ++f) {
        const auto sf = static_cast<size_t>(f);
        if (y.open[sf]) continue;
        const Vec2 mid = m.facet_midpoint(f);
        const int cp = m.facet_plus_cell(f);
        const int cm = m.facet_minus_cell(f);
        const Vec2 dm = (in.f[static_cast<size_t>(cp)] * mid + in.d[static_cast<size_t>(cp)]) -
                        (in.f[static_cast<size_t>(cm)] * mid + in.d[static_cast<size_t>(cm)]);
        const Vec2 q = 2.0 * kappa * m.facet_length(f) * dm;
        out.d[static_cast<size_t>(cp)] += q;
        out.f[static_cast<size_t>(cp)] += Mat2::outer(q, mid);
        out.d[static_cast<size_t>(cm)] -= q;
        out.f[static_cast<size_t>(cm)] -= Mat2::outer(q, mid);
    }
    project_pinned(prob, out);
}

/// Diagonal of the surrogate Hessian for Jacobi preconditioning. Pinned or
/// otherwise untouched components get 1 so the projected residual is safe.
void hessian_diagonal(const CleavageProblem& prob, const DiscreteDeformation& y, double kappa,
                      double bulk_l, GradientArrays& diag) {
    const GridMesh& m = prob.mesh;
    const double wb = bulk_l * m.cell_area() / prob.eps;
    diag.f.assign(static_cast<size_t>(m.cell_count()), Mat2::zero());
    diag.d.assign(static_cast<size_t>(m.cell_count()), Vec2{});
    for (int c = 0; c < m.cell_count(); ++c)
        if (!m.is_collar(c)) diag.f[static_cast<size_t>(c)] = Mat2{wb, wb, wb, wb};
    for (int f = 0; f < m.facet_count(); ++f) {
        const auto sf = static_cast<size_t>(f);
        if (y.open[sf]) continue;
        const Vec2 mid = m.facet_midpoint(f);
        const double w = 2.0 * kappa * m.facet_length(f);
        for (int cell : {m.facet_plus_cell(f), m.facet_minus_cell(f)}) {
            const auto sc = static_cast<size_t>(cell);
            diag.f[sc] += Mat2{w * mid.x * mid.x, w * mid.y * mid.y, w * mid.x * mid.x,
                               w * mid.y * mid.y};
            diag.d[sc] += Vec2{w, w};
        }
    }
    for (size_t c = 0; c < diag.f.size(); ++c) {
        auto fix = [](double& v) {
            if (v <= 0.0) v = 1.0;
        };
        fix(diag.f[c].a11);
        fix(diag.f[c].a12);
        fix(diag.f[c].a21);
        fix(diag.f[c].a22);
        fix(diag.d[c].x);
        fix(diag.d[c].y);
    }
}

void jacobi_apply(const GradientArrays& diag, const GradientArrays& in, GradientArrays& out) {
    const size_t n = in.f.size();
    out.f.resize(n);
    out.d.resize(n);
    for (size_t c = 0; c < n; ++c) {
        out.f[c] = Mat2{in.f[c].a11 / diag.f[c].a11, in.f[c].a12 / diag.f[c].a12,
                        in.f[c].a21 / diag.f[c].a21, in.f[c].a22 / diag.f[c].a22};
        out.d[c] = Vec2{in.d[c].x / diag.d[c].x, in.d[c].y / diag.d[c].y};
    }
}

/// Projected preconditioned conjugate gradients for H dx = -g.
void solve_surrogate(const CleavageProblem& prob, const DiscreteDeformation& y, double kappa,
                     double bulk_l, const GradientArrays& g, GradientArrays& dx) {
    const size_t n = g.f.size();
    dx.f.assign(n, Mat2::zero());
    dx.d.assign(n, Vec2{});
    GradientArrays diag;
    hessian_diagonal(prob, y, kappa, bulk_l, diag);

    GradientArrays r = g;
    for (size_t c = 0; c < n; ++c) {
        r.f[c] = (-1.0) * r.f[c];
        r.d[c] = (-1.0) * r.d[c];
    }
    project_pinned(prob, r);
    GradientArrays z, p, hp;
    jacobi_apply(diag, r, z);
    project_pinned(prob, z);
    p = z;
    double rz = arrays_dot(r, z);
    const double rr0 = arrays_dot(r, r);
    const double tol2 = std::max(rr0 * 1e-16, 1e-300);
    for (int it = 0; it < 400; ++it) {
        if (arrays_dot(r, r) <= tol2) break;
        apply_hessian(prob, y, kappa, bulk_l, p, hp);
        const double php = arrays_dot(p, hp);
        if (php <= 0.0) break;  // null direction (global translation): stop here
        const double alpha = rz / php;
        for (size_t c = 0; c < n; ++c) {
            dx.f[c] += alpha * p.f[c];
            dx.d[c] += alpha * p.d[c];
            r.f[c] -= alpha * hp.f[c];
            r.d[c] -= alpha * hp.d[c];
        }
        jacobi_apply(diag, r, z);
        project_pinned(prob, z);
        const double rz_new = arrays_dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (size_t c = 0; c < n; ++c) {
            p.f[c] = z.f[c] + beta * p.f[c];
            p.d[c] = z.d[c] + beta * p.d[c];
        }
    }
}

/// Majorize-minimize descent on the augmented Lagrangian: the penalty part
/// is exactly quadratic, the bulk is bounded by an adaptive curvature L
/// (L = 2 majorizes dist^2 globally; other densities adapt upward on a
/// failed decrease).
double descend(const CleavageProblem& prob, DiscreteDeformation& y, const std::vector<Vec2>& lam,
               double kappa, const AlternatingSchedule& sched) {
    GradientArrays g, dx;
    double obj = al_objective(prob, y, lam, kappa);
    double bulk_l = 2.0;
    int stalls = 0;
    for (int it = 0; it < sched.descent_max; ++it) {
        al_gradient(prob, y, lam, kappa, g);
        if (grad_norm2(g) <= 1e-300) break;
        bool moved = false;
        for (int attempt = 0; attempt < 10; ++attempt) {
            solve_surrogate(prob, y, kappa, bulk_l, g, dx);
            DiscreteDeformation trial = y;
            for (size_t c = 0; c < dx.f.size(); ++c) {
                trial.grad[c] += dx.f[c];
                trial.shift[c] += dx.d[c];
            }
            const double obj_trial = al_objective(prob, trial, lam, kappa);
            if (obj_trial <= obj + 1e-15 * (1.0 + std::fabs(obj))) {
                const double drop = obj - obj_trial;
                y = std::move(trial);
                obj = obj_trial;
                moved = true;
                if (drop <= sched.descent_tol * (1.0 + std::fabs(obj)))
                    ++stalls;
                else
                    stalls = 0;
                bulk_l = std::max(2.0, bulk_l * 0.5);
                break;
            }
            bulk_l *= 4.0;  // surrogate was not a majorant here: stiffen
        }
        if (!moved || stalls >= 2) break;
    }
    return obj;
}

double feasibility_inf(const DiscreteDeformation& y) {
    const GridMesh& m = y.mesh;
    double worst = 0.0;
    for (int f = 0; f < m.facet_count(); ++f) {
        if (y.open[static_cast<size_t>(f)]) continue;
        const Vec2 mid = m.facet_midpoint(f);
        const Vec2 gap =
            y.value(m.facet_plus_cell(f), mid) - y.value(m.facet_minus_cell(f), mid);
        worst = std::max(worst, gap.norm());
    }
    return worst;
}

struct AlOutcome {
    double feas = 0.0;
    bool feasible = false;
};

AlOutcome al_solve(const CleavageProblem& prob, DiscreteDeformation& y, std::vector<Vec2>& lam,
                   const AlternatingSchedule& sched) {
    apply_pin(prob, y);
    const bool debug = std::getenv("FRACTURE2D_DEBUG_AL") != nullptr;
    // Match the bulk curvature scale (area/eps per cell against facet
    // couplings ~ hx^2): starting softer wastes rounds building multipliers.
    const double kappa0 = 0.5 / (prob.eps * prob.mesh.hx * prob.mesh.hx);
    double kappa = kappa0;
    const double target = 1e-10 * (1.0 + field_scale(y));
    double prev_feas = std::numeric_limits<double>::max();
    AlOutcome out;
    for (int round = 0; round < sched.al_rounds; ++round) {
        const double obj = descend(prob, y, lam, kappa, sched);
        out.feas = feasibility_inf(y);
        if (debug)
            std::fprintf(stderr, "al round %d: obj=%.6e feas=%.3e kappa=%.3e\n", round, obj,
                         out.feas, kappa);
        if (out.feas <= target) {
            out.feasible = true;
            return out;
        }
        for (int f = 0; f < prob.mesh.facet_count(); ++f) {
            const auto sf = static_cast<size_t>(f);
            if (y.open[sf]) continue;
            const Vec2 mid = prob.mesh.facet_midpoint(f);
            const Vec2 gap = y.value(prob.mesh.facet_plus_cell(f), mid) -
                             y.value(prob.mesh.facet_minus_cell(f), mid);
            lam[sf] += 2.0 * kappa * gap;
        }
        if (out.feas > 0.1 * prev_feas) kappa = std::min(kappa * 8.0, kappa0 * 1e10);
        prev_feas = out.feas;
    }
    out.feasible = out.feas <= target;
    return out;
}

// ---------------------------------------------------------------------------

/// Side means of u2 over core cells; subtracts them from the snapshot so the
/// translation indeterminacy is quotiented out.
void quotient_vertical_mean(DisplacementField& u, double split_x, bool split, double& s_out,
                            double& t_out) {
    const GridMesh& m = u.mesh;
    double sum_l = 0.0, sum_r = 0.0;
    int n_l = 0, n_r = 0;
    for (int c = 0; c < m.cell_count(); ++c) {
        if (m.is_collar(c)) continue;
        const double v = u.value_at_center(c).y;
        const bool left = !split || m.cell_center(c).x < split_x;
        if (left) {
            sum_l += v;
            ++n_l;
        } else {
            sum_r += v;
            ++n_r;
        }
    }
    s_out = n_l > 0 ? sum_l / n_l : 0.0;
    t_out = split ? (n_r > 0 ? sum_r / n_r : 0.0) : s_out;
    for (int c = 0; c < m.cell_count(); ++c) {
        const bool left = !split || m.cell_center(c).x < split_x;
        u.shift[static_cast<size_t>(c)].y -= left ? s_out : t_out;
    }
}

DisplacementField rescale_against_identity(const CleavageProblem& prob,
                                           const DiscreteDeformation& y) {
    CacciopPartition whole = trivial_partition(prob.mesh);
    PiecewiseRigidMotion id_motion;
    id_motion.comp.push_back(RigidMotion{});
    return rescaled_displacement(y, whole, id_motion, prob.eps);
}

/// Flagged facets grouped by vertical column; -1 entries mean flags outside a
/// single full column.
struct CrackShape {
    bool none = true;
    bool single_column = false;
    int column = -1;
};

CrackShape crack_shape(const CellwiseAffineField& y) {
    const GridMesh& m = y.mesh;
    CrackShape s;
    int column = -1;
    int count = 0;
    bool bad = false;
    for (int f = 0; f < m.facet_count(); ++f) {
        if (!y.open[static_cast<size_t>(f)]) continue;
        s.none = false;
        if (!m.facet_is_vertical(f)) {
            bad = true;
            continue;
        }
        const int v = f / m.ny;
        if (column < 0) column = v;
        if (v != column) bad = true;
        ++count;
    }
    if (!s.none && !bad && count == m.ny) {
        const double x = column_x(m, column);
        if (x > 0.0 && x < m.length) {
            s.single_column = true;
            s.column = column;
        }
    }
    return s;
}

}  // namespace

Classification classify(const DisplacementField& u, const ClassifyContext& ctx) {
    const GridMesh& m = u.mesh;
    Classification out;
    const CrackShape shape = crack_shape(u);

    if (shape.none) {
        double worst = 0.0;
        for (int c = 0; c < m.cell_count(); ++c) {
            if (m.is_collar(c)) continue;
            worst = std::max(worst, (sym(u.grad[static_cast<size_t>(c)]) - ctx.fa).frobenius());
        }
        out.max_strain_gap = worst;
        if (worst <= ctx.tol * (1.0 + ctx.fa.frobenius())) {
            out.kind = MinimizerKind::Elastic;
            double s = 0.0, t = 0.0;
            DisplacementField tmp = u;
            quotient_vertical_mean(tmp, 0.0, false, s, t);
            out.s = s;
        }
        return out;
    }
    if (!shape.single_column) return out;

    const double xs = column_x(m, shape.column);
    double worst = 0.0;
    for (int c = 0; c < m.cell_count(); ++c) {
        if (m.is_collar(c)) continue;
        worst = std::max(worst, sym(u.grad[static_cast<size_t>(c)]).frobenius());
    }
    out.max_strain_gap = worst;
    if (worst > ctx.tol * (1.0 + std::fabs(ctx.a))) return out;

    const double expected = ctx.l * ctx.a;
    double jump_sum = 0.0;
    for (int j = 0; j < m.ny; ++j) {
        const JumpRecord r = jump_record(u, m.vertical_facet(shape.column, j));
        jump_sum += r.jump.x;
        if (std::fabs(r.jump.x - expected) > ctx.tol * std::max(std::fabs(expected), 1e-6))
            return out;
    }
    out.kind = MinimizerKind::Cracked;
    out.crack_x = xs;
    out.jump1 = jump_sum / m.ny;
    double s = 0.0, t = 0.0;
    DisplacementField tmp = u;
    quotient_vertical_mean(tmp, xs, true, s, t);
    out.s = s;
    out.t = t;
    return out;
}

MinimizerReport solve_candidates(const CleavageProblem& prob) {
    MinimizerReport rep;

    const Mat2 g = elastic_strain(prob);
    DiscreteDeformation y_el = homogeneous_elastic_field(prob, g);
    const EnergyBreakdown e_el = energy_nonlinear(y_el, prob.eps, prob.density, prob.box_m);

    const int column = crack_column_near(prob.mesh, 0.5 * prob.mesh.length);
    DiscreteDeformation y_cr = cracked_field(prob, column, 0.0, 0.0);
    const EnergyBreakdown e_cr = energy_nonlinear(y_cr, prob.eps, prob.density, prob.box_m);

    rep.elastic_total = e_el.total();
    rep.cracked_total = e_cr.total();
    const bool elastic_wins = e_el.total() <= e_cr.total();
    rep.energy = elastic_wins ? e_el : e_cr;
    rep.deformation = elastic_wins ? std::move(y_el) : std::move(y_cr);
    rep.rescaled = rescale_against_identity(prob, rep.deformation);

    ClassifyContext ctx{prob.fa, prob.a, prob.mesh.length, 0.02};
    rep.cls = classify(rep.rescaled, ctx);
    double s = 0.0, t = 0.0;
    quotient_vertical_mean(rep.rescaled, rep.cls.kind == MinimizerKind::Cracked ? rep.cls.crack_x : 0.0,
                           rep.cls.kind == MinimizerKind::Cracked, s, t);
    rep.continuity_residual = validate_deformation(rep.deformation, prob.box_m).max_closed_residual;
    return rep;
}

MinimizerReport solve_alternating(const CleavageProblem& prob, const AlternatingSchedule& sched) {
    const GridMesh& m = prob.mesh;
    MinimizerReport rep;

    DiscreteDeformation y = homogeneous_elastic_field(prob, elastic_strain(prob));
    std::vector<Vec2> lam(static_cast<size_t>(m.facet_count()));
    AlOutcome al = al_solve(prob, y, lam, sched);
    double total = energy_nonlinear(y, prob.eps, prob.density, prob.box_m).total();

    struct Proposal {
        DiscreteDeformation y;
        std::vector<Vec2> lam;
        double total = 0.0;
    };

    // One scan over the flip proposals; returns the best strictly improving
    // one after its paired continuous relaxation.
    auto scan = [&]() -> std::optional<Proposal> {
        std::optional<Proposal> best;
        const double margin = std::max(1e-12, sched.descent_tol * (1.0 + std::fabs(total)));
        auto consider = [&](DiscreteDeformation&& trial_y, std::vector<Vec2>&& trial_lam) {
            al_solve(prob, trial_y, trial_lam, sched);
            const double trial_total =
                energy_nonlinear(trial_y, prob.eps, prob.density, prob.box_m).total();
            if (trial_total < total - margin && (!best || trial_total < best->total))
                best = Proposal{std::move(trial_y), std::move(trial_lam), trial_total};
        };

        if (sched.column_moves) {
            for (int v = 0; v < m.nx - 1; ++v) {
                const double x = column_x(m, v);
                if (x <= 0.0 || x >= m.length) continue;
                bool already_open = true;
                for (int j = 0; j < m.ny; ++j)
                    already_open = already_open && y.open[static_cast<size_t>(m.vertical_facet(v, j))];
                if (already_open) continue;

                const bool pristine = crack_shape(y).none;
                DiscreteDeformation trial_y = pristine ? cracked_field(prob, v, 0.0, 0.0) : y;
                if (!pristine)
                    for (int j = 0; j < m.ny; ++j)
                        trial_y.open[static_cast<size_t>(m.vertical_facet(v, j))] = 1;
                std::vector<Vec2> trial_lam = pristine ? std::vector<Vec2>(lam.size()) : lam;
                for (int j = 0; j < m.ny; ++j)
                    trial_lam[static_cast<size_t>(m.vertical_facet(v, j))] = Vec2{};
                consider(std::move(trial_y), std::move(trial_lam));
            }
            // Closing move: collapse a fully open column whose jump vanished.
            const CrackShape shape = crack_shape(y);
            if (shape.single_column) {
                double max_jump = 0.0;
                for (int j = 0; j < m.ny; ++j)
                    max_jump = std::max(
                        max_jump, jump_record(y, m.vertical_facet(shape.column, j)).jump.norm());
                if (max_jump < 0.1 * std::sqrt(prob.eps)) {
                    DiscreteDeformation trial_y = y;
                    for (int j = 0; j < m.ny; ++j)
                        trial_y.open[static_cast<size_t>(m.vertical_facet(shape.column, j))] = 0;
                    consider(std::move(trial_y), std::vector<Vec2>(lam));
                }
            }
        } else {
            // Fallback: single-facet flips ranked by the constraint force.
            std::vector<std::pair<double, int>> ranked;
            for (int f = 0; f < m.facet_count(); ++f)
                if (!y.open[static_cast<size_t>(f)])
                    ranked.emplace_back(-lam[static_cast<size_t>(f)].norm(), f);
            std::sort(ranked.begin(), ranked.end());
            const int ntrial = std::min<int>(sched.facet_candidates, static_cast<int>(ranked.size()));
            for (int k = 0; k < ntrial; ++k) {
                const int f = ranked[static_cast<size_t>(k)].second;
                DiscreteDeformation trial_y = y;
                trial_y.open[static_cast<size_t>(f)] = 1;
                std::vector<Vec2> trial_lam = lam;
                trial_lam[static_cast<size_t>(f)] = Vec2{};
                consider(std::move(trial_y), std::move(trial_lam));
            }
            for (int f = 0; f < m.facet_count(); ++f) {
                if (!y.open[static_cast<size_t>(f)]) continue;
                if (jump_record(y, f).jump.norm() > 0.1 * std::sqrt(prob.eps)) continue;
                DiscreteDeformation trial_y = y;
                trial_y.open[static_cast<size_t>(f)] = 0;
                consider(std::move(trial_y), std::vector<Vec2>(lam));
            }
        }
        return best;
    };

    int outer = 0;
    bool improved = true;
    while (improved && outer < sched.outer_max) {
        ++outer;
        improved = false;
        for (int b = 0; b < sched.flip_batch; ++b) {
            std::optional<Proposal> best = scan();
            if (!best) break;
            y = std::move(best->y);
            lam = std::move(best->lam);
            total = best->total;
            improved = true;
        }
    }

    al = al_solve(prob, y, lam, sched);
    rep.energy = energy_nonlinear(y, prob.eps, prob.density, prob.box_m);
    rep.converged = al.feasible && !improved;
    rep.outer_iterations = outer;
    rep.deformation = y;
    rep.rescaled = rescale_against_identity(prob, rep.deformation);
    ClassifyContext ctx{prob.fa, prob.a, prob.mesh.length, 0.02};
    rep.cls = classify(rep.rescaled, ctx);
    double s = 0.0, t = 0.0;
    quotient_vertical_mean(rep.rescaled, rep.cls.kind == MinimizerKind::Cracked ? rep.cls.crack_x : 0.0,
                           rep.cls.kind == MinimizerKind::Cracked, s, t);
    rep.continuity_residual = validate_deformation(rep.deformation, prob.box_m).max_closed_residual;
    return rep;
}

SweepTable sweep_cleavage(const std::vector<double>& a_grid, const std::vector<double>& eps_grid,
                          const CleavageProblem& prototype, SolveMode mode,
                          const AlternatingSchedule& schedule) {
    if (a_grid.empty() || eps_grid.empty())
        throw std::invalid_argument("sweep_cleavage: empty grid");
    SweepTable table;
    table.alpha = prototype.alpha;
    table.a_star = formula_crossover(prototype.alpha, prototype.mesh.length);
    table.a_crit_printed = printed_crossover(prototype.alpha, prototype.mesh.length);

    std::vector<std::pair<double, double>> cells;
    for (double eps : eps_grid)
        for (double a : a_grid) cells.emplace_back(eps, a);
    table.rows.resize(cells.size());

    par::for_each(cells.size(), [&](size_t i) {
        const auto [eps, a] = cells[i];
        const int collar = prototype.mesh.collar_cols;
        const int nx_core = prototype.mesh.nx - 2 * collar;
        const CleavageProblem prob = make_cleavage_problem(
            prototype.mesh.length, nx_core, prototype.mesh.ny, collar, a, eps, prototype.density,
            prototype.box_m);
        SweepRow row;
        row.eps = eps;
        row.a = a;
        row.formula = limit_energy_formula(a, prob.alpha, prob.mesh.length);
        row.alternating_total = std::numeric_limits<double>::quiet_NaN();
        if (mode != SolveMode::Alternating) {
            const MinimizerReport rep = solve_candidates(prob);
            row.candidate_total = rep.energy.total();
            row.candidate_kind = to_string(rep.cls.kind);
            row.crack_x = rep.cls.crack_x;
            row.jump1 = rep.cls.jump1;
        }
        if (mode != SolveMode::Candidates) {
            const MinimizerReport rep = solve_alternating(prob, schedule);
            row.alternating_total = rep.energy.total();
            row.alternating_kind = to_string(rep.cls.kind);
            if (mode == SolveMode::Alternating) {
                row.candidate_total = std::numeric_limits<double>::quiet_NaN();
                row.crack_x = rep.cls.crack_x;
                row.jump1 = rep.cls.jump1;
            }
        }
        const double ref = mode == SolveMode::Alternating ? row.alternating_total : row.candidate_total;
        row.rel_gap = std::fabs(ref - row.formula) / std::max(row.formula, 1e-12);
        table.rows[i] = std::move(row);
    });
    return table;
}

std::string sweep_to_csv(const SweepTable& table, const CleavageProblem& prototype,
                         SolveMode mode) {
    std::ostringstream out;
    out.precision(12);
    out << "eps,a,l,nx,ny,collar_cols,density,mode,alpha,candidate_total,alternating_total,"
           "candidate_kind,alternating_kind,crack_x,jump1,formula,rel_gap\n";
    const char* mode_name = mode == SolveMode::Candidates
                                ? "candidates"
                                : (mode == SolveMode::Alternating ? "alternating" : "both");
    for (const SweepRow& r : table.rows) {
        out << r.eps << ',' << r.a << ',' << prototype.mesh.length << ',' << prototype.mesh.nx
            << ',' << prototype.mesh.ny << ',' << prototype.mesh.collar_cols << ','
            << prototype.density.id << ',' << mode_name << ',' << table.alpha << ','
            << r.candidate_total << ',' << r.alternating_total << ',' << r.candidate_kind << ','
            << r.alternating_kind << ',' << r.crack_x << ',' << r.jump1 << ',' << r.formula << ','
            << r.rel_gap << '\n';
    }
    return out.str();
}

std::string sweep_to_dat(const SweepTable& table) {
    std::ostringstream out;
    out.precision(12);
    out << "# a  energy  min(alpha*l*a^2/2, 1)\n";
    for (const SweepRow& r : table.rows) {
        const double e = std::isnan(r.candidate_total) ? r.alternating_total : r.candidate_total;
        out << r.a << "  " << e << "  " << r.formula << '\n';
    }
    return out.str();
}

}  // namespace fracture
