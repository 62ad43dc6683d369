#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "fracture/rigid.hpp"
#include "test_support.hpp"

using namespace fracture;

namespace {

std::vector<int> all_cells(const GridMesh& m) {
    std::vector<int> cells(static_cast<size_t>(m.cell_count()));
    std::iota(cells.begin(), cells.end(), 0);
    return cells;
}

}  // namespace

TEST_CASE("fit_rigid recovers exact rigid motions") {
    GridMesh m(1.0, 8, 8, 0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    std::uniform_real_distribution<double> sh(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const RigidMotion planted{ang(rng), Vec2{sh(rng), sh(rng)}};
        DiscreteDeformation y = make_field(m);
        for (int c = 0; c < m.cell_count(); ++c) {
            y.grad[static_cast<size_t>(c)] = planted.rotation();
            y.shift[static_cast<size_t>(c)] = planted.shift;
        }
        const RigidFit fit = fit_rigid(all_cells(m), y);
        CHECK(std::fabs(wrap_angle(fit.motion.angle - planted.angle)) <= 1e-12);
        CHECK((fit.motion.shift - planted.shift).norm() <= 1e-12);
        CHECK(fit.residual <= 1e-12);
    }
}

TEST_CASE("fit_rigid on a small rotation tracks sqrt(eps) omega") {
    GridMesh m(1.0, 10, 10, 0);
    const double eps = 1e-6, omega = 0.8;
    // y = x + sqrt(eps) (omega J x + d)
    DiscreteDeformation y = make_field(m);
    const Mat2 g = Mat2::identity() + std::sqrt(eps) * omega * Mat2::spin_generator();
    for (int c = 0; c < m.cell_count(); ++c) {
        y.grad[static_cast<size_t>(c)] = g;
        y.shift[static_cast<size_t>(c)] = std::sqrt(eps) * Vec2{0.3, -0.2};
    }
    const RigidFit fit = fit_rigid(all_cells(m), y);
    // Fitted angle = sqrt(eps) omega + O(eps).
    CHECK(std::fabs(fit.motion.angle - std::sqrt(eps) * omega) <= 10.0 * eps);

    // Dense angle-search oracle: no sampled rotation does better.
    double best = std::numeric_limits<double>::max();
    for (int k = 0; k < 360; ++k) {
        const double theta = -M_PI + 2.0 * M_PI * k / 360.0;
        const Mat2 r = Mat2::rotation(theta);
        // optimal translation for fixed rotation = mean(y - R x)
        Vec2 mean{};
        for (int c = 0; c < m.cell_count(); ++c) {
            const Vec2 xc = m.cell_center(c);
            mean += y.value(c, xc) - r * xc;
        }
        mean = (1.0 / m.cell_count()) * mean;
        double res = 0.0;
        for (int c = 0; c < m.cell_count(); ++c) {
            const Vec2 xc = m.cell_center(c);
            res += m.cell_area() * (y.value(c, xc) - (r * xc + mean)).norm2();
        }
        best = std::min(best, std::sqrt(res));
    }
    CHECK(fit.residual <= best + 1e-15);
}

TEST_CASE("fit_rigid equivariance under global rotations") {
    GridMesh m(1.0, 6, 6, 0);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ang(-1.0, 1.0);
    std::uniform_real_distribution<double> perturb(-1e-3, 1e-3);
    DiscreteDeformation y = make_field(m);
    for (int c = 0; c < m.cell_count(); ++c) {
        y.grad[static_cast<size_t>(c)] =
            Mat2::rotation(0.2) + Mat2{perturb(rng), perturb(rng), perturb(rng), perturb(rng)};
        y.shift[static_cast<size_t>(c)] = Vec2{0.1 + perturb(rng), perturb(rng)};
    }
    const RigidFit base = fit_rigid(all_cells(m), y);
    for (int trial = 0; trial < 10; ++trial) {
        const double phi = ang(rng);
        const Mat2 q = Mat2::rotation(phi);
        DiscreteDeformation rotated = y;
        for (int c = 0; c < m.cell_count(); ++c) {
            const auto sc = static_cast<size_t>(c);
            rotated.grad[sc] = q * y.grad[sc];
            rotated.shift[sc] = q * y.shift[sc];
        }
        const RigidFit fit = fit_rigid(all_cells(m), rotated);
        CHECK(std::fabs(wrap_angle(fit.motion.angle - (base.motion.angle + phi))) <= 1e-9);
        CHECK(fit.residual == doctest::Approx(base.residual).epsilon(1e-9));
    }
}

TEST_CASE("fit_rigid single-cell fallback uses the polar factor") {
    GridMesh m(1.0, 4, 4, 0);
    DiscreteDeformation y = make_field(m);
    y.grad[5] = 1.1 * Mat2::rotation(0.4);  // scaled rotation: polar factor is R(0.4)
    const int cells[] = {5};
    const RigidFit fit = fit_rigid(cells, y);
    CHECK(fit.degenerate);
    CHECK(std::fabs(fit.motion.angle - 0.4) <= 1e-12);
}

TEST_CASE("skew_from_pair") {
    SUBCASE("equal rotations give zero spin") {
        const RigidMotion r{0.7, Vec2{1.0, 2.0}};
        const SkewExtract s = skew_from_pair(r, r, 1e-4);
        CHECK(s.spin == 0.0);
        CHECK(s.remainder <= 1e-15);
    }
    SUBCASE("R2 = R1 R(sqrt(eps) omega) recovers omega with O(eps) remainder") {
        const double eps = 1e-6, omega = 0.6;
        const RigidMotion r1{0.3, Vec2{}};
        const RigidMotion r2{0.3 + std::sqrt(eps) * omega, Vec2{}};
        const SkewExtract s = skew_from_pair(r1, r2, eps);
        CHECK(s.spin == doctest::Approx(omega).epsilon(1e-9));
        CHECK(s.remainder <= 1.0 * eps);
    }
    SUBCASE("remainder / eps stays bounded over a sweep") {
        for (double omega : {0.25, 1.0}) {
            for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
                const RigidMotion r1{-0.2, Vec2{}};
                const RigidMotion r2{-0.2 + std::sqrt(eps) * omega, Vec2{}};
                const SkewExtract s = skew_from_pair(r1, r2, eps);
                CHECK(s.remainder / eps <= 1.0);
            }
        }
    }
}

TEST_CASE("project_infinitesimal") {
    GridMesh m(1.0, 8, 8, 0);
    std::mt19937 rng(13);
    const CacciopPartition p = testsupport::random_connected_partition(m, 3, rng);
    const PiecewiseRigidMotion t = testsupport::random_motion(p.count, rng);
    const DisplacementField u = testsupport::random_displacement(m, rng);

    SUBCASE("g = u gives zero distance") {
        const InfinitesimalProjection proj = project_infinitesimal(u, p, t, u);
        CHECK(proj.distance <= 1e-12);
        for (const auto& c : proj.motion.comp) {
            CHECK(std::fabs(c.spin) <= 1e-10);
            CHECK(c.shift.norm() <= 1e-10);
        }
    }
    SUBCASE("targets inside the affine space are hit exactly") {
        PiecewiseInfinitesimalMotion mote;
        std::uniform_real_distribution<double> val(-0.5, 0.5);
        for (int j = 0; j < p.count; ++j)
            mote.comp.push_back({val(rng), Vec2{val(rng), val(rng)}});
        const DisplacementField g = add_infinitesimal(u, p, t, mote);
        const InfinitesimalProjection proj = project_infinitesimal(u, p, t, g);
        CHECK(proj.distance <= 1e-10);
        for (int j = 0; j < p.count; ++j) {
            CHECK(proj.motion.comp[static_cast<size_t>(j)].spin ==
                  doctest::Approx(mote.comp[static_cast<size_t>(j)].spin).epsilon(1e-9));
        }
    }
    SUBCASE("idempotent") {
        const DisplacementField g = testsupport::random_displacement(m, rng);
        const InfinitesimalProjection once = project_infinitesimal(u, p, t, g);
        const InfinitesimalProjection twice = project_infinitesimal(once.field, p, t, g);
        CHECK(twice.distance == doctest::Approx(once.distance).epsilon(1e-10));
        for (const auto& c : twice.motion.comp) {
            CHECK(std::fabs(c.spin) <= 1e-9);
            CHECK(c.shift.norm() <= 1e-9);
        }
    }
    SUBCASE("orthogonality of the residual to the motion space") {
        const DisplacementField g = testsupport::random_displacement(m, rng);
        const InfinitesimalProjection proj = project_infinitesimal(u, p, t, g);
        // (v - g) must be L2-orthogonal to grad(T) m for the basis motions of
        // every component.
        const double w = m.cell_area();
        for (int j = 0; j < p.count; ++j) {
            const Mat2 r = t.comp[static_cast<size_t>(j)].rotation();
            for (int basis = 0; basis < 3; ++basis) {
                double inner = 0.0, nv = 0.0, nm = 0.0;
                for (int c = 0; c < m.cell_count(); ++c) {
                    if (p.label[static_cast<size_t>(c)] != j) continue;
                    const Vec2 xc = m.cell_center(c);
                    const Vec2 jx{-xc.y, xc.x};
                    const Vec2 phi = basis == 0 ? r * jx : (basis == 1 ? r * Vec2{1.0, 0.0} : r * Vec2{0.0, 1.0});
                    const Vec2 res = proj.field.value(c, xc) - g.value(c, xc);
                    inner += w * res.dot(phi);
                    nv += w * res.norm2();
                    nm += w * phi.norm2();
                }
                const double denom = std::sqrt(nv * nm) + 1e-30;
                CHECK(std::fabs(inner) / denom <= 1e-9);
            }
        }
    }
    SUBCASE("component mismatch rejected") {
        PiecewiseRigidMotion bad;
        bad.comp.resize(static_cast<size_t>(p.count + 1));
        CHECK_THROWS_AS(project_infinitesimal(u, p, bad, u), std::invalid_argument);
    }
}

TEST_CASE("piecewise_motion_field flags exactly the interfaces") {
    GridMesh m(3.0, 12, 4, 0);
    std::vector<int> labels(static_cast<size_t>(m.cell_count()));
    for (int c = 0; c < m.cell_count(); ++c)
        labels[static_cast<size_t>(c)] = m.cell_center(c).x < 1.5 ? 0 : 1;
    const CacciopPartition p = make_partition(m, labels);
    PiecewiseRigidMotion t;
    t.comp = {RigidMotion{0.0, Vec2{}}, RigidMotion{0.0, Vec2{0.5, 0.0}}};
    const DiscreteDeformation y = piecewise_motion_field(p, t);
    CHECK(jump_set_measure(y) == doctest::Approx(1.0).epsilon(1e-12));
    const SegmentationEnergy seg = energy_seg(y);
    CHECK(seg.piecewise_rigid);
    CHECK(seg.value == doctest::Approx(1.0).epsilon(1e-12));
}
