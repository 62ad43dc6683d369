#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fracture/density.hpp"

using namespace fracture;

namespace {

// Independent oracle: dense sampling of SO(2) angles.
double dist_so2_sampled(const Mat2& f, int samples = 2'000'000) {
    double best = std::numeric_limits<double>::max();
    for (int k = 0; k < samples; ++k) {
        const double theta = 2.0 * M_PI * k / samples;
        best = std::min(best, (f - Mat2::rotation(theta)).frobenius());
    }
    return best;
}

Mat2 random_matrix(std::mt19937& rng, double scale) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng), d(rng), d(rng), d(rng)};
}

}  // namespace

TEST_CASE("dist_so2 closed form") {
    CHECK(dist_so2(Mat2::identity()) == 0.0);
    CHECK(dist_so2(Mat2::rotation(0.3)) < 1e-15);

    // Frozen from the angle-sampling oracle: diag(1.2, 1.0) -> 0.2.
    CHECK(dist_so2(Mat2::diag(1.2, 1.0)) == doctest::Approx(0.2).epsilon(1e-12));

    std::mt19937 rng(42);
    for (int k = 0; k < 25; ++k) {
        const Mat2 f = random_matrix(rng, 2.0);
        const double sampled = dist_so2_sampled(f, 200000);
        CHECK(dist_so2(f) == doctest::Approx(sampled).epsilon(1e-8));
    }
    // Negative determinant stays exact (no fallback needed).
    const Mat2 reflected = Mat2::diag(1.0, -1.0);
    CHECK(dist_so2(reflected) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dist_so2(reflected) == doctest::Approx(dist_so2_sampled(reflected, 200000)).epsilon(1e-8));
}

TEST_CASE("dist_so2 vanishes exactly on rotations") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    for (int k = 0; k < 100; ++k) {
        const double theta = ang(rng);
        const Mat2 r = Mat2::rotation(theta);
        CHECK(dist_so2(r) <= 1e-12);
        // Polar factor reproduces the matrix.
        CHECK((polar_rotation(r) - r).frobenius() <= 1e-12);
    }
}

TEST_CASE("eval_w default density") {
    const EnergyDensity w = make_density("dist2");
    CHECK(eval_w(w, Mat2::identity()) == 0.0);
    CHECK(eval_w(w, Mat2::rotation(1.1)) <= 1e-28);
    CHECK(eval_w(w, Mat2::diag(1.2, 1.0)) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK_THROWS_AS(eval_w(w, Mat2::diag(11.0, 1.0)), std::invalid_argument);
}

TEST_CASE("frame indifference of registered densities") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    for (const char* id : {"dist2", "stvk"}) {
        const EnergyDensity w = make_density(id);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const Mat2 f = random_matrix(rng, 2.0);
            const Mat2 q = Mat2::rotation(ang(rng));
            worst = std::max(worst, std::fabs(w.w(q * f) - w.w(f)));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("quadratic lower bound on the box") {
    std::mt19937 rng(11);
    for (const char* id : {"dist2", "stvk"}) {
        const EnergyDensity w = make_density(id);
        for (int k = 0; k < 2000; ++k) {
            const Mat2 f = random_matrix(rng, 3.0);
            const double d = dist_so2(f);
            CHECK(w.w(f) >= w.growth_constant * d * d - 1e-12);
        }
    }
}

TEST_CASE("hessian_q finite differences vs closed forms") {
    for (const char* id : {"dist2", "stvk"}) {
        const EnergyDensity w = make_density(id);
        const QuadraticForm fd = hessian_q_fd(w);
        const QuadraticForm exact = *w.closed_form_hessian;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double scale = std::fabs(exact.m[i][j]) + 1.0;
                CHECK(std::fabs(fd.m[i][j] - exact.m[i][j]) / scale <= 1e-6);
            }
    }
}

TEST_CASE("hessian_q of the default density is 2|E|^2") {
    const EnergyDensity w = make_density("dist2");
    const QuadraticForm q = hessian_q(w);
    std::mt19937 rng(5);
    for (int k = 0; k < 50; ++k) {
        const Mat2 g = random_matrix(rng, 1.0);
        const Mat2 e = sym(g);
        CHECK(q(g) == doctest::Approx(2.0 * e.frobenius2()).epsilon(1e-12));
    }
    CHECK(q(Mat2::zero()) == 0.0);
    // Q(e(A)) = 0 for skew A.
    CHECK(q(0.7 * Mat2::spin_generator()) <= 1e-24);
}

TEST_CASE("alpha_and_fa for both densities") {
    SUBCASE("default density: alpha = 2, F^a = a e1 x e1") {
        const QuadraticForm q = hessian_q(make_density("dist2"));
        const UniaxialOptimum opt = alpha_and_fa(q, 0.7);
        CHECK(opt.alpha == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(opt.fa.a11 == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(std::fabs(opt.fa.a22) <= 1e-12);
        CHECK(std::fabs(opt.fa.a12) <= 1e-12);
        CHECK(opt.kkt_residual <= 1e-10);
    }
    SUBCASE("zero strain") {
        const QuadraticForm q = hessian_q(make_density("stvk"));
        const UniaxialOptimum opt = alpha_and_fa(q, 0.0);
        CHECK(opt.fa.frobenius() <= 1e-14);
        CHECK(q(opt.fa) <= 1e-14);
    }
    SUBCASE("scaling identity Q(F^a) = a^2 Q(F^1)") {
        for (const char* id : {"dist2", "stvk"}) {
            const QuadraticForm q = hessian_q(make_density(id));
            const UniaxialOptimum base = alpha_and_fa(q, 1.0);
            for (double a : {-1.5, -0.3, 0.4, 2.0}) {
                const UniaxialOptimum opt = alpha_and_fa(q, a);
                CHECK(q(opt.fa) == doctest::Approx(a * a * q(base.fa)).epsilon(1e-10));
                CHECK(q(opt.fa) == doctest::Approx(opt.alpha * a * a).epsilon(1e-10));
            }
        }
    }
    SUBCASE("brute-force grid oracle") {
        for (const char* id : {"dist2", "stvk"}) {
            const QuadraticForm q = hessian_q(make_density(id));
            const UniaxialOptimum opt = alpha_and_fa(q, 1.0);
            const double step = 1e-3;
            double best = std::numeric_limits<double>::max();
            Mat2 best_e;
            for (double e22 = -1.0; e22 <= 1.0 + 1e-12; e22 += step)
                for (double e12 = -0.5; e12 <= 0.5 + 1e-12; e12 += step) {
                    const Mat2 e{1.0, e12, e12, e22};
                    const double v = q(e);
                    if (v < best) {
                        best = v;
                        best_e = e;
                    }
                }
            CHECK(std::fabs(best - opt.alpha) <= 20.0 * step * step);
            CHECK(std::fabs(best_e.a22 - opt.fa.a22) <= 2.0 * step);
            CHECK(std::fabs(best_e.a12 - opt.fa.a12) <= 2.0 * step);
        }
    }
    SUBCASE("degenerate Q rejected") {
        QuadraticForm q;  // zero form
        CHECK_THROWS_AS(alpha_and_fa(q, 1.0), std::invalid_argument);
    }
}

TEST_CASE("taylor remainder bound") {
    const EnergyDensity w = make_density("dist2");
    SUBCASE("zero direction") {
        const double grid[] = {0.5, 0.1};
        CHECK(taylor_remainder_bound(w, Mat2::zero(), grid) == 0.0);
    }
    SUBCASE("uniaxial direction stays bounded in t") {
        const Mat2 g = Mat2::diag(1.0, 0.0);
        const double grid1[] = {0.1};
        const double grid2[] = {0.01};
        const double c1 = taylor_remainder_bound(w, g, grid1);
        const double c2 = taylor_remainder_bound(w, g, grid2);
        CHECK(c1 < 10.0);
        CHECK(c2 < 10.0);  // the ratio |W - Q/2| / t^3 does not blow up as t -> 0
    }
    SUBCASE("skew direction: W(Id + tA) = O(t^4)") {
        const Mat2 a = Mat2::spin_generator();
        const double grid[] = {0.1, 0.01, 0.001};
        CHECK(taylor_remainder_bound(w, a, grid) < 1.0);
    }
}
