// Times the OpenMP kernels against the serial reference on a large mesh.

#include <chrono>
#include <cstdio>
#include <random>

#include "fracture/energy.hpp"
#include "fracture/gamma.hpp"
#include "fracture/parallel.hpp"

using namespace fracture;

namespace {

double time_ms(int reps, const std::function<double()>& fn, double& sink) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) sink += fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 768;
    int reps = argc > 2 ? std::atoi(argv[2]) : 5;

    GridMesh mesh(1.0, n, n, 0);
    DiscreteDeformation y = make_field(mesh);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> small(-0.01, 0.01);
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const auto sc = static_cast<size_t>(c);
        y.grad[sc] = Mat2::identity() + Mat2{small(rng), small(rng), small(rng), small(rng)};
        y.shift[sc] = Vec2{small(rng), small(rng)};
    }
    std::uniform_int_distribution<int> facet(0, mesh.facet_count() - 1);
    for (int k = 0; k < mesh.facet_count() / 50; ++k) y.open[static_cast<size_t>(facet(rng))] = 1;

    const EnergyDensity density = make_density("dist2");
    const QuadraticForm q = hessian_q(density);
    CacciopPartition part = trivial_partition(mesh);
    PiecewiseRigidMotion motion;
    motion.comp.push_back(RigidMotion{});

    struct Row {
        const char* name;
        std::function<double()> fn;
    };
    const double eps = 1e-4;
    DisplacementField u = y;
    const Row rows[] = {
        {"energy_nonlinear", [&] { return energy_nonlinear(y, eps, density).total(); }},
        {"energy_limit", [&] { return energy_limit({u, part, motion}, q).total(); }},
        {"jump_set_measure", [&] { return jump_set_measure(y); }},
        {"slice_measure(e1,0)", [&] { return slice_measure(u, Axis::X1, 0.0); }},
    };

    std::printf("mesh %dx%d, %d reps\n", n, n, reps);
    std::printf("%-22s %12s %12s %8s %10s\n", "kernel", "serial ms", "parallel ms", "speedup",
                "bit-equal");
    for (const Row& row : rows) {
        double sink = 0.0;
        par::set_enabled(false);
        const double serial_val = row.fn();
        const double ts = time_ms(reps, row.fn, sink);
        par::set_enabled(true);
        const double parallel_val = row.fn();
        const double tp = time_ms(reps, row.fn, sink);
        std::printf("%-22s %12.3f %12.3f %8.2fx %10s\n", row.name, ts, tp, ts / tp,
                    serial_val == parallel_val ? "yes" : "NO");
    }
    return 0;
}
