#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "fracture/partition.hpp"
#include "test_support.hpp"

using namespace fracture;

namespace {

/// Three unit squares side by side on (0,3) x (0,1).
CacciopPartition three_bricks(const GridMesh& m) {
    std::vector<int> labels(static_cast<size_t>(m.cell_count()), 0);
    for (int c = 0; c < m.cell_count(); ++c) {
        const double x = m.cell_center(c).x;
        labels[static_cast<size_t>(c)] = x < 1.0 ? 0 : (x < 2.0 ? 1 : 2);
    }
    return make_partition(m, labels);
}

}  // namespace

TEST_CASE("perimeters") {
    SUBCASE("single component has no interior interface") {
        GridMesh m(1.0, 6, 6, 0);
        const CacciopPartition p = trivial_partition(m);
        const PerimeterReport r = perimeters(p);
        CHECK(r.interior_interface_total == 0.0);
        CHECK(r.boundary_length[0] == doctest::Approx(4.0).epsilon(1e-12));
    }
    SUBCASE("three unit bricks: two interior interfaces of length 1") {
        GridMesh m(3.0, 48, 16, 0);
        const CacciopPartition p = three_bricks(m);
        REQUIRE(p.count == 3);
        const PerimeterReport r = perimeters(p);
        CHECK(r.interior_interface_total == doctest::Approx(2.0).epsilon(1e-12));
        int touching_pairs = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (r.interface[static_cast<size_t>(i)][static_cast<size_t>(j)] > 0.0) {
                    ++touching_pairs;
                    CHECK(r.interface[static_cast<size_t>(i)][static_cast<size_t>(j)] ==
                          doctest::Approx(1.0).epsilon(1e-12));
                }
        CHECK(touching_pairs == 2);
    }
    SUBCASE("2x2 checkerboard of singleton components: perimeter 1 each") {
        GridMesh m(1.0, 2, 2, 0);
        const CacciopPartition p = make_partition(m, {0, 1, 2, 3});
        const PerimeterReport r = perimeters(p);
        for (int j = 0; j < 4; ++j)
            CHECK(r.perimeter_in_domain[static_cast<size_t>(j)] ==
                  doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("is_coarser") {
    GridMesh m(3.0, 24, 8, 0);
    const CacciopPartition fine = three_bricks(m);
    SUBCASE("reflexive") { CHECK(is_coarser(fine, fine)); }
    SUBCASE("merged dominates") {
        const CacciopPartition coarse = merge(fine, {{0, 1}});
        CHECK(is_coarser(coarse, fine));
        CHECK_FALSE(is_coarser(fine, coarse));
    }
    SUBCASE("antisymmetry up to relabeling") {
        const CacciopPartition other = three_bricks(m);
        CHECK(is_coarser(fine, other));
        CHECK(is_coarser(other, fine));
        CHECK(fine.label == other.label);
    }
    SUBCASE("mesh mismatch rejected") {
        GridMesh m2(3.0, 12, 8, 0);
        CHECK_THROWS_AS(is_coarser(three_bricks(m2), fine), std::invalid_argument);
    }
}

TEST_CASE("partial order axioms on random partitions") {
    std::mt19937 rng(19);
    GridMesh m(1.0, 10, 10, 0);
    std::uniform_int_distribution<int> pick(0, 5);
    for (int trial = 0; trial < 30; ++trial) {
        const CacciopPartition p1 = testsupport::random_connected_partition(m, 6, rng);
        // p2 coarsens p1, p3 coarsens p2: transitivity must close the chain.
        std::vector<std::pair<int, int>> pairs;
        if (p1.count > 1) pairs.emplace_back(0, pick(rng) % p1.count);
        const CacciopPartition p2 = merge(p1, pairs);
        std::vector<std::pair<int, int>> pairs2;
        if (p2.count > 1) pairs2.emplace_back(p2.count - 1, pick(rng) % p2.count);
        const CacciopPartition p3 = merge(p2, pairs2);
        CHECK(is_coarser(p2, p1));
        CHECK(is_coarser(p3, p2));
        CHECK(is_coarser(p3, p1));
        CHECK(is_coarser(p1, p1));
    }
}

TEST_CASE("merge") {
    GridMesh m(3.0, 24, 8, 0);
    const CacciopPartition p = three_bricks(m);
    SUBCASE("empty merge is the identity") {
        const CacciopPartition q = merge(p, {});
        CHECK(q.label == p.label);
        CHECK(q.count == p.count);
    }
    SUBCASE("merging the two leftmost bricks gives the coarsest two-piece partition") {
        const CacciopPartition q = merge(p, {{0, 1}});
        CHECK(q.count == 2);
        // Ordered by area: the merged piece (area 2) comes first.
        CHECK(q.area[0] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(q.area[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(is_coarser(q, p));
    }
    SUBCASE("boundary length never increases under merge") {
        std::mt19937 rng(29);
        for (int trial = 0; trial < 20; ++trial) {
            const CacciopPartition r = testsupport::random_connected_partition(m, 6, rng);
            if (r.count < 2) continue;
            const PerimeterReport before = perimeters(r);
            const CacciopPartition merged = merge(r, {{0, 1}});
            const PerimeterReport after = perimeters(merged);
            CHECK(after.interior_interface_total <= before.interior_interface_total + 1e-12);
        }
    }
    SUBCASE("idempotent for already merged pairs") {
        const CacciopPartition q = merge(p, {{0, 1}});
        const CacciopPartition q2 = merge(q, {{0, 0}});
        CHECK(q2.label == q.label);
    }
    SUBCASE("unknown component rejected") {
        CHECK_THROWS_AS(merge(p, {{0, 7}}), std::invalid_argument);
    }
}

TEST_CASE("ordering invariant maintained") {
    std::mt19937 rng(37);
    GridMesh m(1.0, 8, 8, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const CacciopPartition p = testsupport::random_connected_partition(m, 6, rng);
        for (int j = 1; j < p.count; ++j)
            CHECK(p.area[static_cast<size_t>(j - 1)] >= p.area[static_cast<size_t>(j)]);
        const double total = std::accumulate(p.area.begin(), p.area.end(), 0.0);
        CHECK(total == doctest::Approx(m.length).epsilon(1e-9));
    }
}

TEST_CASE("local structure check") {
    GridMesh m(3.0, 24, 8, 0);
    SUBCASE("valid partitions pass") {
        std::mt19937 rng(43);
        for (int trial = 0; trial < 10; ++trial) {
            const CacciopPartition p = testsupport::random_connected_partition(m, 6, rng);
            const LocalStructureReport r = local_structure_check(p);
            CHECK(r.pass);
            CHECK(r.max_components_per_facet <= 2);
            CHECK(r.interface_symmetric);
            CHECK(r.doubling_identity_gap <= 1e-9);
        }
    }
    SUBCASE("doubling identity on the brick partition") {
        const CacciopPartition p = three_bricks(m);
        const PerimeterReport r = perimeters(p);
        const double sum =
            std::accumulate(r.perimeter_in_domain.begin(), r.perimeter_in_domain.end(), 0.0);
        CHECK(sum == doctest::Approx(2.0 * r.interior_interface_total).epsilon(1e-12));
    }
}

TEST_CASE("partition JSON round trip and interface CSV") {
    std::mt19937 rng(47);
    GridMesh m(1.0, 9, 6, 0);
    const CacciopPartition p = testsupport::random_connected_partition(m, 5, rng);
    const CacciopPartition back = partition_from_json(partition_to_json(p));
    CHECK(back.label == p.label);
    CHECK(back.count == p.count);
    const std::string csv = interface_matrix_csv(perimeters(p));
    CHECK(csv.find("component") == 0);
}
