#include <doctest.h>

#include <algorithm>

#include "support/oracles.hpp"
#include "woodleaf/error.hpp"
#include "woodleaf/kdtree.hpp"
#include "woodleaf/rng.hpp"

using namespace woodleaf;

namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed, double extent = 10.0) {
    Rng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform(-extent, extent);
        const double y = rng.uniform(-extent, extent);
        const double z = rng.uniform(-extent, extent);
        cloud.points.push_back({x, y, z});
    }
    return cloud;
}

void check_against_brute_force(const PointCloud& cloud, const SpatialIndex& index,
                               std::size_t center, std::size_t k) {
    const NeighborSet got = index.knn(center, k);
    const oracles::KnnResult want = oracles::brute_force_knn(cloud, center, k);
    REQUIRE(got.neighbor_indices == want.indices);
    for (std::size_t i = 0; i < k; ++i) REQUIRE(got.distances[i] == want.distances[i]);
}

} // namespace

TEST_CASE("collinear points: smallest neighbors in order") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    SpatialIndex index(cloud);

    const NeighborSet n2 = index.knn(0, 2);
    CHECK(n2.neighbor_indices == std::vector<std::size_t>{1, 2});
    CHECK(n2.distances == std::vector<double>{1.0, 2.0});

    const NeighborSet n3 = index.knn(0, 3);
    CHECK(n3.neighbor_indices == std::vector<std::size_t>{1, 2, 3});
    CHECK(n3.distances == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("single-point cloud builds but answers no queries") {
    PointCloud cloud;
    cloud.points = {{1, 2, 3}};
    SpatialIndex index(cloud);
    CHECK(index.size() == 1);
    CHECK_THROWS_AS(index.knn(0, 1), ConfigError);
}

TEST_CASE("empty cloud is rejected") {
    PointCloud cloud;
    CHECK_THROWS_AS(SpatialIndex{cloud}, ConfigError);
}

TEST_CASE("bad query arguments") {
    PointCloud cloud = random_cloud(10, 7);
    SpatialIndex index(cloud);
    CHECK_THROWS_AS(index.knn(10, 3), ConfigError);  // center out of range
    CHECK_THROWS_AS(index.knn(0, 10), ConfigError);  // k > N-1
    CHECK_THROWS_AS(index.knn(0, 0), ConfigError);
}

TEST_CASE("1000 random points match the brute-force oracle") {
    const PointCloud cloud = random_cloud(1000, 42);
    SpatialIndex index(cloud);
    Rng rng(43);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t center = rng.bounded(cloud.size());
        const std::size_t k = 1 + rng.bounded(200);
        check_against_brute_force(cloud, index, center, k);
    }
}

TEST_CASE("500 points, every center, k=100 equals brute force") {
    const PointCloud cloud = random_cloud(500, 99);
    SpatialIndex index(cloud);
    for (std::size_t center = 0; center < cloud.size(); ++center)
        check_against_brute_force(cloud, index, center, 100);
}

TEST_CASE("duplicate points appear as zero-distance neighbors, center excluded") {
    PointCloud cloud;
    cloud.points = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {5, 5, 5}};
    SpatialIndex index(cloud);

    const NeighborSet n = index.knn(1, 2);
    CHECK(n.neighbor_indices == std::vector<std::size_t>{0, 2}); // ties by index
    CHECK(n.distances[0] == 0.0);
    CHECK(n.distances[1] == 0.0);
    CHECK(std::find(n.neighbor_indices.begin(), n.neighbor_indices.end(), 1) ==
          n.neighbor_indices.end());
}

TEST_CASE("clustered duplicates: oracle agreement with heavy ties") {
    Rng rng(5);
    PointCloud cloud;
    for (int c = 0; c < 20; ++c) {
        const Point3 base{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        for (int r = 0; r < 10; ++r) cloud.points.push_back(base);
    }
    SpatialIndex index(cloud);
    for (std::size_t center = 0; center < cloud.size(); center += 7)
        check_against_brute_force(cloud, index, center, 25);
}

TEST_CASE("exactness invariant: worst kept <= best excluded") {
    const PointCloud cloud = random_cloud(300, 11);
    SpatialIndex index(cloud);
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t center = rng.bounded(cloud.size());
        const std::size_t k = 1 + rng.bounded(50);
        const NeighborSet n = index.knn(center, k);
        std::vector<bool> kept(cloud.size(), false);
        for (std::size_t idx : n.neighbor_indices) kept[idx] = true;
        const double worst = n.distances.back();
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            if (i == center || kept[i]) continue;
            CHECK(distance(cloud[center], cloud[i]) >= worst);
        }
    }
}

TEST_CASE("determinism: identical cloud and parameters give identical answers") {
    const PointCloud cloud = random_cloud(400, 21);
    SpatialIndex a(cloud);
    SpatialIndex b(cloud);
    for (std::size_t center = 0; center < cloud.size(); center += 13) {
        const NeighborSet na = a.knn(center, 37);
        const NeighborSet nb = b.knn(center, 37);
        CHECK(na.neighbor_indices == nb.neighbor_indices);
        CHECK(na.distances == nb.distances);
    }
}

TEST_CASE("within_radius matches a linear scan") {
    const PointCloud cloud = random_cloud(500, 31, 2.0);
    SpatialIndex index(cloud);
    Rng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        const Point3 center{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const double radius = rng.uniform(0.1, 2.5);
        const auto got = index.within_radius(center, radius);
        std::vector<std::size_t> want;
        for (std::size_t i = 0; i < cloud.size(); ++i)
            if (distance(center, cloud[i]) <= radius) want.push_back(i);
        CHECK(got == want);
    }
}
