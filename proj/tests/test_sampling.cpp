#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support/oracles.hpp"
#include "woodleaf/error.hpp"
#include "woodleaf/sampling.hpp"
#include "woodleaf/synthgen.hpp"

using namespace woodleaf;

namespace {

NeighborSet neighborhood_of_all(const PointCloud& cloud) {
    NeighborSet nbh;
    nbh.center_index = 0;
    for (std::size_t i = 1; i < cloud.size(); ++i) {
        nbh.neighbor_indices.push_back(i);
        nbh.distances.push_back(distance(cloud[0], cloud[i]));
    }
    return nbh;
}

PointCloud random_blob(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    PointCloud cloud;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.normal(0.0, 1.0);
        const double y = rng.normal(0.0, 0.7);
        const double z = rng.normal(0.0, 0.4);
        cloud.points.push_back({x, y, z});
    }
    return cloud;
}

} // namespace

TEST_CASE("fit_plane: exactly coplanar points give sigma 0") {
    PointCloud cloud;
    cloud.points = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}, {0.3, 0.7, 1}};
    const PlaneFit fit = fit_plane(cloud, neighborhood_of_all(cloud));
    CHECK(fit.sigma <= 1e-12);
    CHECK(std::abs(std::abs(fit.normal.z) - 1.0) <= 1e-9);
}

TEST_CASE("fit_plane: symmetric saddle points have plane z=0 and sigma |h|") {
    const double h = 0.25;
    PointCloud cloud;
    cloud.points = {{1, 1, h}, {1, -1, -h}, {-1, 1, -h}, {-1, -1, h}};
    const PlaneFit fit = fit_plane(cloud, neighborhood_of_all(cloud));
    CHECK(std::abs(fit.centroid.x) <= 1e-12);
    CHECK(std::abs(fit.centroid.y) <= 1e-12);
    CHECK(std::abs(fit.centroid.z) <= 1e-12);
    CHECK(std::abs(fit.normal.z) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.sigma == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("fit_plane: sigma^2 equals the smallest covariance eigenvalue") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const PointCloud cloud = random_blob(101, seed);
        const NeighborSet nbh = neighborhood_of_all(cloud);
        const PlaneFit fit = fit_plane(cloud, nbh);
        const EigenTriple eigs = eigenvalues_sym3(local_covariance(cloud, nbh));
        CHECK(fit.sigma * fit.sigma ==
              doctest::Approx(eigs.l3).epsilon(1e-9));
    }
}

TEST_CASE("fit_plane: sigma is rigid-motion invariant") {
    const PointCloud cloud = random_blob(60, 77);
    const NeighborSet nbh = neighborhood_of_all(cloud);
    const double base = fit_plane(cloud, nbh).sigma;
    Rng rng(78);
    for (int trial = 0; trial < 50; ++trial) {
        const oracles::Rotation rot = oracles::random_rotation(rng);
        const Point3 shift{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        PointCloud moved;
        for (const Point3& p : cloud.points) moved.points.push_back(rot.apply(p) + shift);
        NeighborSet mn = nbh;
        for (std::size_t m = 0; m < mn.k(); ++m)
            mn.distances[m] = distance(moved[0], moved[mn.neighbor_indices[m]]);
        CHECK(fit_plane(moved, mn).sigma == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("fit_plane: coincident points degrade to sigma 0 with normal (0,0,1)") {
    PointCloud cloud;
    for (int i = 0; i < 6; ++i) cloud.points.push_back({4, 5, 6});
    const PlaneFit fit = fit_plane(cloud, neighborhood_of_all(cloud));
    CHECK(fit.sigma == 0.0);
    CHECK(fit.normal.z == 1.0);
}

TEST_CASE("fit_plane: needs at least three points") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(fit_plane(cloud, neighborhood_of_all(cloud)), ConfigError);
}

TEST_CASE("sample profiles validate their counts") {
    const SampleProfile zero_leaf{2000, 0, 800};
    const SampleProfile oversubscribed{2000, 1300, 800};
    const SampleProfile leafy{2000, 1200, 800};
    CHECK_THROWS_AS(zero_leaf.validate(), ConfigError);
    CHECK_THROWS_AS(oversubscribed.validate(), ConfigError);
    CHECK_NOTHROW(leafy.validate());
    CHECK_THROWS_AS(SampleProfile::from_name("bushy"), ConfigError);
    CHECK(SampleProfile::from_name("woody").n_wood == 1200);
}

TEST_CASE("select_candidates: n=N returns every index") {
    const auto picks = select_candidates(100, 100, 5);
    std::set<std::size_t> unique(picks.begin(), picks.end());
    CHECK(unique.size() == 100);
    CHECK(*unique.begin() == 0);
    CHECK(*unique.rbegin() == 99);
}

TEST_CASE("select_candidates: deterministic per seed, distinct across seeds") {
    const auto a = select_candidates(10000, 200, 42);
    const auto b = select_candidates(10000, 200, 42);
    const auto c = select_candidates(10000, 200, 43);
    CHECK(a == b);
    CHECK(a != c);
    CHECK_THROWS_AS(select_candidates(10, 11, 1), ConfigError);
}

TEST_CASE("select_candidates: chi-square uniformity across 100 seeds") {
    // 2000 draws out of one million points, 100 seeds, indices bucketed into
    // 100 equal bins; the aggregate must be consistent with uniformity.
    const std::size_t n_points = 1000000;
    const std::size_t n_draws = 2000;
    const std::size_t bins = 100;
    std::vector<double> counts(bins, 0.0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto picks = select_candidates(n_points, n_draws, seed);
        for (const std::size_t idx : picks) counts[idx / (n_points / bins)] += 1.0;
    }
    const double expected = 100.0 * n_draws / bins;
    double stat = 0.0;
    for (const double c : counts) stat += (c - expected) * (c - expected) / expected;
    const double p = oracles::chi_square_tail(stat, static_cast<double>(bins - 1));
    CHECK(p > 0.01);
}

TEST_CASE("auto_select_training: synthetic tree selection is nearly pure") {
    TreeSpec spec;
    spec.wood_point_density = 1500.0;
    spec.leaf_fraction = 0.6;
    spec.seed = 404;
    const SyntheticTree tree = generate_tree(spec);
    SpatialIndex index(tree.cloud);
    SampleProfile profile{2000, 1200, 800};
    const TrainingSet ts = auto_select_training(tree.cloud, index, profile, 100, 42, 2);

    std::size_t leaf_ok = 0, wood_ok = 0;
    for (const TrainingEntry& e : ts.entries) {
        if (e.label == Label::Leaf && tree.labels[e.point_index] == Label::Leaf) ++leaf_ok;
        if (e.label == Label::Wood && tree.labels[e.point_index] == Label::Wood) ++wood_ok;
    }
    CHECK(static_cast<double>(leaf_ok) / 1200.0 >= 0.95);
    CHECK(static_cast<double>(wood_ok) / 800.0 >= 0.95);

    // selection invariant: every leaf sigma >= every wood sigma
    double min_leaf = 1e300, max_wood = -1e300;
    for (const TrainingEntry& e : ts.entries) {
        if (e.label == Label::Leaf) min_leaf = std::min(min_leaf, e.sigma);
        if (e.label == Label::Wood) max_wood = std::max(max_wood, e.sigma);
    }
    CHECK(min_leaf >= max_wood);
}

TEST_CASE("auto_select_training: all-zero sigmas still select deterministically") {
    PointCloud cloud;
    for (int gx = 0; gx < 20; ++gx)
        for (int gy = 0; gy < 20; ++gy) cloud.points.push_back({0.05 * gx, 0.05 * gy, 0.0});
    SpatialIndex index(cloud);
    SampleProfile profile{300, 100, 100};
    const TrainingSet a = auto_select_training(cloud, index, profile, 10, 7);
    const TrainingSet b = auto_select_training(cloud, index, profile, 10, 7);
    REQUIRE(a.size() == 200);
    CHECK(a.count(Label::Leaf) == 100);
    CHECK(a.count(Label::Wood) == 100);
    std::set<std::size_t> seen;
    for (const TrainingEntry& e : a.entries) seen.insert(e.point_index);
    CHECK(seen.size() == 200); // disjoint classes
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.entries[i].point_index == b.entries[i].point_index);
        CHECK(a.entries[i].label == b.entries[i].label);
    }
}

TEST_CASE("auto_select_training sigmas equal fit_plane on the same neighborhoods") {
    const PointCloud cloud = random_blob(1500, 91);
    SpatialIndex index(cloud);
    SampleProfile profile{300, 120, 120};
    const TrainingSet ts = auto_select_training(cloud, index, profile, 25, 5);
    for (std::size_t i = 0; i < ts.size(); i += 17) {
        const TrainingEntry& e = ts.entries[i];
        CHECK(fit_plane(cloud, index.knn(e.point_index, 25)).sigma == e.sigma);
    }
}

TEST_CASE("auto_select_training: worker count does not change the result") {
    const PointCloud cloud = random_blob(2000, 55);
    SpatialIndex index(cloud);
    SampleProfile profile{500, 200, 200};
    const TrainingSet a = auto_select_training(cloud, index, profile, 30, 9, 1);
    const TrainingSet b = auto_select_training(cloud, index, profile, 30, 9, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.entries[i].point_index == b.entries[i].point_index);
        CHECK(a.entries[i].sigma == b.entries[i].sigma);
        CHECK(a.entries[i].features.c_lambda == b.entries[i].features.c_lambda);
    }
}

TEST_CASE("radius_union: one huge sphere swallows the whole cloud") {
    const PointCloud cloud = random_blob(200, 60);
    SpatialIndex index(cloud);
    const auto members = radius_union(index, {0}, 1000.0);
    CHECK(members.size() == cloud.size());
}

TEST_CASE("seed_sphere_training: disjoint spheres match brute-force counts") {
    Rng rng(61);
    PointCloud cloud;
    for (int i = 0; i < 300; ++i) {
        const double x = rng.normal(0, 0.2);
        const double y = rng.normal(0, 0.2);
        const double z = rng.normal(0, 0.2);
        cloud.points.push_back({x, y, z});
    }
    for (int i = 0; i < 300; ++i) {
        const double x = rng.normal(10, 0.2);
        const double y = rng.normal(0, 0.2);
        const double z = rng.normal(0, 0.2);
        cloud.points.push_back({x, y, z});
    }
    SpatialIndex index(cloud);
    const double radius = 0.3;
    const TrainingSet ts = seed_sphere_training(cloud, index, {0, 5}, {300, 305}, radius, 20);

    std::size_t want_leaf = 0, want_wood = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const bool in_leaf = distance(cloud[i], cloud[0]) <= radius ||
                             distance(cloud[i], cloud[5]) <= radius;
        const bool in_wood = distance(cloud[i], cloud[300]) <= radius ||
                             distance(cloud[i], cloud[305]) <= radius;
        if (in_leaf) ++want_leaf;
        if (in_wood) ++want_wood;
    }
    CHECK(ts.count(Label::Leaf) == want_leaf);
    CHECK(ts.count(Label::Wood) == want_wood);
}

TEST_CASE("seed_sphere_training: overlap resolves to the nearest seed, ties to leaf") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 0, 0}, {0.4, 0, 0}, {0.6, 0, 0}, {0.5, 0, 0}};
    SpatialIndex index(cloud);
    const TrainingSet ts = seed_sphere_training(cloud, index, {0}, {1}, 2.0, 2);
    auto label_of = [&](std::size_t idx) {
        for (const TrainingEntry& e : ts.entries)
            if (e.point_index == idx) return e.label;
        FAIL("index not in training set");
        return Label::Wood;
    };
    CHECK(label_of(2) == Label::Leaf);  // nearer to seed 0
    CHECK(label_of(3) == Label::Wood);  // nearer to seed 1
    CHECK(label_of(4) == Label::Leaf);  // exact tie goes to leaf
}

TEST_CASE("seed_sphere_training: zero radius and empty classes are rejected") {
    const PointCloud cloud = random_blob(50, 62);
    SpatialIndex index(cloud);
    CHECK_THROWS_AS(seed_sphere_training(cloud, index, {0}, {1}, 0.0, 5), ConfigError);
    // wood seeds empty -> empty class
    CHECK_THROWS_AS(seed_sphere_training(cloud, index, {0}, {}, 0.5, 5), ConfigError);
}

TEST_CASE("training_from_labels: n=N keeps every point with its label") {
    const PointCloud cloud = random_blob(80, 63);
    LabelVector labels;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        labels.push_back(i % 3 == 0 ? Label::Wood : Label::Leaf);
    SpatialIndex index(cloud);
    const TrainingSet ts = training_from_labels(cloud, index, labels, cloud.size(), 8, 10);
    REQUIRE(ts.size() == cloud.size());
    for (const TrainingEntry& e : ts.entries) CHECK(e.label == labels[e.point_index]);
}

TEST_CASE("training_from_labels: deterministic and class-proportional") {
    const PointCloud cloud = random_blob(4000, 64);
    LabelVector labels;
    Rng lrng(65);
    std::size_t leaf_total = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const bool leaf = lrng.uniform01() < 0.3;
        labels.push_back(leaf ? Label::Leaf : Label::Wood);
        leaf_total += leaf;
    }
    SpatialIndex index(cloud);

    const TrainingSet a = training_from_labels(cloud, index, labels, 400, 99, 15);
    const TrainingSet b = training_from_labels(cloud, index, labels, 400, 99, 15);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a.entries[i].point_index == b.entries[i].point_index);

    // sampled class fraction within 3 binomial sigmas of the population rate
    const double p = static_cast<double>(leaf_total) / cloud.size();
    double mean_frac = 0.0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const TrainingSet ts = training_from_labels(cloud, index, labels, 400, 1000 + t, 15);
        mean_frac += static_cast<double>(ts.count(Label::Leaf)) / 400.0;
    }
    mean_frac /= trials;
    const double sigma = std::sqrt(p * (1 - p) / (400.0 * trials));
    CHECK(std::abs(mean_frac - p) <= 3.0 * sigma);
}

TEST_CASE("training_from_labels: single-class sample is rejected") {
    const PointCloud cloud = random_blob(50, 66);
    LabelVector labels(cloud.size(), Label::Leaf);
    SpatialIndex index(cloud);
    CHECK_THROWS_AS(training_from_labels(cloud, index, labels, 20, 1, 5), NumericError);
}
