#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "woodleaf/features.hpp"
#include "woodleaf/geometry.hpp"
#include "woodleaf/kdtree.hpp"

namespace woodleaf {

/// Total-least-squares plane through a neighborhood: passes through the
/// centroid, normal along the direction of least variance. sigma is the
/// population standard deviation (divisor k+1) of the signed point-to-plane
/// distances; sigma^2 equals the smallest covariance eigenvalue.
struct PlaneFit {
    Point3 centroid;
    Point3 normal; // unit length
    double sigma = 0.0;
};

/// How many candidates to score and how many of each class to keep.
struct SampleProfile {
    std::size_t n_candidates = 2000;
    std::size_t n_leaf = 1200;
    std::size_t n_wood = 800;

    static SampleProfile leafy() { return {2000, 1200, 800}; }
    static SampleProfile balanced() { return {2000, 1000, 1000}; }
    static SampleProfile woody() { return {2000, 800, 1200}; }

    /// Named preset lookup ("leafy", "balanced", "woody").
    static SampleProfile from_name(const std::string& name);

    void validate() const;
};

/// One labeled training point: its features, class, provenance index into
/// the source cloud, and the plane-fit sigma when the selection used one
/// (NaN otherwise).
struct TrainingEntry {
    FeatureVector features;
    Label label = Label::Wood;
    std::size_t point_index = 0;
    double sigma = 0.0;
};

struct TrainingSet {
    std::vector<TrainingEntry> entries;

    std::size_t size() const { return entries.size(); }
    std::size_t count(Label l) const;
};

PlaneFit fit_plane(const PointCloud& cloud, const NeighborSet& nbh);

/// n distinct indices drawn uniformly without replacement, fully determined
/// by the seed (partial Fisher-Yates over the identity permutation).
std::vector<std::size_t> select_candidates(std::size_t cloud_size, std::size_t n,
                                           std::uint64_t seed);

/// Plane-fit residual sampling: score n_candidates random points by the
/// standard deviation of their neighborhood's plane fit; the top n_leaf
/// sigmas become leaf training points, the bottom n_wood become wood
/// training points, the middle is discarded. Ties are broken by ascending
/// point index.
TrainingSet auto_select_training(const PointCloud& cloud, const SpatialIndex& index,
                                 const SampleProfile& profile, std::size_t k, std::uint64_t seed,
                                 unsigned workers = 1);

/// Indices of all points within `radius` of any seed, ascending, no
/// duplicates.
std::vector<std::size_t> radius_union(const SpatialIndex& index,
                                      const std::vector<std::size_t>& seeds, double radius);

/// Seed-sphere baseline: every point within `radius` of a leaf seed joins
/// the leaf training set, likewise for wood; a point inside both unions goes
/// to the class of its nearest seed (ties to leaf).
TrainingSet seed_sphere_training(const PointCloud& cloud, const SpatialIndex& index,
                                 const std::vector<std::size_t>& leaf_seeds,
                                 const std::vector<std::size_t>& wood_seeds, double radius,
                                 std::size_t k, unsigned workers = 1);

/// Training set from n random points of a fully labeled cloud.
TrainingSet training_from_labels(const PointCloud& cloud, const SpatialIndex& index,
                                 const LabelVector& labels, std::size_t n, std::uint64_t seed,
                                 std::size_t k, unsigned workers = 1);

} // namespace woodleaf
