#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "woodleaf/geometry.hpp"

namespace woodleaf {

/// Parameters of one synthetic tree. Wood points land on trunk/branch
/// cylinder surfaces with clamped Gaussian surface noise; leaf points fill
/// ellipsoidal clusters at branch tips. planar_leaves swaps the clusters for
/// small planar disks, mimicking broadleaved foliage whose plane-like
/// surfaces defeat the plane-fit sampling criterion.
struct TreeSpec {
    double trunk_height = 6.0;        // m
    double trunk_radius = 0.12;       // m
    std::size_t branch_count = 8;     // first-level branches; each forks twice
    double branch_length_min = 1.2;   // m
    double branch_length_max = 2.2;   // m
    double branch_radius_min = 0.015; // m
    double branch_radius_max = 0.035; // m
    std::size_t leaf_cluster_count = 24;
    double cluster_radius = 0.4;           // m, largest ellipsoid semi-axis
    double wood_point_density = 4500.0;    // points per m^2 of cylinder surface
    std::size_t points_per_cluster = 800;  // used when leaf_fraction == 0
    double noise_std = 0.002;              // m, surface noise (2 mm scanner class)
    double leaf_fraction = 0.5;            // target leaf/(leaf+wood); 0 disables leaves
    bool planar_leaves = false;
    std::uint64_t seed = 42;

    void validate() const;
};

/// One cylinder segment of the wood skeleton.
struct CylinderSegment {
    Point3 base;
    Point3 axis; // unit
    double length = 0.0;
    double radius = 0.0;
};

struct SyntheticTree {
    PointCloud cloud;
    LabelVector labels;
    std::vector<CylinderSegment> skeleton;
    TreeSpec spec;
};

/// Deterministic per seed. The achieved leaf/wood point-count ratio lands
/// within 5% of the target fraction.
SyntheticTree generate_tree(const TreeSpec& spec);

enum class SuitePreset { Leafy, Balanced, Woody, Cycle };

SuitePreset suite_preset_from_name(const std::string& name);
std::string to_string(SuitePreset preset);

/// Leaf-fraction target of a preset (0.7 / 0.5 / 0.3).
double preset_leaf_fraction(SuitePreset preset);

/// `count` trees with per-tree seeds derived from the master seed. Cycle
/// rotates leafy -> balanced -> woody.
std::vector<SyntheticTree> generate_suite(SuitePreset preset, std::size_t count,
                                          std::uint64_t master_seed,
                                          bool planar_leaves = false);

} // namespace woodleaf
