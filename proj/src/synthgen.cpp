#include "woodleaf/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "woodleaf/error.hpp"
#include "woodleaf/rng.hpp"

namespace woodleaf {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// Orthonormal frame perpendicular to a unit axis; deterministic choice.
void perpendicular_frame(const Point3& axis, Point3& e1, Point3& e2) {
    const Point3 ref = std::abs(axis.x) <= std::abs(axis.y)
                           ? (std::abs(axis.x) <= std::abs(axis.z) ? Point3{1, 0, 0}
                                                                   : Point3{0, 0, 1})
                           : (std::abs(axis.y) <= std::abs(axis.z) ? Point3{0, 1, 0}
                                                                   : Point3{0, 0, 1});
    e1 = cross(axis, ref);
    e1 = e1 / norm(e1);
    e2 = cross(axis, e1);
}

double clamped_normal(Rng& rng, double stddev) {
    if (stddev <= 0.0) return 0.0;
    return std::clamp(rng.normal(0.0, stddev), -4.0 * stddev, 4.0 * stddev);
}

Point3 direction_from_angles(double azimuth, double elevation) {
    const double ce = std::cos(elevation);
    return {ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation)};
}

struct BranchTip {
    Point3 position;
    Point3 direction; // unit, pointing outward along the branch
};

std::vector<CylinderSegment> build_skeleton(const TreeSpec& spec, Rng& rng,
                                            std::vector<BranchTip>& tips) {
    std::vector<CylinderSegment> skeleton;
    skeleton.push_back({{0, 0, 0}, {0, 0, 1}, spec.trunk_height, spec.trunk_radius});

    for (std::size_t b = 0; b < spec.branch_count; ++b) {
        const double attach = spec.trunk_height * (0.35 + 0.6 * rng.uniform01());
        const double azimuth =
            kTau * (static_cast<double>(b) + 0.25 * rng.uniform01()) /
            static_cast<double>(spec.branch_count);
        const double elevation = rng.uniform(0.35, 0.95); // rad above horizontal
        const double length = rng.uniform(spec.branch_length_min, spec.branch_length_max);
        const double radius = rng.uniform(spec.branch_radius_min, spec.branch_radius_max);

        const Point3 dir = direction_from_angles(azimuth, elevation);
        const CylinderSegment branch{{0, 0, attach}, dir, length, radius};
        skeleton.push_back(branch);
        tips.push_back({branch.base + length * dir, dir});

        // two child segments per branch
        for (int c = 0; c < 2; ++c) {
            const double along = c == 0 ? 0.6 : 1.0;
            const Point3 base = branch.base + along * length * dir;
            const double child_az = azimuth + rng.uniform(-1.2, 1.2);
            const double child_el = std::min(1.4, elevation + rng.uniform(0.0, 0.4));
            const Point3 cdir = direction_from_angles(child_az, child_el);
            const CylinderSegment child{base, cdir, 0.5 * length, 0.55 * radius};
            skeleton.push_back(child);
            tips.push_back({child.base + child.length * cdir, cdir});
        }
    }
    return skeleton;
}

void sample_cylinder(const CylinderSegment& seg, std::size_t count, double noise_std, Rng& rng,
                     PointCloud& cloud, LabelVector& labels) {
    Point3 e1, e2;
    perpendicular_frame(seg.axis, e1, e2);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = seg.length * rng.uniform01();
        const double theta = kTau * rng.uniform01();
        const double r = seg.radius + clamped_normal(rng, noise_std);
        const Point3 radial = std::cos(theta) * e1 + std::sin(theta) * e2;
        cloud.points.push_back(seg.base + t * seg.axis + r * radial);
        labels.push_back(Label::Wood);
    }
}

Point3 sample_in_unit_ball(Rng& rng) {
    for (;;) {
        const Point3 p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        if (squared_norm(p) <= 1.0) return p;
    }
}

void sample_leaf_cluster(const Point3& center, double radius, std::size_t count, double noise_std,
                         bool planar, Rng& rng, PointCloud& cloud, LabelVector& labels) {
    // ellipsoid semi-axes with a random yaw about z
    const double a = radius, b = 0.9 * radius, c = 0.75 * radius;
    const double yaw = kTau * rng.uniform01();
    const double cy = std::cos(yaw), sy = std::sin(yaw);

    if (!planar) {
        for (std::size_t i = 0; i < count; ++i) {
            const Point3 u = sample_in_unit_ball(rng);
            const double lx = a * u.x, ly = b * u.y, lz = c * u.z;
            Point3 p{center.x + cy * lx - sy * ly, center.y + sy * lx + cy * ly, center.z + lz};
            p += {clamped_normal(rng, noise_std), clamped_normal(rng, noise_std),
                  clamped_normal(rng, noise_std)};
            cloud.points.push_back(p);
            labels.push_back(Label::Leaf);
        }
        return;
    }

    // planar mode: points on small disks scattered inside the cluster volume
    const double disk_radius = 0.06;
    const std::size_t points_per_disk = 60;
    const std::size_t disks = std::max<std::size_t>(1, (count + points_per_disk - 1) / points_per_disk);
    std::size_t emitted = 0;
    for (std::size_t d = 0; d < disks && emitted < count; ++d) {
        const Point3 u = sample_in_unit_ball(rng);
        const Point3 disk_center{center.x + a * u.x, center.y + b * u.y, center.z + c * u.z};
        const double az = kTau * rng.uniform01();
        const double el = std::asin(rng.uniform(-1, 1));
        const Point3 normal = direction_from_angles(az, el);
        Point3 e1, e2;
        perpendicular_frame(normal, e1, e2);
        const std::size_t quota = std::min<std::size_t>(points_per_disk, count - emitted);
        for (std::size_t i = 0; i < quota; ++i) {
            const double rr = disk_radius * std::sqrt(rng.uniform01());
            const double th = kTau * rng.uniform01();
            Point3 p = disk_center + rr * std::cos(th) * e1 + rr * std::sin(th) * e2;
            p += (clamped_normal(rng, noise_std)) * normal;
            cloud.points.push_back(p);
            labels.push_back(Label::Leaf);
        }
        emitted += quota;
    }
}

} // namespace

void TreeSpec::validate() const {
    if (!(trunk_height > 0.0) || !(trunk_radius > 0.0))
        throw ConfigError("trunk dimensions must be positive");
    if (!(branch_length_min > 0.0) || branch_length_max < branch_length_min)
        throw ConfigError("branch length range is invalid");
    if (!(branch_radius_min > 0.0) || branch_radius_max < branch_radius_min)
        throw ConfigError("branch radius range is invalid");
    if (!(cluster_radius > 0.0)) throw ConfigError("cluster radius must be positive");
    if (!(wood_point_density > 0.0)) throw ConfigError("wood point density must be positive");
    if (noise_std < 0.0) throw ConfigError("noise std must be non-negative");
    if (leaf_fraction < 0.0 || leaf_fraction >= 1.0)
        throw ConfigError("leaf fraction must lie in [0, 1)");
    if (leaf_fraction > 0.0 && leaf_cluster_count == 0)
        throw ConfigError("leaf fraction is positive but the spec has zero leaf clusters");
}

SyntheticTree generate_tree(const TreeSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    SyntheticTree tree;
    tree.spec = spec;
    std::vector<BranchTip> tips;
    tree.skeleton = build_skeleton(spec, rng, tips);

    // wood: per-segment counts from surface area x density
    std::size_t wood_total = 0;
    std::vector<std::size_t> seg_counts;
    seg_counts.reserve(tree.skeleton.size());
    for (const CylinderSegment& seg : tree.skeleton) {
        const double area = kTau * seg.radius * seg.length;
        const std::size_t count =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(area * spec.wood_point_density)));
        seg_counts.push_back(count);
        wood_total += count;
    }
    for (std::size_t s = 0; s < tree.skeleton.size(); ++s)
        sample_cylinder(tree.skeleton[s], seg_counts[s], spec.noise_std, rng, tree.cloud,
                        tree.labels);

    // leaves: total count hits the target fraction; clusters sit at branch tips
    if (spec.leaf_fraction > 0.0 && spec.leaf_cluster_count > 0) {
        const double w = static_cast<double>(wood_total);
        const std::size_t leaf_total = static_cast<std::size_t>(
            std::llround(w * spec.leaf_fraction / (1.0 - spec.leaf_fraction)));
        std::vector<Point3> centers;
        centers.reserve(spec.leaf_cluster_count);
        if (tips.empty()) throw ConfigError("cannot place leaf clusters: the tree has no branches");
        for (std::size_t cidx = 0; cidx < spec.leaf_cluster_count; ++cidx) {
            const BranchTip& tip = tips[cidx % tips.size()];
            // clusters sit just beyond the tip so foliage and wood overlap little
            Point3 center = tip.position + (0.9 * spec.cluster_radius) * tip.direction;
            if (cidx >= tips.size()) {
                // extra clusters continue outward from reused tips
                const double extra = spec.cluster_radius *
                                     (1.0 + 1.2 * static_cast<double>(cidx / tips.size()));
                center += extra * tip.direction;
                center += {clamped_normal(rng, 0.3 * spec.cluster_radius),
                           clamped_normal(rng, 0.3 * spec.cluster_radius),
                           clamped_normal(rng, 0.3 * spec.cluster_radius)};
            }
            centers.push_back(center);
        }
        const std::size_t per = leaf_total / centers.size();
        std::size_t rem = leaf_total % centers.size();
        for (const Point3& center : centers) {
            std::size_t count = per + (rem > 0 ? 1 : 0);
            if (rem > 0) --rem;
            sample_leaf_cluster(center, spec.cluster_radius, count, spec.noise_std,
                                spec.planar_leaves, rng, tree.cloud, tree.labels);
        }
    } else if (spec.leaf_fraction == 0.0 && spec.leaf_cluster_count > 0) {
        // fraction target disabled: fall back to fixed points per cluster
        for (std::size_t cidx = 0; cidx < spec.leaf_cluster_count; ++cidx) {
            Point3 center{0, 0, spec.trunk_height};
            if (!tips.empty()) {
                const BranchTip& tip = tips[cidx % tips.size()];
                center = tip.position + (0.9 * spec.cluster_radius) * tip.direction;
            }
            sample_leaf_cluster(center, spec.cluster_radius, spec.points_per_cluster,
                                spec.noise_std, spec.planar_leaves, rng, tree.cloud, tree.labels);
        }
    }

    return tree;
}

SuitePreset suite_preset_from_name(const std::string& name) {
    if (name == "leafy") return SuitePreset::Leafy;
    if (name == "balanced") return SuitePreset::Balanced;
    if (name == "woody") return SuitePreset::Woody;
    if (name == "cycle") return SuitePreset::Cycle;
    throw ConfigError("unknown suite preset '" + name + "' (use leafy, balanced, woody or cycle)");
}

std::string to_string(SuitePreset preset) {
    switch (preset) {
        case SuitePreset::Leafy: return "leafy";
        case SuitePreset::Balanced: return "balanced";
        case SuitePreset::Woody: return "woody";
        default: return "cycle";
    }
}

double preset_leaf_fraction(SuitePreset preset) {
    switch (preset) {
        case SuitePreset::Leafy: return 0.7;
        case SuitePreset::Woody: return 0.3;
        default: return 0.5;
    }
}

std::vector<SyntheticTree> generate_suite(SuitePreset preset, std::size_t count,
                                          std::uint64_t master_seed, bool planar_leaves) {
    static constexpr SuitePreset kCycle[] = {SuitePreset::Leafy, SuitePreset::Balanced,
                                             SuitePreset::Woody};
    std::vector<SyntheticTree> suite;
    suite.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const SuitePreset p = preset == SuitePreset::Cycle ? kCycle[i % 3] : preset;
        TreeSpec spec;
        spec.leaf_fraction = preset_leaf_fraction(p);
        spec.planar_leaves = planar_leaves;
        spec.seed = derive_seed(master_seed, i);
        suite.push_back(generate_tree(spec));
    }
    return suite;
}

} // namespace woodleaf
