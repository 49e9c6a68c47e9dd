#pragma once

#include <cstddef>
#include <vector>

#include "woodleaf/geometry.hpp"

namespace woodleaf {

/// k nearest neighbors of one query point. The center itself is excluded.
/// Distances are Euclidean, in ascending order; ties at equal distance are
/// ordered by ascending point index.
struct NeighborSet {
    std::size_t center_index = 0;
    std::vector<std::size_t> neighbor_indices;
    std::vector<double> distances;

    std::size_t k() const { return neighbor_indices.size(); }
};

/// Immutable kd-tree over a point cloud. Queries are exact: every answer
/// equals the brute-force scan, with distance ties broken by smaller point
/// index. The index keeps a reference to the cloud, which must outlive it.
/// Concurrent read-only queries are safe.
class SpatialIndex {
  public:
    explicit SpatialIndex(const PointCloud& cloud);

    /// Exact k nearest neighbors of cloud[center_index]. Requires
    /// 1 <= k <= size() - 1 and center_index < size().
    NeighborSet knn(std::size_t center_index, std::size_t k) const;

    /// Indices of all points with distance(center, p) <= radius, ascending.
    std::vector<std::size_t> within_radius(const Point3& center, double radius) const;

    std::size_t size() const { return cloud_->size(); }
    const PointCloud& cloud() const { return *cloud_; }

  private:
    struct Node {
        // leaf: axis < 0, [begin, end) indexes into order_
        // internal: split plane at `split` on `axis`, children in nodes_
        double split = 0.0;
        int axis = -1;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end);

    const PointCloud* cloud_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;

    static constexpr std::uint32_t kLeafSize = 16;
};

} // namespace woodleaf
