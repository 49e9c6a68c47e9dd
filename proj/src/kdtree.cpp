#include "woodleaf/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "woodleaf/error.hpp"

namespace woodleaf {

namespace {

inline double coord(const Point3& p, int axis) {
    switch (axis) {
        case 0: return p.x;
        case 1: return p.y;
        default: return p.z;
    }
}

// Candidate ordering: lexicographic on (squared distance, point index).
struct Candidate {
    double d2;
    std::size_t index;

    bool operator<(const Candidate& o) const {
        return d2 < o.d2 || (d2 == o.d2 && index < o.index);
    }
};

} // namespace

SpatialIndex::SpatialIndex(const PointCloud& cloud) : cloud_(&cloud) {
    if (cloud.empty()) throw ConfigError("spatial index requires a non-empty cloud");
    if (cloud.size() > std::numeric_limits<std::uint32_t>::max())
        throw ConfigError("spatial index supports at most 2^32-1 points");
    order_.resize(cloud.size());
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * cloud.size() / kLeafSize + 2);
    root_ = build(0, static_cast<std::uint32_t>(order_.size()));
}

std::uint32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
    const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    if (end - begin <= kLeafSize) {
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }

    // split on the axis with the widest extent
    double lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::numeric_limits<double>::infinity();
        hi[a] = -std::numeric_limits<double>::infinity();
    }
    const PointCloud& pc = *cloud_;
    for (std::uint32_t i = begin; i < end; ++i) {
        const Point3& p = pc[order_[i]];
        for (int a = 0; a < 3; ++a) {
            const double c = coord(p, a);
            lo[a] = std::min(lo[a], c);
            hi[a] = std::max(hi[a], c);
        }
    }
    int axis = 0;
    double extent = hi[0] - lo[0];
    for (int a = 1; a < 3; ++a) {
        if (hi[a] - lo[a] > extent) {
            extent = hi[a] - lo[a];
            axis = a;
        }
    }
    if (extent <= 0.0) {
        // all points coincide; keep as one leaf
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&pc, axis](std::uint32_t a, std::uint32_t b) {
                         const double ca = coord(pc[a], axis);
                         const double cb = coord(pc[b], axis);
                         return ca < cb || (ca == cb && a < b);
                     });
    const double split = coord(pc[order_[mid]], axis);

    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

NeighborSet SpatialIndex::knn(std::size_t center_index, std::size_t k) const {
    const std::size_t n = cloud_->size();
    if (center_index >= n) throw ConfigError("knn center index out of range");
    if (k == 0) throw ConfigError("knn requires k >= 1");
    if (k > n - 1) throw ConfigError("knn requires k <= N-1");

    const Point3 q = (*cloud_)[center_index];

    // bounded max-heap of the k best candidates; heap top is the worst kept
    std::vector<Candidate> heap;
    heap.reserve(k);
    const auto worse = [](const Candidate& a, const Candidate& b) { return a < b; };

    const PointCloud& pc = *cloud_;
    // explicit stack of (node, lower bound on squared distance to its region)
    struct Visit {
        std::uint32_t node;
        double bound;
    };
    std::vector<Visit> stack;
    stack.push_back({root_, 0.0});

    while (!stack.empty()) {
        const Visit v = stack.back();
        stack.pop_back();
        if (heap.size() == k && v.bound > heap.front().d2) continue;
        const Node& node = nodes_[v.node];
        if (node.axis < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                if (idx == center_index) continue;
                const double d2 = squared_distance(q, pc[idx]);
                const Candidate c{d2, idx};
                if (heap.size() < k) {
                    heap.push_back(c);
                    std::push_heap(heap.begin(), heap.end(), worse);
                } else if (c < heap.front()) {
                    std::pop_heap(heap.begin(), heap.end(), worse);
                    heap.back() = c;
                    std::push_heap(heap.begin(), heap.end(), worse);
                }
            }
            continue;
        }
        const double diff = coord(q, node.axis) - node.split;
        const std::uint32_t near = diff < 0.0 ? node.left : node.right;
        const std::uint32_t far = diff < 0.0 ? node.right : node.left;
        const double far_bound = std::max(v.bound, diff * diff);
        // push far first so the near child is explored first
        stack.push_back({far, far_bound});
        stack.push_back({near, v.bound});
    }

    std::sort(heap.begin(), heap.end());
    NeighborSet out;
    out.center_index = center_index;
    out.neighbor_indices.reserve(k);
    out.distances.reserve(k);
    for (const Candidate& c : heap) {
        out.neighbor_indices.push_back(c.index);
        out.distances.push_back(std::sqrt(c.d2));
    }
    return out;
}

std::vector<std::size_t> SpatialIndex::within_radius(const Point3& center, double radius) const {
    if (radius < 0.0) throw ConfigError("radius must be non-negative");
    const double r2 = radius * radius;
    std::vector<std::size_t> out;
    const PointCloud& pc = *cloud_;

    std::vector<std::uint32_t> stack{root_};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (node.axis < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                if (squared_distance(center, pc[idx]) <= r2) out.push_back(idx);
            }
            continue;
        }
        const double diff = coord(center, node.axis) - node.split;
        if (diff <= radius) stack.push_back(node.left);
        if (-diff <= radius) stack.push_back(node.right);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace woodleaf
