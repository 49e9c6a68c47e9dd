#include "woodleaf/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "woodleaf/error.hpp"
#include "woodleaf/parallel.hpp"
#include "woodleaf/rng.hpp"

namespace woodleaf {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct CandidateEval {
    double sigma = 0.0;
    FeatureVector features;
};

// Shared single pass: neighborhood -> covariance -> eigen system -> both the
// plane-fit sigma and the feature tuple.
CandidateEval evaluate_point(const PointCloud& cloud, const SpatialIndex& index, std::size_t i,
                             std::size_t k) {
    const NeighborSet nbh = index.knn(i, k);
    const SymMat3 cov = local_covariance(cloud, nbh);
    const EigenTriple eigs = eigenvalues_sym3(cov);
    const Point3 normal = smallest_eigenvector(cov, eigs);

    Point3 centroid = cloud[nbh.center_index];
    for (std::size_t idx : nbh.neighbor_indices) centroid += cloud[idx];
    centroid = centroid / static_cast<double>(nbh.k() + 1);

    double ss = 0.0;
    auto add = [&](const Point3& p) {
        const double d = dot(p - centroid, normal);
        ss += d * d;
    };
    add(cloud[nbh.center_index]);
    for (std::size_t idx : nbh.neighbor_indices) add(cloud[idx]);
    const double sigma = std::sqrt(ss / static_cast<double>(nbh.k() + 1));

    const Point3& p = cloud[nbh.center_index];
    return {sigma,
            {p.x, p.y, p.z, change_of_curvature(eigs), local_density(nbh)}};
}

void validate_training_set(const TrainingSet& ts) {
    if (ts.count(Label::Leaf) == 0 || ts.count(Label::Wood) == 0)
        throw NumericError("training set must contain both classes");
    std::vector<std::size_t> idx;
    idx.reserve(ts.size());
    for (const TrainingEntry& e : ts.entries) idx.push_back(e.point_index);
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
        throw ConfigError("training set has duplicate point indices");
}

} // namespace

SampleProfile SampleProfile::from_name(const std::string& name) {
    if (name == "leafy") return leafy();
    if (name == "balanced") return balanced();
    if (name == "woody") return woody();
    throw ConfigError("unknown sample profile '" + name + "' (use leafy, balanced or woody)");
}

void SampleProfile::validate() const {
    if (n_candidates == 0 || n_leaf == 0 || n_wood == 0)
        throw ConfigError("sample profile counts must be positive");
    if (n_leaf + n_wood > n_candidates)
        throw ConfigError("n_leaf + n_wood must not exceed n_candidates");
}

std::size_t TrainingSet::count(Label l) const {
    std::size_t n = 0;
    for (const TrainingEntry& e : entries)
        if (e.label == l) ++n;
    return n;
}

PlaneFit fit_plane(const PointCloud& cloud, const NeighborSet& nbh) {
    if (nbh.k() < 2) throw ConfigError("plane fit requires at least 3 points (k >= 2)");
    const SymMat3 cov = local_covariance(cloud, nbh);
    const EigenTriple eigs = eigenvalues_sym3(cov);
    const Point3 normal = smallest_eigenvector(cov, eigs);

    Point3 centroid = cloud[nbh.center_index];
    for (std::size_t idx : nbh.neighbor_indices) centroid += cloud[idx];
    centroid = centroid / static_cast<double>(nbh.k() + 1);

    double ss = 0.0;
    auto add = [&](const Point3& p) {
        const double d = dot(p - centroid, normal);
        ss += d * d;
    };
    add(cloud[nbh.center_index]);
    for (std::size_t idx : nbh.neighbor_indices) add(cloud[idx]);

    return {centroid, normal, std::sqrt(ss / static_cast<double>(nbh.k() + 1))};
}

std::vector<std::size_t> select_candidates(std::size_t cloud_size, std::size_t n,
                                           std::uint64_t seed) {
    if (n == 0) throw ConfigError("candidate count must be positive");
    if (n > cloud_size)
        throw ConfigError("cannot select " + std::to_string(n) + " candidates from " +
                          std::to_string(cloud_size) + " points");
    std::vector<std::size_t> perm(cloud_size);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.bounded(cloud_size - i));
        std::swap(perm[i], perm[j]);
    }
    perm.resize(n);
    return perm;
}

TrainingSet auto_select_training(const PointCloud& cloud, const SpatialIndex& index,
                                 const SampleProfile& profile, std::size_t k, std::uint64_t seed,
                                 unsigned workers) {
    profile.validate();
    const std::size_t n = cloud.size();
    if (n < 2 || k > n - 1) throw ConfigError("auto_select_training requires k <= N-1");

    const std::vector<std::size_t> candidates = select_candidates(n, profile.n_candidates, seed);
    std::vector<CandidateEval> evals(candidates.size());
    parallel_chunks(candidates.size(), resolve_workers(workers),
                    [&](std::size_t begin, std::size_t end) {
                        for (std::size_t c = begin; c < end; ++c)
                            evals[c] = evaluate_point(cloud, index, candidates[c], k);
                    });

    // descending sigma, ties by ascending point index
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (evals[a].sigma != evals[b].sigma) return evals[a].sigma > evals[b].sigma;
        return candidates[a] < candidates[b];
    });

    TrainingSet ts;
    ts.entries.reserve(profile.n_leaf + profile.n_wood);
    for (std::size_t r = 0; r < profile.n_leaf; ++r) {
        const std::size_t c = order[r];
        ts.entries.push_back({evals[c].features, Label::Leaf, candidates[c], evals[c].sigma});
    }
    for (std::size_t r = order.size() - profile.n_wood; r < order.size(); ++r) {
        const std::size_t c = order[r];
        ts.entries.push_back({evals[c].features, Label::Wood, candidates[c], evals[c].sigma});
    }
    validate_training_set(ts);
    return ts;
}

std::vector<std::size_t> radius_union(const SpatialIndex& index,
                                      const std::vector<std::size_t>& seeds, double radius) {
    std::vector<std::size_t> members;
    for (std::size_t s : seeds) {
        if (s >= index.size()) throw ConfigError("seed index out of range");
        const auto in_sphere = index.within_radius(index.cloud()[s], radius);
        members.insert(members.end(), in_sphere.begin(), in_sphere.end());
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    return members;
}

TrainingSet seed_sphere_training(const PointCloud& cloud, const SpatialIndex& index,
                                 const std::vector<std::size_t>& leaf_seeds,
                                 const std::vector<std::size_t>& wood_seeds, double radius,
                                 std::size_t k, unsigned workers) {
    if (radius <= 0.0) throw ConfigError("sphere radius must be positive");
    const std::size_t n = cloud.size();
    if (n < 2 || k > n - 1) throw ConfigError("seed_sphere_training requires k <= N-1");

    const std::vector<std::size_t> leaf_union = radius_union(index, leaf_seeds, radius);
    const std::vector<std::size_t> wood_union = radius_union(index, wood_seeds, radius);

    auto min_seed_distance = [&](std::size_t point, const std::vector<std::size_t>& seeds) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s : seeds) best = std::min(best, squared_distance(cloud[point], cloud[s]));
        return best;
    };

    // merge the unions; overlap resolves to the nearest seed, ties to leaf
    std::vector<std::pair<std::size_t, Label>> assigned;
    assigned.reserve(leaf_union.size() + wood_union.size());
    std::size_t li = 0, wi = 0;
    while (li < leaf_union.size() || wi < wood_union.size()) {
        if (wi == wood_union.size() || (li < leaf_union.size() && leaf_union[li] < wood_union[wi])) {
            assigned.emplace_back(leaf_union[li++], Label::Leaf);
        } else if (li == leaf_union.size() || wood_union[wi] < leaf_union[li]) {
            assigned.emplace_back(wood_union[wi++], Label::Wood);
        } else {
            const std::size_t p = leaf_union[li];
            const double dl = min_seed_distance(p, leaf_seeds);
            const double dw = min_seed_distance(p, wood_seeds);
            assigned.emplace_back(p, dl <= dw ? Label::Leaf : Label::Wood);
            ++li;
            ++wi;
        }
    }

    bool has_leaf = false, has_wood = false;
    for (const auto& [idx, label] : assigned) (label == Label::Leaf ? has_leaf : has_wood) = true;
    if (!has_leaf || !has_wood)
        throw ConfigError("seed spheres produced an empty class; add seeds or grow the radius");

    TrainingSet ts;
    ts.entries.resize(assigned.size());
    parallel_chunks(assigned.size(), resolve_workers(workers),
                    [&](std::size_t begin, std::size_t end) {
                        for (std::size_t i = begin; i < end; ++i) {
                            const auto& [idx, label] = assigned[i];
                            ts.entries[i] = {feature_at(cloud, index.knn(idx, k)), label, idx, kNan};
                        }
                    });
    validate_training_set(ts);
    return ts;
}

TrainingSet training_from_labels(const PointCloud& cloud, const SpatialIndex& index,
                                 const LabelVector& labels, std::size_t n, std::uint64_t seed,
                                 std::size_t k, unsigned workers) {
    if (labels.size() != cloud.size())
        throw ConfigError("label vector length does not match cloud size");
    if (cloud.size() < 2 || k > cloud.size() - 1)
        throw ConfigError("training_from_labels requires k <= N-1");

    const std::vector<std::size_t> picks = select_candidates(cloud.size(), n, seed);
    TrainingSet ts;
    ts.entries.resize(picks.size());
    parallel_chunks(picks.size(), resolve_workers(workers),
                    [&](std::size_t begin, std::size_t end) {
                        for (std::size_t i = begin; i < end; ++i) {
                            const std::size_t idx = picks[i];
                            ts.entries[i] = {feature_at(cloud, index.knn(idx, k)), labels[idx], idx,
                                             kNan};
                        }
                    });
    validate_training_set(ts);
    return ts;
}

} // namespace woodleaf
