#include "woodleaf/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "woodleaf/error.hpp"
#include "woodleaf/parallel.hpp"

namespace woodleaf {

namespace {

constexpr double kTraceEpsilon = 1e-12; // m^2, degenerate-neighborhood cutoff

inline double max_abs_entry(const SymMat3& m) {
    return std::max({std::abs(m.xx), std::abs(m.xy), std::abs(m.xz), std::abs(m.yy),
                     std::abs(m.yz), std::abs(m.zz)});
}

// Characteristic polynomial p(l) = l^3 - c2 l^2 + c1 l - c0 and derivative.
struct CharPoly {
    double c2, c1, c0;

    double value(double l) const { return ((l - c2) * l + c1) * l - c0; }
    double deriv(double l) const { return (3.0 * l - 2.0 * c2) * l + c1; }
};

CharPoly char_poly(const SymMat3& m) {
    const double c2 = m.trace();
    const double c1 = m.xx * m.yy + m.xx * m.zz + m.yy * m.zz - m.xy * m.xy - m.xz * m.xz -
                      m.yz * m.yz;
    const double c0 = m.xx * (m.yy * m.zz - m.yz * m.yz) - m.xy * (m.xy * m.zz - m.yz * m.xz) +
                      m.xz * (m.xy * m.yz - m.yy * m.xz);
    return {c2, c1, c0};
}

// One guarded Newton step; accepted only if it reduces |p|.
double polish_root(const CharPoly& p, double l, double scale) {
    for (int iter = 0; iter < 2; ++iter) {
        const double f = p.value(l);
        const double fp = p.deriv(l);
        if (std::abs(fp) <= 1e-14 * scale * scale) break;
        const double next = l - f / fp;
        if (!std::isfinite(next) || std::abs(p.value(next)) >= std::abs(f)) break;
        l = next;
    }
    return l;
}

} // namespace

SymMat3 local_covariance(const PointCloud& cloud, const NeighborSet& nbh) {
    const std::size_t n = cloud.size();
    if (nbh.center_index >= n) throw ConfigError("neighborhood center out of range");
    if (nbh.k() == 0) throw ConfigError("neighborhood is empty");
    for (std::size_t idx : nbh.neighbor_indices)
        if (idx >= n) throw ConfigError("neighbor index out of range");

    // two passes: mean of the k+1 points, then centered outer products
    Point3 mean = cloud[nbh.center_index];
    for (std::size_t idx : nbh.neighbor_indices) mean += cloud[idx];
    const double count = static_cast<double>(nbh.k() + 1);
    mean = mean / count;

    SymMat3 c;
    auto accumulate = [&](const Point3& p) {
        const Point3 d = p - mean;
        c.xx += d.x * d.x;
        c.xy += d.x * d.y;
        c.xz += d.x * d.z;
        c.yy += d.y * d.y;
        c.yz += d.y * d.z;
        c.zz += d.z * d.z;
    };
    accumulate(cloud[nbh.center_index]);
    for (std::size_t idx : nbh.neighbor_indices) accumulate(cloud[idx]);

    c.xx /= count;
    c.xy /= count;
    c.xz /= count;
    c.yy /= count;
    c.yz /= count;
    c.zz /= count;
    return c;
}

EigenTriple eigenvalues_sym3(const SymMat3& m) {
    if (!std::isfinite(m.xx) || !std::isfinite(m.xy) || !std::isfinite(m.xz) ||
        !std::isfinite(m.yy) || !std::isfinite(m.yz) || !std::isfinite(m.zz))
        throw NumericError("eigenvalues_sym3: non-finite matrix entry");

    const double scale = max_abs_entry(m);
    if (scale == 0.0) return {0.0, 0.0, 0.0};

    // work on the scaled matrix to keep the trigonometric form well-behaved
    const SymMat3 a{m.xx / scale, m.xy / scale, m.xz / scale,
                    m.yy / scale, m.yz / scale, m.zz / scale};

    const double q = a.trace() / 3.0;
    const double p1 = a.xy * a.xy + a.xz * a.xz + a.yz * a.yz;
    const double dxx = a.xx - q, dyy = a.yy - q, dzz = a.zz - q;
    const double p2 = dxx * dxx + dyy * dyy + dzz * dzz + 2.0 * p1;

    double l1, l2, l3;
    if (p2 <= 0.0) {
        l1 = l2 = l3 = q;
    } else {
        const double p = std::sqrt(p2 / 6.0);
        // B = (A - qI)/p, r = det(B)/2 in [-1, 1]
        const double bxx = dxx / p, byy = dyy / p, bzz = dzz / p;
        const double bxy = a.xy / p, bxz = a.xz / p, byz = a.yz / p;
        const double det_b = bxx * (byy * bzz - byz * byz) - bxy * (bxy * bzz - byz * bxz) +
                             bxz * (bxy * byz - byy * bxz);
        const double r = std::clamp(det_b / 2.0, -1.0, 1.0);
        const double phi = std::acos(r) / 3.0;
        l1 = q + 2.0 * p * std::cos(phi);
        l3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
        l2 = 3.0 * q - l1 - l3;

        const CharPoly cp = char_poly(a);
        l1 = polish_root(cp, l1, 1.0);
        l2 = polish_root(cp, l2, 1.0);
        l3 = polish_root(cp, l3, 1.0);

        if (l1 < l2) std::swap(l1, l2);
        if (l2 < l3) std::swap(l2, l3);
        if (l1 < l2) std::swap(l1, l2);
    }
    return {l1 * scale, l2 * scale, l3 * scale};
}

Point3 smallest_eigenvector(const SymMat3& m, const EigenTriple& eigs) {
    const double scale = std::max(max_abs_entry(m), std::abs(eigs.l3));
    const auto orient = [](Point3 v) {
        double best = std::abs(v.x);
        double champion = v.x;
        if (std::abs(v.y) > best) {
            best = std::abs(v.y);
            champion = v.y;
        }
        if (std::abs(v.z) > best) champion = v.z;
        return champion < 0.0 ? -1.0 * v : v;
    };

    if (scale == 0.0) return {0.0, 0.0, 1.0};

    // rows of M - l3*I; the eigenvector is orthogonal to the row space
    const Point3 r0{m.xx - eigs.l3, m.xy, m.xz};
    const Point3 r1{m.xy, m.yy - eigs.l3, m.yz};
    const Point3 r2{m.xz, m.yz, m.zz - eigs.l3};

    const Point3 c01 = cross(r0, r1);
    const Point3 c02 = cross(r0, r2);
    const Point3 c12 = cross(r1, r2);
    double best2 = squared_norm(c01);
    Point3 best = c01;
    if (squared_norm(c02) > best2) {
        best2 = squared_norm(c02);
        best = c02;
    }
    if (squared_norm(c12) > best2) {
        best2 = squared_norm(c12);
        best = c12;
    }

    const double rank2_floor = 1e-12 * scale * scale;
    if (std::sqrt(best2) > rank2_floor) return orient(best / norm(best));

    // rank(M - l3 I) <= 1: eigenvalue multiplicity two. Rows, if any are
    // nonzero, point along the remaining eigenvector; pick a fixed vector
    // orthogonal to it.
    Point3 u = r0;
    if (squared_norm(r1) > squared_norm(u)) u = r1;
    if (squared_norm(r2) > squared_norm(u)) u = r2;
    if (norm(u) <= 1e-12 * scale) return {0.0, 0.0, 1.0}; // (near) zero matrix

    u = u / norm(u);
    const Point3 axis = std::abs(u.x) <= std::abs(u.y)
                            ? (std::abs(u.x) <= std::abs(u.z) ? Point3{1, 0, 0} : Point3{0, 0, 1})
                            : (std::abs(u.y) <= std::abs(u.z) ? Point3{0, 1, 0} : Point3{0, 0, 1});
    const Point3 v = cross(u, axis);
    return orient(v / norm(v));
}

double change_of_curvature(const EigenTriple& eigs) {
    const double tr = eigs.l1 + eigs.l2 + eigs.l3;
    if (!(tr >= kTraceEpsilon)) return 0.0;
    return std::clamp(eigs.l3 / tr, 0.0, 1.0 / 3.0);
}

double local_density(const NeighborSet& nbh) {
    if (nbh.k() == 0) throw ConfigError("local_density requires k >= 1");
    double sum = 0.0;
    for (double d : nbh.distances) sum += d;
    return sum / static_cast<double>(nbh.k());
}

FeatureVector feature_at(const PointCloud& cloud, const NeighborSet& nbh) {
    const Point3& p = cloud[nbh.center_index];
    const SymMat3 cov = local_covariance(cloud, nbh);
    const EigenTriple eigs = eigenvalues_sym3(cov);
    return {p.x, p.y, p.z, change_of_curvature(eigs), local_density(nbh)};
}

std::vector<FeatureVector> compute_features(const PointCloud& cloud, const SpatialIndex& index,
                                            std::size_t k, unsigned workers) {
    const std::size_t n = cloud.size();
    if (n < 2 || k > n - 1) throw ConfigError("compute_features requires k <= N-1");
    std::vector<FeatureVector> out(n);
    parallel_chunks(n, resolve_workers(workers), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = feature_at(cloud, index.knn(i, k));
    });
    return out;
}

} // namespace woodleaf
