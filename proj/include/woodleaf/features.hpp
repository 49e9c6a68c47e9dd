#pragma once

#include <cstddef>
#include <vector>

#include "woodleaf/geometry.hpp"
#include "woodleaf/kdtree.hpp"

namespace woodleaf {

/// Symmetric 3x3 matrix, upper-triangular storage. Units m^2 when produced
/// by local_covariance.
struct SymMat3 {
    double xx = 0.0, xy = 0.0, xz = 0.0;
    double yy = 0.0, yz = 0.0;
    double zz = 0.0;

    double trace() const { return xx + yy + zz; }
};

/// Real eigenvalues of a symmetric 3x3 matrix, descending (l1 >= l2 >= l3).
struct EigenTriple {
    double l1 = 0.0;
    double l2 = 0.0;
    double l3 = 0.0;
};

/// Per-point feature tuple fed to the classifier: the point coordinates,
/// the change of curvature and the local density.
struct FeatureVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double c_lambda = 0.0; // dimensionless, in [0, 1/3]
    double rho = 0.0;      // meters, >= 0
};

/// Covariance of the center point plus its k neighbors, divisor k+1
/// (population form). The center is the j=0 term of the sum.
SymMat3 local_covariance(const PointCloud& cloud, const NeighborSet& nbh);

/// All three eigenvalues, descending. Closed-form trigonometric solve with a
/// Newton polish pass; accurate to ~1e-9 relative to the matrix norm.
EigenTriple eigenvalues_sym3(const SymMat3& m);

/// Unit eigenvector for the smallest eigenvalue. Deterministic sign: the
/// component of largest magnitude is positive. Degenerate inputs (eigenvalue
/// multiplicity, zero matrix) resolve to a fixed orthogonal choice, with
/// (0,0,1) for the zero matrix.
Point3 smallest_eigenvector(const SymMat3& m, const EigenTriple& eigs);

/// Change of curvature: smallest normalized eigenvalue, in [0, 1/3].
/// A neighborhood with trace below 1e-12 m^2 is treated as degenerate and
/// maps to 0.
double change_of_curvature(const EigenTriple& eigs);

/// Local density: mean distance from the center to its k neighbors.
double local_density(const NeighborSet& nbh);

/// Feature tuple for one point from its neighborhood.
FeatureVector feature_at(const PointCloud& cloud, const NeighborSet& nbh);

/// Feature tuples for every point, in cloud order. Per-point results are
/// written to their own slots, so the output is identical for any worker
/// count. Requires k <= N-1.
std::vector<FeatureVector> compute_features(const PointCloud& cloud, const SpatialIndex& index,
                                            std::size_t k, unsigned workers = 1);

} // namespace woodleaf
