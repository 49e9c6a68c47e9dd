#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "woodleaf/features.hpp"
#include "woodleaf/geometry.hpp"

namespace woodleaf {

/// Contents of a PLY file: coordinates plus the optional per-vertex label.
struct PlyContents {
    PointCloud cloud;
    std::optional<LabelVector> labels;
};

/// One row of a sample-audit CSV: which point was picked for training, the
/// plane-fit residual that ranked it (NaN for methods without one) and the
/// class it was assigned.
struct SampleRow {
    std::size_t point_index = 0;
    double sigma = 0.0;
    Label label = Label::Wood;
};

/// Read an ASCII XYZ file: whitespace-separated "x y z" per line, extra
/// columns ignored, '#' starts a comment line.
PointCloud read_xyz(const std::filesystem::path& path);

/// Write coordinates only, one "x y z" line per point.
void write_xyz(const PointCloud& cloud, const std::filesystem::path& path);

/// Read an ASCII PLY 1.0 file with a vertex element carrying x, y, z and an
/// optional integer property `label` (0 = wood, 1 = leaf). Binary PLY is
/// rejected with an "unsupported format" error.
PlyContents read_ply(const std::filesystem::path& path);

/// Write an ASCII PLY with per-vertex color and label. Leaf points are
/// colored (0,200,0), wood points (139,69,19). Round-trips through read_ply.
void write_classified_ply(const PointCloud& cloud, const LabelVector& labels,
                          const std::filesystem::path& path);

/// Label text files: one integer per line, 1 = leaf, 0 = wood; line i labels
/// point i. When expected_n is given, the line count must match it.
LabelVector read_labels(const std::filesystem::path& path,
                        std::optional<std::size_t> expected_n = std::nullopt);
void write_labels(const LabelVector& labels, const std::filesystem::path& path);

/// Feature CSV with header "x,y,z,c_lambda,rho", one row per point in cloud
/// order. Doubles are printed with 17 significant digits so a read-back is
/// bit-exact.
void write_feature_csv(const std::vector<FeatureVector>& features,
                       const std::filesystem::path& path);
std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path);

/// Sample-audit CSV with header "point_index,sigma,class".
void write_samples_csv(const std::vector<SampleRow>& rows, const std::filesystem::path& path);
std::vector<SampleRow> read_samples_csv(const std::filesystem::path& path);

/// Cloud from coordinates of a feature CSV (exact thanks to the 17-digit
/// printing); used to run later pipeline stages from a feature dump alone.
PointCloud cloud_from_features(const std::vector<FeatureVector>& features);

/// Dispatch on extension: ".ply" via read_ply (labels passed through),
/// anything else via read_xyz.
PlyContents read_cloud_any(const std::filesystem::path& path);

} // namespace woodleaf
