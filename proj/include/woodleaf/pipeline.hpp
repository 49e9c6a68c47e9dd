#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "woodleaf/eval.hpp"
#include "woodleaf/features.hpp"
#include "woodleaf/geometry.hpp"
#include "woodleaf/io.hpp"
#include "woodleaf/sampling.hpp"
#include "woodleaf/svm.hpp"

namespace woodleaf {

enum class SamplingMethod { Auto, Spheres, Labels };

SamplingMethod sampling_method_from_name(const std::string& name);
std::string to_string(SamplingMethod m);
std::string to_string(KappaVariant v);

/// Everything one batch run needs. The effective configuration is echoed to
/// the output directory so results stay re-derivable.
struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path output_dir;
    std::optional<std::filesystem::path> truth_labels; // overrides PLY labels
    std::string run_label = "run";

    std::size_t k = 100;
    SampleProfile profile = SampleProfile::leafy();
    SvmHyperparams svm;
    bool grid_search = false;
    bool no_scaling = false;
    std::uint64_t seed = 42;
    unsigned workers = 0; // 0 = auto
    KappaVariant kappa_display = KappaVariant::Paper;

    SamplingMethod method = SamplingMethod::Auto;
    // spheres method
    std::size_t seeds_per_class = 20;
    double sphere_radius = 0.1;
    std::optional<std::filesystem::path> leaf_seed_file;
    std::optional<std::filesystem::path> wood_seed_file;
    // labels method
    std::size_t labeled_sample_size = 10000;

    bool dump_features = false;
};

struct PipelineArtifacts {
    std::filesystem::path classified_ply;
    std::filesystem::path samples_csv;
    std::filesystem::path model_file;
    std::filesystem::path run_summary;
    std::filesystem::path config_echo;
    std::filesystem::path predicted_labels;
    std::optional<std::filesystem::path> report_csv;
    std::optional<std::filesystem::path> report_txt;
    std::optional<std::filesystem::path> features_csv;
};

struct PipelineResult {
    PipelineArtifacts artifacts;
    std::optional<Metrics> metrics;
    std::optional<ConfusionMatrix> confusion;
    TrainStats train_stats;
    std::size_t point_count = 0;
    std::size_t training_size = 0;
    double runtime_seconds = 0.0;
};

/// Full batch run: read cloud, features, sample, train, classify, write all
/// artifacts, evaluate when truth labels are available.
PipelineResult run_pipeline(const RunConfig& config);

/// The pieces of run_pipeline that work on in-memory data; used to compose
/// suite studies without re-reading files.
struct InMemoryRun {
    LabelVector predicted;
    std::optional<Metrics> metrics;
    std::optional<ConfusionMatrix> confusion;
    TrainingSet training;
    TrainResult train_result;
};

InMemoryRun run_on_cloud(const PointCloud& cloud, const SpatialIndex& index,
                         const std::vector<FeatureVector>& features,
                         const std::optional<LabelVector>& truth, const RunConfig& config);

/// Sample rows for the audit CSV, in training-set order.
std::vector<SampleRow> to_sample_rows(const TrainingSet& ts);

/// Stratified seed picks for the sphere baseline: per_class indices of each
/// true class, drawn without replacement, deterministic per seed.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
draw_class_seeds(const LabelVector& truth, std::size_t per_class, std::uint64_t seed);

/// Seed index file: whitespace-separated point indices, validated against n.
std::vector<std::size_t> read_seed_indices(const std::filesystem::path& path, std::size_t n);

/// key=value dump of the effective configuration.
std::string render_config(const RunConfig& config);

} // namespace woodleaf
