// woodleaf: batch wood/leaf classification of tree point clouds.
//
// Subcommands mirror the pipeline stages (synth, features, sample, train,
// classify, eval) plus a fused `pipeline` that runs them end to end. Stages
// communicate through the documented file formats, so any prefix of the
// pipeline can be replayed from its dumps.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "woodleaf/error.hpp"
#include "woodleaf/eval.hpp"
#include "woodleaf/features.hpp"
#include "woodleaf/io.hpp"
#include "woodleaf/kdtree.hpp"
#include "woodleaf/parallel.hpp"
#include "woodleaf/pipeline.hpp"
#include "woodleaf/rng.hpp"
#include "woodleaf/sampling.hpp"
#include "woodleaf/svm.hpp"
#include "woodleaf/synthgen.hpp"

namespace fs = std::filesystem;
using namespace woodleaf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct SynthArgs {
    std::string out_dir;
    std::string preset = "balanced";
    std::size_t count = 1;
    std::uint64_t seed = 42;
    bool planar_leaves = false;
    bool write_truth_txt = false;
    TreeSpec spec;
    bool leaf_fraction_set = false;
};

int cmd_synth(const SynthArgs& args) {
    fs::create_directories(args.out_dir);
    const SuitePreset preset = suite_preset_from_name(args.preset);
    for (std::size_t i = 0; i < args.count; ++i) {
        const SuitePreset p = preset == SuitePreset::Cycle
                                  ? (i % 3 == 0   ? SuitePreset::Leafy
                                     : i % 3 == 1 ? SuitePreset::Balanced
                                                  : SuitePreset::Woody)
                                  : preset;
        TreeSpec spec = args.spec;
        if (!args.leaf_fraction_set) spec.leaf_fraction = preset_leaf_fraction(p);
        spec.planar_leaves = args.planar_leaves;
        spec.seed = derive_seed(args.seed, i);
        const SyntheticTree tree = generate_tree(spec);

        char name[32];
        std::snprintf(name, sizeof(name), "tree_%02zu.ply", i + 1);
        const fs::path ply = fs::path(args.out_dir) / name;
        write_classified_ply(tree.cloud, tree.labels, ply);
        if (args.write_truth_txt) {
            std::snprintf(name, sizeof(name), "tree_%02zu_labels.txt", i + 1);
            write_labels(tree.labels, fs::path(args.out_dir) / name);
        }

        std::size_t leaf = 0;
        for (Label l : tree.labels) leaf += l == Label::Leaf;
        std::cout << ply.string() << ": " << tree.cloud.size() << " points, " << leaf
                  << " leaf / " << (tree.cloud.size() - leaf) << " wood (" << to_string(p)
                  << ")\n";
    }
    if (args.planar_leaves)
        std::cout << "note: planar leaves selected; plane-like leaf surfaces weaken the "
                     "plane-fit sampling criterion, expect degraded class separation\n";
    return kExitOk;
}

struct FeatureArgs {
    std::string input;
    std::string output;
    std::size_t k = 100;
    unsigned workers = 0;
};

int cmd_features(const FeatureArgs& args) {
    const PlyContents contents = read_cloud_any(args.input);
    const SpatialIndex index(contents.cloud);
    const auto features =
        compute_features(contents.cloud, index, args.k, resolve_workers(args.workers));
    write_feature_csv(features, args.output);
    std::cout << args.output << ": " << features.size() << " feature rows (k=" << args.k << ")\n";
    return kExitOk;
}

struct SampleArgs {
    std::string input;
    std::string features;
    std::string output;
    std::string method = "auto";
    std::size_t k = 100;
    std::uint64_t seed = 42;
    unsigned workers = 0;
    std::string profile = "leafy";
    std::size_t n_candidates = 0; // 0 = profile default
    std::size_t n_leaf = 0;
    std::size_t n_wood = 0;
    double radius = 0.1;
    std::size_t seeds_per_class = 20;
    std::string truth;
    std::string leaf_seeds;
    std::string wood_seeds;
    std::size_t n_labeled = 10000;
};

int cmd_sample(const SampleArgs& args) {
    PointCloud cloud;
    std::optional<LabelVector> truth;
    if (!args.features.empty()) {
        cloud = cloud_from_features(read_feature_csv(args.features));
    } else if (!args.input.empty()) {
        PlyContents contents = read_cloud_any(args.input);
        cloud = std::move(contents.cloud);
        truth = std::move(contents.labels);
    } else {
        throw ConfigError("sample needs --input or --features");
    }
    if (!args.truth.empty()) truth = read_labels(args.truth, cloud.size());

    const SpatialIndex index(cloud);
    const unsigned workers = resolve_workers(args.workers);
    const SamplingMethod method = sampling_method_from_name(args.method);

    TrainingSet ts;
    switch (method) {
        case SamplingMethod::Auto: {
            SampleProfile profile = SampleProfile::from_name(args.profile);
            if (args.n_candidates > 0) profile.n_candidates = args.n_candidates;
            if (args.n_leaf > 0) profile.n_leaf = args.n_leaf;
            if (args.n_wood > 0) profile.n_wood = args.n_wood;
            ts = auto_select_training(cloud, index, profile, args.k, args.seed, workers);
            break;
        }
        case SamplingMethod::Spheres: {
            std::vector<std::size_t> leaf_seeds, wood_seeds;
            if (!args.leaf_seeds.empty() && !args.wood_seeds.empty()) {
                leaf_seeds = read_seed_indices(args.leaf_seeds, cloud.size());
                wood_seeds = read_seed_indices(args.wood_seeds, cloud.size());
            } else if (truth) {
                std::tie(leaf_seeds, wood_seeds) =
                    draw_class_seeds(*truth, args.seeds_per_class, args.seed);
            } else {
                throw ConfigError("spheres method needs --leaf-seeds/--wood-seeds or truth labels");
            }
            ts = seed_sphere_training(cloud, index, leaf_seeds, wood_seeds, args.radius, args.k,
                                      workers);
            break;
        }
        case SamplingMethod::Labels: {
            if (!truth) throw ConfigError("labels method needs truth labels (--truth or PLY)");
            const std::size_t n = std::min(args.n_labeled, cloud.size());
            ts = training_from_labels(cloud, index, *truth, n, args.seed, args.k, workers);
            break;
        }
    }

    write_samples_csv(to_sample_rows(ts), args.output);
    std::cout << args.output << ": " << ts.size() << " samples (" << ts.count(Label::Leaf)
              << " leaf, " << ts.count(Label::Wood) << " wood)\n";
    return kExitOk;
}

struct TrainArgs {
    std::string features;
    std::string samples;
    std::string output;
    SvmHyperparams hp;
    std::uint64_t seed = 42;
    bool no_scaling = false;
    bool grid_search = false;
};

int cmd_train(const TrainArgs& args) {
    const auto features = read_feature_csv(args.features);
    const auto rows = read_samples_csv(args.samples);

    TrainingSet ts;
    ts.entries.reserve(rows.size());
    for (const SampleRow& row : rows) {
        if (row.point_index >= features.size())
            throw ConfigError("sample row references point " + std::to_string(row.point_index) +
                              " but the feature file has " + std::to_string(features.size()) +
                              " rows");
        ts.entries.push_back({features[row.point_index], row.label, row.point_index, row.sigma});
    }

    TrainOptions opts;
    opts.no_scaling = args.no_scaling;
    SvmHyperparams hp = args.hp;
    if (args.grid_search) {
        const GridSearchResult gs =
            grid_search_cv(ts, hp, GridSearchSpec{}, derive_seed(args.seed, 0xc515), opts);
        hp = gs.best;
        std::cout << "grid search: C=" << hp.cost << " gamma=" << hp.gamma
                  << " (cv accuracy " << gs.best_accuracy << ")\n";
    }
    const TrainResult tr = train(ts, hp, args.seed, opts);
    save_model(tr.model, args.output);
    std::cout << args.output << ": " << tr.stats.support_count << " support vectors, "
              << tr.stats.iterations << " iterations, dual objective "
              << tr.stats.dual_objective << "\n";
    return kExitOk;
}

struct ClassifyArgs {
    std::string model;
    std::string input;
    std::string features;
    std::string output;
    std::string labels_out;
    std::size_t k = 100;
    unsigned workers = 0;
};

int cmd_classify(const ClassifyArgs& args) {
    const SvmModel model = load_model(args.model);

    PointCloud cloud;
    std::vector<FeatureVector> features;
    if (!args.features.empty()) {
        features = read_feature_csv(args.features);
        cloud = cloud_from_features(features);
    } else if (!args.input.empty()) {
        PlyContents contents = read_cloud_any(args.input);
        cloud = std::move(contents.cloud);
        const SpatialIndex index(cloud);
        features = compute_features(cloud, index, args.k, resolve_workers(args.workers));
    } else {
        throw ConfigError("classify needs --input or --features");
    }

    const LabelVector labels = classify_cloud(model, features, resolve_workers(args.workers));
    write_classified_ply(cloud, labels, args.output);
    if (!args.labels_out.empty()) write_labels(labels, args.labels_out);

    std::size_t leaf = 0;
    for (Label l : labels) leaf += l == Label::Leaf;
    std::cout << args.output << ": " << leaf << " leaf / " << (labels.size() - leaf)
              << " wood\n";
    return kExitOk;
}

struct EvalArgs {
    std::string pred;
    std::string truth;
    std::string tree = "tree";
    std::string method = "auto";
    std::string report_csv;
    std::string kappa_variant = "paper";
};

LabelVector read_labels_any(const std::string& path) {
    if (fs::path(path).extension() == ".ply") {
        PlyContents contents = read_ply(path);
        if (!contents.labels) throw ParseError("PLY file has no label property: " + path);
        return std::move(*contents.labels);
    }
    return read_labels(path);
}

int cmd_eval(const EvalArgs& args) {
    const LabelVector pred = read_labels_any(args.pred);
    const LabelVector truth = read_labels_any(args.truth);
    const ConfusionMatrix cm = confusion(pred, truth);
    const Metrics m = metrics(cm);

    const std::vector<ReportRow> rows = {{args.tree, args.method, m, cm}};
    std::cout << format_report_table(rows);
    const KappaVariant variant = args.kappa_variant == "standard" ? KappaVariant::Standard
                                                                  : KappaVariant::Paper;
    std::cout << "p_o=" << m.p_o << " kappa=" << kappa(cm, variant) << " ("
              << args.kappa_variant << " variant)\n";
    if (!args.report_csv.empty()) write_report_csv(rows, args.report_csv);
    return kExitOk;
}

struct PipelineArgs {
    RunConfig config;
    std::string method = "auto";
    std::string profile = "leafy";
    std::string kappa_variant = "paper";
    std::string truth;
    std::string leaf_seeds;
    std::string wood_seeds;
    std::size_t n_candidates = 0;
    std::size_t n_leaf = 0;
    std::size_t n_wood = 0;
};

int cmd_pipeline(PipelineArgs& args) {
    RunConfig& config = args.config;
    config.method = sampling_method_from_name(args.method);
    config.profile = SampleProfile::from_name(args.profile);
    if (args.n_candidates > 0) config.profile.n_candidates = args.n_candidates;
    if (args.n_leaf > 0) config.profile.n_leaf = args.n_leaf;
    if (args.n_wood > 0) config.profile.n_wood = args.n_wood;
    config.kappa_display = args.kappa_variant == "standard" ? KappaVariant::Standard
                                                            : KappaVariant::Paper;
    if (!args.truth.empty()) config.truth_labels = args.truth;
    if (!args.leaf_seeds.empty()) config.leaf_seed_file = args.leaf_seeds;
    if (!args.wood_seeds.empty()) config.wood_seed_file = args.wood_seeds;

    const PipelineResult result = run_pipeline(config);
    std::cout << "pipeline: " << result.point_count << " points, "
              << result.training_size << " training samples, "
              << result.train_stats.support_count << " support vectors, "
              << result.runtime_seconds << " s\n";
    if (result.metrics) {
        const double k = config.kappa_display == KappaVariant::Standard
                             ? result.metrics->kappa_standard
                             : result.metrics->kappa_paper;
        std::cout << "metrics: p_o=" << result.metrics->p_o << " kappa=" << k << " ("
                  << to_string(config.kappa_display) << " variant; paper="
                  << result.metrics->kappa_paper
                  << ", standard=" << result.metrics->kappa_standard << ")\n";
    }
    std::cout << "artifacts in " << config.output_dir.string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wood/leaf classification of tree terrestrial point clouds"};
    app.set_version_flag("--version", "woodleaf 0.1.0");
    app.set_config("--config", "", "read defaults from a key=value config file");
    app.require_subcommand(1);

    // synth ------------------------------------------------------------
    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate labeled synthetic tree clouds");
    synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();
    synth_cmd->add_option("--preset", synth.preset, "leafy|balanced|woody|cycle");
    synth_cmd->add_option("--count", synth.count, "number of trees");
    synth_cmd->add_option("--seed", synth.seed, "master seed");
    synth_cmd->add_flag("--planar-leaves", synth.planar_leaves,
                        "model leaves as small planar disks");
    synth_cmd->add_flag("--write-truth-txt", synth.write_truth_txt,
                        "also write per-tree label text files");
    synth_cmd->add_option("--trunk-height", synth.spec.trunk_height, "m");
    synth_cmd->add_option("--trunk-radius", synth.spec.trunk_radius, "m");
    synth_cmd->add_option("--branches", synth.spec.branch_count, "first-level branch count");
    synth_cmd->add_option("--clusters", synth.spec.leaf_cluster_count, "leaf cluster count");
    synth_cmd->add_option("--cluster-radius", synth.spec.cluster_radius, "m");
    synth_cmd->add_option("--density", synth.spec.wood_point_density, "wood points per m^2");
    synth_cmd->add_option("--noise", synth.spec.noise_std, "surface noise std, m");
    synth_cmd->add_option("--leaf-fraction", synth.spec.leaf_fraction,
                          "override the preset leaf fraction")
        ->check(CLI::Range(0.0, 0.999))
        ->each([&synth](const std::string&) { synth.leaf_fraction_set = true; });

    // features ----------------------------------------------------------
    FeatureArgs feat;
    auto* feat_cmd = app.add_subcommand("features", "compute per-point features to CSV");
    feat_cmd->add_option("--input", feat.input, "cloud file (.xyz or .ply)")->required();
    feat_cmd->add_option("--output", feat.output, "feature CSV path")->required();
    feat_cmd->add_option("--k", feat.k, "neighborhood size");
    feat_cmd->add_option("--workers", feat.workers, "worker threads (0 = auto)")
        ->envname("WOODLEAF_WORKERS");

    // sample -------------------------------------------------------------
    SampleArgs sample;
    auto* sample_cmd = app.add_subcommand("sample", "select training points");
    sample_cmd->add_option("--input", sample.input, "cloud file (.xyz or .ply)");
    sample_cmd->add_option("--features", sample.features, "feature CSV (alternative input)");
    sample_cmd->add_option("--output", sample.output, "samples CSV path")->required();
    sample_cmd->add_option("--method", sample.method, "auto|spheres|labels");
    sample_cmd->add_option("--k", sample.k, "neighborhood size");
    sample_cmd->add_option("--seed", sample.seed, "RNG seed");
    sample_cmd->add_option("--workers", sample.workers, "worker threads (0 = auto)")
        ->envname("WOODLEAF_WORKERS");
    sample_cmd->add_option("--profile", sample.profile, "leafy|balanced|woody");
    sample_cmd->add_option("--n-candidates", sample.n_candidates, "scored candidates");
    sample_cmd->add_option("--n-leaf", sample.n_leaf, "leaf training points");
    sample_cmd->add_option("--n-wood", sample.n_wood, "wood training points");
    sample_cmd->add_option("--radius", sample.radius, "seed sphere radius, m");
    sample_cmd->add_option("--seeds-per-class", sample.seeds_per_class, "random seeds per class");
    sample_cmd->add_option("--truth", sample.truth, "truth label text file");
    sample_cmd->add_option("--leaf-seeds", sample.leaf_seeds, "leaf seed index file");
    sample_cmd->add_option("--wood-seeds", sample.wood_seeds, "wood seed index file");
    sample_cmd->add_option("--n", sample.n_labeled, "sample size for the labels method");

    // train ----------------------------------------------------------------
    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train the RBF SVM from feature + sample CSVs");
    train_cmd->add_option("--features", train_args.features, "feature CSV")->required();
    train_cmd->add_option("--samples", train_args.samples, "samples CSV")->required();
    train_cmd->add_option("--output", train_args.output, "model file path")->required();
    train_cmd->add_option("--C", train_args.hp.cost, "soft-margin penalty");
    train_cmd->add_option("--gamma", train_args.hp.gamma, "RBF width");
    train_cmd->add_option("--tol", train_args.hp.tol, "KKT tolerance");
    train_cmd->add_option("--max-iter", train_args.hp.max_iter, "SMO iteration cap");
    train_cmd->add_option("--seed", train_args.seed, "RNG seed");
    train_cmd->add_flag("--no-scaling", train_args.no_scaling,
                        "skip feature standardization (literal paper pipeline)");
    train_cmd->add_flag("--grid-search", train_args.grid_search,
                        "coarse 5-fold CV over C and gamma");

    // classify ---------------------------------------------------------------
    ClassifyArgs classify;
    auto* classify_cmd = app.add_subcommand("classify", "apply a model to a cloud");
    classify_cmd->add_option("--model", classify.model, "model file")->required();
    classify_cmd->add_option("--input", classify.input, "cloud file (.xyz or .ply)");
    classify_cmd->add_option("--features", classify.features, "feature CSV (alternative input)");
    classify_cmd->add_option("--output", classify.output, "classified PLY path")->required();
    classify_cmd->add_option("--labels-out", classify.labels_out, "also write labels txt");
    classify_cmd->add_option("--k", classify.k, "neighborhood size (raw cloud input)");
    classify_cmd->add_option("--workers", classify.workers, "worker threads (0 = auto)")
        ->envname("WOODLEAF_WORKERS");

    // eval ----------------------------------------------------------------
    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "confusion metrics of predictions vs truth");
    eval_cmd->add_option("--pred", eval_args.pred, "labels txt or classified PLY")->required();
    eval_cmd->add_option("--truth", eval_args.truth, "labels txt or labeled PLY")->required();
    eval_cmd->add_option("--tree", eval_args.tree, "report row name");
    eval_cmd->add_option("--method", eval_args.method, "report method name");
    eval_cmd->add_option("--report-csv", eval_args.report_csv, "write report CSV here");
    eval_cmd->add_option("--kappa", eval_args.kappa_variant, "paper|standard headline variant");

    // pipeline ----------------------------------------------------------
    PipelineArgs pipe;
    auto* pipe_cmd = app.add_subcommand("pipeline", "fused synth->features->sample->train->"
                                                     "classify->eval run on one cloud");
    pipe_cmd->add_option("--input", pipe.config.input, "cloud file (.xyz or .ply)")->required();
    pipe_cmd->add_option("--out", pipe.config.output_dir, "output directory")->required();
    pipe_cmd->add_option("--truth", pipe.truth, "truth label text file");
    pipe_cmd->add_option("--label", pipe.config.run_label, "report row name");
    pipe_cmd->add_option("--method", pipe.method, "auto|spheres|labels");
    pipe_cmd->add_option("--k", pipe.config.k, "neighborhood size");
    pipe_cmd->add_option("--profile", pipe.profile, "leafy|balanced|woody");
    pipe_cmd->add_option("--n-candidates", pipe.n_candidates, "scored candidates");
    pipe_cmd->add_option("--n-leaf", pipe.n_leaf, "leaf training points");
    pipe_cmd->add_option("--n-wood", pipe.n_wood, "wood training points");
    pipe_cmd->add_option("--C", pipe.config.svm.cost, "soft-margin penalty");
    pipe_cmd->add_option("--gamma", pipe.config.svm.gamma, "RBF width");
    pipe_cmd->add_option("--tol", pipe.config.svm.tol, "KKT tolerance");
    pipe_cmd->add_option("--max-iter", pipe.config.svm.max_iter, "SMO iteration cap");
    pipe_cmd->add_option("--seed", pipe.config.seed, "RNG seed");
    pipe_cmd->add_option("--workers", pipe.config.workers, "worker threads (0 = auto)")
        ->envname("WOODLEAF_WORKERS");
    pipe_cmd->add_flag("--no-scaling", pipe.config.no_scaling, "skip feature standardization");
    pipe_cmd->add_flag("--grid-search", pipe.config.grid_search, "coarse CV grid search");
    pipe_cmd->add_option("--kappa", pipe.kappa_variant, "paper|standard headline variant");
    pipe_cmd->add_flag("--dump-features", pipe.config.dump_features, "also write features.csv");
    pipe_cmd->add_option("--radius", pipe.config.sphere_radius, "seed sphere radius, m");
    pipe_cmd->add_option("--seeds-per-class", pipe.config.seeds_per_class,
                         "random seeds per class");
    pipe_cmd->add_option("--leaf-seeds", pipe.leaf_seeds, "leaf seed index file");
    pipe_cmd->add_option("--wood-seeds", pipe.wood_seeds, "wood seed index file");
    pipe_cmd->add_option("--n", pipe.config.labeled_sample_size,
                         "sample size for the labels method");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (synth_cmd->parsed()) return cmd_synth(synth);
        if (feat_cmd->parsed()) return cmd_features(feat);
        if (sample_cmd->parsed()) return cmd_sample(sample);
        if (train_cmd->parsed()) return cmd_train(train_args);
        if (classify_cmd->parsed()) return cmd_classify(classify);
        if (eval_cmd->parsed()) return cmd_eval(eval_args);
        if (pipe_cmd->parsed()) return cmd_pipeline(pipe);
    } catch (const ConfigError& e) {
        std::cerr << "error (config): " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "error (parse): " << e.what() << "\n";
        return kExitIo;
    } catch (const IoError& e) {
        std::cerr << "error (io): " << e.what() << "\n";
        return kExitIo;
    } catch (const NumericError& e) {
        std::cerr << "error (numeric): " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitConfig;
}
