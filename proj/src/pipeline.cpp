#include "woodleaf/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "woodleaf/error.hpp"
#include "woodleaf/io.hpp"
#include "woodleaf/kdtree.hpp"
#include "woodleaf/num_format.hpp"
#include "woodleaf/parallel.hpp"
#include "woodleaf/rng.hpp"

namespace woodleaf {

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
draw_class_seeds(const LabelVector& truth, std::size_t per_class, std::uint64_t seed) {
    std::vector<std::size_t> leaf_pool, wood_pool;
    for (std::size_t i = 0; i < truth.size(); ++i)
        (truth[i] == Label::Leaf ? leaf_pool : wood_pool).push_back(i);
    if (leaf_pool.size() < per_class || wood_pool.size() < per_class)
        throw ConfigError("not enough points of each class to draw " + std::to_string(per_class) +
                          " seeds");
    Rng rng(derive_seed(seed, 0x5eed));
    for (auto* pool : {&leaf_pool, &wood_pool}) {
        for (std::size_t i = 0; i < per_class; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.bounded(pool->size() - i));
            std::swap((*pool)[i], (*pool)[j]);
        }
    }
    return {{leaf_pool.begin(), leaf_pool.begin() + per_class},
            {wood_pool.begin(), wood_pool.begin() + per_class}};
}

std::vector<std::size_t> read_seed_indices(const std::filesystem::path& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open seed file: " + path.string());
    std::vector<std::size_t> seeds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            long long v = 0;
            if (!try_parse_int(tok, v) || v < 0 || static_cast<std::size_t>(v) >= n)
                throw ParseError("bad seed index '" + tok + "' at " + path.string() + ":" +
                                 std::to_string(line_no));
            seeds.push_back(static_cast<std::size_t>(v));
        }
    }
    if (seeds.empty()) throw ParseError("empty seed file: " + path.string());
    return seeds;
}

SamplingMethod sampling_method_from_name(const std::string& name) {
    if (name == "auto") return SamplingMethod::Auto;
    if (name == "spheres") return SamplingMethod::Spheres;
    if (name == "labels") return SamplingMethod::Labels;
    throw ConfigError("unknown sampling method '" + name + "' (use auto, spheres or labels)");
}

std::string to_string(SamplingMethod m) {
    switch (m) {
        case SamplingMethod::Auto: return "auto";
        case SamplingMethod::Spheres: return "spheres";
        default: return "labels";
    }
}

std::string to_string(KappaVariant v) {
    return v == KappaVariant::Paper ? "paper" : "standard";
}

std::vector<SampleRow> to_sample_rows(const TrainingSet& ts) {
    std::vector<SampleRow> rows;
    rows.reserve(ts.size());
    for (const TrainingEntry& e : ts.entries) rows.push_back({e.point_index, e.sigma, e.label});
    return rows;
}

InMemoryRun run_on_cloud(const PointCloud& cloud, const SpatialIndex& index,
                         const std::vector<FeatureVector>& features,
                         const std::optional<LabelVector>& truth, const RunConfig& config) {
    const unsigned workers = resolve_workers(config.workers);

    InMemoryRun run;
    switch (config.method) {
        case SamplingMethod::Auto:
            run.training = auto_select_training(cloud, index, config.profile, config.k,
                                                config.seed, workers);
            break;
        case SamplingMethod::Spheres: {
            std::vector<std::size_t> leaf_seeds, wood_seeds;
            if (config.leaf_seed_file && config.wood_seed_file) {
                leaf_seeds = read_seed_indices(*config.leaf_seed_file, cloud.size());
                wood_seeds = read_seed_indices(*config.wood_seed_file, cloud.size());
            } else if (truth) {
                std::tie(leaf_seeds, wood_seeds) =
                    draw_class_seeds(*truth, config.seeds_per_class, config.seed);
            } else {
                throw ConfigError("spheres method needs seed index files or truth labels");
            }
            run.training = seed_sphere_training(cloud, index, leaf_seeds, wood_seeds,
                                                config.sphere_radius, config.k, workers);
            break;
        }
        case SamplingMethod::Labels: {
            if (!truth) throw ConfigError("labels method needs truth labels");
            const std::size_t n = std::min(config.labeled_sample_size, cloud.size());
            run.training = training_from_labels(cloud, index, *truth, n, config.seed, config.k,
                                                workers);
            break;
        }
    }

    SvmHyperparams hp = config.svm;
    TrainOptions opts;
    opts.no_scaling = config.no_scaling;
    if (config.grid_search) {
        const GridSearchResult gs = grid_search_cv(run.training, hp, GridSearchSpec{},
                                                   derive_seed(config.seed, 0xc515), opts);
        hp = gs.best;
    }
    run.train_result = train(run.training, hp, config.seed, opts);
    run.predicted = classify_cloud(run.train_result.model, features, workers);

    if (truth) {
        run.confusion = confusion(run.predicted, *truth);
        run.metrics = metrics(*run.confusion);
    }
    return run;
}

std::string render_config(const RunConfig& c) {
    std::ostringstream out;
    out << "input=" << c.input.string() << '\n';
    out << "output_dir=" << c.output_dir.string() << '\n';
    out << "truth_labels=" << (c.truth_labels ? c.truth_labels->string() : "") << '\n';
    out << "run_label=" << c.run_label << '\n';
    out << "k=" << c.k << '\n';
    out << "method=" << to_string(c.method) << '\n';
    out << "profile.n_candidates=" << c.profile.n_candidates << '\n';
    out << "profile.n_leaf=" << c.profile.n_leaf << '\n';
    out << "profile.n_wood=" << c.profile.n_wood << '\n';
    out << "svm.C=" << format_double(c.svm.cost) << '\n';
    out << "svm.gamma=" << format_double(c.svm.gamma) << '\n';
    out << "svm.tol=" << format_double(c.svm.tol) << '\n';
    out << "svm.max_iter=" << c.svm.max_iter << '\n';
    out << "grid_search=" << (c.grid_search ? 1 : 0) << '\n';
    out << "no_scaling=" << (c.no_scaling ? 1 : 0) << '\n';
    out << "seed=" << c.seed << '\n';
    out << "workers=" << c.workers << '\n';
    out << "kappa_display=" << to_string(c.kappa_display) << '\n';
    out << "seeds_per_class=" << c.seeds_per_class << '\n';
    out << "sphere_radius=" << format_double(c.sphere_radius) << '\n';
    out << "leaf_seed_file=" << (c.leaf_seed_file ? c.leaf_seed_file->string() : "") << '\n';
    out << "wood_seed_file=" << (c.wood_seed_file ? c.wood_seed_file->string() : "") << '\n';
    out << "labeled_sample_size=" << c.labeled_sample_size << '\n';
    out << "dump_features=" << (c.dump_features ? 1 : 0) << '\n';
    return out.str();
}

PipelineResult run_pipeline(const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();

    if (config.input.empty()) throw ConfigError("pipeline needs an input cloud path");
    if (!std::filesystem::exists(config.input))
        throw IoError("input path does not exist: " + config.input.string());
    std::filesystem::create_directories(config.output_dir);

    PlyContents contents = read_cloud_any(config.input);
    const PointCloud& cloud = contents.cloud;
    std::optional<LabelVector> truth = contents.labels;
    if (config.truth_labels) truth = read_labels(*config.truth_labels, cloud.size());

    const SpatialIndex index(cloud);
    const unsigned workers = resolve_workers(config.workers);
    const std::vector<FeatureVector> features = compute_features(cloud, index, config.k, workers);

    const InMemoryRun run = run_on_cloud(cloud, index, features, truth, config);

    PipelineResult result;
    result.point_count = cloud.size();
    result.training_size = run.training.size();
    result.train_stats = run.train_result.stats;
    result.metrics = run.metrics;
    result.confusion = run.confusion;

    PipelineArtifacts& art = result.artifacts;
    const auto& dir = config.output_dir;
    art.classified_ply = dir / "classified.ply";
    art.samples_csv = dir / "samples.csv";
    art.model_file = dir / "model.txt";
    art.run_summary = dir / "run_summary.json";
    art.config_echo = dir / "effective_config.txt";
    art.predicted_labels = dir / "predicted_labels.txt";

    write_classified_ply(cloud, run.predicted, art.classified_ply);
    write_samples_csv(to_sample_rows(run.training), art.samples_csv);
    save_model(run.train_result.model, art.model_file);
    write_labels(run.predicted, art.predicted_labels);
    if (config.dump_features) {
        art.features_csv = dir / "features.csv";
        write_feature_csv(features, *art.features_csv);
    }

    if (run.metrics) {
        art.report_csv = dir / "report.csv";
        art.report_txt = dir / "report.txt";
        const ReportRow row{config.run_label, to_string(config.method), *run.metrics,
                            *run.confusion};
        write_report_csv({row}, *art.report_csv);
        std::ofstream txt(*art.report_txt);
        if (!txt) throw IoError("cannot write report: " + art.report_txt->string());
        txt << format_report_table({row});
    }

    {
        std::ofstream cfg(art.config_echo);
        if (!cfg) throw IoError("cannot write config echo: " + art.config_echo.string());
        cfg << render_config(config);
    }

    const auto t1 = std::chrono::steady_clock::now();
    result.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();

    nlohmann::ordered_json summary;
    summary["input"] = config.input.string();
    summary["run_label"] = config.run_label;
    summary["points"] = result.point_count;
    summary["method"] = to_string(config.method);
    summary["k"] = config.k;
    summary["seed"] = config.seed;
    summary["training_size"] = result.training_size;
    summary["support_vectors"] = result.train_stats.support_count;
    summary["smo_iterations"] = result.train_stats.iterations;
    summary["dual_objective"] = result.train_stats.dual_objective;
    if (run.metrics) {
        summary["metrics"]["p_o"] = run.metrics->p_o;
        summary["metrics"]["kappa_paper"] = run.metrics->kappa_paper;
        summary["metrics"]["kappa_standard"] = run.metrics->kappa_standard;
        summary["metrics"]["displayed_kappa_variant"] = to_string(config.kappa_display);
    }
    summary["artifacts"]["classified_ply"] = art.classified_ply.string();
    summary["artifacts"]["samples_csv"] = art.samples_csv.string();
    summary["artifacts"]["model_file"] = art.model_file.string();
    summary["artifacts"]["predicted_labels"] = art.predicted_labels.string();
    if (art.report_csv) summary["artifacts"]["report_csv"] = art.report_csv->string();
    if (art.features_csv) summary["artifacts"]["features_csv"] = art.features_csv->string();
    summary["runtime_seconds"] = result.runtime_seconds;
    std::ofstream js(art.run_summary);
    if (!js) throw IoError("cannot write run summary: " + art.run_summary.string());
    js << summary.dump(2) << '\n';

    return result;
}

} // namespace woodleaf
