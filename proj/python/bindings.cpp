// Python bindings for the main operations: io, kNN search, features,
// training-set selection, SVM train/predict, metrics, synthetic trees and
// the fused pipeline.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "woodleaf/error.hpp"
#include "woodleaf/eval.hpp"
#include "woodleaf/features.hpp"
#include "woodleaf/geometry.hpp"
#include "woodleaf/io.hpp"
#include "woodleaf/kdtree.hpp"
#include "woodleaf/pipeline.hpp"
#include "woodleaf/sampling.hpp"
#include "woodleaf/svm.hpp"
#include "woodleaf/synthgen.hpp"

namespace py = pybind11;
using namespace woodleaf;

namespace {

PointCloud cloud_from_tuples(const std::vector<std::tuple<double, double, double>>& pts) {
    PointCloud cloud;
    cloud.points.reserve(pts.size());
    for (const auto& [x, y, z] : pts) cloud.points.push_back({x, y, z});
    return cloud;
}

std::vector<std::tuple<double, double, double>> cloud_to_tuples(const PointCloud& cloud) {
    std::vector<std::tuple<double, double, double>> out;
    out.reserve(cloud.size());
    for (const Point3& p : cloud.points) out.emplace_back(p.x, p.y, p.z);
    return out;
}

} // namespace

PYBIND11_MODULE(_woodleaf, m) {
    m.doc() = "wood/leaf classification of tree terrestrial point clouds";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    py::enum_<Label>(m, "Label")
        .value("WOOD", Label::Wood)
        .value("LEAF", Label::Leaf);

    py::class_<PointCloud>(m, "PointCloud")
        .def(py::init([](const std::vector<std::tuple<double, double, double>>& pts) {
                 return cloud_from_tuples(pts);
             }),
             py::arg("points"))
        .def("__len__", &PointCloud::size)
        .def("to_list", &cloud_to_tuples)
        .def("point", [](const PointCloud& c, std::size_t i) {
            if (i >= c.size()) throw ConfigError("point index out of range");
            return std::make_tuple(c[i].x, c[i].y, c[i].z);
        });

    py::class_<NeighborSet>(m, "NeighborSet")
        .def_readonly("center_index", &NeighborSet::center_index)
        .def_readonly("neighbor_indices", &NeighborSet::neighbor_indices)
        .def_readonly("distances", &NeighborSet::distances);

    py::class_<SpatialIndex>(m, "SpatialIndex")
        .def(py::init<const PointCloud&>(), py::arg("cloud"), py::keep_alive<1, 2>())
        .def("knn", &SpatialIndex::knn, py::arg("center_index"), py::arg("k"))
        .def("within_radius",
             [](const SpatialIndex& idx, std::tuple<double, double, double> center, double radius) {
                 const auto [x, y, z] = center;
                 return idx.within_radius({x, y, z}, radius);
             },
             py::arg("center"), py::arg("radius"))
        .def("__len__", &SpatialIndex::size);

    py::class_<FeatureVector>(m, "FeatureVector")
        .def_readonly("x", &FeatureVector::x)
        .def_readonly("y", &FeatureVector::y)
        .def_readonly("z", &FeatureVector::z)
        .def_readonly("c_lambda", &FeatureVector::c_lambda)
        .def_readonly("rho", &FeatureVector::rho)
        .def("__repr__", [](const FeatureVector& f) {
            return "FeatureVector(x=" + std::to_string(f.x) + ", y=" + std::to_string(f.y) +
                   ", z=" + std::to_string(f.z) + ", c_lambda=" + std::to_string(f.c_lambda) +
                   ", rho=" + std::to_string(f.rho) + ")";
        });

    m.def("compute_features", &compute_features, py::arg("cloud"), py::arg("index"), py::arg("k"),
          py::arg("workers") = 1, "Per-point features (x, y, z, c_lambda, rho) in cloud order");

    // io
    m.def("read_xyz", &read_xyz, py::arg("path"));
    m.def("write_xyz", &write_xyz, py::arg("cloud"), py::arg("path"));
    m.def(
        "read_ply",
        [](const std::filesystem::path& path) {
            PlyContents c = read_ply(path);
            return py::make_tuple(std::move(c.cloud), std::move(c.labels));
        },
        py::arg("path"), "Returns (cloud, labels or None)");
    m.def("write_classified_ply", &write_classified_ply, py::arg("cloud"), py::arg("labels"),
          py::arg("path"));
    m.def("read_labels", &read_labels, py::arg("path"), py::arg("expected_n") = std::nullopt);
    m.def("write_labels", &write_labels, py::arg("labels"), py::arg("path"));
    m.def("write_feature_csv", &write_feature_csv, py::arg("features"), py::arg("path"));
    m.def("read_feature_csv", &read_feature_csv, py::arg("path"));

    // sampling
    py::class_<SampleProfile>(m, "SampleProfile")
        .def(py::init([](std::size_t n_candidates, std::size_t n_leaf, std::size_t n_wood) {
                 return SampleProfile{n_candidates, n_leaf, n_wood};
             }),
             py::arg("n_candidates") = 2000, py::arg("n_leaf") = 1200, py::arg("n_wood") = 800)
        .def_static("from_name", &SampleProfile::from_name, py::arg("name"))
        .def_readwrite("n_candidates", &SampleProfile::n_candidates)
        .def_readwrite("n_leaf", &SampleProfile::n_leaf)
        .def_readwrite("n_wood", &SampleProfile::n_wood);

    py::class_<PlaneFit>(m, "PlaneFit")
        .def_property_readonly("centroid",
                               [](const PlaneFit& f) {
                                   return std::make_tuple(f.centroid.x, f.centroid.y, f.centroid.z);
                               })
        .def_property_readonly("normal",
                               [](const PlaneFit& f) {
                                   return std::make_tuple(f.normal.x, f.normal.y, f.normal.z);
                               })
        .def_readonly("sigma", &PlaneFit::sigma);

    m.def("fit_plane", &fit_plane, py::arg("cloud"), py::arg("neighborhood"));
    m.def("select_candidates", &select_candidates, py::arg("cloud_size"), py::arg("n"),
          py::arg("seed"));

    py::class_<TrainingEntry>(m, "TrainingEntry")
        .def_readonly("features", &TrainingEntry::features)
        .def_readonly("label", &TrainingEntry::label)
        .def_readonly("point_index", &TrainingEntry::point_index)
        .def_readonly("sigma", &TrainingEntry::sigma);

    py::class_<TrainingSet>(m, "TrainingSet")
        .def("__len__", &TrainingSet::size)
        .def("count", &TrainingSet::count, py::arg("label"))
        .def_readonly("entries", &TrainingSet::entries);

    m.def("auto_select_training", &auto_select_training, py::arg("cloud"), py::arg("index"),
          py::arg("profile"), py::arg("k"), py::arg("seed"), py::arg("workers") = 1,
          "Plane-fit residual sampling: high sigma -> leaf, low sigma -> wood");
    m.def("seed_sphere_training", &seed_sphere_training, py::arg("cloud"), py::arg("index"),
          py::arg("leaf_seeds"), py::arg("wood_seeds"), py::arg("radius"), py::arg("k"),
          py::arg("workers") = 1);
    m.def("training_from_labels", &training_from_labels, py::arg("cloud"), py::arg("index"),
          py::arg("labels"), py::arg("n"), py::arg("seed"), py::arg("k"), py::arg("workers") = 1);

    // svm
    py::class_<SvmHyperparams>(m, "SvmHyperparams")
        .def(py::init<>())
        .def_readwrite("cost", &SvmHyperparams::cost)
        .def_readwrite("gamma", &SvmHyperparams::gamma)
        .def_readwrite("tol", &SvmHyperparams::tol)
        .def_readwrite("max_iter", &SvmHyperparams::max_iter);

    py::class_<SvmModel>(m, "SvmModel")
        .def_property_readonly("support_count",
                               [](const SvmModel& m_) { return m_.support_vectors.size(); })
        .def_readonly("bias", &SvmModel::bias)
        .def_readonly("gamma", &SvmModel::gamma)
        .def_readonly("scaled", &SvmModel::scaled);

    py::class_<TrainStats>(m, "TrainStats")
        .def_readonly("iterations", &TrainStats::iterations)
        .def_readonly("dual_objective", &TrainStats::dual_objective)
        .def_readonly("kkt_gap", &TrainStats::kkt_gap)
        .def_readonly("support_count", &TrainStats::support_count);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("stats", &TrainResult::stats);

    m.def(
        "train",
        [](const TrainingSet& ts, const SvmHyperparams& hp, std::uint64_t seed, bool no_scaling) {
            TrainOptions opts;
            opts.no_scaling = no_scaling;
            return train(ts, hp, seed, opts);
        },
        py::arg("training_set"), py::arg("hyperparams") = SvmHyperparams{}, py::arg("seed") = 42,
        py::arg("no_scaling") = false);
    m.def("decision_value", &decision_value, py::arg("model"), py::arg("features"));
    m.def("predict", &predict, py::arg("model"), py::arg("features"));
    m.def("classify_cloud", &classify_cloud, py::arg("model"), py::arg("features"),
          py::arg("workers") = 1);
    m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &load_model, py::arg("path"));

    // eval
    py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
        .def(py::init([](std::uint64_t tp, std::uint64_t tn, std::uint64_t fp, std::uint64_t fn) {
                 return ConfusionMatrix{tp, tn, fp, fn};
             }),
             py::arg("tp"), py::arg("tn"), py::arg("fp"), py::arg("fn"))
        .def_readonly("tp", &ConfusionMatrix::tp)
        .def_readonly("tn", &ConfusionMatrix::tn)
        .def_readonly("fp", &ConfusionMatrix::fp)
        .def_readonly("fn", &ConfusionMatrix::fn)
        .def("total", &ConfusionMatrix::total);

    py::enum_<KappaVariant>(m, "KappaVariant")
        .value("PAPER", KappaVariant::Paper)
        .value("STANDARD", KappaVariant::Standard);

    py::class_<Metrics>(m, "Metrics")
        .def_readonly("p_o", &Metrics::p_o)
        .def_readonly("kappa_paper", &Metrics::kappa_paper)
        .def_readonly("kappa_standard", &Metrics::kappa_standard);

    m.def("confusion", &confusion, py::arg("predicted"), py::arg("truth"));
    m.def("overall_accuracy", &overall_accuracy, py::arg("cm"));
    m.def("kappa", &kappa, py::arg("cm"), py::arg("variant"));
    m.def("metrics", &metrics, py::arg("cm"));
    m.def("improvement", &improvement, py::arg("a"), py::arg("b"));

    // synthetic trees
    py::class_<TreeSpec>(m, "TreeSpec")
        .def(py::init<>())
        .def_readwrite("trunk_height", &TreeSpec::trunk_height)
        .def_readwrite("trunk_radius", &TreeSpec::trunk_radius)
        .def_readwrite("branch_count", &TreeSpec::branch_count)
        .def_readwrite("leaf_cluster_count", &TreeSpec::leaf_cluster_count)
        .def_readwrite("cluster_radius", &TreeSpec::cluster_radius)
        .def_readwrite("wood_point_density", &TreeSpec::wood_point_density)
        .def_readwrite("points_per_cluster", &TreeSpec::points_per_cluster)
        .def_readwrite("noise_std", &TreeSpec::noise_std)
        .def_readwrite("leaf_fraction", &TreeSpec::leaf_fraction)
        .def_readwrite("planar_leaves", &TreeSpec::planar_leaves)
        .def_readwrite("seed", &TreeSpec::seed);

    py::class_<SyntheticTree>(m, "SyntheticTree")
        .def_readonly("cloud", &SyntheticTree::cloud)
        .def_readonly("labels", &SyntheticTree::labels)
        .def_readonly("spec", &SyntheticTree::spec);

    py::enum_<SuitePreset>(m, "SuitePreset")
        .value("LEAFY", SuitePreset::Leafy)
        .value("BALANCED", SuitePreset::Balanced)
        .value("WOODY", SuitePreset::Woody)
        .value("CYCLE", SuitePreset::Cycle);

    m.def("generate_tree", &generate_tree, py::arg("spec"));
    m.def("generate_suite", &generate_suite, py::arg("preset"), py::arg("count"),
          py::arg("master_seed"), py::arg("planar_leaves") = false);

    // pipeline
    py::enum_<SamplingMethod>(m, "SamplingMethod")
        .value("AUTO", SamplingMethod::Auto)
        .value("SPHERES", SamplingMethod::Spheres)
        .value("LABELS", SamplingMethod::Labels);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("input", &RunConfig::input)
        .def_readwrite("output_dir", &RunConfig::output_dir)
        .def_readwrite("truth_labels", &RunConfig::truth_labels)
        .def_readwrite("run_label", &RunConfig::run_label)
        .def_readwrite("k", &RunConfig::k)
        .def_readwrite("profile", &RunConfig::profile)
        .def_readwrite("svm", &RunConfig::svm)
        .def_readwrite("grid_search", &RunConfig::grid_search)
        .def_readwrite("no_scaling", &RunConfig::no_scaling)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("workers", &RunConfig::workers)
        .def_readwrite("method", &RunConfig::method)
        .def_readwrite("seeds_per_class", &RunConfig::seeds_per_class)
        .def_readwrite("sphere_radius", &RunConfig::sphere_radius)
        .def_readwrite("labeled_sample_size", &RunConfig::labeled_sample_size)
        .def_readwrite("dump_features", &RunConfig::dump_features);

    py::class_<PipelineResult>(m, "PipelineResult")
        .def_readonly("metrics", &PipelineResult::metrics)
        .def_readonly("point_count", &PipelineResult::point_count)
        .def_readonly("training_size", &PipelineResult::training_size)
        .def_readonly("runtime_seconds", &PipelineResult::runtime_seconds)
        .def_property_readonly("classified_ply",
                               [](const PipelineResult& r) {
                                   return r.artifacts.classified_ply.string();
                               })
        .def_property_readonly("model_file",
                               [](const PipelineResult& r) {
                                   return r.artifacts.model_file.string();
                               })
        .def_property_readonly("report_csv", [](const PipelineResult& r) {
            return r.artifacts.report_csv ? std::optional<std::string>(r.artifacts.report_csv->string())
                                          : std::nullopt;
        });

    m.def("run_pipeline", &run_pipeline, py::arg("config"),
          "Full batch run: read, features, sample, train, classify, write artifacts");

    m.attr("__version__") = "0.1.0";
}
