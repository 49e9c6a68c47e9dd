#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "support/temp_dir.hpp"
#include "woodleaf/error.hpp"
#include "woodleaf/io.hpp"
#include "woodleaf/pipeline.hpp"
#include "woodleaf/synthgen.hpp"

using namespace woodleaf;
using testsupport::TempDir;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

TreeSpec tiny_tree_spec(std::uint64_t seed) {
    TreeSpec spec;
    spec.trunk_height = 4.0;
    spec.branch_count = 4;
    spec.leaf_cluster_count = 8;
    spec.wood_point_density = 700.0;
    spec.seed = seed;
    return spec;
}

RunConfig small_config(const fs::path& input, const fs::path& out) {
    RunConfig config;
    config.input = input;
    config.output_dir = out;
    config.k = 40;
    config.profile = {400, 150, 150};
    config.seed = 7;
    return config;
}

} // namespace

TEST_CASE("pipeline writes every artifact and fills metrics from PLY labels") {
    TempDir dir;
    const SyntheticTree tree = generate_tree(tiny_tree_spec(5));
    write_classified_ply(tree.cloud, tree.labels, dir.file("tree.ply"));

    const RunConfig config = small_config(dir.file("tree.ply"), dir.file("out"));
    const PipelineResult result = run_pipeline(config);

    CHECK(fs::exists(result.artifacts.classified_ply));
    CHECK(fs::exists(result.artifacts.samples_csv));
    CHECK(fs::exists(result.artifacts.model_file));
    CHECK(fs::exists(result.artifacts.run_summary));
    CHECK(fs::exists(result.artifacts.config_echo));
    REQUIRE(result.artifacts.report_csv.has_value());
    CHECK(fs::exists(*result.artifacts.report_csv));
    REQUIRE(result.metrics.has_value());
    CHECK(result.metrics->p_o > 0.5);
    CHECK(result.point_count == tree.cloud.size());

    // the classified output re-reads as a full labeling of the input
    const PlyContents back = read_ply(result.artifacts.classified_ply);
    CHECK(back.cloud.size() == tree.cloud.size());
    REQUIRE(back.labels.has_value());
}

TEST_CASE("pipeline without truth labels skips the report") {
    TempDir dir;
    const SyntheticTree tree = generate_tree(tiny_tree_spec(6));
    write_xyz(tree.cloud, dir.file("tree.xyz"));

    const RunConfig config = small_config(dir.file("tree.xyz"), dir.file("out"));
    const PipelineResult result = run_pipeline(config);
    CHECK_FALSE(result.metrics.has_value());
    CHECK_FALSE(result.artifacts.report_csv.has_value());
    CHECK(fs::exists(result.artifacts.classified_ply));
}

TEST_CASE("pipeline accepts an external truth label file") {
    TempDir dir;
    const SyntheticTree tree = generate_tree(tiny_tree_spec(7));
    write_xyz(tree.cloud, dir.file("tree.xyz"));
    write_labels(tree.labels, dir.file("truth.txt"));

    RunConfig config = small_config(dir.file("tree.xyz"), dir.file("out"));
    config.truth_labels = dir.file("truth.txt");
    const PipelineResult result = run_pipeline(config);
    REQUIRE(result.metrics.has_value());
    CHECK(result.metrics->p_o > 0.5);
}

TEST_CASE("pipeline: missing input raises an io error naming the path") {
    TempDir dir;
    RunConfig config = small_config(dir.file("nope.xyz"), dir.file("out"));
    try {
        run_pipeline(config);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("nope.xyz") != std::string::npos);
    }
}

TEST_CASE("pipeline: identical config and seed give byte-identical artifacts across workers") {
    TempDir dir;
    const SyntheticTree tree = generate_tree(tiny_tree_spec(8));
    write_classified_ply(tree.cloud, tree.labels, dir.file("tree.ply"));

    RunConfig a = small_config(dir.file("tree.ply"), dir.file("out_a"));
    a.workers = 1;
    RunConfig b = small_config(dir.file("tree.ply"), dir.file("out_b"));
    b.workers = 4;

    const PipelineResult ra = run_pipeline(a);
    const PipelineResult rb = run_pipeline(b);

    CHECK(slurp(ra.artifacts.classified_ply) == slurp(rb.artifacts.classified_ply));
    CHECK(slurp(ra.artifacts.model_file) == slurp(rb.artifacts.model_file));
    CHECK(slurp(ra.artifacts.samples_csv) == slurp(rb.artifacts.samples_csv));
    REQUIRE(ra.artifacts.report_csv.has_value());
    REQUIRE(rb.artifacts.report_csv.has_value());
    CHECK(slurp(*ra.artifacts.report_csv) == slurp(*rb.artifacts.report_csv));
}

TEST_CASE("sphere and label sampling methods run end to end") {
    TempDir dir;
    const SyntheticTree tree = generate_tree(tiny_tree_spec(9));
    write_classified_ply(tree.cloud, tree.labels, dir.file("tree.ply"));

    RunConfig spheres = small_config(dir.file("tree.ply"), dir.file("out_s"));
    spheres.method = SamplingMethod::Spheres;
    spheres.sphere_radius = 0.25;
    spheres.seeds_per_class = 10;
    const PipelineResult rs = run_pipeline(spheres);
    REQUIRE(rs.metrics.has_value());

    RunConfig labels = small_config(dir.file("tree.ply"), dir.file("out_l"));
    labels.method = SamplingMethod::Labels;
    labels.labeled_sample_size = 600;
    const PipelineResult rl = run_pipeline(labels);
    REQUIRE(rl.metrics.has_value());
    CHECK(rl.metrics->p_o > 0.5);
}

TEST_CASE("sphere method without truth or seed files is a config error") {
    TempDir dir;
    const SyntheticTree tree = generate_tree(tiny_tree_spec(10));
    write_xyz(tree.cloud, dir.file("tree.xyz"));
    RunConfig config = small_config(dir.file("tree.xyz"), dir.file("out"));
    config.method = SamplingMethod::Spheres;
    CHECK_THROWS_AS(run_pipeline(config), ConfigError);
}

TEST_CASE("config echo renders every field") {
    RunConfig config;
    config.input = "in.ply";
    config.output_dir = "out";
    const std::string text = render_config(config);
    CHECK(text.find("input=in.ply") != std::string::npos);
    CHECK(text.find("k=100") != std::string::npos);
    CHECK(text.find("method=auto") != std::string::npos);
    CHECK(text.find("svm.C=10") != std::string::npos);
    CHECK(text.find("seed=42") != std::string::npos);
}
