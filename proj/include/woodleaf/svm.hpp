#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "woodleaf/features.hpp"
#include "woodleaf/geometry.hpp"
#include "woodleaf/sampling.hpp"

namespace woodleaf {

inline constexpr std::size_t kFeatureDim = 5;

using FeatureRow = std::array<double, kFeatureDim>;

inline FeatureRow to_row(const FeatureVector& f) { return {f.x, f.y, f.z, f.c_lambda, f.rho}; }

/// Per-dimension mean/std fitted on the training features. A zero-variance
/// dimension records std 1 so the transform stays defined.
struct ScalingParams {
    FeatureRow mean{};
    FeatureRow std{};

    static ScalingParams identity();
    FeatureRow apply(const FeatureRow& r) const;
};

struct SvmHyperparams {
    double cost = 10.0;     // soft-margin penalty C
    double gamma = 0.2;     // RBF width, default 1/dim after standardization
    double tol = 1e-3;      // KKT tolerance (duality-gap stopping threshold)
    std::size_t max_iter = 1'000'000;

    void validate() const;
};

/// Trained RBF-SVM: support vectors in standardized feature space, dual
/// coefficients alpha_i * y_i (leaf = +1, wood = -1), bias, kernel width and
/// the scaling used at training time. cost and tol are carried as training
/// metadata; prediction does not read them.
struct SvmModel {
    std::vector<FeatureRow> support_vectors;
    std::vector<double> coefficients;
    double bias = 0.0;
    double gamma = 0.2;
    double cost = 10.0;
    double tol = 1e-3;
    ScalingParams scaling;
    bool scaled = true;
};

struct TrainStats {
    std::size_t iterations = 0;
    double dual_objective = 0.0; // sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij
    double kkt_gap = 0.0;        // final max-violation gap
    std::size_t support_count = 0;
};

struct TrainResult {
    SvmModel model;
    TrainStats stats;
};

struct TrainOptions {
    bool no_scaling = false;
    /// Called once per SMO iteration with (iteration, dual objective).
    /// Computing the objective is quadratic in the training size; meant for
    /// small diagnostic runs.
    void (*progress)(std::size_t, double, void*) = nullptr;
    void* progress_ctx = nullptr;
};

/// Standardize rows to zero mean, unit variance per dimension. With params
/// given, applies them instead of fitting (the prediction-time path).
std::pair<std::vector<FeatureRow>, ScalingParams>
standardize(const std::vector<FeatureRow>& rows, const std::optional<ScalingParams>& params);

/// RBF kernel exp(-gamma * |u - v|^2).
double rbf(const FeatureRow& u, const FeatureRow& v, double gamma);

/// Train by sequential minimal optimization with maximal-violating-pair
/// working-set selection. Deterministic; the seed is reserved for selection
/// strategies that randomize and does not affect this solver.
TrainResult train(const TrainingSet& ts, const SvmHyperparams& hp, std::uint64_t seed,
                  const TrainOptions& opts = {});

/// Decision value sum_i coef_i K(sv_i, x) + bias in standardized space.
double decision_value(const SvmModel& model, const FeatureVector& fv);

/// Leaf when the decision value is >= 0, wood otherwise.
Label predict(const SvmModel& model, const FeatureVector& fv);

/// Per-point prediction in cloud order; worker count never changes results.
LabelVector classify_cloud(const SvmModel& model, const std::vector<FeatureVector>& features,
                           unsigned workers = 1);

/// Versioned text serialization. Doubles are printed with 17 significant
/// digits, so a loaded model predicts bit-identically.
void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(const std::filesystem::path& path);

struct GridSearchSpec {
    std::vector<double> costs{1.0, 10.0, 100.0};
    std::vector<double> gammas{0.05, 0.2, 1.0};
    std::size_t folds = 5;
};

struct GridSearchResult {
    SvmHyperparams best;
    double best_accuracy = 0.0;
    struct Cell {
        double cost;
        double gamma;
        double accuracy;
    };
    std::vector<Cell> table;
};

/// Coarse grid search with stratified k-fold cross-validation. Ties resolve
/// to the earliest (cost-major) grid cell.
GridSearchResult grid_search_cv(const TrainingSet& ts, const SvmHyperparams& base,
                                const GridSearchSpec& spec, std::uint64_t seed,
                                const TrainOptions& opts = {});

} // namespace woodleaf
