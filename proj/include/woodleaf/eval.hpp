#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "woodleaf/geometry.hpp"

namespace woodleaf {

/// Binary confusion counts with leaf as the positive class:
/// TP leaf-as-leaf, TN wood-as-wood, FP wood-as-leaf, FN leaf-as-wood.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        tn += o.tn;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

/// The chance-agreement term of the kappa coefficient ships in two shapes
/// that agree on symmetric matrices and differ otherwise:
/// Paper uses p_e = ((TP+FP)(TP+TN)+(TN+FN)(FP+FN))/N^2,
/// Standard is Cohen's p_e = ((TP+FP)(TP+FN)+(FN+TN)(FP+TN))/N^2.
enum class KappaVariant { Paper, Standard };

struct Metrics {
    double p_o = 0.0;
    double kappa_paper = 0.0;
    double kappa_standard = 0.0;
};

ConfusionMatrix confusion(const LabelVector& predicted, const LabelVector& truth);

/// Overall accuracy (TP+TN)/N.
double overall_accuracy(const ConfusionMatrix& cm);

/// Chance-corrected agreement (p_o - p_e)/(1 - p_e). The degenerate p_e = 1
/// case returns 1 when p_o = 1 and 0 otherwise.
double kappa(const ConfusionMatrix& cm, KappaVariant variant);

Metrics metrics(const ConfusionMatrix& cm);

/// Field-wise difference a - b: the "improved accuracy" of method a over
/// method b when both were scored against the same truth.
Metrics improvement(const Metrics& a, const Metrics& b);

/// One line of a comparison report (Table 2/3 style).
struct ReportRow {
    std::string tree;
    std::string method;
    Metrics m;
    ConfusionMatrix cm;
};

/// CSV with header tree,method,p_o,kappa_paper,kappa_standard,TP,TN,FP,FN.
void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path);

/// Aligned text table with the same columns.
std::string format_report_table(const std::vector<ReportRow>& rows);

} // namespace woodleaf
