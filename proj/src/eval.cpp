#include "woodleaf/eval.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "woodleaf/error.hpp"
#include "woodleaf/num_format.hpp"

namespace woodleaf {

ConfusionMatrix confusion(const LabelVector& predicted, const LabelVector& truth) {
    if (predicted.size() != truth.size())
        throw ConfigError("prediction and truth label vectors differ in length");
    if (predicted.empty()) throw ConfigError("confusion requires at least one label");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool pred_leaf = predicted[i] == Label::Leaf;
        const bool true_leaf = truth[i] == Label::Leaf;
        if (pred_leaf && true_leaf)
            ++cm.tp;
        else if (!pred_leaf && !true_leaf)
            ++cm.tn;
        else if (pred_leaf && !true_leaf)
            ++cm.fp;
        else
            ++cm.fn;
    }
    return cm;
}

double overall_accuracy(const ConfusionMatrix& cm) {
    const std::uint64_t n = cm.total();
    if (n == 0) throw ConfigError("confusion matrix is empty");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(n);
}

double kappa(const ConfusionMatrix& cm, KappaVariant variant) {
    const std::uint64_t n = cm.total();
    if (n == 0) throw ConfigError("confusion matrix is empty");

    // exact integer numerators; n <= 2^32 keeps the products in range
    std::uint64_t pe_num = 0;
    if (variant == KappaVariant::Paper)
        pe_num = (cm.tp + cm.fp) * (cm.tp + cm.tn) + (cm.tn + cm.fn) * (cm.fp + cm.fn);
    else
        pe_num = (cm.tp + cm.fp) * (cm.tp + cm.fn) + (cm.fn + cm.tn) * (cm.fp + cm.tn);
    const std::uint64_t n2 = n * n;

    const double p_o = overall_accuracy(cm);
    if (pe_num >= n2) return p_o == 1.0 ? 1.0 : 0.0; // degenerate p_e = 1
    const double p_e = static_cast<double>(pe_num) / static_cast<double>(n2);
    return (p_o - p_e) / (1.0 - p_e);
}

Metrics metrics(const ConfusionMatrix& cm) {
    return {overall_accuracy(cm), kappa(cm, KappaVariant::Paper),
            kappa(cm, KappaVariant::Standard)};
}

Metrics improvement(const Metrics& a, const Metrics& b) {
    return {a.p_o - b.p_o, a.kappa_paper - b.kappa_paper,
            a.kappa_standard - b.kappa_standard};
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report: " + path.string());
    out << "tree,method,p_o,kappa_paper,kappa_standard,TP,TN,FP,FN\n";
    for (const ReportRow& r : rows)
        out << r.tree << ',' << r.method << ',' << format_double(r.m.p_o) << ','
            << format_double(r.m.kappa_paper) << ',' << format_double(r.m.kappa_standard) << ','
            << r.cm.tp << ',' << r.cm.tn << ',' << r.cm.fp << ',' << r.cm.fn << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::string format_report_table(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(16) << "tree" << std::setw(10) << "method";
    out << std::right << std::setw(9) << "p_o" << std::setw(13) << "kappa_paper" << std::setw(16)
        << "kappa_standard" << std::setw(10) << "TP" << std::setw(10) << "TN" << std::setw(8)
        << "FP" << std::setw(8) << "FN" << '\n';
    for (const ReportRow& r : rows) {
        out << std::left << std::setw(16) << r.tree << std::setw(10) << r.method;
        out << std::right << std::fixed << std::setprecision(4);
        out << std::setw(9) << r.m.p_o << std::setw(13) << r.m.kappa_paper << std::setw(16)
            << r.m.kappa_standard;
        out << std::setw(10) << r.cm.tp << std::setw(10) << r.cm.tn << std::setw(8) << r.cm.fp
            << std::setw(8) << r.cm.fn << '\n';
        out.unsetf(std::ios::fixed);
    }
    return out.str();
}

} // namespace woodleaf
