#include "woodleaf/svm.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "woodleaf/error.hpp"
#include "woodleaf/num_format.hpp"
#include "woodleaf/parallel.hpp"
#include "woodleaf/rng.hpp"

namespace woodleaf {

namespace {

constexpr double kEtaFloor = 1e-12; // curvature floor for degenerate pairs

double squared_row_distance(const FeatureRow& u, const FeatureRow& v) {
    double s = 0.0;
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
        const double diff = u[d] - v[d];
        s += diff * diff;
    }
    return s;
}

struct Problem {
    std::vector<FeatureRow> x; // standardized
    std::vector<double> y;     // +1 leaf, -1 wood
    double cost;
    double gamma;

    double kernel(std::size_t i, std::size_t j) const {
        return std::exp(-gamma * squared_row_distance(x[i], x[j]));
    }

    void kernel_row(std::size_t i, std::vector<double>& row) const {
        for (std::size_t j = 0; j < x.size(); ++j) row[j] = kernel(i, j);
    }
};

double dual_objective(const Problem& p, const std::vector<double>& alpha) {
    double linear = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] == 0.0) continue;
        linear += alpha[i];
        for (std::size_t j = 0; j < alpha.size(); ++j) {
            if (alpha[j] == 0.0) continue;
            quad += alpha[i] * alpha[j] * p.y[i] * p.y[j] * p.kernel(i, j);
        }
    }
    return linear - 0.5 * quad;
}

} // namespace

ScalingParams ScalingParams::identity() {
    ScalingParams s;
    s.mean.fill(0.0);
    s.std.fill(1.0);
    return s;
}

FeatureRow ScalingParams::apply(const FeatureRow& r) const {
    FeatureRow out;
    for (std::size_t d = 0; d < kFeatureDim; ++d) out[d] = (r[d] - mean[d]) / std[d];
    return out;
}

void SvmHyperparams::validate() const {
    if (!(cost > 0.0)) throw ConfigError("SVM cost C must be positive");
    if (!(gamma > 0.0)) throw ConfigError("SVM gamma must be positive");
    if (!(tol > 0.0)) throw ConfigError("SVM tolerance must be positive");
    if (max_iter == 0) throw ConfigError("SVM iteration cap must be positive");
}

std::pair<std::vector<FeatureRow>, ScalingParams>
standardize(const std::vector<FeatureRow>& rows, const std::optional<ScalingParams>& params) {
    if (rows.empty()) throw ConfigError("standardize requires at least one row");

    ScalingParams sp;
    if (params) {
        sp = *params;
    } else {
        const double n = static_cast<double>(rows.size());
        sp.mean.fill(0.0);
        for (const FeatureRow& r : rows)
            for (std::size_t d = 0; d < kFeatureDim; ++d) sp.mean[d] += r[d];
        for (std::size_t d = 0; d < kFeatureDim; ++d) sp.mean[d] /= n;

        FeatureRow var{};
        for (const FeatureRow& r : rows)
            for (std::size_t d = 0; d < kFeatureDim; ++d) {
                const double diff = r[d] - sp.mean[d];
                var[d] += diff * diff;
            }
        for (std::size_t d = 0; d < kFeatureDim; ++d) {
            const double s = std::sqrt(var[d] / n);
            sp.std[d] = s > 1e-12 * (std::abs(sp.mean[d]) + 1.0) ? s : 1.0;
        }
    }

    std::vector<FeatureRow> scaled;
    scaled.reserve(rows.size());
    for (const FeatureRow& r : rows) scaled.push_back(sp.apply(r));
    return {std::move(scaled), sp};
}

double rbf(const FeatureRow& u, const FeatureRow& v, double gamma) {
    return std::exp(-gamma * squared_row_distance(u, v));
}

TrainResult train(const TrainingSet& ts, const SvmHyperparams& hp, std::uint64_t seed,
                  const TrainOptions& opts) {
    (void)seed; // selection is deterministic; kept for interface stability
    hp.validate();
    const std::size_t n = ts.size();
    if (n < 2) throw ConfigError("training requires at least 2 points");
    if (ts.count(Label::Leaf) == 0 || ts.count(Label::Wood) == 0)
        throw NumericError("training set contains a single class");

    Problem p;
    p.cost = hp.cost;
    p.gamma = hp.gamma;
    p.y.reserve(n);
    std::vector<FeatureRow> raw;
    raw.reserve(n);
    for (const TrainingEntry& e : ts.entries) {
        raw.push_back(to_row(e.features));
        p.y.push_back(e.label == Label::Leaf ? 1.0 : -1.0);
    }

    ScalingParams sp;
    if (opts.no_scaling) {
        sp = ScalingParams::identity();
        p.x = std::move(raw);
    } else {
        auto [scaled, fitted] = standardize(raw, std::nullopt);
        p.x = std::move(scaled);
        sp = fitted;
    }

    // SMO on the dual: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, with
    // Q_ij = y_i y_j K_ij. Gradient G_i = (Qa)_i - 1; the selection score is
    // v_i = -y_i G_i. Working pair = maximal violating pair:
    //   i = argmax { v_i : i in I_up },  j = argmin { v_j : j in I_low }.
    // Optimal within tol when v_i - v_j <= tol.
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    std::vector<double> row_i(n), row_j(n);

    const double C = hp.cost;
    std::size_t iter = 0;
    double gap = std::numeric_limits<double>::infinity();

    for (;; ++iter) {
        std::size_t best_i = n, best_j = n;
        double v_max = -std::numeric_limits<double>::infinity();
        double v_min = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -p.y[t] * grad[t];
            const bool in_up = (p.y[t] > 0.0 && alpha[t] < C) || (p.y[t] < 0.0 && alpha[t] > 0.0);
            const bool in_low = (p.y[t] > 0.0 && alpha[t] > 0.0) || (p.y[t] < 0.0 && alpha[t] < C);
            if (in_up && v > v_max) {
                v_max = v;
                best_i = t;
            }
            if (in_low && v < v_min) {
                v_min = v;
                best_j = t;
            }
        }
        gap = v_max - v_min;
        if (!(gap > hp.tol)) break;
        if (iter >= hp.max_iter) {
            std::ostringstream msg;
            msg << "SMO failed to converge after " << iter << " iterations (KKT gap "
                << format_double(gap) << ", tol " << format_double(hp.tol)
                << ", dual objective " << format_double(dual_objective(p, alpha)) << ")";
            throw NumericError(msg.str());
        }

        const std::size_t i = best_i, j = best_j;
        p.kernel_row(i, row_i);
        p.kernel_row(j, row_j);

        const double eta = std::max(row_i[i] + row_j[j] - 2.0 * row_i[j], kEtaFloor);
        double t_step = gap / eta; // unconstrained optimum along the feasible pair direction

        // box constraints: alpha_i moves by +y_i*t, alpha_j by -y_j*t
        const double cap_i = p.y[i] > 0.0 ? C - alpha[i] : alpha[i];
        const double cap_j = p.y[j] > 0.0 ? alpha[j] : C - alpha[j];
        t_step = std::min(t_step, std::min(cap_i, cap_j));

        // each step strictly improves the dual: gain = gap*t - eta*t^2/2 > 0
        assert(gap * t_step - 0.5 * eta * t_step * t_step >= 0.0);

        alpha[i] += p.y[i] * t_step;
        alpha[j] -= p.y[j] * t_step;
        // clamp away accumulated rounding at the box edges
        alpha[i] = std::clamp(alpha[i], 0.0, C);
        alpha[j] = std::clamp(alpha[j], 0.0, C);

        for (std::size_t t = 0; t < n; ++t) grad[t] += p.y[t] * t_step * (row_i[t] - row_j[t]);

        if (opts.progress) opts.progress(iter, dual_objective(p, alpha), opts.progress_ctx);
    }

    // bias from the final violation bounds: any value in [v_min, v_max]
    // is consistent at optimality; take the midpoint.
    double v_up = -std::numeric_limits<double>::infinity();
    double v_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double v = -p.y[t] * grad[t];
        const bool in_up = (p.y[t] > 0.0 && alpha[t] < C) || (p.y[t] < 0.0 && alpha[t] > 0.0);
        const bool in_low = (p.y[t] > 0.0 && alpha[t] > 0.0) || (p.y[t] < 0.0 && alpha[t] < C);
        if (in_up) v_up = std::max(v_up, v);
        if (in_low) v_low = std::min(v_low, v);
    }
    const double bias = 0.5 * (v_up + v_low);

    TrainResult result;
    result.model.gamma = hp.gamma;
    result.model.cost = hp.cost;
    result.model.tol = hp.tol;
    result.model.scaling = sp;
    result.model.scaled = !opts.no_scaling;
    result.model.bias = bias;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            result.model.support_vectors.push_back(p.x[t]);
            result.model.coefficients.push_back(alpha[t] * p.y[t]);
        }
    }
    if (result.model.support_vectors.empty())
        throw NumericError("training produced no support vectors");

    result.stats.iterations = iter;
    result.stats.dual_objective = dual_objective(p, alpha);
    result.stats.kkt_gap = gap;
    result.stats.support_count = result.model.support_vectors.size();
    return result;
}

double decision_value(const SvmModel& model, const FeatureVector& fv) {
    const FeatureRow x = model.scaling.apply(to_row(fv));
    double sum = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        sum += model.coefficients[i] *
               std::exp(-model.gamma * squared_row_distance(model.support_vectors[i], x));
    return sum;
}

Label predict(const SvmModel& model, const FeatureVector& fv) {
    return decision_value(model, fv) >= 0.0 ? Label::Leaf : Label::Wood;
}

LabelVector classify_cloud(const SvmModel& model, const std::vector<FeatureVector>& features,
                           unsigned workers) {
    LabelVector out(features.size());
    parallel_chunks(features.size(), resolve_workers(workers),
                    [&](std::size_t begin, std::size_t end) {
                        for (std::size_t i = begin; i < end; ++i)
                            out[i] = predict(model, features[i]);
                    });
    return out;
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path.string());
    out << "woodleaf-svm-model 1\n";
    out << "scaled " << (model.scaled ? 1 : 0) << '\n';
    out << "cost " << format_double(model.cost) << '\n';
    out << "gamma " << format_double(model.gamma) << '\n';
    out << "tol " << format_double(model.tol) << '\n';
    out << "bias " << format_double(model.bias) << '\n';
    out << "dim " << kFeatureDim << '\n';
    out << "scaling_mean";
    for (double m : model.scaling.mean) out << ' ' << format_double(m);
    out << '\n';
    out << "scaling_std";
    for (double s : model.scaling.std) out << ' ' << format_double(s);
    out << '\n';
    out << "support_vectors " << model.support_vectors.size() << '\n';
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        out << format_double(model.coefficients[i]);
        for (double v : model.support_vectors[i]) out << ' ' << format_double(v);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

SvmModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path.string());

    auto read_tokens = [&](const std::string& expect_key, std::size_t expect_values) {
        std::string line;
        if (!std::getline(in, line))
            throw ParseError("truncated model file: " + path.string());
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key != expect_key)
            throw ParseError("model file " + path.string() + ": expected '" + expect_key +
                             "', got '" + key + "'");
        std::vector<std::string> values;
        std::string tok;
        while (ss >> tok) values.push_back(tok);
        if (values.size() != expect_values)
            throw ParseError("model file " + path.string() + ": malformed '" + expect_key +
                             "' line");
        return values;
    };
    auto to_double = [&](const std::string& tok) {
        double v = 0.0;
        if (!try_parse_double(tok, v))
            throw ParseError("model file " + path.string() + ": bad number '" + tok + "'");
        return v;
    };

    const auto version = read_tokens("woodleaf-svm-model", 1);
    if (version[0] != "1")
        throw ParseError("unsupported model version '" + version[0] + "' in " + path.string());

    SvmModel model;
    model.scaled = read_tokens("scaled", 1)[0] != "0";
    model.cost = to_double(read_tokens("cost", 1)[0]);
    model.gamma = to_double(read_tokens("gamma", 1)[0]);
    model.tol = to_double(read_tokens("tol", 1)[0]);
    model.bias = to_double(read_tokens("bias", 1)[0]);
    const auto dim = read_tokens("dim", 1);
    if (dim[0] != std::to_string(kFeatureDim))
        throw ParseError("unsupported feature dimension '" + dim[0] + "' in " + path.string());
    const auto means = read_tokens("scaling_mean", kFeatureDim);
    const auto stds = read_tokens("scaling_std", kFeatureDim);
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
        model.scaling.mean[d] = to_double(means[d]);
        model.scaling.std[d] = to_double(stds[d]);
    }
    long long sv_count = 0;
    if (!try_parse_int(read_tokens("support_vectors", 1)[0], sv_count) || sv_count <= 0)
        throw ParseError("bad support vector count in " + path.string());
    model.support_vectors.reserve(static_cast<std::size_t>(sv_count));
    model.coefficients.reserve(static_cast<std::size_t>(sv_count));
    for (long long i = 0; i < sv_count; ++i) {
        std::string line;
        if (!std::getline(in, line))
            throw ParseError("truncated support vectors in " + path.string());
        std::istringstream ss(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ss >> tok) toks.push_back(tok);
        if (toks.size() != kFeatureDim + 1)
            throw ParseError("malformed support vector row in " + path.string());
        const double coef = to_double(toks[0]);
        if (std::abs(coef) > model.cost * (1.0 + 1e-12) || coef == 0.0)
            throw ParseError("coefficient out of (0, C] range in " + path.string());
        model.coefficients.push_back(coef);
        FeatureRow row;
        for (std::size_t d = 0; d < kFeatureDim; ++d) row[d] = to_double(toks[d + 1]);
        model.support_vectors.push_back(row);
    }
    return model;
}

GridSearchResult grid_search_cv(const TrainingSet& ts, const SvmHyperparams& base,
                                const GridSearchSpec& spec, std::uint64_t seed,
                                const TrainOptions& opts) {
    if (spec.folds < 2) throw ConfigError("grid search requires at least 2 folds");
    if (spec.costs.empty() || spec.gammas.empty())
        throw ConfigError("grid search requires a non-empty grid");
    const std::size_t n = ts.size();
    if (n < 2 * spec.folds) throw ConfigError("training set too small for the requested folds");

    // stratified folds: shuffle each class separately, deal round-robin
    std::vector<std::size_t> fold_of(n, 0);
    Rng rng(seed);
    for (Label cls : {Label::Leaf, Label::Wood}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (ts.entries[i].label == cls) members.push_back(i);
        rng.shuffle(members);
        for (std::size_t m = 0; m < members.size(); ++m)
            fold_of[members[m]] = m % spec.folds;
    }

    GridSearchResult result;
    result.best = base;
    result.best_accuracy = -1.0;
    for (double cost : spec.costs) {
        for (double gamma : spec.gammas) {
            SvmHyperparams hp = base;
            hp.cost = cost;
            hp.gamma = gamma;

            std::size_t correct = 0, total = 0;
            for (std::size_t f = 0; f < spec.folds; ++f) {
                TrainingSet fold_train;
                std::vector<std::size_t> fold_val;
                for (std::size_t i = 0; i < n; ++i) {
                    if (fold_of[i] == f)
                        fold_val.push_back(i);
                    else
                        fold_train.entries.push_back(ts.entries[i]);
                }
                if (fold_val.empty()) continue;
                if (fold_train.count(Label::Leaf) == 0 || fold_train.count(Label::Wood) == 0)
                    continue;
                const TrainResult tr = train(fold_train, hp, derive_seed(seed, f), opts);
                for (std::size_t i : fold_val) {
                    total += 1;
                    if (predict(tr.model, ts.entries[i].features) == ts.entries[i].label)
                        correct += 1;
                }
            }
            const double acc = total > 0 ? static_cast<double>(correct) / static_cast<double>(total)
                                         : 0.0;
            result.table.push_back({cost, gamma, acc});
            if (acc > result.best_accuracy) {
                result.best_accuracy = acc;
                result.best = hp;
            }
        }
    }
    return result;
}

} // namespace woodleaf
