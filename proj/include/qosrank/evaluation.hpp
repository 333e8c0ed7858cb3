#pragma once

#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "qosrank/learner.hpp"

namespace qosrank {

namespace detail {

// Neumaier compensated sum; fold results must not depend on accumulation
// order beyond 1e-12.
class CompensatedSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace detail

// One held-out prediction: the full predicted distribution, the truth, and
// the training prior of the fold that produced it.
struct LabeledPrediction {
    std::vector<double> predicted;  // probabilities, sum 1
    std::size_t truth = 0;
    double weight = 1.0;
    std::vector<double> prior;  // training-fold class prior
};

// (1/(N*m)) sum_i sum_k |p_i(k) - y_i(k)| with one-hot y, weight-adjusted.
inline double mae(const std::vector<LabeledPrediction>& preds) {
    if (preds.empty()) throw Error(errc::eval, "no predictions");
    std::size_t m = preds.front().predicted.size();
    detail::CompensatedSum sum, weight;
    for (const auto& pr : preds) {
        if (pr.predicted.size() != m)
            throw Error(errc::eval, "prediction class count mismatch");
        for (std::size_t k = 0; k < m; ++k) {
            double y = k == pr.truth ? 1.0 : 0.0;
            sum.add(pr.weight * std::fabs(pr.predicted[k] - y));
        }
        weight.add(pr.weight);
    }
    return sum.value() / (weight.value() * static_cast<double>(m));
}

inline double rmse(const std::vector<LabeledPrediction>& preds) {
    if (preds.empty()) throw Error(errc::eval, "no predictions");
    std::size_t m = preds.front().predicted.size();
    detail::CompensatedSum sum, weight;
    for (const auto& pr : preds) {
        if (pr.predicted.size() != m)
            throw Error(errc::eval, "prediction class count mismatch");
        for (std::size_t k = 0; k < m; ++k) {
            double y = k == pr.truth ? 1.0 : 0.0;
            double diff = pr.predicted[k] - y;
            sum.add(pr.weight * diff * diff);
        }
        weight.add(pr.weight);
    }
    return std::sqrt(sum.value() / (weight.value() * static_cast<double>(m)));
}

// Percent absolute error relative to predicting each instance's training
// prior; the prior predictor therefore scores exactly 100.
inline double rae(const std::vector<LabeledPrediction>& preds) {
    if (preds.empty()) throw Error(errc::eval, "no predictions");
    detail::CompensatedSum num, den;
    for (const auto& pr : preds) {
        for (std::size_t k = 0; k < pr.predicted.size(); ++k) {
            double y = k == pr.truth ? 1.0 : 0.0;
            num.add(pr.weight * std::fabs(pr.predicted[k] - y));
            den.add(pr.weight * std::fabs(pr.prior[k] - y));
        }
    }
    if (den.value() <= 0.0)
        throw Error(errc::eval, "prior is perfect; relative error undefined");
    return 100.0 * num.value() / den.value();
}

inline double rrse(const std::vector<LabeledPrediction>& preds) {
    if (preds.empty()) throw Error(errc::eval, "no predictions");
    detail::CompensatedSum num, den;
    for (const auto& pr : preds) {
        for (std::size_t k = 0; k < pr.predicted.size(); ++k) {
            double y = k == pr.truth ? 1.0 : 0.0;
            double dp = pr.predicted[k] - y;
            double dq = pr.prior[k] - y;
            num.add(pr.weight * dp * dp);
            den.add(pr.weight * dq * dq);
        }
    }
    if (den.value() <= 0.0)
        throw Error(errc::eval, "prior is perfect; relative error undefined");
    return 100.0 * std::sqrt(num.value() / den.value());
}

struct FoldResult {
    double correct = 0.0;
    double incorrect = 0.0;
    double build_time_s = 0.0;
};

struct EvaluationReport {
    std::string learner;
    nlohmann::json params = nlohmann::json::object();
    std::size_t k = 0;
    std::uint64_t seed = 0;
    double correct = 0.0;
    double incorrect = 0.0;
    double accuracy = 0.0;  // percent
    double mae = 0.0;
    double rmse = 0.0;
    double rae = 0.0;   // percent
    double rrse = 0.0;  // percent
    double build_time_s = 0.0;
    std::vector<FoldResult> folds;
    bool failed = false;
    std::string error;

    nlohmann::json to_json(bool normalize = false) const {
        nlohmann::json j{{"learner", learner}, {"k", k}, {"seed", seed}};
        if (failed) {
            j["failed"] = true;
            j["error"] = error;
            return j;
        }
        j["params"] = params;
        j["correct"] = correct;
        j["incorrect"] = incorrect;
        j["accuracy"] = accuracy;
        j["mean_absolute_error"] = mae;
        j["root_mean_squared_error"] = rmse;
        j["relative_absolute_error"] = rae;
        j["root_relative_squared_error"] = rrse;
        nlohmann::json jf = nlohmann::json::array();
        for (const auto& f : folds) {
            nlohmann::json e{{"correct", f.correct}, {"incorrect", f.incorrect}};
            if (!normalize) e["build_time_s"] = f.build_time_s;
            jf.push_back(std::move(e));
        }
        j["folds"] = std::move(jf);
        if (!normalize) j["build_time_s"] = build_time_s;
        return j;
    }
};

using Trainer =
    std::function<std::unique_ptr<ModelBase>(const Dataset& train, std::uint64_t seed)>;

// Stratified k-fold cross-validation: train on k-1 folds, predict the
// held-out fold, accumulate counts from argmax labels and the error
// metrics from full distributions.
inline EvaluationReport cross_validate(const Dataset& d, const std::string& learner_name,
                                       const Trainer& trainer, std::size_t k = 10,
                                       std::uint64_t seed = 1) {
    FoldAssignment fa = stratified_folds(d, k, seed);
    EvaluationReport rep;
    rep.learner = learner_name;
    rep.k = k;
    rep.seed = seed;

    std::vector<LabeledPrediction> preds;
    preds.reserve(d.size());
    for (std::size_t fold = 0; fold < k; ++fold) {
        Dataset train = d.with_instances(fa.train_indices(fold));
        FoldResult fr;
        detail::Stopwatch timer;
        std::unique_ptr<ModelBase> model;
        try {
            model = trainer(train, seed);
        } catch (const Error& e) {
            throw Error(e.code(), "fold " + std::to_string(fold) + ": " + e.what());
        }
        fr.build_time_s = timer.seconds();
        std::vector<double> prior = class_distribution(train).probabilities();
        for (std::size_t i : fa.test_indices(fold)) {
            const Instance& inst = d.instance(i);
            LabeledPrediction pr;
            pr.predicted = model->predict(inst).probabilities();
            pr.truth = d.class_of(inst);
            pr.weight = inst.weight;
            pr.prior = prior;
            std::size_t label = ClassDistribution::from_counts(pr.predicted).argmax();
            if (label == pr.truth)
                fr.correct += inst.weight;
            else
                fr.incorrect += inst.weight;
            preds.push_back(std::move(pr));
        }
        rep.folds.push_back(fr);
        rep.correct += fr.correct;
        rep.incorrect += fr.incorrect;
        rep.build_time_s += fr.build_time_s;
    }
    rep.accuracy = 100.0 * rep.correct / (rep.correct + rep.incorrect);
    rep.mae = mae(preds);
    rep.rmse = rmse(preds);
    rep.rae = rae(preds);
    rep.rrse = rrse(preds);
    return rep;
}

inline EvaluationReport cross_validate(const Dataset& d, const LearnerSpec& spec,
                                       std::size_t k = 10, std::uint64_t seed = 1) {
    auto rep = cross_validate(
        d, spec.name,
        [&spec](const Dataset& train, std::uint64_t s) { return train_model(train, spec, s); },
        k, seed);
    return rep;
}

struct Comparison {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::string dataset_fingerprint;
    std::size_t instances = 0;
    std::vector<EvaluationReport> rows;

    nlohmann::json to_json(bool normalize = false) const {
        nlohmann::json rows_json = nlohmann::json::array();
        for (const auto& r : rows) rows_json.push_back(r.to_json(normalize));
        return {{"format_version", 1},
                {"dataset", {{"fingerprint", dataset_fingerprint}, {"instances", instances}}},
                {"k", k},
                {"seed", seed},
                {"rows", std::move(rows_json)}};
    }
};

// Every learner is evaluated against the identical fold assignment; a
// failing learner marks its row and the rest proceed.
inline Comparison compare_learners(const Dataset& d, const std::vector<LearnerSpec>& specs,
                                   std::size_t k = 10, std::uint64_t seed = 1) {
    if (specs.empty()) throw Error(errc::eval, "no learners to compare");
    Comparison cmp;
    cmp.k = k;
    cmp.seed = seed;
    cmp.dataset_fingerprint = d.fingerprint();
    cmp.instances = d.size();
    for (const auto& spec : specs) {
        try {
            cmp.rows.push_back(cross_validate(d, spec, k, seed));
        } catch (const Error& e) {
            EvaluationReport rep;
            rep.learner = spec.name;
            rep.k = k;
            rep.seed = seed;
            rep.failed = true;
            rep.error = e.what();
            cmp.rows.push_back(std::move(rep));
        }
    }
    return cmp;
}

namespace detail {

inline std::string fixed(double v, int precision) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

inline std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline std::string render_table(const std::vector<std::string>& headers,
                                const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) widths[c] = headers[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
    std::ostringstream out;
    for (std::size_t c = 0; c < headers.size(); ++c)
        out << pad(headers[c], widths[c]) << (c + 1 < headers.size() ? "  " : "");
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << pad(row[c], widths[c]) << (c + 1 < row.size() ? "  " : "");
        out << "\n";
    }
    return out.str();
}

}  // namespace detail

// Three aligned tables whose columns mirror the usual comparison layout:
// accuracy and build time, instance counts, and the four error metrics.
inline std::string render_comparison(const Comparison& cmp) {
    std::vector<std::vector<std::string>> acc, counts, errors;
    for (const auto& r : cmp.rows) {
        if (r.failed) {
            acc.push_back({r.learner, "FAILED", "-"});
            counts.push_back({r.learner, "FAILED: " + r.error, ""});
            errors.push_back({r.learner, "-", "-", "-", "-"});
            continue;
        }
        acc.push_back({r.learner, detail::fixed(r.accuracy, 3), detail::fixed(r.build_time_s, 2)});
        counts.push_back({r.learner, detail::fixed(r.correct, 0), detail::fixed(r.incorrect, 0)});
        errors.push_back({r.learner, detail::fixed(r.mae, 4), detail::fixed(r.rmse, 4),
                          detail::fixed(r.rae, 4), detail::fixed(r.rrse, 4)});
    }
    std::ostringstream out;
    out << "Classification result observations (" << cmp.k << "-fold cross validation, seed "
        << cmp.seed << ")\n\n";
    out << detail::render_table({"Learner", "Accuracy(%)", "Time/Sec"}, acc) << "\n";
    out << detail::render_table(
               {"Learner", "Correctly Classified Instances", "Incorrectly Classified Instances"},
               counts)
        << "\n";
    out << detail::render_table({"Learner", "Mean absolute error", "Root mean squared error",
                                 "Relative absolute error", "Root relative squared error"},
                                errors);
    return out.str();
}

}  // namespace qosrank
