#pragma once

// Shared helpers for the test suites: compact dataset builders, seeded
// random dataset generation, and independent brute-force oracles that the
// library code must agree with.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "qosrank/qosrank.hpp"

namespace testsupport {

using namespace qosrank;

inline Attribute num_attr(const std::string& name) {
    return {name, AttrKind::numeric, "", {}};
}

inline Attribute nom_attr(const std::string& name, std::vector<std::string> labels) {
    return {name, AttrKind::nominal, "", std::move(labels)};
}

// rows: one vector per instance, class value last by position class_index.
inline Dataset make_dataset(std::vector<Attribute> attrs, std::size_t class_index,
                            const std::vector<std::vector<double>>& rows,
                            const std::vector<double>& weights = {}) {
    Dataset d(std::move(attrs), class_index);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Instance inst;
        inst.values = rows[i];
        inst.weight = weights.empty() ? 1.0 : weights[i];
        d.add(std::move(inst));
    }
    return d;
}

// Two-class dataset over one numeric attribute.
inline Dataset numeric_binary(const std::vector<double>& values,
                              const std::vector<int>& classes) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < values.size(); ++i)
        rows.push_back({values[i], static_cast<double>(classes[i])});
    return make_dataset({num_attr("x"), nom_attr("cls", {"A", "B"})}, 1, rows);
}

// Random mixed-schema dataset; class labels are random, so contradictions
// are possible (fine for split-criterion oracles).
inline Dataset random_dataset(SplitRng& rng, std::size_t max_instances = 20,
                              std::size_t max_attrs = 4, std::size_t num_classes = 0) {
    std::size_t n_attrs = 1 + rng.next_below(max_attrs);
    std::size_t m = num_classes == 0 ? 2 + rng.next_below(2) : num_classes;
    std::vector<Attribute> attrs;
    for (std::size_t a = 0; a < n_attrs; ++a) {
        if (rng.next_below(2) == 0) {
            attrs.push_back(num_attr("n" + std::to_string(a)));
        } else {
            std::size_t v = 2 + rng.next_below(2);
            std::vector<std::string> labels;
            for (std::size_t i = 0; i < v; ++i) labels.push_back("v" + std::to_string(i));
            attrs.push_back(nom_attr("c" + std::to_string(a), std::move(labels)));
        }
    }
    std::vector<std::string> cls_labels;
    for (std::size_t i = 0; i < m; ++i) cls_labels.push_back("k" + std::to_string(i));
    attrs.push_back(nom_attr("cls", std::move(cls_labels)));

    Dataset d(attrs, n_attrs);
    std::size_t n = 2 + rng.next_below(max_instances - 1);
    for (std::size_t i = 0; i < n; ++i) {
        Instance inst;
        for (std::size_t a = 0; a < n_attrs; ++a) {
            if (d.attribute(a).kind == AttrKind::numeric)
                inst.values.push_back(static_cast<double>(rng.next_below(8)));
            else
                inst.values.push_back(
                    static_cast<double>(rng.next_below(d.attribute(a).labels.size())));
        }
        inst.values.push_back(static_cast<double>(rng.next_below(m)));
        d.add(std::move(inst));
    }
    return d;
}

// Contradiction-free dataset: the class is a deterministic function of the
// feature vector.
inline Dataset random_rule_dataset(SplitRng& rng, std::size_t n, std::size_t n_attrs,
                                   std::size_t m) {
    std::vector<Attribute> attrs;
    for (std::size_t a = 0; a < n_attrs; ++a) attrs.push_back(num_attr("n" + std::to_string(a)));
    std::vector<std::string> cls_labels;
    for (std::size_t i = 0; i < m; ++i) cls_labels.push_back("k" + std::to_string(i));
    attrs.push_back(nom_attr("cls", std::move(cls_labels)));
    Dataset d(attrs, n_attrs);
    for (std::size_t i = 0; i < n; ++i) {
        Instance inst;
        std::size_t h = 1469598103u;
        for (std::size_t a = 0; a < n_attrs; ++a) {
            std::size_t v = rng.next_below(6);
            inst.values.push_back(static_cast<double>(v));
            h = (h ^ (v + 11)) * 16777619u;
        }
        inst.values.push_back(static_cast<double>(h % m));
        d.add(std::move(inst));
    }
    return d;
}

// --- independent oracles ---------------------------------------------------

inline double oracle_entropy(const std::vector<double>& counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    double h = 0.0;
    for (double c : counts)
        if (c > 0.0) h -= (c / total) * std::log2(c / total);
    return h;
}

inline double oracle_gini(const std::vector<double>& counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    double g = 1.0;
    for (double c : counts) g -= (c / total) * (c / total);
    return g;
}

// Contingency-table recomputation of the split criteria: child class
// counts straight from the raw table, entropies and weights from scratch.
struct OracleSplitScores {
    double information_gain;
    double split_info;
    double gini_reduction;  // NaN when not binary
};

inline OracleSplitScores oracle_scores(const std::vector<std::vector<double>>& child_counts) {
    std::size_t m = child_counts.front().size();
    std::vector<double> parent(m, 0.0);
    double total = 0.0;
    std::vector<double> child_totals;
    for (const auto& child : child_counts) {
        double t = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            parent[k] += child[k];
            t += child[k];
        }
        child_totals.push_back(t);
        total += t;
    }
    double info_after = 0.0, split_info = 0.0, gini_after = 0.0;
    for (std::size_t j = 0; j < child_counts.size(); ++j) {
        if (child_totals[j] <= 0.0) continue;
        double f = child_totals[j] / total;
        info_after += f * oracle_entropy(child_counts[j]);
        split_info -= f * std::log2(f);
        gini_after += f * oracle_gini(child_counts[j]);
    }
    OracleSplitScores s{};
    s.information_gain = oracle_entropy(parent) - info_after;
    s.split_info = split_info;
    s.gini_reduction = child_counts.size() == 2
                           ? oracle_gini(parent) - gini_after
                           : std::numeric_limits<double>::quiet_NaN();
    return s;
}

// Raw contingency table of a split candidate applied to a dataset view,
// recomputed by direct iteration (fractional missing handling included).
inline std::vector<std::vector<double>> oracle_contingency(const Dataset& d, const Refs& refs,
                                                           const SplitCandidate& cand) {
    std::size_t v = cand.children.size();
    std::size_t m = d.num_classes();
    std::vector<std::vector<double>> table(v, std::vector<double>(m, 0.0));
    std::vector<double> known(v, 0.0);
    double known_total = 0.0;
    for (const auto& r : refs) {
        double val = d.instance(r.index).values[cand.attribute];
        if (is_missing(val)) continue;
        std::size_t child =
            cand.numeric ? (val <= cand.threshold ? 0u : 1u) : static_cast<std::size_t>(val);
        table[child][d.class_of(d.instance(r.index))] += r.weight;
        known[child] += r.weight;
        known_total += r.weight;
    }
    for (const auto& r : refs) {
        double val = d.instance(r.index).values[cand.attribute];
        if (!is_missing(val) || known_total <= 0.0) continue;
        for (std::size_t j = 0; j < v; ++j)
            table[j][d.class_of(d.instance(r.index))] += r.weight * known[j] / known_total;
    }
    return table;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("qosrank_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter()++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string str(const std::string& name = "") const {
        return name.empty() ? path_.string() : (path_ / name).string();
    }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace testsupport
