#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qosrank/rule_learners.hpp"
#include "qosrank/tree_learners.hpp"

namespace qosrank {

// Canonical roster, in the comparison table's row order.
inline const std::vector<std::string>& learner_names() {
    static const std::vector<std::string> names = {
        "decision-stump", "j48",  "random-forest", "random-tree", "reptree",
        "decision-table", "jrip", "oner",          "part",        "zeror"};
    return names;
}

struct LearnerSpec {
    std::string name;
    std::map<std::string, std::string> overrides;

    static LearnerSpec of(std::string name) { return {std::move(name), {}}; }
};

namespace detail {

inline double spec_double(const LearnerSpec& spec, const std::string& key, double fallback) {
    auto it = spec.overrides.find(key);
    if (it == spec.overrides.end()) return fallback;
    double v;
    if (!parse_double(it->second, v))
        throw Error(errc::args, "parameter " + key + " for " + spec.name +
                                    " must be numeric, got '" + it->second + "'");
    return v;
}

inline std::size_t spec_size(const LearnerSpec& spec, const std::string& key,
                             std::size_t fallback) {
    double v = spec_double(spec, key, static_cast<double>(fallback));
    if (v < 0.0 || v != std::floor(v))
        throw Error(errc::args, "parameter " + key + " for " + spec.name +
                                    " must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

inline bool spec_bool(const LearnerSpec& spec, const std::string& key, bool fallback) {
    auto it = spec.overrides.find(key);
    if (it == spec.overrides.end()) return fallback;
    if (it->second == "true" || it->second == "on" || it->second == "1") return true;
    if (it->second == "false" || it->second == "off" || it->second == "0") return false;
    throw Error(errc::args, "parameter " + key + " for " + spec.name + " must be a boolean");
}

inline void check_keys(const LearnerSpec& spec, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : spec.overrides) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw Error(errc::args, "learner " + spec.name + " has no parameter '" + key + "'");
    }
}

}  // namespace detail

// Train by name. Per-learner parameter overrides are type checked; seed
// feeds every stochastic learner.
inline std::unique_ptr<ModelBase> train_model(const Dataset& d, const LearnerSpec& spec,
                                              std::uint64_t seed) {
    std::uint64_t eff_seed = static_cast<std::uint64_t>(
        detail::spec_double(spec, "seed", static_cast<double>(seed)));
    if (spec.name == "zeror") {
        detail::check_keys(spec, {"seed"});
        return train_zeror(d);
    }
    if (spec.name == "oner") {
        detail::check_keys(spec, {"seed", "min-bucket"});
        return train_oner(d, detail::spec_double(spec, "min-bucket", 6.0));
    }
    if (spec.name == "decision-stump") {
        detail::check_keys(spec, {"seed"});
        return train_decision_stump(d);
    }
    if (spec.name == "j48") {
        detail::check_keys(spec, {"seed", "min-leaf", "cf", "pruning"});
        TreeParams p;
        p.min_leaf_weight = detail::spec_double(spec, "min-leaf", 2.0);
        p.confidence = detail::spec_double(spec, "cf", 0.25);
        p.pruning = detail::spec_bool(spec, "pruning", true) ? PruningMode::confidence
                                                             : PruningMode::none;
        p.seed = eff_seed;
        return train_j48(d, p);
    }
    if (spec.name == "reptree") {
        detail::check_keys(spec, {"seed", "min-leaf", "pruning"});
        TreeParams p;
        p.min_leaf_weight = detail::spec_double(spec, "min-leaf", 2.0);
        p.pruning = detail::spec_bool(spec, "pruning", true) ? PruningMode::reduced_error
                                                             : PruningMode::none;
        p.seed = eff_seed;
        return train_reptree(d, p);
    }
    if (spec.name == "random-tree") {
        detail::check_keys(spec, {"seed", "k", "min-leaf"});
        TreeParams p;
        p.random_k = detail::spec_size(spec, "k", 0);
        p.min_leaf_weight = detail::spec_double(spec, "min-leaf", 2.0);
        p.seed = eff_seed;
        return train_random_tree(d, p);
    }
    if (spec.name == "random-forest") {
        detail::check_keys(spec, {"seed", "k", "min-leaf", "trees", "bagging"});
        TreeParams p;
        p.random_k = detail::spec_size(spec, "k", 0);
        p.min_leaf_weight = detail::spec_double(spec, "min-leaf", 2.0);
        p.forest_size = detail::spec_size(spec, "trees", 10);
        p.bagging = detail::spec_bool(spec, "bagging", true);
        p.seed = eff_seed;
        return train_random_forest(d, p);
    }
    if (spec.name == "decision-table") {
        detail::check_keys(spec, {"seed"});
        return train_decision_table(d);
    }
    if (spec.name == "part") {
        detail::check_keys(spec, {"seed", "min-leaf", "cf", "pruning"});
        TreeParams p;
        p.min_leaf_weight = detail::spec_double(spec, "min-leaf", 2.0);
        p.confidence = detail::spec_double(spec, "cf", 0.25);
        p.pruning = detail::spec_bool(spec, "pruning", true) ? PruningMode::confidence
                                                             : PruningMode::none;
        p.seed = eff_seed;
        return train_part(d, p);
    }
    if (spec.name == "jrip") {
        detail::check_keys(spec, {"seed", "folds", "min-weight", "optimizations"});
        JripParams p;
        p.folds = detail::spec_size(spec, "folds", 3);
        p.min_weight = detail::spec_double(spec, "min-weight", 2.0);
        p.optimizations = detail::spec_size(spec, "optimizations", 2);
        p.seed = eff_seed;
        return train_jrip(d, p);
    }
    if (spec.name == "lmt")
        throw Error(errc::learner,
                    "unknown learner 'lmt': logistic model trees are not implemented here");
    std::string roster;
    for (const auto& n : learner_names()) roster += (roster.empty() ? "" : ", ") + n;
    throw Error(errc::learner, "unknown learner '" + spec.name + "' (available: " + roster + ")");
}

inline std::unique_ptr<ModelBase> model_from_json(const nlohmann::json& j) {
    int version = j.at("format_version").get<int>();
    if (version != model_format_version)
        throw Error(errc::parse,
                    "unsupported model format version " + std::to_string(version));
    std::string type = j.at("type").get<std::string>();
    if (type == "tree") return TreeModel::from_json(j);
    if (type == "forest") return ForestModel::from_json(j);
    if (type == "decision_list") return DecisionListModel::from_json(j);
    if (type == "decision_table") return DecisionTableModel::from_json(j);
    throw Error(errc::parse, "unknown model type '" + type + "'");
}

inline void save_model(const ModelBase& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot write " + path);
    out << model.to_json().dump(2) << "\n";
}

inline std::unique_ptr<ModelBase> load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::parse, path + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace qosrank
