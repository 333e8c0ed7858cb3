#pragma once

#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "qosrank/split_criteria.hpp"
#include "qosrank/tree_model.hpp"

namespace qosrank {

enum class SplitCriterion { information_gain, gain_ratio, gini };
enum class PruningMode { none, reduced_error, confidence };

struct TreeParams {
    SplitCriterion criterion = SplitCriterion::information_gain;
    double min_leaf_weight = 2.0;
    PruningMode pruning = PruningMode::none;
    double confidence = 0.25;    // CF for pessimistic pruning, (0, 0.5]
    std::size_t random_k = 0;    // RandomTree subset size; 0 = floor(log2(#attrs)) + 1
    std::size_t forest_size = 10;
    std::uint64_t seed = 1;
    // The skeleton splits on zero-gain candidates so contradiction-free
    // data is always driven to purity; J48 and the stump gate on strictly
    // positive gain instead.
    bool require_positive_gain = false;
    bool bagging = true;  // diagnostic switch for forests

    void validate() const {
        if (confidence <= 0.0 || confidence > 0.5)
            throw Error(errc::args, "confidence factor must be in (0, 0.5]");
        if (forest_size < 1) throw Error(errc::args, "forest size must be at least 1");
        if (min_leaf_weight < 0.0) throw Error(errc::args, "min leaf weight must be >= 0");
    }

    nlohmann::json to_json() const {
        const char* crit = criterion == SplitCriterion::information_gain ? "information_gain"
                           : criterion == SplitCriterion::gain_ratio    ? "gain_ratio"
                                                                         : "gini";
        const char* prune = pruning == PruningMode::none           ? "none"
                            : pruning == PruningMode::reduced_error ? "reduced_error"
                                                                     : "confidence";
        return {{"criterion", crit},          {"min_leaf_weight", min_leaf_weight},
                {"pruning", prune},           {"confidence", confidence},
                {"random_k", random_k},       {"forest_size", forest_size},
                {"bagging", bagging}};
    }
};

namespace detail {

inline constexpr double gain_tolerance = 1e-10;

struct ScoredSplit {
    SplitCandidate candidate;
    double gain = 0.0;   // criterion-native improvement (info gain or gini drop)
    double score = 0.0;  // selection key
};

// At least two children must each carry min_leaf weight; the remaining
// children may be small or empty (empty branches become majority leaves).
inline bool structurally_valid(const SplitCandidate& cand, double min_leaf) {
    double floor = std::max(min_leaf, 1e-9);
    std::size_t ok = 0;
    for (const auto& c : cand.children)
        if (c.total() >= floor && ++ok >= 2) return true;
    return false;
}

struct SelectionConfig {
    SplitCriterion criterion = SplitCriterion::information_gain;
    double min_leaf_weight = 2.0;
    bool require_positive_gain = false;
    bool j48_selection = false;
};

// Candidates are scanned in (attribute index, threshold) order and a
// challenger must beat the incumbent by more than the tolerance, which
// realizes the lowest-index / lowest-threshold tie break.
inline std::optional<ScoredSplit> best_split(const Dataset& d, const Refs& refs,
                                             const ClassDistribution& parent,
                                             const std::vector<std::size_t>& attrs,
                                             const SelectionConfig& cfg) {
    std::vector<ScoredSplit> per_attribute;
    for (std::size_t attr : attrs) {
        std::vector<SplitCandidate> cands;
        if (d.attribute(attr).kind == AttrKind::numeric) {
            cands = numeric_split_candidates(d, refs, attr);
        } else if (cfg.criterion != SplitCriterion::gini) {
            // Gini is defined for binary splits only; nominal multiway
            // tests are not scored under it.
            if (auto c = nominal_split_candidate(d, refs, attr)) cands.push_back(std::move(*c));
        }
        std::optional<ScoredSplit> best_for_attr;
        for (auto& cand : cands) {
            if (!structurally_valid(cand, cfg.min_leaf_weight)) continue;
            double gain = cfg.criterion == SplitCriterion::gini
                              ? gini_reduction(parent, cand)
                              : information_gain(parent, cand);
            if (cfg.require_positive_gain && gain <= 1e-12) continue;
            double score = gain;
            if (!cfg.j48_selection && cfg.criterion == SplitCriterion::gain_ratio) {
                auto ratio = gain_ratio(parent, cand);
                if (!ratio) continue;
                score = *ratio;
            }
            // J48 picks each attribute's candidate by plain gain; the
            // ratio enters when comparing attributes below.
            if (!best_for_attr || score > best_for_attr->score + gain_tolerance)
                best_for_attr = ScoredSplit{std::move(cand), gain, score};
        }
        if (best_for_attr) per_attribute.push_back(std::move(*best_for_attr));
    }
    if (per_attribute.empty()) return std::nullopt;

    if (cfg.j48_selection) {
        // Attributes must reach the mean gain of the positive-gain
        // candidates; the winner has the best gain ratio among them.
        double mean = 0.0;
        std::size_t positives = 0;
        for (const auto& s : per_attribute)
            if (s.gain > 1e-12) {
                mean += s.gain;
                ++positives;
            }
        if (positives == 0) return std::nullopt;
        mean /= static_cast<double>(positives);
        std::optional<ScoredSplit> winner;
        for (auto& s : per_attribute) {
            if (s.gain <= 1e-12 || s.gain < mean - gain_tolerance) continue;
            auto ratio = gain_ratio(parent, s.candidate);
            if (!ratio) continue;
            s.score = *ratio;
            if (!winner || s.score > winner->score + gain_tolerance) winner = std::move(s);
        }
        return winner;
    }

    std::optional<ScoredSplit> winner;
    for (auto& s : per_attribute)
        if (!winner || s.score > winner->score + gain_tolerance) winner = std::move(s);
    return winner;
}

// Missing values descend every child carrying a share of the instance
// weight proportional to the known-value child weights.
inline std::vector<Refs> partition_refs(const Dataset& d, const Refs& refs,
                                        const SplitCandidate& cand) {
    std::size_t v = cand.children.size();
    std::vector<Refs> parts(v);
    std::vector<double> known(v, 0.0);
    Refs missing;
    for (const auto& r : refs) {
        double val = d.instance(r.index).values[cand.attribute];
        if (is_missing(val)) {
            missing.push_back(r);
            continue;
        }
        std::size_t child =
            cand.numeric ? (val <= cand.threshold ? 0u : 1u) : static_cast<std::size_t>(val);
        parts[child].push_back(r);
        known[child] += r.weight;
    }
    double known_total = 0.0;
    for (double w : known) known_total += w;
    if (!missing.empty() && known_total > 0.0) {
        for (std::size_t j = 0; j < v; ++j) {
            if (known[j] <= 0.0) continue;
            double frac = known[j] / known_total;
            for (const auto& r : missing) parts[j].push_back({r.index, r.weight * frac});
        }
    }
    return parts;
}

struct GrowContext {
    const Dataset& d;
    SelectionConfig selection;
    std::size_t random_k = 0;  // 0 = consider every attribute
    SplitRng* rng = nullptr;   // consumed per node when random_k > 0
};

inline std::vector<std::size_t> node_attributes(const GrowContext& ctx,
                                                const std::vector<bool>& used_nominal) {
    std::vector<std::size_t> attrs;
    auto allowed = [&](std::size_t a) {
        if (ctx.d.has_class() && a == ctx.d.class_index()) return false;
        if (ctx.d.attribute(a).kind == AttrKind::nominal && used_nominal[a]) return false;
        return true;
    };
    if (ctx.random_k > 0) {
        std::size_t n = ctx.d.num_attributes() - (ctx.d.has_class() ? 1 : 0);
        std::size_t k = std::min(ctx.random_k, n);
        auto drawn = ctx.rng->sample_without_replacement(n, k);
        for (std::size_t pos : drawn) {
            // Positions count non-class attributes in schema order.
            std::size_t a = pos + (ctx.d.has_class() && pos >= ctx.d.class_index() ? 1 : 0);
            if (allowed(a)) attrs.push_back(a);
        }
    } else {
        for (std::size_t a = 0; a < ctx.d.num_attributes(); ++a)
            if (allowed(a)) attrs.push_back(a);
    }
    return attrs;
}

inline std::unique_ptr<TreeNode> make_leaf(const ClassDistribution& dist) {
    auto n = std::make_unique<TreeNode>();
    n->leaf = true;
    n->dist = dist;
    n->label = dist.argmax();
    return n;
}

inline std::unique_ptr<TreeNode> grow(const GrowContext& ctx, const Refs& refs,
                                      std::vector<bool> used_nominal,
                                      const ClassDistribution& fallback) {
    ClassDistribution dist = refs_distribution(ctx.d, refs);
    if (dist.empty()) return make_leaf(fallback);
    if (dist.pure()) return make_leaf(dist);

    auto attrs = node_attributes(ctx, used_nominal);
    if (attrs.empty()) return make_leaf(dist);

    auto split = best_split(ctx.d, refs, dist, attrs, ctx.selection);
    if (!split) return make_leaf(dist);

    const SplitCandidate& cand = split->candidate;
    if (!cand.numeric) used_nominal[cand.attribute] = true;

    auto parts = partition_refs(ctx.d, refs, cand);
    auto node = std::make_unique<TreeNode>();
    node->leaf = false;
    node->attribute = cand.attribute;
    node->numeric_test = cand.numeric;
    node->threshold = cand.threshold;
    node->dist = dist;
    node->label = dist.argmax();
    for (auto& part : parts) {
        double w = 0.0;
        for (const auto& r : part) w += r.weight;
        node->child_weights.push_back(w);
        if (part.empty() || w <= 1e-12)
            node->children.push_back(make_leaf(dist));  // empty branch: parent majority
        else
            node->children.push_back(grow(ctx, part, used_nominal, dist));
    }
    return node;
}

// --- pessimistic (confidence-bound) error pruning -------------------------

// Inverse standard normal CDF, Acklam's rational approximation (~1e-9).
inline double normal_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p <= 0.0 || p >= 1.0) throw Error(errc::args, "normal quantile needs p in (0,1)");
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Extra errors granted to n observed cases with e mistakes: the one-sided
// upper confidence bound at CF, continuity corrected, with the exact
// binomial tail for e < 1.
inline double added_errors(double n, double e, double cf) {
    if (n <= 0.0) return 0.0;
    if (e < 1.0) {
        double base = n * (1.0 - std::pow(cf, 1.0 / n));
        if (e <= 0.0) return base;
        return base + e * (added_errors(n, 1.0, cf) - base);
    }
    if (e + 0.5 >= n) return std::max(n - e, 0.0);
    double z = normal_quantile(1.0 - cf);
    double f = (e + 0.5) / n;
    double r = (f + z * z / (2.0 * n) +
                z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
               (1.0 + z * z / n);
    return r * n - e;
}

inline double pessimistic_errors(const ClassDistribution& dist, double cf) {
    double n = dist.total();
    if (n <= 0.0) return 0.0;
    double e = n - dist.count(dist.argmax());
    return e + added_errors(n, e, cf);
}

inline double subtree_pessimistic_errors(const TreeNode& node, double cf) {
    if (node.leaf) return pessimistic_errors(node.dist, cf);
    double sum = 0.0;
    for (const auto& c : node.children) sum += subtree_pessimistic_errors(*c, cf);
    return sum;
}

inline void collapse_to_leaf(TreeNode& node) {
    node.leaf = true;
    node.children.clear();
    node.child_weights.clear();
    node.label = node.dist.argmax();
}

// Subtree replacement, bottom up. The 0.1 slack is the usual C4.5
// convention for comparing estimates.
inline void pessimistic_prune(TreeNode& node, double cf) {
    if (node.leaf) return;
    for (auto& c : node.children) pessimistic_prune(*c, cf);
    double leaf_err = pessimistic_errors(node.dist, cf);
    double tree_err = subtree_pessimistic_errors(node, cf);
    if (leaf_err <= tree_err + 0.1) collapse_to_leaf(node);
}

// --- reduced-error pruning -------------------------------------------------

// Route refs by the node's own test, using the stored training child
// weights for missing values.
inline std::vector<Refs> partition_refs_for_node(const TreeNode& node, const Dataset& d,
                                                 const Refs& refs) {
    std::vector<Refs> parts(node.children.size());
    Refs missing;
    for (const auto& r : refs) {
        double val = d.instance(r.index).values[node.attribute];
        if (is_missing(val)) {
            missing.push_back(r);
            continue;
        }
        std::size_t child = node.numeric_test ? (val <= node.threshold ? 0u : 1u)
                                              : static_cast<std::size_t>(val);
        parts[child].push_back(r);
    }
    if (!missing.empty()) {
        double total = 0.0;
        for (double w : node.child_weights) total += w;
        if (total > 0.0)
            for (std::size_t j = 0; j < parts.size(); ++j) {
                if (node.child_weights[j] <= 0.0) continue;
                double frac = node.child_weights[j] / total;
                for (const auto& r : missing) parts[j].push_back({r.index, r.weight * frac});
            }
    }
    return parts;
}

// Prune-set weights routed through the grown tree, then any subtree whose
// held-out errors do not beat its own leaf replacement is collapsed.
// Returns this subtree's prune-set error after pruning.
inline double reduced_error_prune(TreeNode& node, const Dataset& d, const Refs& prune_refs) {
    ClassDistribution here = refs_distribution(d, prune_refs);
    double leaf_err = here.total() - here.count(node.label);
    if (node.leaf) return leaf_err;
    auto parts = partition_refs_for_node(node, d, prune_refs);
    double subtree_err = 0.0;
    for (std::size_t j = 0; j < node.children.size(); ++j)
        subtree_err += reduced_error_prune(*node.children[j], d, parts[j]);
    if (leaf_err <= subtree_err + 1e-9) {
        collapse_to_leaf(node);
        return leaf_err;
    }
    return subtree_err;
}

// Re-estimate every distribution from the full training data, keeping the
// pruned structure. Children that end up with no weight become leaves
// carrying the parent majority.
inline void backfit(TreeNode& node, const Dataset& d, const Refs& refs) {
    node.dist = refs_distribution(d, refs);
    node.label = node.dist.argmax();
    if (node.leaf) return;
    auto parts = partition_refs_for_node(node, d, refs);
    for (std::size_t j = 0; j < node.children.size(); ++j) {
        double w = 0.0;
        for (const auto& r : parts[j]) w += r.weight;
        node.child_weights[j] = w;
        if (w <= 1e-12) {
            node.children[j] = make_leaf(node.dist);
        } else {
            backfit(*node.children[j], d, parts[j]);
        }
    }
}

inline void require_trainable(const Dataset& d) {
    if (!d.has_class()) throw Error(errc::schema, "training data has no class attribute");
    if (d.empty()) throw Error(errc::learner, "cannot train on an empty dataset");
    if (d.total_weight() <= 0.0) throw Error(errc::learner, "training data has zero weight");
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

inline std::size_t default_random_k(const Dataset& d) {
    std::size_t n = d.num_attributes() - (d.has_class() ? 1 : 0);
    return static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(n)))) + 1;
}

// The greedy top-down skeleton: recursive best-split expansion under the
// configured criterion, leaves on pure nodes, exhausted attributes, or
// empty partitions. Pruning runs afterwards when requested.
inline std::unique_ptr<TreeModel> induce(const Dataset& d, const TreeParams& params) {
    detail::require_trainable(d);
    params.validate();
    detail::Stopwatch timer;

    detail::GrowContext ctx{d,
                            {params.criterion, params.min_leaf_weight,
                             params.require_positive_gain, false},
                            0,
                            nullptr};
    std::vector<bool> used(d.num_attributes(), false);
    ModelInfo info;
    info.learner = "induce";
    info.params = params.to_json();
    info.seed = params.seed;

    std::unique_ptr<TreeNode> root;
    if (params.pruning == PruningMode::reduced_error) {
        Refs grow_refs, prune_refs;
        if (d.size() < 3) {
            grow_refs = all_refs(d);
            info.notes.push_back("pruning skipped: dataset too small for a prune split");
        } else {
            auto fa = stratified_folds(d, 3, params.seed);
            for (std::size_t i = 0; i < d.size(); ++i)
                (fa.fold_of[i] == 0 ? prune_refs : grow_refs).push_back({i, d.instance(i).weight});
        }
        root = detail::grow(ctx, grow_refs, used, refs_distribution(d, grow_refs));
        if (!prune_refs.empty()) {
            detail::reduced_error_prune(*root, d, prune_refs);
            detail::backfit(*root, d, all_refs(d));
        }
    } else {
        root = detail::grow(ctx, all_refs(d), used, class_distribution(d));
        if (params.pruning == PruningMode::confidence)
            detail::pessimistic_prune(*root, params.confidence);
    }

    info.build_time_s = timer.seconds();
    return std::make_unique<TreeModel>(TrainedSchema::of(d), std::move(info), std::move(root));
}

// One-level tree on the single best information-gain split; falls back to
// a majority leaf when no attribute helps.
inline std::unique_ptr<TreeModel> train_decision_stump(const Dataset& d) {
    detail::require_trainable(d);
    detail::Stopwatch timer;
    ClassDistribution dist = class_distribution(d);
    detail::SelectionConfig sel{SplitCriterion::information_gain, 0.0, true, false};
    std::vector<std::size_t> attrs;
    for (std::size_t a = 0; a < d.num_attributes(); ++a)
        if (a != d.class_index()) attrs.push_back(a);

    Refs refs = all_refs(d);
    auto split = detail::best_split(d, refs, dist, attrs, sel);
    std::unique_ptr<TreeNode> root;
    if (!split) {
        root = detail::make_leaf(dist);
    } else {
        root = std::make_unique<TreeNode>();
        root->leaf = false;
        root->attribute = split->candidate.attribute;
        root->numeric_test = split->candidate.numeric;
        root->threshold = split->candidate.threshold;
        root->dist = dist;
        root->label = dist.argmax();
        auto parts = detail::partition_refs(d, refs, split->candidate);
        for (auto& part : parts) {
            double w = 0.0;
            for (const auto& r : part) w += r.weight;
            root->child_weights.push_back(w);
            ClassDistribution child = refs_distribution(d, part);
            root->children.push_back(detail::make_leaf(child.empty() ? dist : child));
        }
    }
    ModelInfo info;
    info.learner = "decision-stump";
    info.seed = 0;
    info.build_time_s = timer.seconds();
    return std::make_unique<TreeModel>(TrainedSchema::of(d), std::move(info), std::move(root));
}

// C4.5-style tree: gain-ratio selection over attributes whose gain reaches
// the mean positive gain, binary numeric and multiway nominal tests, and
// pessimistic subtree replacement at the configured confidence.
inline std::unique_ptr<TreeModel> train_j48(
    const Dataset& d, TreeParams params = {.pruning = PruningMode::confidence}) {
    detail::require_trainable(d);
    params.criterion = SplitCriterion::gain_ratio;
    params.require_positive_gain = true;
    params.validate();
    detail::Stopwatch timer;

    detail::GrowContext ctx{d, {SplitCriterion::gain_ratio, params.min_leaf_weight, true, true},
                            0, nullptr};
    std::vector<bool> used(d.num_attributes(), false);
    auto root = detail::grow(ctx, all_refs(d), used, class_distribution(d));
    if (params.pruning != PruningMode::none)
        detail::pessimistic_prune(*root, params.confidence);

    ModelInfo info;
    info.learner = "j48";
    info.params = params.to_json();
    info.seed = params.seed;
    info.build_time_s = timer.seconds();
    return std::make_unique<TreeModel>(TrainedSchema::of(d), std::move(info), std::move(root));
}

// Information gain over all attributes, a stratified 2/3 grow : 1/3 prune
// split, bottom-up reduced-error pruning, then backfitting from the full
// training data.
inline std::unique_ptr<TreeModel> train_reptree(
    const Dataset& d, TreeParams params = {.pruning = PruningMode::reduced_error}) {
    detail::require_trainable(d);
    params.criterion = SplitCriterion::information_gain;
    params.validate();
    detail::Stopwatch timer;

    ModelInfo info;
    info.learner = "reptree";
    info.params = params.to_json();
    info.seed = params.seed;

    Refs grow_refs, prune_refs;
    if (d.size() < 3) {
        grow_refs = all_refs(d);
        info.notes.push_back("pruning skipped: dataset too small for a prune split");
    } else {
        auto fa = stratified_folds(d, 3, params.seed);
        for (std::size_t i = 0; i < d.size(); ++i)
            (fa.fold_of[i] == 0 ? prune_refs : grow_refs).push_back({i, d.instance(i).weight});
    }

    detail::GrowContext ctx{d,
                            {SplitCriterion::information_gain, params.min_leaf_weight,
                             params.require_positive_gain, false},
                            0,
                            nullptr};
    std::vector<bool> used(d.num_attributes(), false);
    auto root = detail::grow(ctx, grow_refs, used, refs_distribution(d, grow_refs));
    if (!prune_refs.empty() && params.pruning != PruningMode::none) {
        detail::reduced_error_prune(*root, d, prune_refs);
    }
    detail::backfit(*root, d, all_refs(d));

    info.build_time_s = timer.seconds();
    return std::make_unique<TreeModel>(TrainedSchema::of(d), std::move(info), std::move(root));
}

namespace detail {

inline std::unique_ptr<TreeNode> grow_random_tree(const Dataset& d, const Refs& refs,
                                                  std::size_t k, double min_leaf,
                                                  SplitRng& rng) {
    GrowContext ctx{d, {SplitCriterion::information_gain, min_leaf, false, false}, k, &rng};
    std::vector<bool> used(d.num_attributes(), false);
    return grow(ctx, refs, used, refs_distribution(d, refs));
}

}  // namespace detail

// K attributes drawn per node from the seeded stream; best information
// gain among them; no pruning.
inline std::unique_ptr<TreeModel> train_random_tree(const Dataset& d, TreeParams params = {}) {
    detail::require_trainable(d);
    params.validate();
    std::size_t k = params.random_k == 0 ? default_random_k(d) : params.random_k;
    std::size_t n_attrs = d.num_attributes() - 1;
    if (k < 1 || k > n_attrs)
        throw Error(errc::args, "random attribute count must be in [1, " +
                                    std::to_string(n_attrs) + "]");
    detail::Stopwatch timer;
    SplitRng rng(params.seed);
    auto root = detail::grow_random_tree(d, all_refs(d), k, params.min_leaf_weight, rng);

    ModelInfo info;
    info.learner = "random-tree";
    info.params = params.to_json();
    info.params["random_k"] = k;
    info.seed = params.seed;
    info.build_time_s = timer.seconds();
    return std::make_unique<TreeModel>(TrainedSchema::of(d), std::move(info), std::move(root));
}

// T bootstrap samples, one random tree per sample, per-tree seed = master
// seed + tree index; the forest answer is the mean member distribution.
inline std::unique_ptr<ForestModel> train_random_forest(const Dataset& d, TreeParams params = {}) {
    detail::require_trainable(d);
    params.validate();
    std::size_t k = params.random_k == 0 ? default_random_k(d) : params.random_k;
    std::size_t n_attrs = d.num_attributes() - 1;
    if (k < 1 || k > n_attrs)
        throw Error(errc::args, "random attribute count must be in [1, " +
                                    std::to_string(n_attrs) + "]");
    detail::Stopwatch timer;

    std::vector<std::unique_ptr<TreeModel>> members;
    for (std::size_t t = 0; t < params.forest_size; ++t) {
        SplitRng rng(params.seed + t);
        Refs refs;
        if (params.bagging) {
            std::vector<std::size_t> draws(d.size(), 0);
            for (std::size_t i = 0; i < d.size(); ++i) ++draws[rng.next_below(d.size())];
            for (std::size_t i = 0; i < d.size(); ++i)
                if (draws[i] > 0)
                    refs.push_back({i, d.instance(i).weight * static_cast<double>(draws[i])});
        } else {
            refs = all_refs(d);
        }
        auto root = detail::grow_random_tree(d, refs, k, params.min_leaf_weight, rng);
        ModelInfo member_info;
        member_info.learner = "random-tree";
        member_info.seed = params.seed + t;
        members.push_back(std::make_unique<TreeModel>(TrainedSchema::of(d),
                                                      std::move(member_info), std::move(root)));
    }

    ModelInfo info;
    info.learner = "random-forest";
    info.params = params.to_json();
    info.params["random_k"] = k;
    info.seed = params.seed;
    info.build_time_s = timer.seconds();
    return std::make_unique<ForestModel>(TrainedSchema::of(d), std::move(info),
                                         std::move(members));
}

}  // namespace qosrank
