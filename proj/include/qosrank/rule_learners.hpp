#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "qosrank/rule_model.hpp"
#include "qosrank/tree_learners.hpp"

namespace qosrank {

// Majority-class baseline. The default rule carries the training prior so
// its predicted distribution is the prior exactly.
inline std::unique_ptr<DecisionListModel> train_zeror(const Dataset& d) {
    detail::require_trainable(d);
    detail::Stopwatch timer;
    ClassDistribution prior = class_distribution(d);
    Rule def;
    def.consequent = prior.argmax();
    def.distribution = prior.counts();
    def.p = prior.count(def.consequent);
    def.n = prior.total() - def.p;
    ModelInfo info;
    info.learner = "zeror";
    info.build_time_s = timer.seconds();
    return std::make_unique<DecisionListModel>(TrainedSchema::of(d), std::move(info),
                                               std::vector<Rule>{std::move(def)});
}

namespace detail::oner {

// Bucket majority: ties inside the bucket go to the class with the larger
// overall weight, then the lower index.
inline std::size_t bucket_majority(const ClassDistribution& bucket,
                                   const ClassDistribution& overall) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < bucket.size(); ++i) {
        double diff = bucket.count(i) - bucket.count(best);
        if (diff > 1e-10) {
            best = i;
        } else if (diff > -1e-10 && overall.count(i) > overall.count(best) + 1e-10) {
            best = i;
        }
    }
    return best;
}

struct Interval {
    double first_value = 0.0;
    double last_value = 0.0;
    ClassDistribution dist;
};

// Greedy 1R intervals: accumulate value groups until one class reaches
// min_bucket, extend across groups pure in that class, close at the next
// distinct value, then merge adjacent intervals with equal majorities.
inline std::vector<Interval> numeric_intervals(const std::vector<detail::ValueGroup>& groups,
                                               double min_bucket,
                                               const ClassDistribution& overall) {
    std::vector<Interval> buckets;
    std::size_t i = 0;
    while (i < groups.size()) {
        Interval cur;
        cur.first_value = groups[i].value;
        cur.dist = ClassDistribution(overall.size());
        while (i < groups.size()) {
            cur.dist.add_scaled(groups[i].dist, 1.0);
            cur.last_value = groups[i].value;
            ++i;
            std::size_t major = bucket_majority(cur.dist, overall);
            if (cur.dist.count(major) >= min_bucket && i < groups.size()) {
                while (i < groups.size() && groups[i].dist.pure() &&
                       groups[i].dist.argmax() == major) {
                    cur.dist.add_scaled(groups[i].dist, 1.0);
                    cur.last_value = groups[i].value;
                    ++i;
                }
                break;
            }
        }
        buckets.push_back(std::move(cur));
    }
    // A trailing fragment that never reached min_bucket joins its neighbor.
    if (buckets.size() >= 2) {
        const Interval& last = buckets.back();
        std::size_t major = bucket_majority(last.dist, overall);
        if (last.dist.count(major) < min_bucket) {
            Interval& prev = buckets[buckets.size() - 2];
            prev.dist.add_scaled(last.dist, 1.0);
            prev.last_value = last.last_value;
            buckets.pop_back();
        }
    }
    std::vector<Interval> merged;
    for (auto& b : buckets) {
        if (!merged.empty() && bucket_majority(merged.back().dist, overall) ==
                                   bucket_majority(b.dist, overall)) {
            merged.back().dist.add_scaled(b.dist, 1.0);
            merged.back().last_value = b.last_value;
        } else {
            merged.push_back(std::move(b));
        }
    }
    return merged;
}

// Candidate decision list for one attribute.
inline std::vector<Rule> rules_for_attribute(const Dataset& d, std::size_t attr,
                                             double min_bucket,
                                             const ClassDistribution& overall) {
    std::vector<Rule> rules;
    if (d.attribute(attr).kind == AttrKind::nominal) {
        ClassDistribution empty(d.num_classes());
        std::vector<ClassDistribution> per_value(d.attribute(attr).labels.size(), empty);
        for (const auto& inst : d.instances()) {
            double v = inst.values[attr];
            if (is_missing(v)) continue;
            per_value[static_cast<std::size_t>(v)].add(d.class_of(inst), inst.weight);
        }
        for (std::size_t v = 0; v < per_value.size(); ++v) {
            if (per_value[v].empty()) continue;
            Rule r;
            r.antecedent.push_back({attr, ConditionOp::eq, static_cast<double>(v)});
            r.consequent = bucket_majority(per_value[v], overall);
            rules.push_back(std::move(r));
        }
        Rule def;
        def.consequent = overall.argmax();
        rules.push_back(std::move(def));
    } else {
        std::vector<detail::ValueGroup> groups;
        ClassDistribution missing;
        detail::group_numeric(d, all_refs(d), attr, groups, missing);
        auto intervals = numeric_intervals(groups, min_bucket, overall);
        for (std::size_t b = 0; b + 1 < intervals.size(); ++b) {
            Rule r;
            double t = (intervals[b].last_value + intervals[b + 1].first_value) / 2.0;
            r.antecedent.push_back({attr, ConditionOp::le, t});
            r.consequent = bucket_majority(intervals[b].dist, overall);
            rules.push_back(std::move(r));
        }
        Rule def;  // the last interval doubles as the default
        def.consequent = intervals.empty() ? overall.argmax()
                                           : bucket_majority(intervals.back().dist, overall);
        rules.push_back(std::move(def));
    }
    return rules;
}

inline double score_rules(const Dataset& d, const std::vector<Rule>& rules) {
    double correct = 0.0;
    for (const auto& inst : d.instances())
        for (const auto& r : rules) {
            if (!r.matches(inst)) continue;
            if (r.consequent == d.class_of(inst)) correct += inst.weight;
            break;
        }
    return correct;
}

}  // namespace detail::oner

// One rule per attribute, keep the one classifying the most training
// weight correctly; numeric attributes are cut into min_bucket intervals.
inline std::unique_ptr<DecisionListModel> train_oner(const Dataset& d, double min_bucket = 6.0) {
    detail::require_trainable(d);
    if (min_bucket <= 0.0) throw Error(errc::args, "min bucket must be positive");
    detail::Stopwatch timer;
    ClassDistribution overall = class_distribution(d);

    std::optional<std::vector<Rule>> best;
    std::size_t best_attr = 0;
    double best_score = -1.0;
    for (std::size_t attr = 0; attr < d.num_attributes(); ++attr) {
        if (attr == d.class_index()) continue;
        auto rules = detail::oner::rules_for_attribute(d, attr, min_bucket, overall);
        double score = detail::oner::score_rules(d, rules);
        if (score > best_score + 1e-10) {
            best = std::move(rules);
            best_attr = attr;
            best_score = score;
        }
    }
    if (!best) throw Error(errc::learner, "no attribute to build a rule on");
    recompute_rule_stats(*best, d);

    ModelInfo info;
    info.learner = "oner";
    info.params = {{"min_bucket", min_bucket}};
    info.params["attribute"] = d.attribute(best_attr).name;
    info.build_time_s = timer.seconds();
    return std::make_unique<DecisionListModel>(TrainedSchema::of(d), std::move(info),
                                               std::move(*best));
}

namespace detail::dtable {

using Key = DecisionTableModel::Key;

inline std::optional<Key> key_of(const Instance& inst, const std::vector<std::size_t>& subset) {
    Key key;
    key.reserve(subset.size());
    for (std::size_t a : subset) {
        double v = inst.values[a];
        if (is_missing(v)) return std::nullopt;
        key.push_back(v);
    }
    return key;
}

inline std::map<Key, ClassDistribution> build_table(const Dataset& d,
                                                    const std::vector<std::size_t>& subset) {
    std::map<Key, ClassDistribution> table;
    for (const auto& inst : d.instances()) {
        auto key = key_of(inst, subset);
        if (!key) continue;
        auto [it, inserted] = table.try_emplace(*key, d.num_classes());
        it->second.add(d.class_of(inst), inst.weight);
    }
    return table;
}

// argmax of dist with `weight` removed from class `cls`, same tie rule as
// ClassDistribution::argmax.
inline std::size_t argmax_minus(const ClassDistribution& dist, std::size_t cls, double weight) {
    std::size_t best = 0;
    double best_v = dist.count(0) - (cls == 0 ? weight : 0.0);
    for (std::size_t i = 1; i < dist.size(); ++i) {
        double v = dist.count(i) - (cls == i ? weight : 0.0);
        if (v > best_v + 1e-10) {
            best = i;
            best_v = v;
        }
    }
    return best;
}

// Leave-one-out accuracy of the majority table on the subset: the held-out
// instance's weight leaves its key's distribution (and the global one);
// empty keys fall back to the global majority.
inline double loo_fitness(const Dataset& d, const std::vector<std::size_t>& subset,
                          const ClassDistribution& global, double total_weight) {
    auto table = build_table(d, subset);
    double correct = 0.0;
    for (const auto& inst : d.instances()) {
        std::size_t cls = d.class_of(inst);
        std::size_t predicted;
        auto key = key_of(inst, subset);
        const ClassDistribution* cell = nullptr;
        if (key) {
            auto it = table.find(*key);
            if (it != table.end() && it->second.total() - inst.weight > 1e-12) cell = &it->second;
        }
        if (cell)
            predicted = argmax_minus(*cell, cls, inst.weight);
        else
            predicted = argmax_minus(global, cls, inst.weight);
        if (predicted == cls) correct += inst.weight;
    }
    return correct / total_weight;
}

}  // namespace detail::dtable

// Wrapper feature selection: forward best-first search over attribute
// subsets scored by leave-one-out accuracy, stopping after five
// consecutive non-improving expansions.
inline std::unique_ptr<DecisionTableModel> train_decision_table(const Dataset& d) {
    detail::require_trainable(d);
    detail::Stopwatch timer;
    ClassDistribution global = class_distribution(d);
    double total_weight = d.total_weight();

    using Subset = std::vector<std::size_t>;
    auto fitness = [&](const Subset& s) {
        return detail::dtable::loo_fitness(d, s, global, total_weight);
    };
    // Ordering key for both the frontier and the final tie rule: higher
    // fitness, then smaller subset, then lexicographically first.
    auto better = [](double fa, const Subset& a, double fb, const Subset& b) {
        if (fa > fb + 1e-12) return true;
        if (fb > fa + 1e-12) return false;
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    };

    Subset best_subset;
    double best_fitness = fitness(best_subset);

    struct Open {
        double fitness;
        Subset subset;
    };
    std::vector<Open> open{{best_fitness, best_subset}};
    std::set<Subset> seen{best_subset};
    std::size_t non_improving = 0;

    while (!open.empty() && non_improving < 5) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < open.size(); ++i)
            if (better(open[i].fitness, open[i].subset, open[pick].fitness, open[pick].subset))
                pick = i;
        Open cur = std::move(open[pick]);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));

        bool improved = false;
        for (std::size_t a = 0; a < d.num_attributes(); ++a) {
            if (a == d.class_index()) continue;
            if (std::find(cur.subset.begin(), cur.subset.end(), a) != cur.subset.end()) continue;
            Subset child = cur.subset;
            child.push_back(a);
            std::sort(child.begin(), child.end());
            if (!seen.insert(child).second) continue;
            double f = fitness(child);
            if (f > best_fitness + 1e-12) {
                best_fitness = f;
                best_subset = child;
                improved = true;
            } else if (better(f, child, best_fitness, best_subset)) {
                best_subset = child;  // tie: prefer smaller, then lexicographic
            }
            open.push_back({f, std::move(child)});
        }
        non_improving = improved ? 0 : non_improving + 1;
    }

    auto table = detail::dtable::build_table(d, best_subset);
    ModelInfo info;
    info.learner = "decision-table";
    nlohmann::json names = nlohmann::json::array();
    for (std::size_t a : best_subset) names.push_back(d.attribute(a).name);
    info.params = {{"subset", names}, {"loo_accuracy", best_fitness}};
    info.build_time_s = timer.seconds();
    return std::make_unique<DecisionTableModel>(TrainedSchema::of(d), std::move(info),
                                                std::move(best_subset), std::move(table),
                                                std::move(global));
}

namespace detail::part {

// Partial C4.5 tree. Children are expanded in ascending-entropy order (the
// most promising branch first) and expansion stops as soon as one child
// stays an internal node; children never expanded take no part in rule
// extraction. A node whose children all collapsed to leaves may itself be
// replaced by a leaf under the pessimistic error bound, as in J48.
struct PartialNode {
    bool leaf = true;
    std::size_t attribute = 0;
    bool numeric_test = false;
    double threshold = 0.0;
    std::vector<std::unique_ptr<PartialNode>> children;
    std::vector<bool> expanded;
    ClassDistribution dist;
    std::size_t label = 0;
};

inline std::unique_ptr<PartialNode> partial_leaf(const ClassDistribution& dist) {
    auto n = std::make_unique<PartialNode>();
    n->dist = dist;
    n->label = dist.argmax();
    return n;
}

inline double partial_subtree_errors(const PartialNode& node, double cf) {
    if (node.leaf) return pessimistic_errors(node.dist, cf);
    double sum = 0.0;
    for (const auto& c : node.children) sum += partial_subtree_errors(*c, cf);
    return sum;
}

inline std::unique_ptr<PartialNode> build_partial(const Dataset& d, const Refs& refs,
                                                  std::vector<bool> used_nominal,
                                                  double min_leaf, double cf,
                                                  const ClassDistribution& fallback) {
    ClassDistribution dist = refs_distribution(d, refs);
    if (dist.empty()) return partial_leaf(fallback);
    if (dist.pure()) return partial_leaf(dist);

    SelectionConfig sel{SplitCriterion::gain_ratio, min_leaf, true, true};
    std::vector<std::size_t> attrs;
    for (std::size_t a = 0; a < d.num_attributes(); ++a) {
        if (a == d.class_index()) continue;
        if (d.attribute(a).kind == AttrKind::nominal && used_nominal[a]) continue;
        attrs.push_back(a);
    }
    auto split = best_split(d, refs, dist, attrs, sel);
    if (!split) return partial_leaf(dist);
    const SplitCandidate& cand = split->candidate;
    if (!cand.numeric) used_nominal[cand.attribute] = true;

    auto parts = partition_refs(d, refs, cand);
    std::vector<ClassDistribution> child_dists;
    for (const auto& part : parts) child_dists.push_back(refs_distribution(d, part));

    auto node = std::make_unique<PartialNode>();
    node->leaf = false;
    node->attribute = cand.attribute;
    node->numeric_test = cand.numeric;
    node->threshold = cand.threshold;
    node->dist = dist;
    node->label = dist.argmax();
    node->expanded.assign(parts.size(), false);
    for (std::size_t j = 0; j < parts.size(); ++j)
        node->children.push_back(
            partial_leaf(child_dists[j].empty() ? dist : child_dists[j]));

    std::vector<std::size_t> order(parts.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double ha = child_dists[a].empty() ? 0.0 : entropy(child_dists[a]);
        double hb = child_dists[b].empty() ? 0.0 : entropy(child_dists[b]);
        return ha < hb - 1e-12;
    });
    bool all_leaves = true;
    for (std::size_t j : order) {
        node->children[j] = build_partial(d, parts[j], used_nominal, min_leaf, cf,
                                          child_dists[j].empty() ? dist : child_dists[j]);
        node->expanded[j] = true;
        if (!node->children[j]->leaf) {
            all_leaves = false;
            break;  // one unfinished branch ends the expansion
        }
    }
    if (all_leaves) {
        double leaf_err = pessimistic_errors(node->dist, cf);
        double tree_err = partial_subtree_errors(*node, cf);
        if (leaf_err <= tree_err + 0.1) return partial_leaf(node->dist);
    }
    return node;
}

struct PathLeaf {
    std::vector<Condition> conditions;
    double coverage = 0.0;
    std::size_t label = 0;
};

// Only leaves reached through expanded branches are extraction candidates.
inline void collect_leaves(const PartialNode& node, std::vector<Condition>& path,
                           std::vector<PathLeaf>& out) {
    if (node.leaf) {
        out.push_back({path, node.dist.total(), node.label});
        return;
    }
    for (std::size_t j = 0; j < node.children.size(); ++j) {
        if (!node.expanded[j]) continue;
        Condition c;
        c.attribute = node.attribute;
        if (node.numeric_test) {
            c.op = j == 0 ? ConditionOp::le : ConditionOp::gt;
            c.value = node.threshold;
        } else {
            c.op = ConditionOp::eq;
            c.value = static_cast<double>(j);
        }
        path.push_back(c);
        collect_leaves(*node.children[j], path, out);
        path.pop_back();
    }
}

}  // namespace detail::part

// Repeated partial trees: each iteration grows a partial C4.5 tree on the
// remaining data, turns its best-covering leaf into a rule, and removes
// the covered instances.
inline std::unique_ptr<DecisionListModel> train_part(
    const Dataset& d, TreeParams params = {.pruning = PruningMode::confidence}) {
    detail::require_trainable(d);
    params.validate();
    detail::Stopwatch timer;
    double cf = params.pruning == PruningMode::none ? 0.0 : params.confidence;

    Refs remaining = all_refs(d);
    ClassDistribution global = class_distribution(d);
    std::vector<Rule> rules;
    bool have_default = false;

    while (!remaining.empty()) {
        std::vector<bool> used(d.num_attributes(), false);
        auto root = detail::part::build_partial(d, remaining, used, params.min_leaf_weight,
                                                cf <= 0.0 ? 1e-9 : cf,
                                                refs_distribution(d, remaining));
        if (root->leaf) {
            Rule def;
            def.consequent = root->label;
            rules.push_back(std::move(def));
            have_default = true;
            break;
        }
        std::vector<detail::part::PathLeaf> leaves;
        std::vector<Condition> path;
        detail::part::collect_leaves(*root, path, leaves);
        std::size_t pick = 0;
        for (std::size_t i = 1; i < leaves.size(); ++i)
            if (leaves[i].coverage > leaves[pick].coverage + 1e-10) pick = i;

        Rule rule;
        rule.antecedent = leaves[pick].conditions;
        rule.consequent = leaves[pick].label;

        Refs still;
        for (const auto& r : remaining)
            if (!rule.matches(d.instance(r.index))) still.push_back(r);
        if (still.size() == remaining.size()) break;  // nothing removed; stop
        rules.push_back(std::move(rule));
        remaining = std::move(still);
    }
    if (!have_default) {
        Rule def;
        def.consequent = remaining.empty() ? global.argmax()
                                           : refs_distribution(d, remaining).argmax();
        rules.push_back(std::move(def));
    }
    recompute_rule_stats(rules, d);

    ModelInfo info;
    info.learner = "part";
    info.params = params.to_json();
    info.seed = params.seed;
    info.build_time_s = timer.seconds();
    return std::make_unique<DecisionListModel>(TrainedSchema::of(d), std::move(info),
                                               std::move(rules));
}

// --- RIPPER ---------------------------------------------------------------

struct JripParams {
    std::size_t folds = 3;  // grow on folds-1 parts, prune on 1
    double min_weight = 2.0;
    std::size_t optimizations = 2;
    std::uint64_t seed = 1;

    void validate() const {
        if (folds < 2) throw Error(errc::args, "grow/prune folds must be at least 2");
        if (min_weight < 1.0) throw Error(errc::args, "min rule weight must be at least 1");
    }

    nlohmann::json to_json() const {
        return {{"folds", folds},
                {"min_weight", min_weight},
                {"optimizations", optimizations}};
    }
};

namespace detail::jrip {

struct Ctx {
    const Dataset& d;
    std::size_t folds;
    double min_weight;
};

inline void pos_neg(const Ctx& ctx, const Refs& refs, std::size_t cls, double& p, double& n) {
    p = n = 0.0;
    for (const auto& r : refs)
        (ctx.d.class_of(ctx.d.instance(r.index)) == cls ? p : n) += r.weight;
}

inline Refs covered_by(const Ctx& ctx, const Refs& refs, const Rule& rule) {
    Refs out;
    for (const auto& r : refs)
        if (rule.matches(ctx.d.instance(r.index))) out.push_back(r);
    return out;
}

inline Refs not_covered_by_any(const Ctx& ctx, const Refs& refs, const std::vector<Rule>& rules,
                               std::size_t skip = static_cast<std::size_t>(-1)) {
    Refs out;
    for (const auto& r : refs) {
        bool cov = false;
        for (std::size_t i = 0; i < rules.size() && !cov; ++i)
            if (i != skip && rules[i].matches(ctx.d.instance(r.index))) cov = true;
        if (!cov) out.push_back(r);
    }
    return out;
}

// Seeded stratified deal: every class distributes its refs over the folds,
// the last fold becomes the prune set.
inline void split_grow_prune(const Ctx& ctx, const Refs& refs, SplitRng& rng, Refs& grow,
                             Refs& prune) {
    grow.clear();
    prune.clear();
    std::vector<std::size_t> order(refs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::size_t> dealt(ctx.d.num_classes(), 0);
    for (std::size_t idx : order) {
        const auto& r = refs[idx];
        std::size_t cls = ctx.d.class_of(ctx.d.instance(r.index));
        std::size_t f = dealt[cls]++ % ctx.folds;
        (f == ctx.folds - 1 ? prune : grow).push_back(r);
    }
}

struct GrowOutcome {
    Rule rule;
    const char* stop_reason = "";
};

// Greedy FOIL growth: repeatedly add the single condition with the best
// information gain p' * (log2(p'/(p'+n')) - log2(p/(p+n))) until the rule
// covers no negatives or nothing helps. Each step records log2(candidate
// count) as the condition's theory cost.
inline GrowOutcome grow_rule(const Ctx& ctx, const Refs& grow_refs, std::size_t cls,
                             Rule seed = {}) {
    GrowOutcome out;
    out.rule = std::move(seed);
    out.rule.consequent = cls;
    Refs cov = out.rule.antecedent.empty() ? grow_refs : covered_by(ctx, grow_refs, out.rule);

    while (true) {
        double p, n;
        pos_neg(ctx, cov, cls, p, n);
        if (p <= 1e-12) {
            out.stop_reason = "no positive coverage";
            break;
        }
        if (n <= 1e-12) {
            out.stop_reason = "covers no negatives";
            break;
        }
        double base = std::log2(p / (p + n));

        struct Best {
            Condition cond;
            double gain = 0.0;
            bool found = false;
        } best;
        std::size_t candidate_count = 0;
        auto consider = [&](const Condition& c, double cp, double cn) {
            ++candidate_count;
            if (cp <= 1e-12) return;
            if (cp + cn < ctx.min_weight) return;
            double gain = cp * (std::log2(cp / (cp + cn)) - base);
            if (!best.found || gain > best.gain + 1e-12) {
                best = {c, gain, true};
            }
        };

        for (std::size_t attr = 0; attr < ctx.d.num_attributes(); ++attr) {
            if (attr == ctx.d.class_index()) continue;
            const Attribute& a = ctx.d.attribute(attr);
            if (a.kind == AttrKind::nominal) {
                bool tested = false;
                for (const auto& c : out.rule.antecedent)
                    if (c.attribute == attr && c.op == ConditionOp::eq) tested = true;
                if (tested) continue;
                std::vector<double> pv(a.labels.size(), 0.0), nv(a.labels.size(), 0.0);
                for (const auto& r : cov) {
                    double v = ctx.d.instance(r.index).values[attr];
                    if (is_missing(v)) continue;
                    auto& side =
                        ctx.d.class_of(ctx.d.instance(r.index)) == cls ? pv : nv;
                    side[static_cast<std::size_t>(v)] += r.weight;
                }
                for (std::size_t v = 0; v < a.labels.size(); ++v)
                    consider({attr, ConditionOp::eq, static_cast<double>(v)}, pv[v], nv[v]);
            } else {
                // distinct sorted values with pos/neg weights
                std::vector<std::pair<double, std::pair<double, double>>> groups;
                {
                    std::vector<std::pair<double, std::pair<double, double>>> vals;
                    for (const auto& r : cov) {
                        double v = ctx.d.instance(r.index).values[attr];
                        if (is_missing(v)) continue;
                        bool pos = ctx.d.class_of(ctx.d.instance(r.index)) == cls;
                        vals.push_back({v, {pos ? r.weight : 0.0, pos ? 0.0 : r.weight}});
                    }
                    std::sort(vals.begin(), vals.end(),
                              [](const auto& x, const auto& y) { return x.first < y.first; });
                    for (const auto& [v, pn] : vals) {
                        if (groups.empty() || groups.back().first != v)
                            groups.push_back({v, {0.0, 0.0}});
                        groups.back().second.first += pn.first;
                        groups.back().second.second += pn.second;
                    }
                }
                if (groups.size() < 2) continue;
                double tp = 0.0, tn = 0.0;
                for (const auto& g : groups) {
                    tp += g.second.first;
                    tn += g.second.second;
                }
                double cum_p = 0.0, cum_n = 0.0;
                for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
                    cum_p += groups[i].second.first;
                    cum_n += groups[i].second.second;
                    bool left_pure_pos = groups[i].second.second <= 1e-12;
                    bool left_pure_neg = groups[i].second.first <= 1e-12;
                    bool right_pure_pos = groups[i + 1].second.second <= 1e-12;
                    bool right_pure_neg = groups[i + 1].second.first <= 1e-12;
                    if ((left_pure_pos && right_pure_pos) || (left_pure_neg && right_pure_neg))
                        continue;  // no class boundary here
                    double t = (groups[i].first + groups[i + 1].first) / 2.0;
                    consider({attr, ConditionOp::le, t}, cum_p, cum_n);
                    consider({attr, ConditionOp::ge, t}, tp - cum_p, tn - cum_n);
                }
            }
        }

        if (!best.found || best.gain <= 1e-12) {
            out.stop_reason = "no condition improves the gain";
            break;
        }
        out.rule.antecedent.push_back(best.cond);
        out.rule.condition_bits.push_back(
            std::log2(std::max<double>(static_cast<double>(candidate_count), 2.0)));
        Refs next;
        for (const auto& r : cov)
            if (best.cond.matches(ctx.d.instance(r.index))) next.push_back(r);
        cov = std::move(next);
    }
    return out;
}

// Worth of a rule on the prune set.
inline double prune_metric(double p, double n) {
    if (p + n <= 1e-12) return -1.0;
    return (p - n) / (p + n);
}

// Delete trailing conditions to maximize (p - n) / (p + n) on the prune
// set; ties keep the shorter rule.
inline void prune_rule(const Ctx& ctx, Rule& rule, const Refs& prune_refs, std::size_t cls) {
    if (prune_refs.empty() || rule.antecedent.empty()) return;
    Refs cov = prune_refs;
    double p, n;
    pos_neg(ctx, cov, cls, p, n);
    double best_v = prune_metric(p, n);
    std::size_t best_len = 0;
    for (std::size_t len = 1; len <= rule.antecedent.size(); ++len) {
        Refs next;
        for (const auto& r : cov)
            if (rule.antecedent[len - 1].matches(ctx.d.instance(r.index))) next.push_back(r);
        cov = std::move(next);
        pos_neg(ctx, cov, cls, p, n);
        double v = prune_metric(p, n);
        if (v > best_v + 1e-12) {
            best_v = v;
            best_len = len;
        }
    }
    rule.antecedent.resize(best_len);
    if (rule.condition_bits.size() > best_len) rule.condition_bits.resize(best_len);
}

inline double subset_dl(double t, double k, double p) {
    if (t <= 0.0 || k < 0.0) return 0.0;
    p = std::clamp(p, 1e-10, 1.0 - 1e-10);
    double bits = 0.0;
    if (k > 0.0) bits -= k * std::log2(p);
    if (t - k > 0.0) bits -= (t - k) * std::log2(1.0 - p);
    return bits;
}

// Quinlan-style exception coding: identify the false positives among the
// covered weight and the false negatives among the uncovered weight, with
// half the errors expected on the larger side.
inline double data_dl(double cover, double uncover, double fp, double fn) {
    double bits = std::log2(cover + uncover + 1.0);
    double exp_err = 0.5 * (fp + fn);
    if (cover >= uncover) {
        bits += subset_dl(cover, fp, cover > 0.0 ? exp_err / cover : 0.0);
        bits += uncover > 0.0 ? subset_dl(uncover, fn, fn / uncover) : 0.0;
    } else {
        bits += cover > 0.0 ? subset_dl(cover, fp, fp / cover) : 0.0;
        bits += subset_dl(uncover, fn, uncover > 0.0 ? exp_err / uncover : 0.0);
    }
    return bits;
}

inline double theory_dl(const Rule& rule) {
    double bits = 0.0;
    for (double b : rule.condition_bits) bits += b;
    return bits;
}

inline double ruleset_dl(const Ctx& ctx, const std::vector<Rule>& rules, const Refs& pool,
                         std::size_t cls) {
    double cover = 0.0, uncover = 0.0, fp = 0.0, fn = 0.0;
    for (const auto& r : pool) {
        const Instance& inst = ctx.d.instance(r.index);
        bool cov = false;
        for (const auto& rule : rules)
            if (rule.matches(inst)) {
                cov = true;
                break;
            }
        bool pos = ctx.d.class_of(inst) == cls;
        if (cov) {
            cover += r.weight;
            if (!pos) fp += r.weight;
        } else {
            uncover += r.weight;
            if (pos) fn += r.weight;
        }
    }
    double bits = data_dl(cover, uncover, fp, fn);
    for (const auto& rule : rules) bits += theory_dl(rule);
    return bits;
}

// IREP* loop: grow and prune rules for class cls until no positives
// remain, the prune error passes 50%, or the description length rises 64
// bits past the best seen.
inline void build_rules(const Ctx& ctx, const Refs& pool, std::size_t cls, SplitRng& rng,
                        std::vector<Rule>& rules) {
    Refs remaining = not_covered_by_any(ctx, pool, rules);
    double min_dl = ruleset_dl(ctx, rules, pool, cls);
    while (true) {
        double pos, neg;
        pos_neg(ctx, remaining, cls, pos, neg);
        if (pos <= 1e-12) break;

        Refs grow, prune;
        if (remaining.size() >= ctx.folds)
            split_grow_prune(ctx, remaining, rng, grow, prune);
        else
            grow = remaining;

        auto grown = grow_rule(ctx, grow, cls);
        {
            double gp, gn;
            pos_neg(ctx, covered_by(ctx, grow, grown.rule), cls, gp, gn);
            if (gp <= 1e-12) break;
        }
        prune_rule(ctx, grown.rule, prune, cls);
        {
            double pp, pn;
            pos_neg(ctx, covered_by(ctx, prune, grown.rule), cls, pp, pn);
            if (pp + pn > 1e-12 && pn / (pp + pn) > 0.5) break;
        }
        rules.push_back(grown.rule);
        double dl = ruleset_dl(ctx, rules, pool, cls);
        if (dl > min_dl + 64.0) {
            rules.pop_back();
            break;
        }
        min_dl = std::min(min_dl, dl);

        Refs still;
        for (const auto& r : remaining)
            if (!grown.rule.matches(ctx.d.instance(r.index))) still.push_back(r);
        if (still.size() == remaining.size()) {
            rules.pop_back();
            break;
        }
        remaining = std::move(still);
    }
}

// Prefix of `candidate` minimizing the whole ruleset's coverage error
// (covered negatives + uncovered positives) on the prune set when standing
// in at position `at`.
inline void prune_for_ruleset(const Ctx& ctx, Rule& candidate, std::vector<Rule> rules,
                              std::size_t at, const Refs& prune_refs, std::size_t cls) {
    if (prune_refs.empty()) return;
    auto error_with_len = [&](std::size_t len) {
        Rule r = candidate;
        r.antecedent.resize(len);
        rules[at] = r;
        double err = 0.0;
        for (const auto& ref : prune_refs) {
            const Instance& inst = ctx.d.instance(ref.index);
            bool cov = false;
            for (const auto& rule : rules)
                if (rule.matches(inst)) {
                    cov = true;
                    break;
                }
            bool pos = ctx.d.class_of(inst) == cls;
            if (cov != pos) err += ref.weight;
        }
        return err;
    };
    std::size_t best_len = 0;
    double best_err = error_with_len(0);
    for (std::size_t len = 1; len <= candidate.antecedent.size(); ++len) {
        double err = error_with_len(len);
        if (err < best_err - 1e-12) {
            best_err = err;
            best_len = len;
        }
    }
    candidate.antecedent.resize(best_len);
    if (candidate.condition_bits.size() > best_len) candidate.condition_bits.resize(best_len);
}

// One optimization pass: every rule competes against a grown-from-scratch
// replacement and a grown-extension revision; the variant minimizing the
// ruleset description length stays. Residual positives get mop-up rules.
inline void optimize(const Ctx& ctx, const Refs& pool, std::size_t cls, SplitRng& rng,
                     std::vector<Rule>& rules) {
    for (std::size_t i = 0; i < rules.size(); ++i) {
        Refs grow, prune;
        if (pool.size() >= ctx.folds)
            split_grow_prune(ctx, pool, rng, grow, prune);
        else
            grow = pool;
        Refs grow_mine = not_covered_by_any(ctx, grow, rules, i);

        Rule replacement = grow_rule(ctx, grow_mine, cls).rule;
        prune_for_ruleset(ctx, replacement, rules, i, prune, cls);

        Rule revision = grow_rule(ctx, grow_mine, cls, rules[i]).rule;
        prune_for_ruleset(ctx, revision, rules, i, prune, cls);

        double dl_orig = ruleset_dl(ctx, rules, pool, cls);
        std::vector<Rule> with_repl = rules;
        with_repl[i] = replacement;
        double dl_repl = ruleset_dl(ctx, with_repl, pool, cls);
        std::vector<Rule> with_rev = rules;
        with_rev[i] = revision;
        double dl_rev = ruleset_dl(ctx, with_rev, pool, cls);

        if (dl_repl < dl_orig - 1e-9 && dl_repl <= dl_rev + 1e-9)
            rules[i] = std::move(replacement);
        else if (dl_rev < dl_orig - 1e-9)
            rules[i] = std::move(revision);
    }
    build_rules(ctx, pool, cls, rng, rules);
}

// Drop rules whose removal lowers the description length, scanning from
// the last rule backwards.
inline void delete_pass(const Ctx& ctx, const Refs& pool, std::size_t cls,
                        std::vector<Rule>& rules) {
    for (std::size_t i = rules.size(); i-- > 0;) {
        double dl_with = ruleset_dl(ctx, rules, pool, cls);
        std::vector<Rule> without = rules;
        without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
        if (ruleset_dl(ctx, without, pool, cls) < dl_with - 1e-9) rules = std::move(without);
    }
}

}  // namespace detail::jrip

// RIPPER: classes in increasing frequency order each get a grown, pruned,
// and MDL-checked ruleset, followed by the configured number of
// optimization passes; the default rule predicts the most frequent class.
inline std::unique_ptr<DecisionListModel> train_jrip(const Dataset& d, JripParams params = {}) {
    detail::require_trainable(d);
    params.validate();
    detail::Stopwatch timer;
    detail::jrip::Ctx ctx{d, params.folds, params.min_weight};

    ClassDistribution freq = class_distribution(d);
    std::vector<std::size_t> order(d.num_classes());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Ascending frequency; equal counts put the lower class index last so
    // the default class matches the usual lowest-index majority rule.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (freq.count(a) != freq.count(b)) return freq.count(a) < freq.count(b);
        return a > b;
    });

    SplitRng rng(params.seed);
    Refs pool = all_refs(d);
    std::vector<Rule> rules;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        std::size_t cls = order[k];
        if (freq.count(cls) <= 0.0) continue;
        std::vector<Rule> stage;
        detail::jrip::build_rules(ctx, pool, cls, rng, stage);
        for (std::size_t r = 0; r < params.optimizations; ++r)
            detail::jrip::optimize(ctx, pool, cls, rng, stage);
        detail::jrip::delete_pass(ctx, pool, cls, stage);
        pool = detail::jrip::not_covered_by_any(ctx, pool, stage);
        for (auto& r : stage) rules.push_back(std::move(r));
    }
    Rule def;
    def.consequent = order.back();
    rules.push_back(std::move(def));
    recompute_rule_stats(rules, d);

    ModelInfo info;
    info.learner = "jrip";
    info.params = params.to_json();
    info.seed = params.seed;
    info.build_time_s = timer.seconds();
    return std::make_unique<DecisionListModel>(TrainedSchema::of(d), std::move(info),
                                               std::move(rules));
}

}  // namespace qosrank
