#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "qosrank/dataset.hpp"
#include "qosrank/distribution.hpp"
#include "qosrank/error.hpp"

namespace qosrank {

// Node-local view of the training data: instance index plus the weight it
// carries at this node. Fractional weights appear when a missing value was
// split across branches on the way down.
struct WeightedRef {
    std::size_t index;
    double weight;
};

using Refs = std::vector<WeightedRef>;

inline Refs all_refs(const Dataset& d) {
    Refs refs;
    refs.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) refs.push_back({i, d.instance(i).weight});
    return refs;
}

inline ClassDistribution refs_distribution(const Dataset& d, const Refs& refs) {
    ClassDistribution dist(d.num_classes());
    for (const auto& r : refs) dist.add(d.class_of(d.instance(r.index)), r.weight);
    return dist;
}

// A scored test: nominal multiway (one child per label) or numeric
// threshold (child 0 is <= t, child 1 is > t). Children carry exact class
// distributions; missing-value weight is already spread across them in
// proportion to the known-value weights.
struct SplitCandidate {
    std::size_t attribute = 0;
    bool numeric = false;
    double threshold = 0.0;
    std::vector<ClassDistribution> children;

    double total_weight() const {
        double w = 0.0;
        for (const auto& c : children) w += c.total();
        return w;
    }

    std::size_t nonempty_children() const {
        std::size_t n = 0;
        for (const auto& c : children)
            if (!c.empty()) ++n;
        return n;
    }
};

inline double entropy(const ClassDistribution& dist) {
    if (dist.total() <= 0.0) throw Error(errc::eval, "entropy of an empty distribution");
    double h = 0.0;
    for (double c : dist.counts()) {
        if (c <= 0.0) continue;
        double p = c / dist.total();
        h -= p * std::log2(p);
    }
    return h;
}

// Weighted average of child entropies; empty children contribute 0.
inline double info_after_split(const SplitCandidate& s) {
    double total = s.total_weight();
    if (total <= 0.0) throw Error(errc::eval, "split has no weight");
    double info = 0.0;
    for (const auto& child : s.children) {
        if (child.total() <= 0.0) continue;
        info += (child.total() / total) * entropy(child);
    }
    return info;
}

inline ClassDistribution split_parent(const SplitCandidate& s) {
    ClassDistribution parent(s.children.empty() ? 0 : s.children.front().size());
    for (const auto& c : s.children) parent.add_scaled(c, 1.0);
    return parent;
}

inline double information_gain(const ClassDistribution& parent, const SplitCandidate& s) {
    double child_total = s.total_weight();
    if (std::fabs(child_total - parent.total()) > 1e-6 * std::max(1.0, parent.total()))
        throw Error(errc::eval, "split children do not partition the parent");
    return entropy(parent) - info_after_split(s);
}

inline double split_info(const SplitCandidate& s) {
    double total = s.total_weight();
    if (total <= 0.0) throw Error(errc::eval, "split has no weight");
    double si = 0.0;
    for (const auto& child : s.children) {
        if (child.total() <= 0.0) continue;
        double f = child.total() / total;
        si -= f * std::log2(f);
    }
    return si;
}

// nullopt when all weight lands in one child: such a candidate is rejected
// rather than treated as a numeric error.
inline std::optional<double> gain_ratio(const ClassDistribution& parent, const SplitCandidate& s) {
    double si = split_info(s);
    if (si <= 1e-10) return std::nullopt;
    return information_gain(parent, s) / si;
}

inline double gini(const ClassDistribution& dist) {
    if (dist.total() <= 0.0) throw Error(errc::eval, "gini of an empty distribution");
    double sum = 0.0;
    for (double c : dist.counts()) {
        double p = c / dist.total();
        sum += p * p;
    }
    return 1.0 - sum;
}

// Binary splits only; the impurity drop gini(D) - weighted child ginis.
inline double gini_reduction(const ClassDistribution& parent, const SplitCandidate& s) {
    if (s.children.size() != 2)
        throw Error(errc::eval, "gini reduction is defined for binary splits only");
    double child_total = s.total_weight();
    if (std::fabs(child_total - parent.total()) > 1e-6 * std::max(1.0, parent.total()))
        throw Error(errc::eval, "split children do not partition the parent");
    double weighted = 0.0;
    for (const auto& child : s.children) {
        if (child.total() <= 0.0) continue;
        weighted += (child.total() / child_total) * gini(child);
    }
    return gini(parent) - weighted;
}

namespace detail {

struct ValueGroup {
    double value;
    ClassDistribution dist;
};

// Distinct sorted values of one numeric attribute with per-value class
// weights, plus the pooled weight of instances missing the value.
inline void group_numeric(const Dataset& d, const Refs& refs, std::size_t attr,
                          std::vector<ValueGroup>& groups, ClassDistribution& missing) {
    std::vector<std::pair<double, const WeightedRef*>> known;
    known.reserve(refs.size());
    missing = ClassDistribution(d.num_classes());
    for (const auto& r : refs) {
        double v = d.instance(r.index).values[attr];
        if (is_missing(v))
            missing.add(d.class_of(d.instance(r.index)), r.weight);
        else
            known.push_back({v, &r});
    }
    std::sort(known.begin(), known.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    groups.clear();
    for (const auto& [v, r] : known) {
        if (groups.empty() || groups.back().value != v)
            groups.push_back({v, ClassDistribution(d.num_classes())});
        groups.back().dist.add(d.class_of(d.instance(r->index)), r->weight);
    }
}

inline bool same_single_class(const ClassDistribution& a, const ClassDistribution& b) {
    if (!a.pure() || !b.pure()) return false;
    return a.argmax() == b.argmax();
}

}  // namespace detail

// Thresholds are midpoints between consecutive distinct values whose
// adjacent instances differ in class; skipping the within-class midpoints
// never lowers the best achievable gain. Missing weight is spread over
// both children in proportion to the known weights.
inline std::vector<SplitCandidate> numeric_split_candidates(const Dataset& d, const Refs& refs,
                                                            std::size_t attr) {
    if (d.attribute(attr).kind != AttrKind::numeric)
        throw Error(errc::eval, "attribute " + d.attribute(attr).name + " is not numeric");
    std::vector<detail::ValueGroup> groups;
    ClassDistribution missing;
    detail::group_numeric(d, refs, attr, groups, missing);

    std::vector<SplitCandidate> out;
    if (groups.size() < 2) return out;

    double known_total = 0.0;
    ClassDistribution right(d.num_classes());
    for (const auto& g : groups) {
        known_total += g.dist.total();
        right.add_scaled(g.dist, 1.0);
    }

    ClassDistribution left(d.num_classes());
    for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
        left.add_scaled(groups[i].dist, 1.0);
        right.add_scaled(groups[i].dist, -1.0);
        if (detail::same_single_class(groups[i].dist, groups[i + 1].dist)) continue;
        SplitCandidate cand;
        cand.attribute = attr;
        cand.numeric = true;
        cand.threshold = (groups[i].value + groups[i + 1].value) / 2.0;
        ClassDistribution cl = left;
        ClassDistribution cr = right;
        if (missing.total() > 0.0 && known_total > 0.0) {
            cl.add_scaled(missing, left.total() / known_total);
            cr.add_scaled(missing, right.total() / known_total);
        }
        cand.children = {std::move(cl), std::move(cr)};
        out.push_back(std::move(cand));
    }
    return out;
}

inline std::vector<SplitCandidate> numeric_split_candidates(const Dataset& d, std::size_t attr) {
    return numeric_split_candidates(d, all_refs(d), attr);
}

// One child per label. Returns nullopt when no instance has a known value.
inline std::optional<SplitCandidate> nominal_split_candidate(const Dataset& d, const Refs& refs,
                                                             std::size_t attr) {
    if (d.attribute(attr).kind != AttrKind::nominal)
        throw Error(errc::eval, "attribute " + d.attribute(attr).name + " is not nominal");
    std::size_t v = d.attribute(attr).labels.size();
    std::vector<ClassDistribution> children(v, ClassDistribution(d.num_classes()));
    ClassDistribution missing(d.num_classes());
    double known_total = 0.0;
    for (const auto& r : refs) {
        double val = d.instance(r.index).values[attr];
        std::size_t cls = d.class_of(d.instance(r.index));
        if (is_missing(val)) {
            missing.add(cls, r.weight);
        } else {
            children[static_cast<std::size_t>(val)].add(cls, r.weight);
            known_total += r.weight;
        }
    }
    if (known_total <= 0.0) return std::nullopt;
    if (missing.total() > 0.0)
        for (auto& child : children)
            if (child.total() > 0.0) {
                double frac = child.total() / known_total;
                child.add_scaled(missing, frac);
            }
    SplitCandidate cand;
    cand.attribute = attr;
    cand.numeric = false;
    cand.children = std::move(children);
    return cand;
}

}  // namespace qosrank
