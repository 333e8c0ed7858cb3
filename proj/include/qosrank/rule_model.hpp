#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qosrank/model_base.hpp"

namespace qosrank {

enum class ConditionOp { eq, le, ge, gt };

struct Condition {
    std::size_t attribute = 0;
    ConditionOp op = ConditionOp::eq;
    double value = 0.0;  // label index for eq, threshold otherwise

    // A missing tested value never matches.
    bool matches(const Instance& x) const {
        double v = x.values[attribute];
        if (is_missing(v)) return false;
        switch (op) {
            case ConditionOp::eq: return v == value;
            case ConditionOp::le: return v <= value;
            case ConditionOp::ge: return v >= value;
            case ConditionOp::gt: return v > value;
        }
        return false;
    }

    std::string render(const TrainedSchema& schema) const {
        const Attribute& a = schema.attributes[attribute];
        const char* sym = op == ConditionOp::eq   ? " = "
                          : op == ConditionOp::le ? " <= "
                          : op == ConditionOp::ge ? " >= "
                                                  : " > ";
        std::string rhs = op == ConditionOp::eq ? a.labels[static_cast<std::size_t>(value)]
                                                : detail::format_double(value);
        return a.name + sym + rhs;
    }

    nlohmann::json to_json() const {
        const char* sym = op == ConditionOp::eq   ? "eq"
                          : op == ConditionOp::le ? "le"
                          : op == ConditionOp::ge ? "ge"
                                                  : "gt";
        return {{"attribute", attribute}, {"op", sym}, {"value", value}};
    }

    static Condition from_json(const nlohmann::json& j) {
        Condition c;
        c.attribute = j.at("attribute").get<std::size_t>();
        std::string sym = j.at("op").get<std::string>();
        c.op = sym == "eq"   ? ConditionOp::eq
               : sym == "le" ? ConditionOp::le
               : sym == "ge" ? ConditionOp::ge
                             : ConditionOp::gt;
        c.value = j.at("value").get<double>();
        return c;
    }
};

struct Rule {
    std::vector<Condition> antecedent;  // empty = matches everything
    std::size_t consequent = 0;
    double p = 0.0;  // covered weight of the consequent class (list context)
    double n = 0.0;  // covered weight of other classes
    // Prediction override: ZeroR's default rule carries the training prior
    // instead of a point mass.
    std::optional<std::vector<double>> distribution;
    std::vector<double> condition_bits;  // per-condition theory cost (rule induction)

    bool is_default() const { return antecedent.empty(); }

    bool matches(const Instance& x) const {
        for (const auto& c : antecedent)
            if (!c.matches(x)) return false;
        return true;
    }

    std::string render(const TrainedSchema& schema) const {
        std::string s = "IF ";
        if (antecedent.empty()) {
            s += "true";
        } else {
            for (std::size_t i = 0; i < antecedent.size(); ++i) {
                if (i) s += " AND ";
                s += antecedent[i].render(schema);
            }
        }
        std::ostringstream tail;
        tail << " THEN " << schema.class_label(consequent) << " (" << p << "/" << n << ")";
        return s + tail.str();
    }

    nlohmann::json to_json() const {
        nlohmann::json conds = nlohmann::json::array();
        for (const auto& c : antecedent) conds.push_back(c.to_json());
        nlohmann::json j{{"conditions", conds}, {"consequent", consequent}, {"p", p}, {"n", n}};
        if (distribution) j["distribution"] = *distribution;
        if (!condition_bits.empty()) j["condition_bits"] = condition_bits;
        return j;
    }

    static Rule from_json(const nlohmann::json& j) {
        Rule r;
        for (const auto& c : j.at("conditions")) r.antecedent.push_back(Condition::from_json(c));
        r.consequent = j.at("consequent").get<std::size_t>();
        r.p = j.value("p", 0.0);
        r.n = j.value("n", 0.0);
        if (j.contains("distribution"))
            r.distribution = j.at("distribution").get<std::vector<double>>();
        if (j.contains("condition_bits"))
            r.condition_bits = j.at("condition_bits").get<std::vector<double>>();
        return r;
    }
};

// Ordered rules; the first match fires and the trailing default matches
// everything, so prediction is total.
class DecisionListModel : public ModelBase {
public:
    DecisionListModel(TrainedSchema schema, ModelInfo info, std::vector<Rule> rules)
        : rules_(std::move(rules)) {
        schema_ = std::move(schema);
        info_ = std::move(info);
        if (rules_.empty() || !rules_.back().is_default())
            throw Error(errc::learner, "decision list must end with a default rule");
    }

    const std::vector<Rule>& rules() const { return rules_; }

    const Rule& first_match(const Instance& x) const {
        for (const auto& r : rules_)
            if (r.matches(x)) return r;
        return rules_.back();  // unreachable: default matches everything
    }

    ClassDistribution predict(const Instance& x) const override {
        if (x.values.size() != schema_.attributes.size())
            throw Error(errc::schema, "instance arity does not match model schema");
        const Rule& r = first_match(x);
        if (r.distribution) {
            auto d = ClassDistribution::from_counts(*r.distribution);
            auto p = d.probabilities();
            ClassDistribution out(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) out.add(i, p[i]);
            return out;
        }
        return ClassDistribution::point_mass(schema_.num_classes(), r.consequent);
    }

    nlohmann::json to_json() const override {
        nlohmann::json rules = nlohmann::json::array();
        for (const auto& r : rules_) rules.push_back(r.to_json());
        return {{"format_version", model_format_version},
                {"type", "decision_list"},
                {"info", info_.to_json()},
                {"schema", schema_.to_json()},
                {"rules", std::move(rules)}};
    }

    std::string render() const override {
        std::ostringstream out;
        out << info_.learner << " (" << rules_.size() << " rules)\n";
        for (const auto& r : rules_) out << r.render(schema_) << "\n";
        return out.str();
    }

    std::unique_ptr<ModelBase> clone() const override {
        return std::make_unique<DecisionListModel>(schema_, info_, rules_);
    }

    static std::unique_ptr<DecisionListModel> from_json(const nlohmann::json& j) {
        std::vector<Rule> rules;
        for (const auto& r : j.at("rules")) rules.push_back(Rule::from_json(r));
        return std::make_unique<DecisionListModel>(TrainedSchema::from_json(j.at("schema")),
                                                   ModelInfo::from_json(j.at("info")),
                                                   std::move(rules));
    }

private:
    std::vector<Rule> rules_;
};

// Majority table keyed by the values of a searched-for attribute subset;
// lookups that miss (or test a missing value) fall back to the global
// majority.
class DecisionTableModel : public ModelBase {
public:
    using Key = std::vector<double>;

    DecisionTableModel(TrainedSchema schema, ModelInfo info, std::vector<std::size_t> subset,
                       std::map<Key, ClassDistribution> table, ClassDistribution global)
        : subset_(std::move(subset)), table_(std::move(table)), global_(std::move(global)) {
        schema_ = std::move(schema);
        info_ = std::move(info);
    }

    const std::vector<std::size_t>& subset() const { return subset_; }
    const std::map<Key, ClassDistribution>& table() const { return table_; }
    const ClassDistribution& global_distribution() const { return global_; }

    std::optional<Key> key_for(const Instance& x) const {
        Key key;
        key.reserve(subset_.size());
        for (std::size_t a : subset_) {
            double v = x.values[a];
            if (is_missing(v)) return std::nullopt;
            key.push_back(v);
        }
        return key;
    }

    ClassDistribution predict(const Instance& x) const override {
        if (x.values.size() != schema_.attributes.size())
            throw Error(errc::schema, "instance arity does not match model schema");
        const ClassDistribution* dist = &global_;
        if (auto key = key_for(x)) {
            auto it = table_.find(*key);
            if (it != table_.end() && !it->second.empty()) dist = &it->second;
        }
        auto p = dist->probabilities();
        ClassDistribution out(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) out.add(i, p[i]);
        return out;
    }

    nlohmann::json to_json() const override {
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& [key, dist] : table_)
            entries.push_back({{"key", key}, {"counts", dist.counts()}});
        return {{"format_version", model_format_version},
                {"type", "decision_table"},
                {"info", info_.to_json()},
                {"schema", schema_.to_json()},
                {"subset", subset_},
                {"entries", std::move(entries)},
                {"global", global_.counts()}};
    }

    std::string render() const override {
        std::ostringstream out;
        out << info_.learner << " on {";
        for (std::size_t i = 0; i < subset_.size(); ++i)
            out << (i ? ", " : "") << schema_.attributes[subset_[i]].name;
        out << "} (" << table_.size() << " keys)\n";
        for (const auto& [key, dist] : table_) {
            for (std::size_t i = 0; i < key.size(); ++i) {
                const Attribute& a = schema_.attributes[subset_[i]];
                out << (i ? ", " : "");
                if (a.kind == AttrKind::nominal)
                    out << a.labels[static_cast<std::size_t>(key[i])];
                else
                    out << detail::format_double(key[i]);
            }
            out << " -> " << schema_.class_label(dist.argmax()) << "\n";
        }
        return out.str();
    }

    std::unique_ptr<ModelBase> clone() const override {
        return std::make_unique<DecisionTableModel>(schema_, info_, subset_, table_, global_);
    }

    static std::unique_ptr<DecisionTableModel> from_json(const nlohmann::json& j) {
        std::map<Key, ClassDistribution> table;
        for (const auto& e : j.at("entries"))
            table.emplace(e.at("key").get<Key>(),
                          ClassDistribution::from_counts(e.at("counts").get<std::vector<double>>()));
        return std::make_unique<DecisionTableModel>(
            TrainedSchema::from_json(j.at("schema")), ModelInfo::from_json(j.at("info")),
            j.at("subset").get<std::vector<std::size_t>>(), std::move(table),
            ClassDistribution::from_counts(j.at("global").get<std::vector<double>>()));
    }

private:
    std::vector<std::size_t> subset_;
    std::map<Key, ClassDistribution> table_;
    ClassDistribution global_;
};

inline ClassDistribution predict_rules(const ModelBase& model, const Instance& x) {
    return model.predict(x);
}

// First-match coverage stats over a dataset, written back into the rules.
inline void recompute_rule_stats(std::vector<Rule>& rules, const Dataset& d) {
    for (auto& r : rules) {
        r.p = 0.0;
        r.n = 0.0;
    }
    for (const auto& inst : d.instances()) {
        for (auto& r : rules) {
            if (!r.matches(inst)) continue;
            if (d.class_of(inst) == r.consequent)
                r.p += inst.weight;
            else
                r.n += inst.weight;
            break;
        }
    }
}

}  // namespace qosrank
