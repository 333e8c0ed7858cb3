#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "qosrank/model_base.hpp"
#include "qosrank/split_criteria.hpp"

namespace qosrank {

struct TreeNode {
    bool leaf = true;
    std::size_t attribute = 0;
    bool numeric_test = false;
    double threshold = 0.0;
    std::vector<std::unique_ptr<TreeNode>> children;  // numeric: [<= t, > t]
    std::vector<double> child_weights;                // training weight per child
    ClassDistribution dist;                           // training distribution here
    std::size_t label = 0;                            // argmax of dist

    std::size_t node_count() const {
        std::size_t n = 1;
        for (const auto& c : children) n += c->node_count();
        return n;
    }

    std::size_t depth() const {
        std::size_t d = 0;
        for (const auto& c : children) d = std::max(d, c->depth() + 1);
        return d;
    }

    std::unique_ptr<TreeNode> clone() const {
        auto n = std::make_unique<TreeNode>();
        n->leaf = leaf;
        n->attribute = attribute;
        n->numeric_test = numeric_test;
        n->threshold = threshold;
        n->child_weights = child_weights;
        n->dist = dist;
        n->label = label;
        for (const auto& c : children) n->children.push_back(c->clone());
        return n;
    }
};

namespace detail {

// Fractional routing: a missing test value descends every child, weighted
// by the training child weights, and the reached leaf distributions are
// averaged.
inline void route(const TreeNode& node, const TrainedSchema& schema, const Instance& x,
                  double weight, std::vector<double>& acc) {
    if (node.leaf) {
        auto p = node.dist.probabilities();
        for (std::size_t i = 0; i < p.size(); ++i) acc[i] += weight * p[i];
        return;
    }
    double v = x.values[node.attribute];
    if (is_missing(v)) {
        double total = 0.0;
        for (double w : node.child_weights) total += w;
        if (total <= 0.0) {
            auto p = node.dist.probabilities();
            for (std::size_t i = 0; i < p.size(); ++i) acc[i] += weight * p[i];
            return;
        }
        for (std::size_t j = 0; j < node.children.size(); ++j)
            if (node.child_weights[j] > 0.0)
                route(*node.children[j], schema, x, weight * node.child_weights[j] / total, acc);
        return;
    }
    std::size_t child;
    if (node.numeric_test)
        child = v <= node.threshold ? 0 : 1;
    else
        child = static_cast<std::size_t>(v);
    route(*node.children[child], schema, x, weight, acc);
}

inline nlohmann::json node_to_json(const TreeNode& n) {
    nlohmann::json j;
    j["counts"] = n.dist.counts();
    j["label"] = n.label;
    if (!n.leaf) {
        j["attribute"] = n.attribute;
        j["test"] = n.numeric_test ? "numeric" : "nominal";
        if (n.numeric_test) j["threshold"] = n.threshold;
        j["child_weights"] = n.child_weights;
        nlohmann::json kids = nlohmann::json::array();
        for (const auto& c : n.children) kids.push_back(node_to_json(*c));
        j["children"] = std::move(kids);
    }
    return j;
}

inline std::unique_ptr<TreeNode> node_from_json(const nlohmann::json& j) {
    auto n = std::make_unique<TreeNode>();
    n->dist = ClassDistribution::from_counts(j.at("counts").get<std::vector<double>>());
    n->label = j.at("label").get<std::size_t>();
    if (j.contains("children")) {
        n->leaf = false;
        n->attribute = j.at("attribute").get<std::size_t>();
        n->numeric_test = j.at("test").get<std::string>() == "numeric";
        if (n->numeric_test) n->threshold = j.at("threshold").get<double>();
        n->child_weights = j.at("child_weights").get<std::vector<double>>();
        for (const auto& c : j.at("children")) n->children.push_back(node_from_json(c));
    }
    return n;
}

inline void render_node(const TreeNode& n, const TrainedSchema& schema, int depth,
                        std::ostringstream& out) {
    auto leaf_text = [&](const TreeNode& leaf) {
        double total = leaf.dist.total();
        double errors = total - leaf.dist.count(leaf.label);
        std::ostringstream s;
        s << ": " << schema.class_label(leaf.label) << " (" << total;
        if (errors > 1e-9) s << "/" << errors;
        s << ")";
        return s.str();
    };
    if (n.leaf) {
        // Rendered inline by the parent; a root-only tree lands here.
        if (depth == 0) out << leaf_text(n) << "\n";
        return;
    }
    const Attribute& a = schema.attributes[n.attribute];
    for (std::size_t j = 0; j < n.children.size(); ++j) {
        for (int i = 0; i < depth; ++i) out << "|   ";
        if (n.numeric_test)
            out << a.name << (j == 0 ? " <= " : " > ") << n.threshold;
        else
            out << a.name << " = " << a.labels[j];
        if (n.children[j]->leaf)
            out << leaf_text(*n.children[j]) << "\n";
        else {
            out << "\n";
            render_node(*n.children[j], schema, depth + 1, out);
        }
    }
}

}  // namespace detail

class TreeModel : public ModelBase {
public:
    TreeModel(TrainedSchema schema, ModelInfo info, std::unique_ptr<TreeNode> root)
        : root_(std::move(root)) {
        schema_ = std::move(schema);
        info_ = std::move(info);
    }

    const TreeNode& root() const { return *root_; }
    std::size_t node_count() const { return root_->node_count(); }
    std::size_t depth() const { return root_->depth(); }

    ClassDistribution predict(const Instance& x) const override {
        if (x.values.size() != schema_.attributes.size())
            throw Error(errc::schema, "instance arity does not match model schema");
        std::vector<double> acc(schema_.num_classes(), 0.0);
        detail::route(*root_, schema_, x, 1.0, acc);
        double total = 0.0;
        for (double a : acc) total += a;
        ClassDistribution out(acc.size());
        for (std::size_t i = 0; i < acc.size(); ++i) out.add(i, acc[i] / total);
        return out;
    }

    nlohmann::json to_json() const override {
        return {{"format_version", model_format_version},
                {"type", "tree"},
                {"info", info_.to_json()},
                {"schema", schema_.to_json()},
                {"model", detail::node_to_json(*root_)}};
    }

    std::string render() const override {
        std::ostringstream out;
        out << info_.learner << " tree (" << node_count() << " nodes, depth " << depth() << ")\n";
        if (root_->leaf) {
            out << schema_.class_label(root_->label) << " (" << root_->dist.total() << ")\n";
        } else {
            detail::render_node(*root_, schema_, 0, out);
        }
        return out.str();
    }

    std::unique_ptr<ModelBase> clone() const override {
        return std::make_unique<TreeModel>(schema_, info_, root_->clone());
    }

    static std::unique_ptr<TreeModel> from_json(const nlohmann::json& j) {
        return std::make_unique<TreeModel>(TrainedSchema::from_json(j.at("schema")),
                                           ModelInfo::from_json(j.at("info")),
                                           detail::node_from_json(j.at("model")));
    }

private:
    std::unique_ptr<TreeNode> root_;
};

// Bagged random trees; prediction is the arithmetic mean of the member
// distributions, so the argmax is the majority vote.
class ForestModel : public ModelBase {
public:
    ForestModel(TrainedSchema schema, ModelInfo info,
                std::vector<std::unique_ptr<TreeModel>> members)
        : members_(std::move(members)) {
        schema_ = std::move(schema);
        info_ = std::move(info);
    }

    const std::vector<std::unique_ptr<TreeModel>>& members() const { return members_; }

    ClassDistribution predict(const Instance& x) const override {
        ClassDistribution mean(schema_.num_classes());
        for (const auto& m : members_) mean.add_scaled(m->predict(x), 1.0 / members_.size());
        return mean;
    }

    nlohmann::json to_json() const override {
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& m : members_) trees.push_back(m->to_json());
        return {{"format_version", model_format_version},
                {"type", "forest"},
                {"info", info_.to_json()},
                {"schema", schema_.to_json()},
                {"members", std::move(trees)}};
    }

    std::string render() const override {
        std::ostringstream out;
        out << info_.learner << " with " << members_.size() << " trees\n";
        for (std::size_t i = 0; i < members_.size(); ++i)
            out << "--- tree " << i << " ---\n" << members_[i]->render();
        return out.str();
    }

    std::unique_ptr<ModelBase> clone() const override {
        std::vector<std::unique_ptr<TreeModel>> copies;
        for (const auto& m : members_)
            copies.push_back(std::unique_ptr<TreeModel>(
                static_cast<TreeModel*>(m->clone().release())));
        return std::make_unique<ForestModel>(schema_, info_, std::move(copies));
    }

    static std::unique_ptr<ForestModel> from_json(const nlohmann::json& j) {
        std::vector<std::unique_ptr<TreeModel>> members;
        for (const auto& t : j.at("members")) members.push_back(TreeModel::from_json(t));
        return std::make_unique<ForestModel>(TrainedSchema::from_json(j.at("schema")),
                                             ModelInfo::from_json(j.at("info")),
                                             std::move(members));
    }

private:
    std::vector<std::unique_ptr<TreeModel>> members_;
};

}  // namespace qosrank
