#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qosrank/dataset.hpp"
#include "qosrank/distribution.hpp"
#include "qosrank/random.hpp"

namespace qosrank {

inline constexpr int model_format_version = 1;

// Attribute layout a model was trained against. Kept inside the model so
// predictions can validate inputs and serialized models stay self-describing.
struct TrainedSchema {
    std::vector<Attribute> attributes;
    std::size_t class_index = 0;
    std::string fingerprint;

    static TrainedSchema of(const Dataset& d) {
        TrainedSchema s;
        s.attributes = d.attributes();
        s.class_index = d.class_index();
        s.fingerprint = d.schema_fingerprint();
        return s;
    }

    std::size_t num_classes() const { return attributes[class_index].labels.size(); }
    const std::string& class_label(std::size_t i) const {
        return attributes[class_index].labels[i];
    }

    nlohmann::json to_json() const {
        nlohmann::json attrs = nlohmann::json::array();
        for (const auto& a : attributes) {
            nlohmann::json j{{"name", a.name},
                             {"kind", a.kind == AttrKind::numeric ? "numeric" : "nominal"}};
            if (!a.unit.empty()) j["unit"] = a.unit;
            if (a.kind == AttrKind::nominal) j["labels"] = a.labels;
            attrs.push_back(std::move(j));
        }
        return {{"attributes", attrs}, {"class_index", class_index}, {"fingerprint", fingerprint}};
    }

    static TrainedSchema from_json(const nlohmann::json& j) {
        TrainedSchema s;
        for (const auto& ja : j.at("attributes")) {
            Attribute a;
            a.name = ja.at("name").get<std::string>();
            a.kind = ja.at("kind").get<std::string>() == "nominal" ? AttrKind::nominal
                                                                   : AttrKind::numeric;
            a.unit = ja.value("unit", std::string());
            if (ja.contains("labels")) a.labels = ja.at("labels").get<std::vector<std::string>>();
            s.attributes.push_back(std::move(a));
        }
        s.class_index = j.at("class_index").get<std::size_t>();
        s.fingerprint = j.at("fingerprint").get<std::string>();
        return s;
    }
};

struct ModelInfo {
    std::string learner;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    double build_time_s = 0.0;
    std::string rng = SplitRng::algorithm_name();
    std::vector<std::string> notes;

    nlohmann::json to_json() const {
        nlohmann::json j{{"learner", learner}, {"params", params}, {"seed", seed},
                         {"build_time_s", build_time_s}, {"rng", rng}};
        if (!notes.empty()) j["notes"] = notes;
        return j;
    }

    static ModelInfo from_json(const nlohmann::json& j) {
        ModelInfo m;
        m.learner = j.at("learner").get<std::string>();
        m.params = j.at("params");
        m.seed = j.at("seed").get<std::uint64_t>();
        m.build_time_s = j.value("build_time_s", 0.0);
        m.rng = j.value("rng", std::string());
        if (j.contains("notes")) m.notes = j.at("notes").get<std::vector<std::string>>();
        return m;
    }
};

class ModelBase {
public:
    virtual ~ModelBase() = default;

    // Normalized class distribution for one instance.
    virtual ClassDistribution predict(const Instance& x) const = 0;

    virtual nlohmann::json to_json() const = 0;
    virtual std::string render() const = 0;
    virtual std::unique_ptr<ModelBase> clone() const = 0;

    const TrainedSchema& schema() const { return schema_; }
    const ModelInfo& info() const { return info_; }
    ModelInfo& info() { return info_; }

    std::size_t predict_label(const Instance& x) const { return predict(x).argmax(); }

protected:
    TrainedSchema schema_;
    ModelInfo info_;
};

}  // namespace qosrank
