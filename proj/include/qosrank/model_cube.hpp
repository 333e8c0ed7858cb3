#pragma once

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qosrank/evaluation.hpp"
#include "qosrank/learner.hpp"

namespace qosrank {

inline constexpr int cube_format_version = 1;

// One trained model per (parameter subset, learner). Bit i of the mask is
// the i-th non-class attribute of the source dataset.
struct CubeCellRef {
    std::uint32_t mask = 0;
    std::string learner;
    std::string fingerprint;  // dataset fingerprint the cell was built from
    std::string file;
    std::string status;  // "built" | "failed"
    std::string failure;

    nlohmann::json to_json() const {
        nlohmann::json j{{"mask", mask},
                         {"learner", learner},
                         {"fingerprint", fingerprint},
                         {"file", file},
                         {"status", status}};
        if (!failure.empty()) j["failure"] = failure;
        return j;
    }

    static CubeCellRef from_json(const nlohmann::json& j) {
        CubeCellRef c;
        c.mask = j.at("mask").get<std::uint32_t>();
        c.learner = j.at("learner").get<std::string>();
        c.fingerprint = j.at("fingerprint").get<std::string>();
        c.file = j.at("file").get<std::string>();
        c.status = j.at("status").get<std::string>();
        c.failure = j.value("failure", std::string());
        return c;
    }
};

struct CubeIndex {
    std::string dataset_fingerprint;
    std::vector<std::string> parameters;        // non-class attribute names, bit order
    std::vector<std::string> class_order;       // best first; required for ranking
    std::vector<CubeCellRef> cells;

    const CubeCellRef* find(std::uint32_t mask, const std::string& learner) const {
        for (const auto& c : cells)
            if (c.mask == mask && c.learner == learner) return &c;
        return nullptr;
    }

    CubeCellRef* find(std::uint32_t mask, const std::string& learner) {
        for (auto& c : cells)
            if (c.mask == mask && c.learner == learner) return &c;
        return nullptr;
    }

    nlohmann::json to_json() const {
        nlohmann::json cells_json = nlohmann::json::array();
        for (const auto& c : cells) cells_json.push_back(c.to_json());
        return {{"format_version", cube_format_version},
                {"dataset_fingerprint", dataset_fingerprint},
                {"parameters", parameters},
                {"class_order", class_order},
                {"cells", std::move(cells_json)}};
    }

    static CubeIndex from_json(const nlohmann::json& j) {
        int version = j.at("format_version").get<int>();
        if (version != cube_format_version)
            throw Error(errc::parse, "unsupported cube format version " + std::to_string(version));
        CubeIndex idx;
        idx.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
        idx.parameters = j.at("parameters").get<std::vector<std::string>>();
        idx.class_order = j.at("class_order").get<std::vector<std::string>>();
        for (const auto& c : j.at("cells")) idx.cells.push_back(CubeCellRef::from_json(c));
        return idx;
    }
};

namespace detail {

inline std::string cube_index_path(const std::string& dir) { return dir + "/index.json"; }

inline std::string mask_hex(std::uint32_t mask) {
    static const char* digits = "0123456789abcdef";
    std::string out(8, '0');
    for (int i = 7; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[mask & 0xf];
        mask >>= 4;
    }
    return out;
}

inline std::string timestamp_utc() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace detail

// Atomic replace so concurrent queries only ever see a complete index.
inline void save_cube_index(const CubeIndex& idx, const std::string& dir) {
    std::string path = detail::cube_index_path(dir);
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error(errc::io, "cannot write " + tmp);
        out << idx.to_json().dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

inline CubeIndex load_cube_index(const std::string& dir) {
    std::ifstream in(detail::cube_index_path(dir));
    if (!in) throw Error(errc::cube, "no cube index in " + dir);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::parse, detail::cube_index_path(dir) + ": " + e.what());
    }
    return CubeIndex::from_json(j);
}

inline std::vector<std::size_t> parameter_attribute_indices(const Dataset& d) {
    std::vector<std::size_t> idx;
    for (std::size_t a = 0; a < d.num_attributes(); ++a)
        if (!d.has_class() || a != d.class_index()) idx.push_back(a);
    return idx;
}

inline std::vector<std::uint32_t> all_subset_masks(std::size_t parameter_count) {
    if (parameter_count == 0 || parameter_count > 31)
        throw Error(errc::cube, "parameter count out of range for subset masks");
    std::vector<std::uint32_t> masks;
    std::uint32_t limit = (1u << parameter_count);
    for (std::uint32_t m = 1; m < limit; ++m) masks.push_back(m);
    return masks;
}

inline std::uint32_t mask_from_names(const std::vector<std::string>& parameters,
                                     const std::vector<std::string>& names) {
    std::uint32_t mask = 0;
    for (const auto& n : names) {
        bool found = false;
        for (std::size_t i = 0; i < parameters.size(); ++i)
            if (parameters[i] == n) {
                mask |= 1u << i;
                found = true;
            }
        if (!found) throw Error(errc::cube, "unknown quality parameter '" + n + "'");
    }
    if (mask == 0) throw Error(errc::cube, "empty parameter subset");
    return mask;
}

inline std::vector<std::string> names_from_mask(const std::vector<std::string>& parameters,
                                                std::uint32_t mask) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < parameters.size(); ++i)
        if (mask & (1u << i)) names.push_back(parameters[i]);
    return names;
}

struct CubeBuildOptions {
    LearnerSpec learner;
    std::uint64_t seed = 1;
    bool normalize = false;  // omit timestamps and build times from cell files
};

// Train one model per requested subset and persist it immediately, so an
// interrupted build resumes where it stopped. Cells from a different
// dataset fingerprint are dropped first.
inline CubeIndex build_cube(const Dataset& d, const std::vector<std::string>& class_order,
                            const std::vector<std::uint32_t>& masks,
                            const CubeBuildOptions& opts, const std::string& dir) {
    if (masks.empty()) throw Error(errc::cube, "no subsets requested");
    std::filesystem::create_directories(dir);
    std::string fingerprint = d.fingerprint();
    auto params = parameter_attribute_indices(d);
    if (params.size() > 31) throw Error(errc::cube, "too many parameters for subset masks");

    CubeIndex idx;
    if (std::filesystem::exists(detail::cube_index_path(dir))) idx = load_cube_index(dir);
    idx.dataset_fingerprint = fingerprint;
    idx.parameters.clear();
    for (std::size_t a : params) idx.parameters.push_back(d.attribute(a).name);
    idx.class_order = class_order;

    // invalidate stale cells
    std::vector<CubeCellRef> kept;
    for (const auto& c : idx.cells) {
        if (c.fingerprint == fingerprint) {
            kept.push_back(c);
        } else {
            std::error_code ec;
            std::filesystem::remove(dir + "/" + c.file, ec);
        }
    }
    idx.cells = std::move(kept);
    save_cube_index(idx, dir);

    std::uint32_t full = params.size() >= 31 ? 0x7fffffffu : (1u << params.size()) - 1u;
    for (std::uint32_t mask : masks) {
        if (mask == 0 || (mask & ~full))
            throw Error(errc::cube, "subset mask out of range: " + detail::mask_hex(mask));
        if (const CubeCellRef* existing = idx.find(mask, opts.learner.name)) {
            if (existing->status == "built" &&
                std::filesystem::exists(dir + "/" + existing->file))
                continue;  // resume: already built
        }
        CubeCellRef cell;
        cell.mask = mask;
        cell.learner = opts.learner.name;
        cell.fingerprint = fingerprint;
        cell.file = "cell_" + detail::mask_hex(mask) + "_" + opts.learner.name + "_" +
                    fingerprint + ".json";
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < params.size(); ++i)
            if (mask & (1u << i)) keep.push_back(params[i]);
        try {
            Dataset projected = d.project(keep);
            auto model = train_model(projected, opts.learner, opts.seed);
            nlohmann::json cell_json{{"format_version", cube_format_version},
                                     {"mask", mask},
                                     {"learner", opts.learner.name},
                                     {"fingerprint", fingerprint},
                                     {"model", model->to_json()}};
            if (opts.normalize)
                cell_json["model"]["info"]["build_time_s"] = 0.0;
            else
                cell_json["built_at"] = detail::timestamp_utc();
            std::ofstream out(dir + "/" + cell.file);
            if (!out) throw Error(errc::io, "cannot write cube cell " + cell.file);
            out << cell_json.dump(2) << "\n";
            cell.status = "built";
        } catch (const Error& e) {
            cell.status = "failed";
            cell.failure = e.what();
        }
        if (CubeCellRef* existing = idx.find(mask, opts.learner.name))
            *existing = cell;
        else
            idx.cells.push_back(cell);
        save_cube_index(idx, dir);
    }
    return idx;
}

// Drop every cell whose fingerprint no longer matches; they must be
// rebuilt before they can serve queries again.
inline CubeIndex invalidate_cube(const std::string& dir, const std::string& new_fingerprint) {
    CubeIndex idx = load_cube_index(dir);
    std::vector<CubeCellRef> kept;
    for (const auto& c : idx.cells) {
        if (c.fingerprint == new_fingerprint) {
            kept.push_back(c);
        } else {
            std::error_code ec;
            std::filesystem::remove(dir + "/" + c.file, ec);
        }
    }
    idx.cells = std::move(kept);
    idx.dataset_fingerprint = new_fingerprint;
    save_cube_index(idx, dir);
    return idx;
}

inline std::unique_ptr<ModelBase> load_cube_cell(const std::string& dir, const CubeCellRef& cell) {
    std::ifstream in(dir + "/" + cell.file);
    if (!in) throw Error(errc::cube, "cube cell file missing: " + cell.file);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::parse, cell.file + ": " + e.what());
    }
    return model_from_json(j.at("model"));
}

struct RankedService {
    std::string id;
    std::string label;
    double probability = 0.0;
};

struct RankedResult {
    std::uint32_t mask = 0;
    std::string learner;
    std::vector<std::string> subset_names;
    std::vector<RankedService> services;

    nlohmann::json to_json() const {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& s : services)
            rows.push_back({{"service", s.id}, {"class", s.label}, {"probability", s.probability}});
        return {{"format_version", 1},
                {"subset", subset_names},
                {"learner", learner},
                {"services", std::move(rows)}};
    }
};

// Predict every candidate with the cell's model and rank by declared class
// order (best first), then probability, keeping input order for ties.
inline RankedResult query_cube(const std::string& dir, std::uint32_t mask,
                               const std::string& learner, const Dataset& services,
                               const std::vector<std::string>& ids) {
    CubeIndex idx = load_cube_index(dir);
    const CubeCellRef* cell = idx.find(mask, learner);
    if (!cell || cell->status != "built") {
        std::string names;
        for (const auto& n : names_from_mask(idx.parameters, mask))
            names += (names.empty() ? "" : ", ") + n;
        throw Error(errc::cube, std::string(cell ? "cell failed for" : "no cube cell for") +
                                    " subset {" + names + "} with learner " + learner);
    }
    if (cell->fingerprint != idx.dataset_fingerprint)
        throw Error(errc::cube, "cube cell is stale; rebuild required");
    if (idx.class_order.empty())
        throw Error(errc::cube,
                    "dataset metadata declares no class order; ranking refused");
    auto model = load_cube_cell(dir, *cell);

    // Candidates are matched to the cell schema by attribute name.
    const auto& schema = model->schema();
    std::vector<std::size_t> source_col(schema.attributes.size(), Attribute::npos);
    for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
        if (a == schema.class_index) continue;
        for (std::size_t s = 0; s < services.num_attributes(); ++s)
            if (services.attribute(s).name == schema.attributes[a].name) source_col[a] = s;
        if (source_col[a] == Attribute::npos)
            throw Error(errc::schema, "candidate services are missing parameter " +
                                          schema.attributes[a].name);
    }

    auto class_rank = [&](const std::string& label) {
        for (std::size_t i = 0; i < idx.class_order.size(); ++i)
            if (idx.class_order[i] == label) return i;
        throw Error(errc::cube, "class '" + label + "' is not in the declared class order");
    };

    struct Row {
        std::size_t input_pos;
        std::size_t rank;
        RankedService service;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < services.size(); ++i) {
        Instance x;
        x.values.assign(schema.attributes.size(), missing_value());
        for (std::size_t a = 0; a < schema.attributes.size(); ++a)
            if (a != schema.class_index) x.values[a] = services.instance(i).values[source_col[a]];
        ClassDistribution dist = model->predict(x);
        std::size_t label = dist.argmax();
        RankedService s;
        s.id = i < ids.size() ? ids[i] : "row" + std::to_string(i + 1);
        s.label = schema.class_label(label);
        s.probability = dist.probabilities()[label];
        rows.push_back({i, class_rank(s.label), std::move(s)});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        return a.service.probability > b.service.probability + 1e-12;
    });

    RankedResult result;
    result.mask = mask;
    result.learner = learner;
    result.subset_names = names_from_mask(idx.parameters, mask);
    for (auto& r : rows) result.services.push_back(std::move(r.service));
    return result;
}

inline std::string render_ranked(const RankedResult& r) {
    std::ostringstream out;
    out << "Ranking by {";
    for (std::size_t i = 0; i < r.subset_names.size(); ++i)
        out << (i ? ", " : "") << r.subset_names[i];
    out << "} with " << r.learner << "\n";
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < r.services.size(); ++i) {
        std::ostringstream prob;
        prob << std::fixed << std::setprecision(4) << r.services[i].probability;
        rows.push_back({std::to_string(i + 1), r.services[i].id, r.services[i].label, prob.str()});
    }
    out << detail::render_table({"#", "Service", "Class", "Probability"}, rows);
    return out.str();
}

}  // namespace qosrank
