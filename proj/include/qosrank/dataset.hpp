#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qosrank/distribution.hpp"
#include "qosrank/error.hpp"
#include "qosrank/random.hpp"

namespace qosrank {

enum class AttrKind { numeric, nominal };

struct Attribute {
    std::string name;
    AttrKind kind = AttrKind::numeric;
    std::string unit;                 // informational only
    std::vector<std::string> labels;  // nominal value labels, unique, ordered

    std::size_t label_index(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return i;
        return npos;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Cells are doubles: numeric values directly, nominal values as label
// indices, NaN as the missing marker.
inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

struct Instance {
    std::vector<double> values;
    double weight = 1.0;
};

namespace detail {

// Shortest text that parses back to the same double; keeps CSV and JSON
// round-trips exact.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

inline std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace detail

// Immutable after load; shared freely across threads.
class Dataset {
public:
    Dataset() = default;

    Dataset(std::vector<Attribute> attributes, std::size_t class_index)
        : attributes_(std::move(attributes)), class_index_(class_index) {
        validate_schema();
    }

    // Schema without a class attribute (candidate services for ranking).
    explicit Dataset(std::vector<Attribute> attributes)
        : attributes_(std::move(attributes)), class_index_(no_class) {}

    static constexpr std::size_t no_class = static_cast<std::size_t>(-1);

    const std::vector<Attribute>& attributes() const { return attributes_; }
    const Attribute& attribute(std::size_t i) const { return attributes_[i]; }
    std::size_t num_attributes() const { return attributes_.size(); }

    bool has_class() const { return class_index_ != no_class; }
    std::size_t class_index() const { return class_index_; }

    const Attribute& class_attribute() const {
        require_class();
        return attributes_[class_index_];
    }

    std::size_t num_classes() const { return class_attribute().labels.size(); }
    const std::string& class_label(std::size_t i) const { return class_attribute().labels[i]; }

    const std::vector<Instance>& instances() const { return instances_; }
    const Instance& instance(std::size_t i) const { return instances_[i]; }
    std::size_t size() const { return instances_.size(); }
    bool empty() const { return instances_.empty(); }

    double total_weight() const {
        double w = 0.0;
        for (const auto& inst : instances_) w += inst.weight;
        return w;
    }

    std::size_t class_of(const Instance& inst) const {
        require_class();
        return static_cast<std::size_t>(inst.values[class_index_]);
    }

    void add(Instance inst) {
        if (inst.values.size() != attributes_.size())
            throw Error(errc::schema, "instance has " + std::to_string(inst.values.size()) +
                                          " cells, schema has " + std::to_string(attributes_.size()));
        if (inst.weight < 0.0) throw Error(errc::schema, "instance weight must be non-negative");
        if (has_class()) {
            double cls = inst.values[class_index_];
            if (is_missing(cls)) throw Error(errc::schema, "class cell is missing");
            auto idx = static_cast<std::size_t>(cls);
            if (idx >= num_classes()) throw Error(errc::schema, "class index out of range");
        }
        instances_.push_back(std::move(inst));
    }

    // Columns restricted to `keep` (class column implied when present);
    // attribute order follows the original schema.
    Dataset project(const std::vector<std::size_t>& keep) const {
        std::vector<std::size_t> cols(keep);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        for (std::size_t c : cols)
            if (c >= attributes_.size() || (has_class() && c == class_index_))
                throw Error(errc::schema, "projection column out of range");
        std::vector<Attribute> attrs;
        std::size_t new_class = no_class;
        for (std::size_t c : cols) attrs.push_back(attributes_[c]);
        if (has_class()) {
            new_class = attrs.size();
            attrs.push_back(attributes_[class_index_]);
            cols.push_back(class_index_);
        }
        Dataset out;
        out.attributes_ = std::move(attrs);
        out.class_index_ = new_class;
        if (out.has_class()) out.validate_schema();
        for (const auto& inst : instances_) {
            Instance p;
            p.weight = inst.weight;
            p.values.reserve(cols.size());
            for (std::size_t c : cols) p.values.push_back(inst.values[c]);
            out.instances_.push_back(std::move(p));
        }
        return out;
    }

    Dataset with_instances(const std::vector<std::size_t>& indices) const {
        Dataset out;
        out.attributes_ = attributes_;
        out.class_index_ = class_index_;
        out.instances_.reserve(indices.size());
        for (std::size_t i : indices) out.instances_.push_back(instances_[i]);
        return out;
    }

    // Covers schema and cell contents; cube cells use it to detect stale data.
    std::string fingerprint() const {
        std::uint64_t h = detail::fnv1a64(schema_canonical());
        for (const auto& inst : instances_) {
            std::string row;
            for (double v : inst.values) {
                row += is_missing(v) ? std::string("?") : detail::format_double(v);
                row += '|';
            }
            row += detail::format_double(inst.weight);
            row += '\n';
            h = detail::fnv1a64(row, h);
        }
        return detail::hex64(h);
    }

    std::string schema_fingerprint() const {
        return detail::hex64(detail::fnv1a64(schema_canonical()));
    }

    void check_compatible(const Instance& x) const {
        if (x.values.size() != attributes_.size())
            throw Error(errc::schema, "instance arity does not match schema");
    }

private:
    void require_class() const {
        if (!has_class()) throw Error(errc::schema, "dataset has no class attribute");
    }

    void validate_schema() {
        if (class_index_ == no_class) return;
        if (class_index_ >= attributes_.size())
            throw Error(errc::schema, "class index out of range");
        const Attribute& cls = attributes_[class_index_];
        if (cls.kind != AttrKind::nominal)
            throw Error(errc::schema, "class attribute must be nominal");
        for (const auto& a : attributes_) {
            if (a.kind == AttrKind::nominal) {
                for (std::size_t i = 0; i < a.labels.size(); ++i)
                    for (std::size_t j = i + 1; j < a.labels.size(); ++j)
                        if (a.labels[i] == a.labels[j])
                            throw Error(errc::schema, "duplicate nominal label '" + a.labels[i] +
                                                          "' in attribute " + a.name);
            }
        }
    }

    std::string schema_canonical() const {
        std::string s;
        for (const auto& a : attributes_) {
            s += a.name;
            s += a.kind == AttrKind::numeric ? "#num" : "#nom";
            for (const auto& l : a.labels) {
                s += ':';
                s += l;
            }
            s += ';';
        }
        s += "class=" + (has_class() ? std::to_string(class_index_) : std::string("none"));
        return s;
    }

    std::vector<Attribute> attributes_;
    std::vector<Instance> instances_;
    std::size_t class_index_ = no_class;
};

// The nine QWS quality parameters, in table order, plus a nominal class.
inline std::vector<Attribute> qws_attributes(std::vector<std::string> class_labels) {
    std::vector<Attribute> attrs = {
        {"ResponseTime", AttrKind::numeric, "ms", {}},
        {"Availability", AttrKind::numeric, "%", {}},
        {"Throughput", AttrKind::numeric, "invokes/s", {}},
        {"Successability", AttrKind::numeric, "%", {}},
        {"Reliability", AttrKind::numeric, "%", {}},
        {"Compliance", AttrKind::numeric, "%", {}},
        {"BestPractices", AttrKind::numeric, "%", {}},
        {"Latency", AttrKind::numeric, "ms", {}},
        {"Documentation", AttrKind::numeric, "%", {}},
    };
    Attribute cls;
    cls.name = "Class";
    cls.kind = AttrKind::nominal;
    cls.labels = std::move(class_labels);
    attrs.push_back(std::move(cls));
    return attrs;
}

inline constexpr std::size_t qws_parameter_count = 9;

// Sidecar describing attribute kinds, units, class label order and the
// best-first ranking order. Written by the CLI next to each CSV it emits.
struct DatasetMeta {
    int format_version = 1;
    std::vector<Attribute> attributes;  // includes the class attribute
    std::string class_name;
    std::vector<std::string> class_order_best_first;  // empty = undeclared
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        nlohmann::json attrs = nlohmann::json::array();
        for (const auto& a : attributes) {
            nlohmann::json j{{"name", a.name},
                             {"kind", a.kind == AttrKind::numeric ? "numeric" : "nominal"},
                             {"unit", a.unit}};
            if (a.kind == AttrKind::nominal) j["labels"] = a.labels;
            attrs.push_back(std::move(j));
        }
        nlohmann::json j{{"format_version", format_version},
                         {"attributes", attrs},
                         {"class", {{"name", class_name}}},
                         {"seed", seed}};
        if (!class_order_best_first.empty())
            j["class"]["order_best_first"] = class_order_best_first;
        return j;
    }

    static DatasetMeta from_json(const nlohmann::json& j) {
        DatasetMeta m;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != 1)
            throw Error(errc::parse, "unsupported metadata format version " +
                                         std::to_string(m.format_version));
        for (const auto& ja : j.at("attributes")) {
            Attribute a;
            a.name = ja.at("name").get<std::string>();
            a.kind = ja.at("kind").get<std::string>() == "nominal" ? AttrKind::nominal
                                                                   : AttrKind::numeric;
            a.unit = ja.value("unit", std::string());
            if (ja.contains("labels")) a.labels = ja.at("labels").get<std::vector<std::string>>();
            m.attributes.push_back(std::move(a));
        }
        m.class_name = j.at("class").at("name").get<std::string>();
        if (j.at("class").contains("order_best_first"))
            m.class_order_best_first =
                j.at("class").at("order_best_first").get<std::vector<std::string>>();
        m.seed = j.value("seed", std::uint64_t{0});
        return m;
    }
};

inline void save_meta(const DatasetMeta& meta, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot write " + path);
    out << meta.to_json().dump(2) << "\n";
}

inline DatasetMeta load_meta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::parse, path + ": " + e.what());
    }
    return DatasetMeta::from_json(j);
}

inline std::string meta_path_for(const std::string& csv_path) { return csv_path + ".meta.json"; }

struct CsvOptions {
    // Class column: by name when set, otherwise the last column; "none"
    // loads an unlabeled candidates file.
    std::optional<std::string> class_column;
    bool no_class = false;
    bool allow_empty = false;  // candidate lists may be empty; training data may not
    std::optional<DatasetMeta> meta;  // overrides inference when present
};

// Header row is mandatory; "?" marks a missing cell; row numbers in errors
// count data rows, 1-based.
inline Dataset load_csv(const std::string& path, const CsvOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot read " + path);

    std::string line;
    if (!std::getline(in, line)) throw Error(errc::parse, path + ": empty file");
    std::vector<std::string> header = detail::split_csv_line(line);
    if (header.empty() || (header.size() == 1 && header[0].empty()))
        throw Error(errc::parse, path + ": empty header");

    std::vector<std::vector<std::string>> rows;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw Error(errc::parse, path + ": row " + std::to_string(row_no) + ": expected " +
                                         std::to_string(header.size()) + " cells, got " +
                                         std::to_string(cells.size()));
        rows.push_back(std::move(cells));
    }
    if (rows.empty() && !opts.allow_empty) throw Error(errc::parse, path + ": no instances");

    std::size_t class_col = Dataset::no_class;
    if (!opts.no_class) {
        if (opts.class_column) {
            for (std::size_t i = 0; i < header.size(); ++i)
                if (header[i] == *opts.class_column) class_col = i;
            if (class_col == Dataset::no_class)
                throw Error(errc::parse, path + ": class column '" + *opts.class_column +
                                             "' not in header");
        } else {
            class_col = header.size() - 1;
        }
    }

    std::vector<Attribute> attrs(header.size());
    if (opts.meta) {
        const auto& meta_attrs = opts.meta->attributes;
        if (meta_attrs.size() != header.size())
            throw Error(errc::parse, path + ": header does not match metadata (" +
                                         std::to_string(header.size()) + " vs " +
                                         std::to_string(meta_attrs.size()) + " columns)");
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (meta_attrs[i].name != header[i])
                throw Error(errc::parse, path + ": header column '" + header[i] +
                                             "' does not match metadata attribute '" +
                                             meta_attrs[i].name + "'");
            attrs[i] = meta_attrs[i];
        }
    } else {
        for (std::size_t i = 0; i < header.size(); ++i) {
            attrs[i].name = header[i];
            bool numeric = i != class_col;
            for (const auto& row : rows) {
                if (row[i] == "?") continue;
                double v;
                if (!detail::parse_double(row[i], v)) {
                    numeric = false;
                    break;
                }
            }
            attrs[i].kind = numeric ? AttrKind::numeric : AttrKind::nominal;
        }
    }

    // Nominal labels register in first-appearance order unless metadata
    // already fixed them.
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (attrs[i].kind != AttrKind::nominal || rows[r][i] == "?") continue;
            if (attrs[i].label_index(rows[r][i]) == Attribute::npos) {
                if (opts.meta)
                    throw Error(errc::parse, path + ": row " + std::to_string(r + 1) +
                                                 ": label '" + rows[r][i] +
                                                 "' not declared in metadata for " + attrs[i].name);
                attrs[i].labels.push_back(rows[r][i]);
            }
        }
    }

    Dataset ds = class_col == Dataset::no_class ? Dataset(std::move(attrs))
                                                : Dataset(std::move(attrs), class_col);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Instance inst;
        inst.values.reserve(header.size());
        for (std::size_t i = 0; i < header.size(); ++i) {
            const std::string& cell = rows[r][i];
            const Attribute& a = ds.attribute(i);
            if (cell == "?") {
                if (i == class_col)
                    throw Error(errc::parse,
                                path + ": row " + std::to_string(r + 1) + ": missing class cell");
                inst.values.push_back(missing_value());
            } else if (a.kind == AttrKind::numeric) {
                double v;
                if (!detail::parse_double(cell, v))
                    throw Error(errc::parse, path + ": row " + std::to_string(r + 1) +
                                                 ": non-numeric cell '" + cell + "' in column " +
                                                 a.name);
                inst.values.push_back(v);
            } else {
                inst.values.push_back(static_cast<double>(a.label_index(cell)));
            }
        }
        ds.add(std::move(inst));
    }
    return ds;
}

inline void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot write " + path);
    for (std::size_t i = 0; i < d.num_attributes(); ++i)
        out << (i ? "," : "") << d.attribute(i).name;
    out << "\n";
    for (const auto& inst : d.instances()) {
        for (std::size_t i = 0; i < d.num_attributes(); ++i) {
            if (i) out << ",";
            double v = inst.values[i];
            if (is_missing(v))
                out << "?";
            else if (d.attribute(i).kind == AttrKind::nominal)
                out << d.attribute(i).labels[static_cast<std::size_t>(v)];
            else
                out << detail::format_double(v);
        }
        out << "\n";
    }
}

// Disjoint, exhaustive, per-class counts within 1 across folds, and a pure
// function of (dataset, k, seed).
struct FoldAssignment {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> fold_of;  // one entry per instance

    std::vector<std::size_t> test_indices(std::size_t fold) const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < fold_of.size(); ++i)
            if (fold_of[i] == fold) idx.push_back(i);
        return idx;
    }

    std::vector<std::size_t> train_indices(std::size_t fold) const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < fold_of.size(); ++i)
            if (fold_of[i] != fold) idx.push_back(i);
        return idx;
    }
};

// Seeded shuffle, then group by class and deal round-robin. The fold
// counter runs on across classes, so k = |D| degenerates to leave-one-out
// while each class still spreads within one instance of evenly.
inline FoldAssignment stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error(errc::eval, "fold count must be at least 2");
    if (k > d.size())
        throw Error(errc::eval, "fold count " + std::to_string(k) + " exceeds instance count " +
                                    std::to_string(d.size()));
    std::vector<std::size_t> order(d.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitRng rng(seed);
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> by_class(d.num_classes());
    for (std::size_t i : order) by_class[d.class_of(d.instance(i))].push_back(i);

    FoldAssignment fa;
    fa.k = k;
    fa.seed = seed;
    fa.fold_of.assign(d.size(), 0);
    std::size_t dealt = 0;
    for (const auto& members : by_class)
        for (std::size_t i : members) fa.fold_of[i] = dealt++ % k;
    return fa;
}

// p_i = class weight / total weight.
inline ClassDistribution class_distribution(const Dataset& d) {
    if (d.empty()) throw Error(errc::eval, "empty dataset has no class distribution");
    ClassDistribution dist(d.num_classes());
    for (const auto& inst : d.instances()) dist.add(d.class_of(inst), inst.weight);
    return dist;
}

}  // namespace qosrank
