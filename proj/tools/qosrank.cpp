// Command-line front end: synthesize datasets, train and inspect models,
// run the cross-validated learner comparison, and build/query model cubes.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qosrank/qosrank.hpp"

namespace {

using namespace qosrank;

std::string version_string() {
    return std::string("qosrank 1.0.0 (model format ") + std::to_string(model_format_version) +
           ", cube format " + std::to_string(cube_format_version) + ")";
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& raw) {
    std::map<std::string, std::string> out;
    for (const auto& p : raw) {
        auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(errc::args, "--param expects key=value, got '" + p + "'");
        out[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return out;
}

std::optional<DatasetMeta> meta_for(const std::string& data_path, const std::string& meta_path) {
    if (!meta_path.empty()) return load_meta(meta_path);
    std::string side = meta_path_for(data_path);
    if (std::filesystem::exists(side)) return load_meta(side);
    return std::nullopt;
}

Dataset load_training_data(const std::string& data_path, const std::string& meta_path,
                           std::optional<DatasetMeta>& meta_out) {
    CsvOptions opts;
    meta_out = meta_for(data_path, meta_path);
    if (meta_out) opts.meta = *meta_out;
    return load_csv(data_path, opts);
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            if (!cur.empty()) out.push_back(detail::trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!detail::trim(cur).empty()) out.push_back(detail::trim(cur));
    return out;
}

int cmd_synth(const std::string& out, std::uint64_t seed, const std::string& profile) {
    auto result = synthesize(profile, seed);
    save_csv(result.data, out);
    save_meta(result.meta, meta_path_for(out));
    std::cout << "wrote " << result.data.size() << " services to " << out << " (profile "
              << profile << ", seed " << seed << ")\n";
    return 0;
}

int cmd_train(const std::string& data_path, const std::string& meta_path,
              const std::string& learner, const std::string& out, std::uint64_t seed,
              const std::vector<std::string>& params) {
    std::optional<DatasetMeta> meta;
    Dataset d = load_training_data(data_path, meta_path, meta);
    LearnerSpec spec{learner, parse_params(params)};
    auto model = train_model(d, spec, seed);
    if (!out.empty()) {
        save_model(*model, out);
        std::cout << "model written to " << out << "\n";
    }
    std::cout << model->render();
    return 0;
}

int cmd_evaluate(const std::string& data_path, const std::string& meta_path,
                 const std::string& learners, std::size_t folds, std::uint64_t seed,
                 const std::string& out, bool normalize,
                 const std::vector<std::string>& params) {
    std::optional<DatasetMeta> meta;
    Dataset d = load_training_data(data_path, meta_path, meta);
    std::vector<LearnerSpec> specs;
    auto overrides = parse_params(params);
    for (const auto& name : learners.empty() ? learner_names() : split_list(learners, ','))
        specs.push_back({name, overrides});
    auto cmp = compare_learners(d, specs, folds, seed);
    std::cout << render_comparison(cmp);
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw Error(errc::io, "cannot write " + out);
        f << cmp.to_json(normalize).dump(2) << "\n";
        std::cout << "report written to " << out << "\n";
    }
    for (const auto& row : cmp.rows)
        if (row.failed) return 1;
    return 0;
}

std::vector<std::uint32_t> parse_subsets(const std::string& text,
                                         const std::vector<std::string>& parameters) {
    if (text == "all") return all_subset_masks(parameters.size());
    std::vector<std::uint32_t> masks;
    for (const auto& subset : split_list(text, ';'))
        masks.push_back(mask_from_names(parameters, split_list(subset, ',')));
    if (masks.empty()) throw Error(errc::args, "no subsets given");
    return masks;
}

int cmd_cube(const std::string& data_path, const std::string& meta_path,
             const std::string& learner, const std::string& subsets, const std::string& out_dir,
             std::uint64_t seed, bool normalize, const std::vector<std::string>& params) {
    std::optional<DatasetMeta> meta;
    Dataset d = load_training_data(data_path, meta_path, meta);
    std::vector<std::string> parameters;
    for (std::size_t a : parameter_attribute_indices(d)) parameters.push_back(d.attribute(a).name);

    CubeBuildOptions opts;
    opts.learner = LearnerSpec{learner, parse_params(params)};
    opts.seed = seed;
    opts.normalize = normalize;
    auto masks = parse_subsets(subsets, parameters);
    auto idx = build_cube(d, meta ? meta->class_order_best_first : std::vector<std::string>{},
                          masks, opts, out_dir);
    std::size_t built = 0, failed = 0;
    for (const auto& c : idx.cells) (c.status == "built" ? built : failed)++;
    std::cout << "cube at " << out_dir << ": " << built << " cells built";
    if (failed) std::cout << ", " << failed << " failed";
    std::cout << "\n";
    return failed == 0 ? 0 : 1;
}

int cmd_rank(const std::string& cube_dir, const std::string& subset,
             const std::string& candidates_path, const std::string& learner,
             const std::string& out, bool build_missing, const std::string& data_path,
             const std::string& meta_path, std::uint64_t seed) {
    CubeIndex idx = load_cube_index(cube_dir);
    std::uint32_t mask = mask_from_names(idx.parameters, split_list(subset, ','));
    std::string learner_name = learner.empty() ? "jrip" : learner;

    if (!idx.find(mask, learner_name) && build_missing) {
        if (data_path.empty())
            throw Error(errc::args, "--build-missing needs --data to train the cell");
        std::optional<DatasetMeta> meta;
        Dataset d = load_training_data(data_path, meta_path, meta);
        CubeBuildOptions opts;
        opts.learner = LearnerSpec::of(learner_name);
        opts.seed = seed;
        build_cube(d, meta ? meta->class_order_best_first : std::vector<std::string>{}, {mask},
                   opts, cube_dir);
    }

    CsvOptions copts;
    copts.no_class = true;
    copts.allow_empty = true;
    Dataset services = load_csv(candidates_path, copts);
    std::vector<std::string> ids;
    for (std::size_t a = 0; a < services.num_attributes(); ++a) {
        if (services.attribute(a).name != "Service") continue;
        const Attribute& attr = services.attribute(a);
        for (const auto& inst : services.instances()) {
            double v = inst.values[a];
            ids.push_back(is_missing(v) ? "?" : attr.labels[static_cast<std::size_t>(v)]);
        }
        break;
    }
    auto result = query_cube(cube_dir, mask, learner_name, services, ids);
    std::cout << render_ranked(result);
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw Error(errc::io, "cannot write " + out);
        f << result.to_json().dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QoS-driven classification and ranking of web services"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(0, 1);

    std::string data, meta, out, learner, learners, profile = "qws364", subsets = "all";
    std::string cube_dir, subset, candidates;
    std::uint64_t seed = 1;
    std::size_t folds = 10;
    bool normalize = false, build_missing = false;
    std::vector<std::string> params;

    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic QWS dataset");
    synth->add_option("--out", out, "Output CSV path")->required();
    synth->add_option("--seed", seed, "Generator seed");
    synth->add_option("--profile", profile, "Dataset profile: qws364 or tiny");

    auto* train = app.add_subcommand("train", "Train one model and print it");
    train->add_option("--data", data, "Training CSV")->required();
    train->add_option("--meta", meta, "Dataset metadata sidecar");
    train->add_option("--learner", learner, "Learner name")->required();
    train->add_option("--out", out, "Model output path");
    train->add_option("--seed", seed, "Training seed");
    train->add_option("--param", params, "Learner parameter key=value (repeatable)");

    auto* evaluate = app.add_subcommand("evaluate", "Cross-validated learner comparison");
    evaluate->add_option("--data", data, "Training CSV")->required();
    evaluate->add_option("--meta", meta, "Dataset metadata sidecar");
    evaluate->add_option("--learners", learners, "Comma-separated learner names (default: all)");
    evaluate->add_option("--folds", folds, "Cross-validation folds");
    evaluate->add_option("--seed", seed, "Fold and training seed");
    evaluate->add_option("--out", out, "Machine-readable report path (JSON)");
    evaluate->add_flag("--normalize", normalize, "Omit build times from the report");
    evaluate->add_option("--param", params, "Learner parameter key=value (repeatable)");

    auto* cube = app.add_subcommand("cube", "Pre-build models for quality-parameter subsets");
    cube->add_option("--data", data, "Training CSV")->required();
    cube->add_option("--meta", meta, "Dataset metadata sidecar");
    cube->add_option("--learner", learner, "Learner name")->default_val("jrip");
    cube->add_option("--subsets", subsets,
                     "'all' or semicolon-separated comma lists of parameter names");
    cube->add_option("--out-dir", cube_dir, "Cube directory")->required();
    cube->add_option("--seed", seed, "Training seed");
    cube->add_flag("--normalize", normalize, "Omit timestamps and build times from cells");
    cube->add_option("--param", params, "Learner parameter key=value (repeatable)");

    auto* rank = app.add_subcommand("rank", "Rank candidate services with a cube cell");
    rank->add_option("--cube-dir", cube_dir, "Cube directory")->required();
    rank->add_option("--subset", subset, "Comma-separated quality parameter names")->required();
    rank->add_option("--candidates", candidates, "Candidate services CSV (no class column)")
        ->required();
    rank->add_option("--learner", learner, "Learner name (default jrip)");
    rank->add_option("--out", out, "Ranked result path (JSON)");
    rank->add_flag("--build-missing", build_missing, "Train the cell on demand if absent");
    rank->add_option("--data", data, "Training CSV (for --build-missing)");
    rank->add_option("--meta", meta, "Dataset metadata sidecar");
    rank->add_option("--seed", seed, "Training seed (for --build-missing)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(out, seed, profile);
        if (train->parsed()) return cmd_train(data, meta, learner, out, seed, params);
        if (evaluate->parsed())
            return cmd_evaluate(data, meta, learners, folds, seed, out, normalize, params);
        if (cube->parsed())
            return cmd_cube(data, meta, learner, subsets, cube_dir, seed, normalize, params);
        if (rank->parsed())
            return cmd_rank(cube_dir, subset, candidates, learner, out, build_missing, data,
                            meta, seed);
        std::cout << app.help();
        return 0;
    } catch (const qosrank::Error& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error[E_INTERNAL]: " << e.what() << "\n";
        return 1;
    }
}
