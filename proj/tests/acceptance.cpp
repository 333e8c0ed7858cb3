// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Exercises the library directly and the CLI binary for the determinism
// criterion.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace qosrank;

namespace {

struct Criterion {
    std::string name;
    std::vector<std::string> failures;
    double seconds = 0.0;

    void check(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    template <typename T>
    void check_eq(const T& a, const T& b, const std::string& what) {
        if (!(a == b)) {
            std::ostringstream s;
            s << what << " (got " << a << ", want " << b << ")";
            failures.push_back(s.str());
        }
    }
    void check_near(double a, double b, double tol, const std::string& what) {
        if (!(std::fabs(a - b) <= tol)) {
            std::ostringstream s;
            s.precision(12);
            s << what << " (got " << a << ", want " << b << " +/- " << tol << ")";
            failures.push_back(s.str());
        }
    }
    void check_time(double limit) {
        if (seconds >= limit) {
            std::ostringstream s;
            s << "runtime " << seconds << " s exceeds " << limit << " s";
            failures.push_back(s.str());
        }
    }
};

int run_cli(const std::string& args) {
    std::string cmd = std::string(QOSRANK_CLI) + " " + args;
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

double training_accuracy(const ModelBase& m, const Dataset& d) {
    double correct = 0.0;
    for (const auto& inst : d.instances())
        if (m.predict_label(inst) == d.class_of(inst)) correct += inst.weight;
    return correct / d.total_weight();
}

// ---- criterion bodies ------------------------------------------------------

void criterion_zeror_anchor(Criterion& c, const Dataset& d) {
    auto rep = cross_validate(d, LearnerSpec::of("zeror"), 10, 1);
    c.check_near(rep.accuracy, 32.967, 0.01, "ZeroR 10-fold CV accuracy");
    c.check_eq(rep.correct, 120.0, "ZeroR correctly classified instances");
    c.check_near(rep.rae, 100.0, 1e-6, "ZeroR relative absolute error");
    c.check_near(rep.rrse, 100.0, 1e-6, "ZeroR root relative squared error");
}

void criterion_perfect_learner(Criterion& c, const Dataset& d) {
    auto rep = cross_validate(d, LearnerSpec::of("jrip"), 10, 1);
    c.check(rep.correct >= 362.0, "JRip 10-fold CV correct >= 362 (got " +
                                      std::to_string(rep.correct) + ")");
    if (rep.correct == 364.0) {
        c.check_eq(rep.mae, 0.0, "JRip MAE at perfection");
        c.check_eq(rep.rmse, 0.0, "JRip RMSE at perfection");
        c.check_eq(rep.rae, 0.0, "JRip RAE at perfection");
        c.check_eq(rep.rrse, 0.0, "JRip RRSE at perfection");
    }
    // zero-iff-perfect identity, asserted unconditionally at the metric level
    std::vector<LabeledPrediction> perfect = {{{1, 0}, 0, 1.0, {0.5, 0.5}},
                                              {{0, 1}, 1, 1.0, {0.5, 0.5}}};
    c.check_eq(mae(perfect), 0.0, "MAE of perfect one-hot predictions");
    c.check_eq(rmse(perfect), 0.0, "RMSE of perfect one-hot predictions");
    c.check_eq(rae(perfect), 0.0, "RAE of perfect one-hot predictions");
    c.check_eq(rrse(perfect), 0.0, "RRSE of perfect one-hot predictions");
    std::vector<LabeledPrediction> off = {{{1, 0}, 0, 1.0, {0.5, 0.5}},
                                          {{0.999, 0.001}, 1, 1.0, {0.5, 0.5}}};
    c.check(mae(off) > 0.0 && rmse(off) > 0.0 && rae(off) > 0.0 && rrse(off) > 0.0,
            "imperfect predictions must score above zero");
}

void criterion_ordering(Criterion& c, const Dataset& d) {
    std::vector<std::string> names = {"decision-stump", "j48", "reptree", "part", "jrip",
                                      "zeror"};
    std::map<std::string, double> acc;
    for (const auto& n : names) acc[n] = cross_validate(d, LearnerSpec::of(n), 10, 1).accuracy;
    for (const auto& strong : {"j48", "reptree", "part", "jrip"})
        c.check(acc["decision-stump"] < acc[strong],
                std::string("stump must trail ") + strong + " (" +
                    std::to_string(acc["decision-stump"]) + " vs " +
                    std::to_string(acc[strong]) + ")");
    for (const auto& n : {"decision-stump", "j48", "reptree", "part", "jrip"})
        c.check(acc["zeror"] < acc[n], std::string("zeror must be strictly worst vs ") + n);
}

void criterion_split_oracle(Criterion& c) {
    SplitRng rng(20240807);
    std::size_t checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Dataset d = testsupport::random_dataset(rng, 20, 4);
        ClassDistribution parent = class_distribution(d);
        Refs refs = all_refs(d);
        for (std::size_t a = 0; a + 1 < d.num_attributes(); ++a) {
            std::vector<SplitCandidate> cands;
            if (d.attribute(a).kind == AttrKind::numeric) {
                cands = numeric_split_candidates(d, refs, a);
            } else if (auto cand = nominal_split_candidate(d, refs, a)) {
                cands.push_back(std::move(*cand));
            }
            for (const auto& cand : cands) {
                auto oracle =
                    testsupport::oracle_scores(testsupport::oracle_contingency(d, refs, cand));
                double gain = information_gain(parent, cand);
                if (std::fabs(gain - oracle.information_gain) > 1e-12) {
                    c.failures.push_back("information gain mismatch at trial " +
                                         std::to_string(trial));
                    return;
                }
                if (gain < -1e-12) {
                    c.failures.push_back("negative information gain");
                    return;
                }
                if (auto ratio = gain_ratio(parent, cand)) {
                    double expect = oracle.information_gain / oracle.split_info;
                    if (std::fabs(*ratio - expect) > 1e-12) {
                        c.failures.push_back("gain ratio mismatch at trial " +
                                             std::to_string(trial));
                        return;
                    }
                }
                if (cand.children.size() == 2) {
                    double red = gini_reduction(parent, cand);
                    if (std::fabs(red - oracle.gini_reduction) > 1e-12 || red < -1e-12) {
                        c.failures.push_back("gini reduction mismatch at trial " +
                                             std::to_string(trial));
                        return;
                    }
                }
                ++checked;
            }
        }
    }
    c.check(checked > 2000, "oracle suite exercised too few candidates");
}

void criterion_learner_properties(Criterion& c, const Dataset& qws) {
    SplitRng rng(555);

    // unpruned trees are exact on contradiction-free data
    for (int t = 0; t < 20; ++t) {
        Dataset d = testsupport::random_rule_dataset(rng, 40, 3, 3);
        TreeParams p;
        p.min_leaf_weight = 1.0;
        if (training_accuracy(*induce(d, p), d) != 1.0) {
            c.failures.push_back("unpruned tree below 100% training accuracy");
            break;
        }
    }

    // pruning never grows the tree
    {
        SplitRng noise(17);
        std::vector<std::vector<double>> rows;
        for (const auto& inst : qws.instances()) {
            auto vals = inst.values;
            if (noise.next_below(10) == 0)
                vals.back() = static_cast<double>(noise.next_below(4));
            rows.push_back(vals);
        }
        Dataset noisy(qws.attributes(), qws.class_index());
        for (auto& r : rows) noisy.add({r, 1.0});
        auto pruned = train_reptree(noisy, {.pruning = PruningMode::reduced_error, .seed = 5});
        auto grown = train_reptree(noisy, {.pruning = PruningMode::none, .seed = 5});
        c.check(pruned->node_count() <= grown->node_count(),
                "pruned REPTree larger than its unpruned twin");
        auto j_pruned = train_j48(noisy, {.pruning = PruningMode::confidence});
        auto j_grown = train_j48(noisy, {.pruning = PruningMode::none});
        c.check(j_pruned->node_count() <= j_grown->node_count(),
                "pruned J48 larger than its unpruned twin");
    }

    // decision lists always end in a default rule
    for (int t = 0; t < 10; ++t) {
        Dataset d = testsupport::random_dataset(rng, 30, 3, 3);
        for (auto name : {"zeror", "oner", "part", "jrip"}) {
            auto model = train_model(d, LearnerSpec::of(name), 1);
            auto* list = dynamic_cast<const DecisionListModel*>(model.get());
            if (!list || list->rules().empty() || !list->rules().back().is_default()) {
                c.failures.push_back(std::string(name) + " list lacks a default rule");
                break;
            }
        }
    }

    // degenerate forest equals the random tree
    {
        TreeParams p;
        p.forest_size = 1;
        p.bagging = false;
        p.seed = 77;
        auto forest = train_random_forest(qws, p);
        TreeParams q;
        q.seed = 77;
        auto tree = train_random_tree(qws, q);
        for (const auto& inst : qws.instances()) {
            if (forest->predict(inst).probabilities() != tree->predict(inst).probabilities()) {
                c.failures.push_back("forest(T=1, no bagging) differs from the random tree");
                break;
            }
        }
    }

    // stratified folds within one, 500 random triples
    for (int t = 0; t < 500; ++t) {
        Dataset d = testsupport::random_dataset(rng, 50, 2);
        std::size_t k = 2 + rng.next_below(std::min<std::size_t>(d.size() - 1, 9));
        auto fa = stratified_folds(d, k, rng.next());
        std::vector<std::vector<int>> counts(k, std::vector<int>(d.num_classes(), 0));
        for (std::size_t i = 0; i < d.size(); ++i)
            counts[fa.fold_of[i]][d.class_of(d.instance(i))]++;
        for (std::size_t cls = 0; cls < d.num_classes(); ++cls) {
            int lo = 1 << 30, hi = -1;
            for (std::size_t f = 0; f < k; ++f) {
                lo = std::min(lo, counts[f][cls]);
                hi = std::max(hi, counts[f][cls]);
            }
            if (hi - lo > 1) {
                c.failures.push_back("stratification off by more than one");
                t = 500;
                break;
            }
        }
    }
}

void criterion_metric_oracle(Criterion& c) {
    SplitRng rng(90210);
    for (int t = 0; t < 200; ++t) {
        std::size_t m = 2 + rng.next_below(4);
        std::size_t n = 1 + rng.next_below(60);
        std::vector<double> prior(m, 0.0);
        double ptotal = 0.0;
        for (auto& q : prior) {
            q = 1.0 + static_cast<double>(rng.next_below(9));
            ptotal += q;
        }
        for (auto& q : prior) q /= ptotal;

        std::vector<LabeledPrediction> preds;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> p(m, 0.0);
            double total = 0.0;
            for (auto& x : p) {
                x = static_cast<double>(rng.next_below(10)) + 0.01;
                total += x;
            }
            for (auto& x : p) x /= total;
            LabeledPrediction pr;
            pr.predicted = std::move(p);
            pr.truth = rng.next_below(m);
            pr.prior = prior;
            preds.push_back(std::move(pr));
        }

        double abs_num = 0, abs_den = 0, sq_num = 0, sq_den = 0, weight = 0;
        for (const auto& pr : preds) {
            weight += pr.weight;
            for (std::size_t k = 0; k < m; ++k) {
                double y = k == pr.truth ? 1.0 : 0.0;
                abs_num += std::fabs(pr.predicted[k] - y);
                abs_den += std::fabs(pr.prior[k] - y);
                sq_num += (pr.predicted[k] - y) * (pr.predicted[k] - y);
                sq_den += (pr.prior[k] - y) * (pr.prior[k] - y);
            }
        }
        double md = static_cast<double>(m);
        if (std::fabs(mae(preds) - abs_num / (weight * md)) > 1e-12 ||
            std::fabs(rmse(preds) - std::sqrt(sq_num / (weight * md))) > 1e-12 ||
            std::fabs(rae(preds) - 100.0 * abs_num / abs_den) > 1e-12 ||
            std::fabs(rrse(preds) - 100.0 * std::sqrt(sq_num / sq_den)) > 1e-12) {
            c.failures.push_back("metric disagrees with naive re-accumulation at trial " +
                                 std::to_string(t));
            return;
        }
    }

    for (std::size_t m : {2u, 3u, 5u}) {
        std::vector<double> prior(m, 1.0 / static_cast<double>(m));
        prior[0] = 2.0 / static_cast<double>(m + 1);
        double rest = (1.0 - prior[0]) / static_cast<double>(m - 1);
        for (std::size_t k = 1; k < m; ++k) prior[k] = rest;
        std::vector<LabeledPrediction> preds;
        for (std::size_t i = 0; i < 30; ++i) {
            LabeledPrediction pr;
            pr.predicted = prior;
            pr.truth = i % m;
            pr.prior = prior;
            preds.push_back(std::move(pr));
        }
        c.check_eq(rae(preds), 100.0,
                   "prior predictor RAE for m=" + std::to_string(m));
        c.check_eq(rrse(preds), 100.0,
                   "prior predictor RRSE for m=" + std::to_string(m));
    }
}

void criterion_cube(Criterion& c, const Dataset& d, const DatasetMeta& meta) {
    testsupport::TempDir tmp("acceptance_cube");
    CubeBuildOptions opts;
    opts.learner = LearnerSpec::of("jrip");
    opts.seed = 1;

    auto idx = build_cube(d, meta.class_order_best_first, all_subset_masks(9), opts, tmp.str());
    std::size_t built = 0;
    for (const auto& cell : idx.cells)
        if (cell.status == "built") ++built;
    c.check_eq(built, static_cast<std::size_t>(511), "511 built cube cells");

    // full-subset cell against direct training
    std::uint32_t full = (1u << 9) - 1;
    auto cell_model = load_cube_cell(tmp.str(), *idx.find(full, "jrip"));
    auto direct = train_jrip(d, {.seed = 1});
    for (const auto& inst : d.instances()) {
        auto a = cell_model->predict(inst);
        auto b = direct->predict(inst);
        if (a.argmax() != b.argmax()) {
            c.failures.push_back("full-subset cube label differs from direct training");
            break;
        }
        bool close = true;
        for (std::size_t k = 0; k < d.num_classes(); ++k)
            if (std::fabs(a.count(k) - b.count(k)) > 1e-12) close = false;
        if (!close) {
            c.failures.push_back("full-subset cube distribution differs beyond 1e-12");
            break;
        }
    }

    // serialize -> load -> query round trip
    std::vector<Attribute> cand_attrs;
    for (std::size_t a : parameter_attribute_indices(d)) cand_attrs.push_back(d.attribute(a));
    Dataset cands(cand_attrs);
    for (std::size_t i = 0; i < 30; ++i) {
        Instance x;
        for (std::size_t a = 0; a < cand_attrs.size(); ++a)
            x.values.push_back(d.instance(i).values[a]);
        cands.add(std::move(x));
    }
    auto q1 = query_cube(tmp.str(), full, "jrip", cands, {});
    auto q2 = query_cube(tmp.str(), full, "jrip", cands, {});
    c.check(q1.to_json() == q2.to_json(), "cube query round trip differs");
    c.check_eq(q1.services.size(), cands.size(), "query covers every candidate");
}

void criterion_determinism(Criterion& c, const std::string& dir) {
    std::string csv = dir + "/det.csv";
    c.check_eq(run_cli("synth --out " + csv + " --seed 1 > /dev/null"), 0, "synth exit status");

    std::string a = dir + "/a.json", b = dir + "/b.json";
    c.check_eq(run_cli("evaluate --data " + csv +
                       " --learners zeror,jrip,j48,reptree --normalize --out " + a +
                       " > /dev/null"),
               0, "first evaluate exit status");
    c.check_eq(run_cli("evaluate --data " + csv +
                       " --learners zeror,jrip,j48,reptree --normalize --out " + b +
                       " > /dev/null"),
               0, "second evaluate exit status");
    c.check(testsupport::slurp(a) == testsupport::slurp(b) && !testsupport::slurp(a).empty(),
            "normalized evaluate reports are not byte-identical");

    std::string ca = dir + "/cube_a", cb = dir + "/cube_b";
    std::string subsets = "\"ResponseTime,Availability;Throughput;Latency,Documentation\"";
    c.check_eq(run_cli("cube --data " + csv + " --subsets " + subsets +
                       " --normalize --out-dir " + ca + " > /dev/null"),
               0, "first cube exit status");
    c.check_eq(run_cli("cube --data " + csv + " --subsets " + subsets +
                       " --normalize --out-dir " + cb + " > /dev/null"),
               0, "second cube exit status");
    c.check(testsupport::slurp(ca + "/index.json") == testsupport::slurp(cb + "/index.json"),
            "cube index files differ");
    auto idx = load_cube_index(ca);
    for (const auto& cell : idx.cells)
        c.check(testsupport::slurp(ca + "/" + cell.file) ==
                    testsupport::slurp(cb + "/" + cell.file),
                "cube cell differs: " + cell.file);
}

}  // namespace

int main() {
    auto [qws, meta] = synth_qws364(1);
    testsupport::TempDir scratch("acceptance_cli");

    struct Entry {
        std::string name;
        std::function<void(Criterion&)> body;
        double time_limit;  // seconds; 0 = none
    };
    std::vector<Entry> entries = {
        {"criterion 1: ZeroR anchor (accuracy 32.967, 120 correct, RAE/RRSE 100%)",
         [&](Criterion& c) { criterion_zeror_anchor(c, qws); }, 1.0},
        {"criterion 2: perfect-learner anchor (JRip >= 362/364, zero errors at perfection)",
         [&](Criterion& c) { criterion_perfect_learner(c, qws); }, 10.0},
        {"criterion 3: ordering anchor (stump below the strong four, ZeroR worst)",
         [&](Criterion& c) { criterion_ordering(c, qws); }, 0.0},
        {"criterion 4: split-criteria oracle suite (1000 random datasets, 1e-12)",
         [&](Criterion& c) { criterion_split_oracle(c); }, 30.0},
        {"criterion 5: learner property suite",
         [&](Criterion& c) { criterion_learner_properties(c, qws); }, 0.0},
        {"criterion 6: metric oracle suite (200 random prediction sets, priors exact)",
         [&](Criterion& c) { criterion_metric_oracle(c); }, 0.0},
        {"criterion 7: cube equivalence and 511-cell build under 60 s",
         [&](Criterion& c) { criterion_cube(c, qws, meta); }, 60.0},
        {"criterion 8: byte-identical normalized reports and cubes",
         [&](Criterion& c) { criterion_determinism(c, scratch.str()); }, 0.0},
    };

    int failures = 0;
    for (auto& entry : entries) {
        Criterion c;
        c.name = entry.name;
        auto start = std::chrono::steady_clock::now();
        try {
            entry.body(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (entry.time_limit > 0.0) c.check_time(entry.time_limit);

        if (c.failures.empty()) {
            std::printf("PASS  %s  (%.2fs)\n", c.name.c_str(), c.seconds);
        } else {
            ++failures;
            std::printf("FAIL  %s  (%.2fs)\n", c.name.c_str(), c.seconds);
            for (const auto& f : c.failures) std::printf("      - %s\n", f.c_str());
        }
    }
    return failures == 0 ? 0 : 1;
}
