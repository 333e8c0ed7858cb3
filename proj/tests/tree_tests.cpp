#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace qosrank;
using testsupport::make_dataset;
using testsupport::nom_attr;
using testsupport::num_attr;

namespace {

double training_accuracy(const ModelBase& m, const Dataset& d) {
    double correct = 0.0;
    for (const auto& inst : d.instances())
        if (m.predict_label(inst) == d.class_of(inst)) correct += inst.weight;
    return correct / d.total_weight();
}

Dataset xor_dataset() {
    return make_dataset({nom_attr("a1", {"f", "t"}), nom_attr("a2", {"f", "t"}),
                         nom_attr("cls", {"A", "B"})},
                        2, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
}

}  // namespace

TEST_CASE("induction skeleton") {
    SECTION("single class stops immediately") {
        Dataset d = make_dataset({num_attr("x"), nom_attr("cls", {"A", "B"})}, 1,
                                 {{1, 0}, {2, 0}, {3, 0}});
        auto m = induce(d, {});
        REQUIRE(m->node_count() == 1);
        REQUIRE(m->predict(d.instance(0)).probabilities()[0] == 1.0);
    }

    SECTION("perfect nominal predictor wins at depth one") {
        Dataset d = make_dataset(
            {nom_attr("a1", {"x", "y", "z"}), nom_attr("a2", {"p", "q"}),
             nom_attr("cls", {"X", "Y", "Z"})},
            2,
            {{0, 0, 0}, {0, 1, 0}, {1, 0, 1}, {1, 1, 1}, {2, 0, 2}, {2, 1, 2}});
        TreeParams p;
        p.min_leaf_weight = 1.0;
        auto m = induce(d, p);
        REQUIRE(m->depth() == 1);
        REQUIRE(m->root().attribute == 0);
        REQUIRE(m->root().children.size() == 3);
        REQUIRE(training_accuracy(*m, d) == 1.0);
    }

    SECTION("xor needs both attributes: depth two, four pure leaves") {
        Dataset d = xor_dataset();
        // exhaustive check that no depth-1 tree separates xor: every
        // single-attribute split has zero gain
        ClassDistribution parent = class_distribution(d);
        for (std::size_t a = 0; a < 2; ++a) {
            auto cand = nominal_split_candidate(d, all_refs(d), a);
            REQUIRE(cand.has_value());
            REQUIRE(information_gain(parent, *cand) == Catch::Approx(0.0).margin(1e-12));
        }
        TreeParams p;
        p.min_leaf_weight = 1.0;
        auto m = induce(d, p);
        REQUIRE(m->depth() == 2);
        REQUIRE(m->node_count() == 7);
        REQUIRE(training_accuracy(*m, d) == 1.0);
    }

    SECTION("empty dataset is an error") {
        Dataset d({num_attr("x"), nom_attr("cls", {"A", "B"})}, 1);
        REQUIRE_THROWS_AS(induce(d, {}), Error);
    }

    SECTION("unpruned trees reach full training accuracy on contradiction-free data") {
        SplitRng rng(31);
        for (int t = 0; t < 25; ++t) {
            Dataset d = testsupport::random_rule_dataset(rng, 30, 3, 3);
            TreeParams p;
            p.min_leaf_weight = 1.0;
            auto m = induce(d, p);
            REQUIRE(training_accuracy(*m, d) == 1.0);
        }
    }

    SECTION("nominal-only depth is bounded by the attribute count") {
        SplitRng rng(77);
        for (int t = 0; t < 20; ++t) {
            std::size_t n_attrs = 2 + rng.next_below(3);
            std::vector<Attribute> attrs;
            for (std::size_t a = 0; a < n_attrs; ++a)
                attrs.push_back(nom_attr("a" + std::to_string(a), {"u", "v", "w"}));
            attrs.push_back(nom_attr("cls", {"A", "B"}));
            Dataset d(attrs, n_attrs);
            for (int i = 0; i < 40; ++i) {
                Instance inst;
                for (std::size_t a = 0; a < n_attrs; ++a)
                    inst.values.push_back(static_cast<double>(rng.next_below(3)));
                inst.values.push_back(static_cast<double>(rng.next_below(2)));
                d.add(std::move(inst));
            }
            TreeParams p;
            p.min_leaf_weight = 1.0;
            auto m = induce(d, p);
            REQUIRE(m->depth() <= n_attrs);
        }
    }
}

TEST_CASE("decision stump") {
    SECTION("a single informative attribute is found") {
        Dataset d = make_dataset({nom_attr("noise", {"p", "q"}), nom_attr("sig", {"x", "y"}),
                                  nom_attr("cls", {"A", "B"})},
                                 2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 1}, {1, 1, 1}});
        auto m = train_decision_stump(d);
        REQUIRE(m->depth() == 1);
        REQUIRE(m->root().attribute == 1);
        REQUIRE(training_accuracy(*m, d) == 1.0);
    }
    SECTION("xor defeats every stump: majority fallback") {
        auto m = train_decision_stump(xor_dataset());
        REQUIRE(m->node_count() == 1);
        REQUIRE(m->root().label == 0);  // lowest index on the 2-2 tie
        REQUIRE(training_accuracy(*m, xor_dataset()) == 0.5);
    }
}

TEST_CASE("j48") {
    auto [d, meta] = synth_qws364(1);

    SECTION("training accuracy on separable data is perfect") {
        auto m = train_j48(d);
        REQUIRE(training_accuracy(*m, d) == 1.0);
    }
    SECTION("cross-validated accuracy at least 99 percent") {
        auto rep = cross_validate(d, LearnerSpec::of("j48"), 10, 1);
        REQUIRE(rep.accuracy >= 99.0);
    }
    SECTION("pruning a leaf-only tree changes nothing") {
        Dataset single = make_dataset({num_attr("x"), nom_attr("cls", {"A", "B"})}, 1,
                                      {{1, 0}, {2, 0}});
        auto m = train_j48(single);
        REQUIRE(m->node_count() == 1);
    }
    SECTION("pessimistic error bound sanity") {
        // more observed errors never lower the bound
        double prev = 0.0;
        for (int e = 0; e <= 10; ++e) {
            double est = e + detail::added_errors(20.0, e, 0.25);
            REQUIRE(est >= prev - 1e-9);
            prev = est;
        }
        // zero-error case matches the exact binomial bound
        REQUIRE(detail::added_errors(10.0, 0.0, 0.25) ==
                Catch::Approx(10.0 * (1.0 - std::pow(0.25, 0.1))).margin(1e-12));
    }
}

TEST_CASE("reptree") {
    SECTION("pure grow set collapses to a single leaf") {
        // 21 class-A instances put the running deal counter at a multiple
        // of three, so the lone B lands in fold 0: the prune fold. The
        // grow set is then pure A and the tree is a single leaf.
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < 21; ++i) rows.push_back({static_cast<double>(i), 0});
        rows.push_back({99, 1});
        Dataset d = make_dataset({num_attr("x"), nom_attr("cls", {"A", "B"})}, 1, rows);
        auto fa = stratified_folds(d, 3, 1);
        REQUIRE(fa.fold_of[21] == 0);
        auto m = train_reptree(d, {.seed = 1});
        REQUIRE(m->node_count() == 1);
        REQUIRE(m->root().label == 0);
    }
    SECTION("label noise: pruned tree is no larger than the unpruned twin") {
        auto [clean, meta] = synth_qws364(2);
        SplitRng noise(17);
        std::vector<std::vector<double>> rows;
        for (const auto& inst : clean.instances()) {
            auto vals = inst.values;
            if (noise.next_below(10) == 0)
                vals.back() = static_cast<double>(noise.next_below(4));
            rows.push_back(vals);
        }
        Dataset noisy = make_dataset(clean.attributes(), clean.class_index(), rows);
        auto pruned = train_reptree(noisy, {.pruning = PruningMode::reduced_error, .seed = 5});
        auto unpruned = train_reptree(noisy, {.pruning = PruningMode::none, .seed = 5});
        REQUIRE(pruned->node_count() <= unpruned->node_count());
    }
    SECTION("cross-validated accuracy at least 99 percent") {
        auto [d, meta] = synth_qws364(1);
        auto rep = cross_validate(d, LearnerSpec::of("reptree"), 10, 1);
        REQUIRE(rep.accuracy >= 99.0);
    }
    SECTION("backfit re-estimates leaf counts from the full data") {
        auto [d, meta] = synth_qws364(1);
        auto m = train_reptree(d);
        REQUIRE(m->root().dist.total() == Catch::Approx(d.total_weight()).margin(1e-6));
    }
}

TEST_CASE("random tree") {
    auto [d, meta] = synth_qws364(1);

    SECTION("k equal to the attribute count reproduces the plain inducer") {
        TreeParams rt;
        rt.random_k = 9;
        rt.min_leaf_weight = 2.0;
        rt.seed = 3;
        auto a = train_random_tree(d, rt);
        TreeParams ind;
        ind.criterion = SplitCriterion::information_gain;
        ind.min_leaf_weight = 2.0;
        auto b = induce(d, ind);
        REQUIRE(a->to_json().at("model") == b->to_json().at("model"));
    }
    SECTION("identical seeds give identical trees") {
        TreeParams p;
        p.seed = 11;
        auto a = train_random_tree(d, p);
        auto b = train_random_tree(d, p);
        REQUIRE(a->to_json().at("model") == b->to_json().at("model"));
        p.seed = 12;
        auto c = train_random_tree(d, p);
        REQUIRE(a->to_json().at("model") != c->to_json().at("model"));
    }
    SECTION("default k is floor(log2(attrs)) + 1") {
        REQUIRE(default_random_k(d) == 4);
    }
    SECTION("cross-validated accuracy at least 95 percent") {
        auto rep = cross_validate(d, LearnerSpec::of("random-tree"), 10, 1);
        REQUIRE(rep.accuracy >= 95.0);
    }
    SECTION("k bounds are enforced") {
        TreeParams p;
        p.random_k = 10;
        REQUIRE_THROWS_AS(train_random_tree(d, p), Error);
    }
}

TEST_CASE("random forest") {
    auto [d, meta] = synth_qws364(1);

    SECTION("single tree without bagging equals the random tree") {
        TreeParams p;
        p.forest_size = 1;
        p.bagging = false;
        p.seed = 21;
        auto forest = train_random_forest(d, p);
        TreeParams q;
        q.seed = 21;
        auto tree = train_random_tree(d, q);
        for (const auto& inst : d.instances()) {
            auto pf = forest->predict(inst).probabilities();
            auto pt = tree->predict(inst).probabilities();
            REQUIRE(pf == pt);
        }
    }
    SECTION("prediction is the arithmetic mean of the members") {
        TreeParams p;
        p.forest_size = 5;
        p.seed = 4;
        auto forest = train_random_forest(d, p);
        for (std::size_t i = 0; i < 20; ++i) {
            const auto& inst = d.instance(i);
            auto pf = forest->predict(inst);
            std::vector<double> mean(d.num_classes(), 0.0);
            for (const auto& member : forest->members()) {
                auto pm = member->predict(inst).probabilities();
                for (std::size_t k = 0; k < pm.size(); ++k) mean[k] += pm[k] / 5.0;
            }
            for (std::size_t k = 0; k < mean.size(); ++k)
                REQUIRE(pf.count(k) == Catch::Approx(mean[k]).margin(1e-12));
        }
    }
    SECTION("unanimous pure members give probability one") {
        Dataset single = make_dataset({num_attr("x"), nom_attr("cls", {"A", "B"})}, 1,
                                      {{1, 0}, {2, 0}, {3, 0}});
        TreeParams p;
        p.forest_size = 3;
        auto forest = train_random_forest(single, p);
        REQUIRE(forest->predict(single.instance(0)).probabilities()[0] == 1.0);
    }
    SECTION("cross-validated accuracy at least 97 percent") {
        auto rep = cross_validate(d, LearnerSpec::of("random-forest"), 10, 1);
        REQUIRE(rep.accuracy >= 97.0);
    }
}

TEST_CASE("tree prediction") {
    SECTION("pure leaf gives probability one") {
        Dataset d = testsupport::numeric_binary({1, 2, 3, 10, 11, 12}, {0, 0, 0, 1, 1, 1});
        auto m = induce(d, {});
        REQUIRE(m->predict(d.instance(0)).probabilities()[0] == 1.0);
        REQUIRE(m->predict(d.instance(5)).probabilities()[1] == 1.0);
    }
    SECTION("single-leaf model predicts the training prior everywhere") {
        Dataset d = testsupport::numeric_binary({5, 5, 5, 5}, {0, 0, 0, 1});
        auto m = induce(d, {});
        REQUIRE(m->node_count() == 1);
        auto p = m->predict(d.instance(3)).probabilities();
        REQUIRE(p[0] == Catch::Approx(0.75).margin(1e-12));
        REQUIRE(p[1] == Catch::Approx(0.25).margin(1e-12));
    }
    SECTION("missing test value routes fractionally") {
        // balanced split, pure leaves A and B -> (0.5, 0.5)
        Dataset d = testsupport::numeric_binary({1, 2, 3, 4, 5, 6, 7, 11, 12, 13, 14, 15, 16, 17},
                                                {0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1});
        TreeParams p;
        auto m = induce(d, p);
        REQUIRE(m->depth() == 1);
        Instance x;
        x.values = {missing_value(), missing_value()};
        auto pred = m->predict(x).probabilities();
        REQUIRE(pred[0] == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(pred[1] == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("schema mismatch is an error") {
        Dataset d = testsupport::numeric_binary({1, 2}, {0, 1});
        auto m = induce(d, {.min_leaf_weight = 1.0});
        Instance x;
        x.values = {1.0};
        REQUIRE_THROWS_AS(m->predict(x), Error);
    }
}

TEST_CASE("tree model serialization round trip") {
    auto [d, meta] = synth_qws364(1);

    SECTION("single tree") {
        auto m = train_j48(d);
        testsupport::TempDir tmp("treeio");
        save_model(*m, tmp.str("m.json"));
        auto loaded = load_model(tmp.str("m.json"));
        REQUIRE(loaded->info().learner == "j48");
        for (const auto& inst : d.instances())
            REQUIRE(loaded->predict(inst).probabilities() == m->predict(inst).probabilities());
    }
    SECTION("forest") {
        TreeParams p;
        p.forest_size = 3;
        auto m = train_random_forest(d, p);
        testsupport::TempDir tmp("forestio");
        save_model(*m, tmp.str("f.json"));
        auto loaded = load_model(tmp.str("f.json"));
        for (std::size_t i = 0; i < 30; ++i)
            REQUIRE(loaded->predict(d.instance(i)).probabilities() ==
                    m->predict(d.instance(i)).probabilities());
    }
}

TEST_CASE("missing values during training use fractional instances") {
    // one attribute informative, with some missing cells
    Dataset d = make_dataset(
        {num_attr("x"), nom_attr("cls", {"A", "B"})}, 1,
        {{1, 0}, {2, 0}, {3, 0}, {missing_value(), 0}, {11, 1}, {12, 1}, {13, 1},
         {missing_value(), 1}});
    auto m = induce(d, {});
    REQUIRE(m->depth() >= 1);
    // known-value instances classify cleanly despite the missing cells
    REQUIRE(m->predict_label(d.instance(0)) == 0);
    REQUIRE(m->predict_label(d.instance(6)) == 1);
    // child weights include the redistributed missing weight
    double total = 0.0;
    for (double w : m->root().child_weights) total += w;
    REQUIRE(total == Catch::Approx(8.0).margin(1e-9));
}
