// Minimal library walkthrough: synthesize a dataset, train two models,
// inspect them, and rank a few candidate services.

#include <iostream>

#include "qosrank/qosrank.hpp"

int main() {
    using namespace qosrank;

    auto [tiny, tiny_meta] = synth_tiny(1);
    auto rules = train_part(tiny);
    std::cout << "--- PART on the 14-row toy set ---\n" << rules->render() << "\n";

    auto [qws, meta] = synth_qws364(1);
    auto jrip = train_jrip(qws);
    std::cout << "--- JRip on the synthetic QWS sample ---\n" << jrip->render() << "\n";

    auto report = cross_validate(qws, LearnerSpec::of("jrip"), 10, 1);
    std::cout << "10-fold CV accuracy: " << report.accuracy << "% (" << report.correct << "/"
              << report.correct + report.incorrect << ")\n\n";

    // Rank three candidate services by all nine quality parameters.
    std::vector<Attribute> cand_attrs;
    for (std::size_t a : parameter_attribute_indices(qws)) cand_attrs.push_back(qws.attribute(a));
    Dataset candidates(cand_attrs);
    candidates.add({{120.0, 95.0, 20.0, 80.0, 70.0, 80.0, 70.0, 40.0, 50.0}, 1.0});
    candidates.add({{800.0, 60.0, 10.0, 50.0, 60.0, 70.0, 60.0, 200.0, 30.0}, 1.0});
    candidates.add({{400.0, 85.0, 12.0, 70.0, 65.0, 75.0, 65.0, 90.0, 40.0}, 1.0});

    std::cout << "--- predicted grades ---\n";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        Instance x = candidates.instance(i);
        x.values.push_back(missing_value());  // class cell unused at prediction
        auto dist = jrip->predict(x);
        std::cout << "service " << i + 1 << ": " << qws.class_label(dist.argmax()) << "\n";
    }
    return 0;
}
