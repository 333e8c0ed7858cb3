#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qosrank/dataset.hpp"

namespace qosrank {

// Seeded stand-in for the 364-service QWS sample: nine quality parameters
// drawn from realistic ranges and a service grade assigned by a fixed
// threshold rule over ResponseTime / Availability / Throughput. Class
// quotas are exact, with the majority class at 120 of 364.

inline const std::vector<std::string>& qws_synth_class_labels() {
    static const std::vector<std::string> labels = {"platinum", "gold", "silver", "bronze"};
    return labels;
}

// The published grading rule: response-time bands set the grade, and a
// service with poor availability or throughput drops to bronze outright.
// Generated values keep a margin around every threshold so the concept
// stays learnable across resamples.
inline std::size_t qws_synth_label(double response_time, double availability,
                                   double throughput) {
    if (availability < 50.0 || throughput < 3.0 || response_time > 1200.0) return 3;
    if (response_time <= 300.0) return 0;
    if (response_time <= 600.0) return 1;
    return 2;
}

struct SynthResult {
    Dataset data;
    DatasetMeta meta;
};

namespace detail::synth {

inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

inline double uniform(SplitRng& rng, double lo, double hi) {
    return round2(lo + (hi - lo) * rng.next_unit());
}

inline bool in_gap(double v, double lo, double hi) { return v > lo && v < hi; }

inline bool rt_ok(double v) {
    return !in_gap(v, 285.0, 315.0) && !in_gap(v, 570.0, 630.0) && !in_gap(v, 1140.0, 1260.0);
}
inline bool av_ok(double v) { return !in_gap(v, 48.0, 52.0); }
inline bool tp_ok(double v) { return !in_gap(v, 2.8, 3.2); }

}  // namespace detail::synth

inline SynthResult synth_qws364(std::uint64_t seed = 1) {
    // Majority gold = 120, total 364. Bronze splits into three service
    // profiles: slow (high response time), unavailable, and starved
    // throughput; the latter two are drawn with response times above the
    // gold band so every grade boundary keeps its margin in each
    // dimension.
    struct Quota {
        std::size_t cls;
        std::size_t count;
        double rt_lo, rt_hi, av_lo, av_hi, tp_lo, tp_hi;
    };
    const std::vector<Quota> quotas = {
        {0, 60, 50.0, 285.0, 56.0, 100.0, 8.0, 40.0},     // platinum
        {1, 120, 315.0, 570.0, 56.0, 100.0, 8.0, 40.0},   // gold
        {2, 104, 630.0, 1140.0, 56.0, 100.0, 8.0, 40.0},  // silver
        {3, 32, 1260.0, 1500.0, 56.0, 100.0, 8.0, 40.0},  // bronze: slow
        {3, 28, 630.0, 1500.0, 44.0, 48.0, 8.0, 40.0},    // bronze: unavailable
        {3, 20, 630.0, 1500.0, 56.0, 100.0, 2.4, 2.8},    // bronze: starved
    };

    Dataset d(qws_attributes(qws_synth_class_labels()), qws_parameter_count);
    SplitRng rng(seed);
    std::vector<Instance> rows;
    for (const auto& q : quotas) {
        for (std::size_t i = 0; i < q.count; ++i) {
            double rt, av, tp;
            do {
                rt = detail::synth::uniform(rng, q.rt_lo, q.rt_hi);
                av = detail::synth::uniform(rng, q.av_lo, q.av_hi);
                tp = detail::synth::uniform(rng, q.tp_lo, q.tp_hi);
            } while (!detail::synth::rt_ok(rt) || !detail::synth::av_ok(av) ||
                     !detail::synth::tp_ok(tp) || qws_synth_label(rt, av, tp) != q.cls);
            // The six remaining parameters are drawn independently of the
            // grade so the rule over ResponseTime / Availability /
            // Throughput stays the only consistent separator.
            Instance inst;
            inst.values = {
                rt,
                av,
                tp,
                detail::synth::uniform(rng, 20.0, 100.0),  // Successability
                detail::synth::uniform(rng, 45.0, 95.0),   // Reliability
                detail::synth::uniform(rng, 60.0, 100.0),  // Compliance
                detail::synth::uniform(rng, 50.0, 95.0),   // BestPractices
                detail::synth::uniform(rng, 5.0, 500.0),   // Latency
                detail::synth::uniform(rng, 1.0, 100.0),   // Documentation
                static_cast<double>(q.cls),
            };
            rows.push_back(std::move(inst));
        }
    }
    rng.shuffle(rows);
    for (auto& r : rows) d.add(std::move(r));

    DatasetMeta meta;
    meta.attributes = d.attributes();
    meta.class_name = "Class";
    meta.class_order_best_first = qws_synth_class_labels();
    meta.seed = seed;
    return {std::move(d), std::move(meta)};
}

// 14-row nominal toy set used by the documentation examples: the grade is
// good exactly when Tier = premium or Support = phone.
inline SynthResult synth_tiny(std::uint64_t seed = 1) {
    std::vector<Attribute> attrs = {
        {"Region", AttrKind::nominal, "", {"us", "eu", "asia"}},
        {"Tier", AttrKind::nominal, "", {"free", "basic", "premium"}},
        {"Support", AttrKind::nominal, "", {"email", "phone"}},
        {"Grade", AttrKind::nominal, "", {"good", "poor"}},
    };
    Dataset d(attrs, 3);
    std::vector<Instance> combos;
    for (std::size_t region = 0; region < 3; ++region)
        for (std::size_t tier = 0; tier < 3; ++tier)
            for (std::size_t support = 0; support < 2; ++support) {
                double grade = (tier == 2 || support == 1) ? 0.0 : 1.0;
                combos.push_back({{static_cast<double>(region), static_cast<double>(tier),
                                   static_cast<double>(support), grade},
                                  1.0});
            }
    SplitRng rng(seed);
    rng.shuffle(combos);
    combos.resize(14);
    for (auto& c : combos) d.add(std::move(c));

    DatasetMeta meta;
    meta.attributes = d.attributes();
    meta.class_name = "Grade";
    meta.class_order_best_first = {"good", "poor"};
    meta.seed = seed;
    return {std::move(d), std::move(meta)};
}

inline SynthResult synthesize(const std::string& profile, std::uint64_t seed = 1) {
    if (profile == "qws364") return synth_qws364(seed);
    if (profile == "tiny") return synth_tiny(seed);
    throw Error(errc::args, "unknown profile '" + profile + "' (available: qws364, tiny)");
}

}  // namespace qosrank
