#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qosrank/error.hpp"

namespace qosrank {

// Per-class weight vector; the unit of every impurity computation and
// every prediction. Counts are real valued so fractional instances flow
// through unchanged.
class ClassDistribution {
public:
    ClassDistribution() = default;

    explicit ClassDistribution(std::size_t num_classes) : counts_(num_classes, 0.0) {}

    static ClassDistribution from_counts(std::vector<double> counts) {
        ClassDistribution d;
        d.counts_ = std::move(counts);
        for (double c : d.counts_) {
            if (c < 0.0) throw Error(errc::schema, "class counts must be non-negative");
            d.total_ += c;
        }
        return d;
    }

    std::size_t size() const { return counts_.size(); }
    double count(std::size_t cls) const { return counts_[cls]; }
    double total() const { return total_; }
    const std::vector<double>& counts() const { return counts_; }

    void add(std::size_t cls, double weight) {
        counts_[cls] += weight;
        total_ += weight;
    }

    void add_scaled(const ClassDistribution& other, double scale) {
        if (counts_.size() < other.size()) counts_.resize(other.size(), 0.0);
        for (std::size_t i = 0; i < other.size(); ++i) {
            counts_[i] += other.counts_[i] * scale;
            total_ += other.counts_[i] * scale;
        }
    }

    void remove(std::size_t cls, double weight) {
        counts_[cls] -= weight;
        if (counts_[cls] < 0.0 && counts_[cls] > -1e-9) counts_[cls] = 0.0;
        total_ -= weight;
        if (total_ < 0.0 && total_ > -1e-9) total_ = 0.0;
    }

    // Lowest index wins ties (within 1e-10).
    std::size_t argmax() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < counts_.size(); ++i)
            if (counts_[i] > counts_[best] + 1e-10) best = i;
        return best;
    }

    // True when at most one class carries weight.
    bool pure() const {
        int seen = 0;
        for (double c : counts_)
            if (c > 1e-12 && ++seen > 1) return false;
        return true;
    }

    bool empty() const { return total_ <= 1e-12; }

    std::vector<double> probabilities() const {
        if (total_ <= 0.0) throw Error(errc::eval, "cannot normalize an empty distribution");
        std::vector<double> p(counts_.size());
        for (std::size_t i = 0; i < counts_.size(); ++i) p[i] = counts_[i] / total_;
        return p;
    }

    static ClassDistribution point_mass(std::size_t num_classes, std::size_t cls) {
        ClassDistribution d(num_classes);
        d.add(cls, 1.0);
        return d;
    }

private:
    std::vector<double> counts_;
    double total_ = 0.0;
};

}  // namespace qosrank
