#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <json.hpp>

#include "depwatch/labels.hpp"

namespace depwatch {

/// Square confusion matrix, rows = truth, columns = prediction.
template <std::size_t N>
struct Confusion {
    std::array<std::array<std::size_t, N>, N> counts{};

    void add(std::size_t truth, std::size_t predicted) { ++counts[truth][predicted]; }

    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& row : counts)
            for (auto c : row) t += c;
        return t;
    }
    std::size_t support(std::size_t k) const {
        std::size_t s = 0;
        for (auto c : counts[k]) s += c;
        return s;
    }
    std::size_t predicted(std::size_t k) const {
        std::size_t s = 0;
        for (const auto& row : counts) s += row[k];
        return s;
    }
    /// 0 when the class was never predicted.
    double precision(std::size_t k) const {
        const auto p = predicted(k);
        return p == 0 ? 0.0 : static_cast<double>(counts[k][k]) / static_cast<double>(p);
    }
    /// 0 when the class never occurs.
    double recall(std::size_t k) const {
        const auto s = support(k);
        return s == 0 ? 0.0 : static_cast<double>(counts[k][k]) / static_cast<double>(s);
    }
    double f1(std::size_t k) const {
        const double p = precision(k), r = recall(k);
        return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }
    double accuracy() const {
        std::size_t diag = 0;
        for (std::size_t k = 0; k < N; ++k) diag += counts[k][k];
        const auto t = total();
        return t == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(t);
    }
    /// Unweighted mean F1 over classes that occur in the truth or the predictions.
    double macro_f1() const {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < N; ++k) {
            if (support(k) == 0 && predicted(k) == 0) continue;
            sum += f1(k);
            ++n;
        }
        return n == 0 ? 0.0 : sum / static_cast<double>(n);
    }
};

using LabelConfusion = Confusion<kLabelCount>;

} // namespace depwatch
