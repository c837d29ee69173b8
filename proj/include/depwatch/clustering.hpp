#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "depwatch/error.hpp"
#include "depwatch/matrix.hpp"
#include "depwatch/rng.hpp"

namespace depwatch {

struct ClusteringConfig {
    enum class Init { KMeansPlusPlus, RandomRows };

    std::size_t k = 4;
    std::size_t max_iterations = 100;
    std::uint64_t seed = 11;
    Init init = Init::KMeansPlusPlus;
};

struct ClusteringResult {
    std::vector<std::size_t> assignment;
    /// Centroids in the input units.
    Matrix centroids;
    /// Sum of squared distances in the standardized space, after each assignment step.
    std::vector<double> inertia_history;
    std::size_t iterations = 0;
    bool converged = false;

    double inertia() const { return inertia_history.empty() ? 0.0 : inertia_history.back(); }
};

/// Column-wise z-scores (population standard deviation). Constant columns become 0.
struct Standardizer {
    std::vector<double> mean, scale;

    explicit Standardizer(const Matrix& data) : mean(data.cols(), 0.0), scale(data.cols(), 0.0) {
        const auto n = static_cast<double>(data.rows());
        for (std::size_t c = 0; c < data.cols(); ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < data.rows(); ++r) s += data(r, c);
            mean[c] = s / n;
            double v = 0.0;
            for (std::size_t r = 0; r < data.rows(); ++r) v += (data(r, c) - mean[c]) * (data(r, c) - mean[c]);
            scale[c] = std::sqrt(v / n);
        }
    }

    Matrix apply(const Matrix& data) const {
        Matrix z(data.rows(), data.cols());
        for (std::size_t r = 0; r < data.rows(); ++r)
            for (std::size_t c = 0; c < data.cols(); ++c)
                z(r, c) = scale[c] > 0 ? (data(r, c) - mean[c]) / scale[c] : 0.0;
        return z;
    }

    double invert(std::size_t c, double z) const { return scale[c] > 0 ? mean[c] + z * scale[c] : mean[c]; }
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

inline Matrix seed_centroids(const Matrix& z, const ClusteringConfig& cfg, Rng& rng) {
    const std::size_t n = z.rows();
    Matrix centers(cfg.k, z.cols());
    auto copy_row = [&](std::size_t center, std::size_t row) {
        std::copy(z.row(row).begin(), z.row(row).end(), centers.row(center).begin());
    };
    if (cfg.init == ClusteringConfig::Init::RandomRows) {
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        rng.shuffle(rows);
        for (std::size_t c = 0; c < cfg.k; ++c) copy_row(c, rows[c]);
        return centers;
    }
    copy_row(0, rng.index(n));
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    for (std::size_t c = 1; c < cfg.k; ++c) {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            d2[r] = std::min(d2[r], squared_distance(z.row(r), centers.row(c - 1)));
            total += d2[r];
        }
        std::size_t pick = n - 1;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                acc += d2[r];
                if (acc > target && d2[r] > 0.0) {
                    pick = r;
                    break;
                }
            }
        } else {
            pick = rng.index(n);
        }
        copy_row(c, pick);
    }
    return centers;
}

} // namespace detail

/// Lloyd's k-means on z-scored columns with k-means++ (or random-row) seeding. Stops at an
/// assignment fixpoint or after `max_iterations`. An emptied cluster keeps its centroid.
inline ClusteringResult kmeans(const Matrix& data, const ClusteringConfig& cfg) {
    if (cfg.k == 0) throw ValidationError("k must be at least 1");
    if (cfg.k > data.rows()) {
        throw ValidationError("k = " + std::to_string(cfg.k) + " exceeds the " + std::to_string(data.rows()) + " rows");
    }
    const Standardizer standardizer(data);
    const Matrix z = standardizer.apply(data);
    Rng rng(cfg.seed);
    Matrix centers = detail::seed_centroids(z, cfg, rng);

    ClusteringResult result;
    result.assignment.assign(z.rows(), static_cast<std::size_t>(-1));
    for (std::size_t it = 0; it < std::max<std::size_t>(cfg.max_iterations, 1); ++it) {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t r = 0; r < z.rows(); ++r) {
            std::size_t best = 0;
            double best_d = detail::squared_distance(z.row(r), centers.row(0));
            for (std::size_t c = 1; c < cfg.k; ++c) {
                const double d = detail::squared_distance(z.row(r), centers.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            changed = changed || result.assignment[r] != best;
            result.assignment[r] = best;
            inertia += best_d;
        }
        result.inertia_history.push_back(inertia);
        result.iterations = it + 1;
        if (!changed) {
            result.converged = true;
            break;
        }
        Matrix sums(cfg.k, z.cols());
        std::vector<std::size_t> sizes(cfg.k, 0);
        for (std::size_t r = 0; r < z.rows(); ++r) {
            ++sizes[result.assignment[r]];
            for (std::size_t c = 0; c < z.cols(); ++c) sums(result.assignment[r], c) += z(r, c);
        }
        for (std::size_t k = 0; k < cfg.k; ++k) {
            if (sizes[k] == 0) continue;
            for (std::size_t c = 0; c < z.cols(); ++c) centers(k, c) = sums(k, c) / static_cast<double>(sizes[k]);
        }
    }

    // Report centroids in input units as member means; empty clusters map back their seed.
    result.centroids = Matrix(cfg.k, data.cols());
    std::vector<std::size_t> sizes(cfg.k, 0);
    for (std::size_t r = 0; r < data.rows(); ++r) {
        ++sizes[result.assignment[r]];
        for (std::size_t c = 0; c < data.cols(); ++c) result.centroids(result.assignment[r], c) += data(r, c);
    }
    for (std::size_t k = 0; k < cfg.k; ++k) {
        for (std::size_t c = 0; c < data.cols(); ++c) {
            result.centroids(k, c) = sizes[k] ? result.centroids(k, c) / static_cast<double>(sizes[k])
                                              : standardizer.invert(c, centers(k, c));
        }
    }
    return result;
}

inline ClusteringResult kmeans(const std::vector<FeatureVector>& rows, const ClusteringConfig& cfg) {
    return kmeans(Matrix::from_features(rows), cfg);
}

} // namespace depwatch
