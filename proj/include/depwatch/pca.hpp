#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "depwatch/error.hpp"
#include "depwatch/matrix.hpp"

namespace depwatch {

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi rotations for a symmetric matrix.
inline EigenDecomposition symmetric_eigen(Matrix a, double tolerance = 1e-15, int max_sweeps = 100) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw ValidationError("eigen decomposition needs a square matrix");
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    auto off_diagonal = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return s;
    };
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale += a(i, j) * a(i, j);

    for (int sweep = 0; sweep < max_sweeps && off_diagonal() > tolerance * tolerance * std::max(scale, 1e-300); ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

struct PcaResult {
    std::vector<double> mean;
    /// One component per row, unit length; the largest-magnitude entry of each is positive.
    Matrix components;
    std::vector<double> explained_variance;
    std::vector<double> explained_variance_ratio;
    Matrix projected;
};

/// Principal components of the sample covariance (n - 1 denominator).
inline PcaResult pca(const Matrix& data, std::size_t n_components) {
    const std::size_t n = data.rows(), d = data.cols();
    if (n == 0) throw ValidationError("PCA needs at least one row");
    if (n_components == 0 || n_components > d) {
        throw ValidationError("n_components must lie in [1, " + std::to_string(d) + "]");
    }
    PcaResult out;
    out.mean.assign(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) out.mean[c] += data(r, c);
    for (auto& m : out.mean) m /= static_cast<double>(n);
    Matrix centered(n, d);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) centered(r, c) = data(r, c) - out.mean[c];

    Matrix cov(d, d);
    const double denom = static_cast<double>(std::max<std::size_t>(n - 1, 1));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += centered(r, i) * centered(r, j);
            cov(i, j) = cov(j, i) = s / denom;
        }
    }
    const auto eig = symmetric_eigen(cov);
    double total = 0.0;
    for (double v : eig.values) total += std::max(v, 0.0);

    out.components = Matrix(n_components, d);
    for (std::size_t k = 0; k < n_components; ++k) {
        std::size_t lead = 0;
        for (std::size_t i = 1; i < d; ++i) {
            if (std::abs(eig.vectors(i, k)) > std::abs(eig.vectors(lead, k)) + 1e-12) lead = i;
        }
        const double sign = eig.vectors(lead, k) < 0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < d; ++i) out.components(k, i) = sign * eig.vectors(i, k);
        const double var = std::max(eig.values[k], 0.0);
        out.explained_variance.push_back(var);
        out.explained_variance_ratio.push_back(total > 0 ? var / total : 0.0);
    }
    out.projected = Matrix(n, n_components);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < n_components; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) s += centered(r, i) * out.components(k, i);
            out.projected(r, k) = s;
        }
    return out;
}

inline PcaResult pca(const std::vector<FeatureVector>& rows, std::size_t n_components) {
    return pca(Matrix::from_features(rows), n_components);
}

} // namespace depwatch
