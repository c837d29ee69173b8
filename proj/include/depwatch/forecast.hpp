#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "depwatch/activity.hpp"
#include "depwatch/date.hpp"
#include "depwatch/error.hpp"
#include "depwatch/features.hpp"
#include "depwatch/forest.hpp"
#include "depwatch/labeling.hpp"
#include "depwatch/snapshot.hpp"

namespace depwatch {

inline constexpr std::size_t kMinFitObservations = 8;
inline constexpr double kInterval90 = 1.645;

/// Forecast horizon in months; one month is 30 days, rounded up to whole weeks.
struct Horizon {
    int months = 1;

    static constexpr std::array<int, 5> kAllowed = {1, 3, 6, 9, 12};

    static Horizon of(int months) {
        if (std::find(kAllowed.begin(), kAllowed.end(), months) == kAllowed.end()) {
            throw ValidationError("horizon must be one of 1, 3, 6, 9, 12 months (got " + std::to_string(months) + ")");
        }
        return Horizon{months};
    }

    std::size_t steps() const { return static_cast<std::size_t>((months * 30 + 6) / 7); }
    int days() const { return months * 30; }

    bool operator==(const Horizon&) const = default;
};

inline std::vector<Horizon> all_horizons() {
    std::vector<Horizon> out;
    for (int m : Horizon::kAllowed) out.push_back(Horizon{m});
    return out;
}

enum class ForecastMethod : std::uint8_t { NaiveLast, LinearTrend, Ses, Holt };

inline std::string_view method_name(ForecastMethod m) {
    switch (m) {
    case ForecastMethod::NaiveLast: return "naive_last";
    case ForecastMethod::LinearTrend: return "linear_trend";
    case ForecastMethod::Ses: return "ses";
    case ForecastMethod::Holt: return "holt";
    }
    return "naive_last";
}

inline ForecastMethod parse_method(std::string_view text) {
    for (auto m : {ForecastMethod::NaiveLast, ForecastMethod::LinearTrend, ForecastMethod::Ses, ForecastMethod::Holt}) {
        if (method_name(m) == text) return m;
    }
    throw ValidationError("unknown forecast method '" + std::string(text) + "'");
}

/// A fitted one-series model. The h-step point forecast is
///   naive_last:   level
///   linear_trend: intercept + slope * (n - 1 + h)
///   ses:          level
///   holt:         level + h * trend
struct Forecaster {
    ForecastMethod method = ForecastMethod::NaiveLast;
    std::size_t n = 0;
    double level = 0.0;
    double trend = 0.0;
    double intercept = 0.0;
    double slope = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double residual_sd = 0.0;

    double point(std::size_t h) const {
        switch (method) {
        case ForecastMethod::LinearTrend: return intercept + slope * static_cast<double>(n - 1 + h);
        case ForecastMethod::Holt: return level + static_cast<double>(h) * trend;
        case ForecastMethod::NaiveLast:
        case ForecastMethod::Ses: return level;
        }
        return level;
    }
};

namespace detail {

struct SmoothingFit {
    double level = 0.0, trend = 0.0, sse = 0.0;
};

/// l_0 = y_0; l_t = a y_t + (1 - a) l_{t-1}; errors are y_t - l_{t-1} for t >= 1.
inline SmoothingFit run_ses(std::span<const double> y, double alpha) {
    SmoothingFit f{y[0], 0.0, 0.0};
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double e = y[t] - f.level;
        f.sse += e * e;
        f.level = alpha * y[t] + (1.0 - alpha) * f.level;
    }
    return f;
}

/// l_0 = y_0, b_0 = y_1 - y_0; one-step forecast l_{t-1} + b_{t-1}.
inline SmoothingFit run_holt(std::span<const double> y, double alpha, double beta) {
    SmoothingFit f{y[0], y[1] - y[0], 0.0};
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double forecast = f.level + f.trend;
        const double e = y[t] - forecast;
        f.sse += e * e;
        const double previous = f.level;
        f.level = alpha * y[t] + (1.0 - alpha) * forecast;
        f.trend = beta * (f.level - previous) + (1.0 - beta) * f.trend;
    }
    return f;
}

inline constexpr std::array<double, 9> kSmoothingGrid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

} // namespace detail

/// Fits `method` to a weekly series (oldest first).
inline Forecaster fit(std::span<const double> y, ForecastMethod method) {
    if (y.size() < kMinFitObservations) {
        throw FitError("need at least " + std::to_string(kMinFitObservations) + " observations, got " +
                       std::to_string(y.size()));
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw FitError("series contains a non-finite value");
    }
    const std::size_t n = y.size();
    Forecaster f;
    f.method = method;
    f.n = n;

    bool constant = true;
    for (double v : y) constant = constant && v == y[0];
    if (method == ForecastMethod::Holt && constant) method = ForecastMethod::Ses;

    switch (method) {
    case ForecastMethod::NaiveLast: {
        f.level = y[n - 1];
        double s = 0.0;
        for (std::size_t t = 1; t < n; ++t) s += (y[t] - y[t - 1]) * (y[t] - y[t - 1]);
        f.residual_sd = std::sqrt(s / static_cast<double>(n - 1));
        break;
    }
    case ForecastMethod::LinearTrend: {
        const double tbar = static_cast<double>(n - 1) / 2.0;
        double ybar = 0.0;
        for (double v : y) ybar += v;
        ybar /= static_cast<double>(n);
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            sxy += (static_cast<double>(t) - tbar) * (y[t] - ybar);
            sxx += (static_cast<double>(t) - tbar) * (static_cast<double>(t) - tbar);
        }
        f.slope = sxy / sxx;
        f.intercept = ybar - f.slope * tbar;
        double sse = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double e = y[t] - (f.intercept + f.slope * static_cast<double>(t));
            sse += e * e;
        }
        f.residual_sd = std::sqrt(sse / static_cast<double>(n - 2));
        f.level = f.intercept + f.slope * static_cast<double>(n - 1);
        f.trend = f.slope;
        break;
    }
    case ForecastMethod::Ses: {
        detail::SmoothingFit best;
        double best_alpha = 0.0;
        for (double a : detail::kSmoothingGrid) {
            const auto r = detail::run_ses(y, a);
            if (best_alpha == 0.0 || r.sse < best.sse) {
                best = r;
                best_alpha = a;
            }
        }
        f.level = best.level;
        f.alpha = best_alpha;
        f.residual_sd = std::sqrt(best.sse / static_cast<double>(n - 1));
        break;
    }
    case ForecastMethod::Holt: {
        detail::SmoothingFit best;
        double best_alpha = 0.0, best_beta = 0.0;
        for (double a : detail::kSmoothingGrid) {
            for (double b : detail::kSmoothingGrid) {
                const auto r = detail::run_holt(y, a, b);
                if (best_alpha == 0.0 || r.sse < best.sse) {
                    best = r;
                    best_alpha = a;
                    best_beta = b;
                }
            }
        }
        f.level = best.level;
        f.trend = best.trend;
        f.alpha = best_alpha;
        f.beta = best_beta;
        f.residual_sd = std::sqrt(best.sse / static_cast<double>(n - 1));
        break;
    }
    }
    return f;
}

enum class FeatureDomain : std::uint8_t { Real, Count };

struct Forecast {
    std::size_t steps = 0;
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// h-step forecast with a 90% Gaussian interval, point +/- 1.645 * sd * sqrt(h). Count
/// features are clamped at 0 and the interval is widened if needed to keep the point inside.
inline Forecast predict_steps(const Forecaster& model, std::size_t h, FeatureDomain domain = FeatureDomain::Count) {
    if (h == 0) throw ValidationError("forecast needs at least one step");
    Forecast f;
    f.steps = h;
    f.point = model.point(h);
    const double half = kInterval90 * model.residual_sd * std::sqrt(static_cast<double>(h));
    f.lower = f.point - half;
    f.upper = f.point + half;
    if (domain == FeatureDomain::Count) {
        f.point = std::max(f.point, 0.0);
        f.lower = std::max(f.lower, 0.0);
        f.upper = std::max(f.upper, f.point);
    }
    return f;
}

inline Forecast predict(const Forecaster& model, Horizon horizon, FeatureDomain domain = FeatureDomain::Count) {
    return predict_steps(model, horizon.steps(), domain);
}

struct BacktestMetrics {
    double mae = 0.0;
    /// Absent when every actual value is zero.
    std::optional<double> mape;
    double hit_rate = 0.0;
    std::size_t origins = 0;
};

/// Rolling-origin evaluation: for every origin o in [8, n - h], fit on y[0, o) and compare
/// the h-step forecast with y[o + h - 1].
inline BacktestMetrics backtest(std::span<const double> y, ForecastMethod method, std::size_t h,
                                FeatureDomain domain = FeatureDomain::Count) {
    if (h == 0) throw ValidationError("backtest horizon must be positive");
    if (y.size() < kMinFitObservations + h + 4) {
        throw ValidationError("backtest needs at least " + std::to_string(kMinFitObservations + h + 4) +
                              " observations for a " + std::to_string(h) + "-step horizon");
    }
    BacktestMetrics m;
    double abs_sum = 0.0, pct_sum = 0.0;
    std::size_t pct_n = 0, hits = 0;
    for (std::size_t o = kMinFitObservations; o + h <= y.size(); ++o) {
        const auto model = fit(y.first(o), method);
        const auto f = predict_steps(model, h, domain);
        const double actual = y[o + h - 1];
        const double err = std::abs(actual - f.point);
        abs_sum += err;
        if (actual != 0.0) {
            pct_sum += err / std::abs(actual);
            ++pct_n;
        }
        if (actual >= f.lower && actual <= f.upper) ++hits;
        ++m.origins;
    }
    m.mae = abs_sum / static_cast<double>(m.origins);
    if (pct_n) m.mape = pct_sum / static_cast<double>(pct_n);
    m.hit_rate = static_cast<double>(hits) / static_cast<double>(m.origins);
    return m;
}

/// A weekly series of one feature, as stored in `*.series.json` files.
struct WeeklySeries {
    std::vector<Date> weeks;
    std::vector<double> values;
};

inline WeeklySeries parse_series(std::string_view text) {
    const auto doc = detail::parse_json_text(text, "series");
    if (!doc.is_array()) throw ValidationError("series must be a JSON array");
    WeeklySeries s;
    for (const auto& e : doc) {
        const auto week = parse_date(detail::require<std::string>(e, "week_start", "series entry"));
        if (!is_monday(week)) throw ValidationError("series week " + format_date(week) + " does not start on a Monday");
        if (!s.weeks.empty() && week - s.weeks.back() != std::chrono::days{7}) {
            throw ValidationError("series weeks are not contiguous at " + format_date(week));
        }
        const double v = detail::require<double>(e, "value", "series entry");
        if (!std::isfinite(v)) throw ValidationError("series value is not finite");
        s.weeks.push_back(week);
        s.values.push_back(v);
    }
    return s;
}

// ---- feature-level forecasting ----

enum class DynamicSeries : std::uint8_t { Commits, Contributors, IssuesOpened, IssuesClosed };

inline constexpr std::array<DynamicSeries, 4> kDynamicSeries = {DynamicSeries::Commits, DynamicSeries::Contributors,
                                                                 DynamicSeries::IssuesOpened, DynamicSeries::IssuesClosed};

inline std::string_view series_name(DynamicSeries s) {
    switch (s) {
    case DynamicSeries::Commits: return "commits";
    case DynamicSeries::Contributors: return "active_contributors";
    case DynamicSeries::IssuesOpened: return "issues_opened";
    case DynamicSeries::IssuesClosed: return "issues_closed";
    }
    return "commits";
}

struct ForecastOptions {
    ForecastMethod method = ForecastMethod::LinearTrend;
    /// Trailing weeks used for fitting.
    std::size_t fit_window = 26;
};

namespace detail {

inline double series_value(const WeekBucket& w, DynamicSeries s) {
    switch (s) {
    case DynamicSeries::Commits: return w.commits;
    case DynamicSeries::Contributors: return w.active_contributors;
    case DynamicSeries::IssuesOpened: return w.issues_opened;
    case DynamicSeries::IssuesClosed: return w.issues_closed;
    }
    return 0.0;
}

inline std::vector<WeekBucket> history_until(const ActivityTimeSeries& a, Date as_of) {
    std::vector<WeekBucket> out;
    for (const auto& w : a.weeks) {
        if (w.week_start <= as_of) out.push_back(w);
    }
    return out;
}

inline std::uint32_t round_count(double v) { return v <= 0.0 ? 0u : static_cast<std::uint32_t>(std::llround(v)); }

} // namespace detail

using SeriesForecasters = std::array<Forecaster, kDynamicSeries.size()>;

/// Fits every dynamic weekly series over the trailing `fit_window` weeks up to `as_of`.
inline SeriesForecasters fit_activity(const ActivityTimeSeries& activity, Date as_of, const ForecastOptions& options = {}) {
    const auto history = detail::history_until(activity, as_of);
    const std::size_t start = history.size() > options.fit_window ? history.size() - options.fit_window : 0;
    SeriesForecasters out;
    for (std::size_t k = 0; k < kDynamicSeries.size(); ++k) {
        std::vector<double> y;
        for (std::size_t i = start; i < history.size(); ++i) y.push_back(detail::series_value(history[i], kDynamicSeries[k]));
        try {
            out[k] = fit(y, options.method);
        } catch (const FitError& e) {
            throw FitError(activity.repo.str() + " " + std::string(series_name(kDynamicSeries[k])) + ": " + e.what());
        }
    }
    return out;
}

/// The activity series extended by `steps` predicted weeks (rounded to whole counts).
/// Predicted commits are attributed round-robin to the most prolific historical authors.
inline ActivityTimeSeries extend_activity(const ActivityTimeSeries& activity, Date as_of,
                                          const SeriesForecasters& models, std::size_t steps) {
    ActivityTimeSeries out = activity;
    out.weeks = detail::history_until(activity, as_of);
    if (out.weeks.empty()) throw FitError(activity.repo.str() + ": no activity before " + format_date(as_of));

    std::map<std::string, std::uint64_t> totals;
    for (const auto& w : out.weeks)
        for (const auto& [a, n] : w.authors) totals[a] += n;
    std::vector<std::pair<std::string, std::uint64_t>> ranked(totals.begin(), totals.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    const auto last = out.weeks.back();
    for (std::size_t j = 1; j <= steps; ++j) {
        WeekBucket w;
        w.week_start = last.week_start + std::chrono::days{7 * static_cast<long>(j)};
        const auto commits = detail::round_count(predict_steps(models[0], j).point);
        auto contributors = std::min(detail::round_count(predict_steps(models[1], j).point), commits);
        if (commits > 0 && contributors == 0) contributors = 1;
        for (std::uint32_t c = 0; c < commits; ++c) {
            const auto slot = c % contributors;
            const std::string author = slot < ranked.size() ? ranked[slot].first : "forecast-author-" + std::to_string(slot);
            ++w.authors[author];
        }
        w.commits = commits;
        w.active_contributors = static_cast<std::uint32_t>(w.authors.size());
        w.issues_opened = detail::round_count(predict_steps(models[2], j).point);
        w.issues_closed = detail::round_count(predict_steps(models[3], j).point);
        w.stars_total = last.stars_total;
        out.weeks.push_back(std::move(w));
    }
    return out;
}

/// Maps a feature vector to a label distribution.
using Labeler = std::function<LabelDistribution(const FeatureVector&)>;

inline Labeler rules_labeler(MaintenanceThresholds thresholds = {}) {
    return [thresholds](const FeatureVector& f) { return LabelDistribution::one_hot(apply_labeling_strategy(f, thresholds)); };
}

inline Labeler model_labeler(const Classifier& model) {
    return [&model](const FeatureVector& f) { return classify(model, f); };
}

struct HorizonForecast {
    Horizon horizon;
    Date as_of;
    FeatureVector features;
    LabelDistribution distribution;
    MaintenanceLabel label = MaintenanceLabel::Active;
};

/// Synthesizes the feature vector `horizon` months after `as_of` and labels it.
///
/// The history is extended with the rounded weekly forecasts and features are recomputed at
/// as_of + 30 * months. days_since_last_commit is then set from the forecast alone:
/// (H - j) * 7 where j is the last of the H predicted weeks with a nonzero commit count, or
/// the current value + 30 * months when every predicted week rounds to 0.
inline std::vector<HorizonForecast> forecast_labels(const ActivityTimeSeries& activity, Date as_of,
                                                    const Labeler& labeler, const std::vector<Horizon>& horizons,
                                                    const ForecastOptions& options = {},
                                                    const MaintenanceThresholds& thresholds = {}) {
    const auto models = fit_activity(activity, as_of, options);
    const auto current = compute_features(activity, as_of, thresholds);
    std::size_t max_steps = 0;
    for (auto h : horizons) max_steps = std::max(max_steps, Horizon::of(h.months).steps());
    const auto extended = extend_activity(activity, as_of, models, max_steps);
    const std::size_t history = extended.weeks.size() - max_steps;

    std::vector<HorizonForecast> out;
    for (auto h : horizons) {
        HorizonForecast r;
        r.horizon = h;
        r.as_of = as_of + std::chrono::days{h.days()};
        const std::size_t steps = h.steps();
        ActivityTimeSeries view = extended;
        view.weeks.resize(history + steps);
        r.features = compute_features(view, r.as_of, thresholds);
        std::optional<std::size_t> last_nonzero;
        for (std::size_t j = 1; j <= steps; ++j) {
            if (view.weeks[history + j - 1].commits > 0) last_nonzero = j;
        }
        r.features[Feature::days_since_last_commit] =
            last_nonzero ? static_cast<double>((steps - *last_nonzero) * 7)
                         : current[Feature::days_since_last_commit] + h.days();
        r.distribution = labeler(r.features);
        r.label = r.distribution.argmax();
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace depwatch
