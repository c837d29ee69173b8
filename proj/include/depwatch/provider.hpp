#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "depwatch/activity.hpp"
#include "depwatch/error.hpp"

namespace depwatch {

/// Source of repository activity. Implementations must be safe to call from several
/// threads at once.
class ActivityProvider {
public:
    virtual ~ActivityProvider() = default;
    virtual ActivityTimeSeries fetch(const RepoRef& repo, DateRange window) const = 0;
};

inline ActivityTimeSeries fetch_activity(const ActivityProvider& provider, const RepoRef& repo, DateRange window) {
    return provider.fetch(repo, window);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

/// Directory of `<host>/<owner>/<name>.activity.json` files.
class OfflineStore final : public ActivityProvider {
public:
    explicit OfflineStore(std::filesystem::path root) : root_(std::move(root)) {}

    std::filesystem::path path_for(const RepoRef& repo) const {
        return root_ / repo.host / repo.owner / (repo.name + ".activity.json");
    }

    /// The stored series, unclipped.
    ActivityTimeSeries load(const RepoRef& repo) const {
        repo.validate();
        const auto path = path_for(repo);
        if (!std::filesystem::is_regular_file(path)) {
            throw NotFoundError("no activity for " + repo.str() + " in offline store " + root_.string());
        }
        auto series = parse_activity(read_file(path));
        if (series.repo != repo) {
            throw ValidationError("activity file " + path.string() + " describes " + series.repo.str());
        }
        return series;
    }

    ActivityTimeSeries fetch(const RepoRef& repo, DateRange window) const override {
        return clip_to_window(load(repo), window);
    }

    void store(const ActivityTimeSeries& series) const {
        series.validate();
        write_file(path_for(series.repo), serialize_activity(series));
    }

    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path root_;
};

/// Token bucket limiting request starts; `acquire` blocks until a token is available.
class TokenBucket {
public:
    TokenBucket(double capacity, double tokens_per_second)
        : capacity_(capacity), rate_(tokens_per_second), tokens_(capacity), last_(Clock::now()) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        for (;;) {
            refill();
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
            lock.unlock();
            std::this_thread::sleep_for(wait);
            lock.lock();
        }
    }

private:
    using Clock = std::chrono::steady_clock;

    void refill() {
        const auto now = Clock::now();
        tokens_ = std::min(capacity_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
        last_ = now;
    }

    std::mutex mutex_;
    double capacity_;
    double rate_;
    double tokens_;
    Clock::time_point last_;
};

struct FetchOutcome {
    RepoRef repo;
    std::optional<ActivityTimeSeries> activity;
    std::string error;
};

struct FetchOptions {
    std::size_t parallelism = 4;
    TokenBucket* rate_limit = nullptr;
};

/// Fetches every repository with at most `parallelism` requests in flight. Failures are
/// captured per repository; the result is in input order.
inline std::vector<FetchOutcome> fetch_all(const ActivityProvider& provider, const std::vector<RepoRef>& repos,
                                           DateRange window, FetchOptions options = {}) {
    std::vector<FetchOutcome> out(repos.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < repos.size(); i = next++) {
            out[i].repo = repos[i];
            try {
                if (options.rate_limit) options.rate_limit->acquire();
                out[i].activity = provider.fetch(repos[i], window);
            } catch (const std::exception& e) {
                out[i].error = e.what();
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(options.parallelism, repos.size()));
    std::vector<std::jthread> threads;
    for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
    worker();
    return out;
}

} // namespace depwatch
