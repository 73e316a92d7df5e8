#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ace {

// Persistent worker pool for data-parallel phases. Work items are claimed in
// grains off a shared counter; each item writes only its own output slot, so
// results do not depend on the claim order.
class ThreadPool {
public:
    explicit ThreadPool(unsigned threads) {
        if (threads == 0) threads = 1;
        for (unsigned i = 0; i + 1 < threads; ++i) {
            workers_.emplace_back([this] { worker_loop(); });
        }
    }

    ~ThreadPool() {
        {
            std::lock_guard lk(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
    }

    unsigned size() const { return static_cast<unsigned>(workers_.size()) + 1; }

    static ThreadPool& global() {
        static ThreadPool pool(std::thread::hardware_concurrency());
        return pool;
    }

    // Not reentrant from inside a work item; concurrent callers serialize.
    void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                      std::size_t grain = 16) {
        if (count == 0) return;
        if (workers_.empty() || count <= grain) {
            for (std::size_t i = 0; i < count; ++i) fn(i);
            return;
        }
        std::lock_guard job_lock(job_mu_);
        {
            std::lock_guard lk(mu_);
            job_fn_ = &fn;
            job_next_.store(0, std::memory_order_relaxed);
            job_end_ = count;
            job_grain_ = grain;
            active_ = static_cast<unsigned>(workers_.size());
            ++job_id_;
        }
        cv_.notify_all();
        drain();  // caller participates
        std::unique_lock lk(mu_);
        done_cv_.wait(lk, [this] { return active_ == 0; });
        job_fn_ = nullptr;
    }

private:
    void drain() {
        const auto* fn = job_fn_;
        for (;;) {
            std::size_t begin = job_next_.fetch_add(job_grain_, std::memory_order_relaxed);
            if (begin >= job_end_) break;
            std::size_t end = std::min(begin + job_grain_, job_end_);
            for (std::size_t i = begin; i < end; ++i) (*fn)(i);
        }
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            {
                std::unique_lock lk(mu_);
                cv_.wait(lk, [&] { return stop_ || job_id_ != seen; });
                if (stop_) return;
                seen = job_id_;
            }
            drain();
            {
                std::lock_guard lk(mu_);
                if (--active_ == 0) done_cv_.notify_all();
            }
        }
    }

    std::vector<std::thread> workers_;
    std::mutex job_mu_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    bool stop_ = false;
    std::uint64_t job_id_ = 0;
    unsigned active_ = 0;
    const std::function<void(std::size_t)>* job_fn_ = nullptr;
    std::atomic<std::size_t> job_next_{0};
    std::size_t job_end_ = 0;
    std::size_t job_grain_ = 16;
};

}  // namespace ace
