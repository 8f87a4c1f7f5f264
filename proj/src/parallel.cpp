#include "cfront/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>

namespace cfront {

namespace {
std::atomic<int> g_threads{0};
thread_local bool t_in_task = false;
std::mutex g_run_mu;
}

int default_threads() {
    int k = g_threads.load();
    if (k > 0) return k;
    if (const char* env = std::getenv("CFL_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v > 0) return v;
        } catch (...) {
        }
    }
    return 1;
}

void set_threads(int k) { g_threads.store(k > 0 ? k : 0); }

WorkerPool::WorkerPool(int threads) {
    for (int i = 1; i < std::max(threads, 1); ++i) workers_.emplace_back([this] { loop(); });
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard lk(mu_);
        stop_ = true;
    }
    wake_.notify_all();
    for (auto& w : workers_) w.join();
}

void WorkerPool::drain() {
    for (;;) {
        std::size_t id;
        {
            std::lock_guard lk(mu_);
            if (next_ >= ntasks_) return;
            id = next_++;
        }
        t_in_task = true;
        (*task_)(id);
        t_in_task = false;
        std::lock_guard lk(mu_);
        if (++finished_ == ntasks_) done_.notify_all();
    }
}

void WorkerPool::loop() {
    unsigned long seen = 0;
    for (;;) {
        {
            std::unique_lock lk(mu_);
            wake_.wait(lk, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
        }
        drain();
    }
}

void WorkerPool::run(std::size_t ntasks, const std::function<void(std::size_t)>& task) {
    if (ntasks == 0) return;
    if (workers_.empty() || ntasks == 1 || t_in_task) {
        for (std::size_t i = 0; i < ntasks; ++i) task(i);
        return;
    }
    std::lock_guard run_lk(g_run_mu);
    {
        std::lock_guard lk(mu_);
        task_ = &task;
        ntasks_ = ntasks;
        next_ = 0;
        finished_ = 0;
        ++generation_;
    }
    wake_.notify_all();
    drain();
    std::unique_lock lk(mu_);
    done_.wait(lk, [&] { return finished_ == ntasks_; });
    task_ = nullptr;
}

WorkerPool& shared_pool(int threads) {
    // one pool per requested size; pools live for the process lifetime
    static std::mutex mu;
    static std::map<int, std::unique_ptr<WorkerPool>> pools;
    std::lock_guard lk(mu);
    auto& p = pools[std::max(threads, 1)];
    if (!p) p = std::make_unique<WorkerPool>(threads);
    return *p;
}

void parallel_for(std::size_t n, std::size_t chunk, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    chunk = std::max<std::size_t>(chunk, 1);
    std::size_t nblocks = (n + chunk - 1) / chunk;
    if (threads <= 1 || nblocks == 1 || t_in_task) {
        for (std::size_t b = 0; b < nblocks; ++b) body(b * chunk, std::min(n, (b + 1) * chunk));
        return;
    }
    shared_pool(threads).run(nblocks, [&](std::size_t b) { body(b * chunk, std::min(n, (b + 1) * chunk)); });
}

} // namespace cfront
