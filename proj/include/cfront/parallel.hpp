#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace cfront {

// Process-wide worker count. Resolved from set_threads(), else CFL_THREADS, else 1.
int default_threads();
void set_threads(int k);

// Persistent pool. run() hands out task ids 0..ntasks-1 and blocks until done.
// Which worker runs which task is irrelevant: callers must only write
// task-private output, so results never depend on the worker count.
class WorkerPool {
public:
    explicit WorkerPool(int threads);
    ~WorkerPool();
    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    int size() const { return static_cast<int>(workers_.size()) + 1; }
    void run(std::size_t ntasks, const std::function<void(std::size_t)>& task);

private:
    void loop();
    void drain();

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable wake_, done_;
    const std::function<void(std::size_t)>* task_ = nullptr;
    std::size_t ntasks_ = 0, next_ = 0, finished_ = 0;
    unsigned long generation_ = 0;
    bool stop_ = false;
};

WorkerPool& shared_pool(int threads);

// Split [0, n) into chunks of fixed size (independent of thread count) and
// call body(begin, end) for each.
void parallel_for(std::size_t n, std::size_t chunk, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

// Fixed-block reductions: partials per block of `chunk` items, combined in
// block order, so the result is identical for every thread count.
template <class T, class Map, class Combine>
T blocked_reduce(std::size_t n, std::size_t chunk, int threads, T init, Map map, Combine combine) {
    if (n == 0) return init;
    std::size_t nblocks = (n + chunk - 1) / chunk;
    std::vector<T> part(nblocks, init);
    parallel_for(n, chunk, threads, [&](std::size_t b, std::size_t e) {
        T acc = init;
        for (std::size_t i = b; i < e; ++i) acc = combine(acc, map(i));
        part[b / chunk] = acc;
    });
    T acc = init;
    for (const T& p : part) acc = combine(acc, p);
    return acc;
}

struct MinLoc {
    double value = std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();
};

// lowest index wins ties
inline MinLoc min_loc(const MinLoc& a, const MinLoc& b) {
    if (b.value < a.value || (b.value == a.value && b.index < a.index)) return b;
    return a;
}

inline MinLoc max_loc(const MinLoc& a, const MinLoc& b) {
    if (b.value > a.value || (b.value == a.value && b.index < a.index)) return b;
    return a;
}

} // namespace cfront
