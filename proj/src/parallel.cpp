#include "riskreg/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace riskreg {

std::size_t default_worker_count() {
    if (const char* env = std::getenv("RISKREG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::size_t resolve_worker_count(std::size_t requested) {
    return requested > 0 ? requested : default_worker_count();
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
    workers = std::min(std::max<std::size_t>(workers, 1), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto run_stride = [&](std::size_t start) {
        try {
            for (std::size_t i = start; i < count; i += workers) body(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_stride, w);
    run_stride(0);
    for (auto& t : pool) t.join();

    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace riskreg
