#include "ssc/util.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

namespace ssc {

double kahan_total(const std::vector<double>& values) {
    KahanSum sum;
    for (double v : values) sum.add(v);
    return sum.value();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (threads == 0) threads = hw > 0 ? hw : 1;
    threads = static_cast<unsigned>(
        std::min<std::size_t>(threads, n));

    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t begin = static_cast<std::size_t>(t) * chunk;
        if (begin >= n) break;
        std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();

    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ssc
