#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ssc {

/// Compensated (Kahan) accumulator. Reductions over parallel-filled buffers
/// run through this in index order so the sum does not depend on the thread
/// schedule.
class KahanSum {
public:
    void add(double x) {
        double y = x - compensation_;
        double t = total_ + y;
        compensation_ = (t - total_) - y;
        total_ = t;
    }

    double value() const { return total_; }

private:
    double total_ = 0.0;
    double compensation_ = 0.0;
};

double kahan_total(const std::vector<double>& values);

/// Runs fn(i) for i in [0, n) across at most `threads` workers (0 = hardware
/// concurrency). Work is split into contiguous blocks; any exception thrown
/// by fn is captured and rethrown on the calling thread after all workers
/// join. Callers must write only to per-index slots so results are
/// independent of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

}  // namespace ssc
