// Deterministic work queue for embarrassingly parallel cell sweeps with
// incremental, crash-safe checkpointing.
//
// Cells are identified by their index; workers pull indices from an atomic
// counter and results land in an index-addressed table, so the output is
// independent of thread count and scheduling. The checkpoint writer flushes
// the maximal completed prefix whenever it grows by the flush batch, each
// time rewriting the file through a temp-then-rename, so a cell is either
// fully recorded or absent.

#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ratetip {

struct SweepOptions {
    int jobs = 1;
    std::size_t flush_every = 16;              // cells per checkpoint flush
    std::function<bool()> should_stop;         // cooperative cancel (tests, signals)
};

/// Run f(i) for i in [first, n) and return results in index order.
template <class R, class F>
std::vector<std::optional<R>> run_indexed(std::size_t n, std::size_t first, F&& f,
                                          const SweepOptions& opt = {}) {
    std::vector<std::optional<R>> results(n);
    std::atomic<std::size_t> next{first};
    std::atomic<bool> cancelled{false};
    auto worker = [&] {
        for (;;) {
            if (cancelled.load(std::memory_order_relaxed)) return;
            if (opt.should_stop && opt.should_stop()) {
                cancelled.store(true, std::memory_order_relaxed);
                return;
            }
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            results[i] = f(i);
        }
    };
    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return results;
}

/// Atomic whole-file replace: write to <path>.tmp, then rename over path.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

/// A checkpointed sweep over n cells writing one text row per cell after a
/// fixed header. Rows are produced by `row(i)` (must be deterministic) and
/// flushed in prefix order. With `resume_rows` > 0 the first rows are taken
/// as already present in `existing` and not recomputed.
template <class F>
void checkpointed_sweep(const std::filesystem::path& path, const std::string& header,
                        std::size_t n, std::size_t resume_rows, const std::string& existing,
                        F&& row, const SweepOptions& opt = {}) {
    if (resume_rows > n) throw std::invalid_argument("checkpointed_sweep: resume beyond cell count");
    std::string content = existing;
    if (resume_rows == 0) content = header;

    std::mutex flush_mutex;
    std::vector<std::optional<std::string>> rows(n);
    std::size_t frontier = resume_rows;

    std::atomic<std::size_t> done{0};
    auto compute = [&](std::size_t i) {
        std::string r = row(i);
        {
            std::lock_guard<std::mutex> lock(flush_mutex);
            rows[i] = std::move(r);
            std::size_t advanced = 0;
            while (frontier < n && rows[frontier]) {
                content += *rows[frontier];
                rows[frontier].reset();
                ++frontier;
                ++advanced;
            }
            done += advanced;
            if (advanced > 0 && (done >= opt.flush_every || frontier == n)) {
                atomic_write_file(path, content);
                done = 0;
            }
        }
        return 0;
    };
    run_indexed<int>(n, resume_rows, compute, opt);
    std::lock_guard<std::mutex> lock(flush_mutex);
    atomic_write_file(path, content);
}

} // namespace ratetip
