#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "bosonperm/types.hpp"

namespace bosonperm {

/// Partition of sample indices [0, n_total) into n_block equal contiguous
/// blocks plus a trailing remainder that is excluded from blocking.
struct BlockLayout {
    std::uint64_t n_total = 0;
    std::uint64_t n_block = 0;
    std::uint64_t block_size = 0;
    std::uint64_t remainder = 0;

    /// Throws std::invalid_argument if n_block is zero, exceeds n_total, or
    /// the truncated remainder reaches 1% of n_total.
    static BlockLayout make(std::uint64_t n_total, std::uint64_t n_block);

    std::uint64_t block_first(std::uint64_t j) const { return j * block_size; }
    std::uint64_t block_last(std::uint64_t j) const { return (j + 1) * block_size; }
    std::uint64_t blocked_samples() const { return n_block * block_size; }
};

/// Per-block means of a sample stream.
struct BlockSummary {
    std::vector<Complex> block_means;
    std::uint64_t block_size = 0;
    std::uint64_t n_total = 0;    ///< samples covered by blocks = N_block * block_size
    std::uint64_t truncated = 0;  ///< trailing samples left out of the blocks

    std::size_t n_block() const { return block_means.size(); }
    /// Mean of block means; equals the mean of the blocked samples.
    Complex grand_mean() const;
};

unsigned resolve_workers(unsigned requested);

/// Runs fn(i) for i in [0, count) on up to `workers` threads and returns the
/// results in index order. Which thread runs which index never affects the
/// returned values, so reductions over the result are worker-independent.
template <class Result, class Fn>
std::vector<Result> run_indexed(std::size_t count, unsigned workers, Fn&& fn) {
    std::vector<Result> results(count);
    workers = resolve_workers(workers);
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    const auto n_threads = std::min<std::size_t>(workers, count);
    pool.reserve(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace bosonperm
