#include "bosonperm/blocking.hpp"

#include <stdexcept>
#include <string>

namespace bosonperm {

BlockLayout BlockLayout::make(std::uint64_t n_total, std::uint64_t n_block) {
    if (n_block == 0) {
        throw std::invalid_argument("blocking: n_block must be positive");
    }
    if (n_block > n_total) {
        throw std::invalid_argument("blocking: n_block = " + std::to_string(n_block) +
                                    " exceeds n_total = " + std::to_string(n_total));
    }
    BlockLayout layout;
    layout.n_total = n_total;
    layout.n_block = n_block;
    layout.block_size = n_total / n_block;
    layout.remainder = n_total % n_block;
    if (layout.remainder * 100 >= n_total) {
        throw std::invalid_argument("blocking: " + std::to_string(layout.remainder) +
                                    " trailing samples would be truncated, which is not below "
                                    "1% of n_total; choose n_total divisible by n_block");
    }
    return layout;
}

Complex BlockSummary::grand_mean() const {
    Complex sum{0.0, 0.0};
    for (const auto& m : block_means) sum += m;
    return block_means.empty() ? sum : sum / static_cast<double>(block_means.size());
}

unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace bosonperm
