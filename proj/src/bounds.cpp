#include "bosonperm/bounds.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "bosonperm/quench.hpp"

namespace bosonperm {

BoundSample bound_sample(const GlynnKernel& kernel, std::uint64_t seed, std::uint64_t index,
                         GlynnKernel::Workspace& ws) {
    kernel.draw(seed, index, ws);
    const int n = kernel.size();
    BoundSample s;
    s.p = GlynnKernel::glynn_product(ws, n).value();

    double log_q1 = 0.0, sum_abs = 0.0, sum_sq = 0.0;
    bool has_zero = false;
    for (int i = 0; i < n; ++i) {
        const double sq = ws.v_re[i] * ws.v_re[i] + ws.v_im[i] * ws.v_im[i];
        if (sq == 0.0) {
            has_zero = true;
        } else {
            log_q1 += 0.5 * std::log(sq);
        }
        sum_abs += std::sqrt(sq);
        sum_sq += sq;
    }
    const double dn = static_cast<double>(n);
    s.q1 = has_zero ? 0.0 : std::exp(log_q1);
    s.q2 = sum_abs > 0.0 ? std::exp(dn * (std::log(sum_abs) - std::log(dn))) : 0.0;
    s.q3 = sum_sq > 0.0 ? std::exp(0.5 * dn * (std::log(sum_sq) - std::log(dn))) : 0.0;
    return s;
}

BoundSample bound_samples(const ComplexMatrix& m, std::uint64_t seed, std::uint64_t index) {
    const GlynnKernel kernel(m);
    auto ws = kernel.make_workspace();
    return bound_sample(kernel, seed, index, ws);
}

bool chain_holds(const BoundSample& s, bool unit_norm) {
    if (s.q1 < 0.0 || s.q2 < 0.0 || s.q3 < 0.0) return false;
    if (s.p.real() > s.q1 * (1.0 + kChainSlack) + std::numeric_limits<double>::min()) return false;
    // AM-GM and Cauchy-Schwarz ties (all |v_i| equal) may invert by rounding.
    if (s.q1 > s.q2 * (1.0 + kChainSlack) || s.q2 > s.q3 * (1.0 + kChainSlack)) return false;
    if (unit_norm && s.q3 > 1.0 + kChainSlack) return false;
    return true;
}

namespace {

struct BlockSums {
    Complex p{0.0, 0.0};
    std::array<double, 3> q{0.0, 0.0, 0.0};
    std::uint64_t violations = 0;
};

BoundValue bound_value(const BlockSummary& blocks, double mean, std::uint64_t n_boot,
                       std::uint64_t seed) {
    BoundValue value;
    value.mean = mean;
    value.std_error = bootstrap(blocks, n_boot, seed).stderr_re;
    if (!(mean > 0.0)) {
        value.infinite = true;
        value.s2 = std::numeric_limits<double>::infinity();
        value.sigma = std::numeric_limits<double>::quiet_NaN();
        return value;
    }
    value.s2 = 0.0 - std::log(mean);
    const double relative = value.std_error / mean;
    value.sigma = relative < 1e-3 ? relative : std::log1p(relative);
    return value;
}

}  // namespace

BoundEstimates bound_entropies(const ComplexMatrix& m, std::uint64_t n_total, std::uint64_t seed,
                               unsigned workers, std::uint64_t n_block, std::uint64_t n_boot) {
    if (n_total == 0) throw std::invalid_argument("bound_entropies: n_total must be positive");
    const GlynnKernel kernel(m);
    const auto layout = BlockLayout::make(n_total, std::min(n_block, n_total));
    const bool unit_norm = spectral_norm(m) <= 1.0 + 1e-8;

    const std::size_t units = layout.n_block + (layout.remainder > 0 ? 1 : 0);
    const auto sums = run_indexed<BlockSums>(units, workers, [&](std::size_t u) {
        auto ws = kernel.make_workspace();
        const std::uint64_t first = u < layout.n_block ? layout.block_first(u)
                                                       : layout.blocked_samples();
        const std::uint64_t last = u < layout.n_block ? layout.block_last(u) : n_total;
        BlockSums acc;
        for (std::uint64_t k = first; k < last; ++k) {
            const auto s = bound_sample(kernel, seed, k, ws);
            acc.p += s.p;
            acc.q[0] += s.q1;
            acc.q[1] += s.q2;
            acc.q[2] += s.q3;
            if (!chain_holds(s, unit_norm)) ++acc.violations;
        }
        return acc;
    });

    const auto dn = static_cast<double>(n_total);
    const auto bs = static_cast<double>(layout.block_size);
    BlockSummary p_blocks;
    std::array<BlockSummary, 3> q_blocks;
    for (auto* b : {&p_blocks, &q_blocks[0], &q_blocks[1], &q_blocks[2]}) {
        b->block_size = layout.block_size;
        b->n_total = layout.blocked_samples();
        b->truncated = layout.remainder;
    }
    BlockSums total;
    for (std::size_t u = 0; u < units; ++u) {
        total.p += sums[u].p;
        for (int k = 0; k < 3; ++k) total.q[k] += sums[u].q[k];
        total.violations += sums[u].violations;
        if (u < layout.n_block) {
            p_blocks.block_means.push_back(sums[u].p / bs);
            for (int k = 0; k < 3; ++k) q_blocks[k].block_means.emplace_back(sums[u].q[k] / bs);
        }
    }

    BoundEstimates out;
    out.n_total = n_total;
    out.unit_norm = unit_norm;
    out.chain_violations = total.violations;
    out.perm.mean = total.p / dn;
    out.perm.n_total = n_total;
    out.perm.method = PermanentMethod::GlynnSampled;
    const auto perm_boot = bootstrap(p_blocks, n_boot, seed);
    out.perm = with_errors(out.perm, perm_boot);
    out.perm_bootstrap_average = perm_boot.resample_average;
    out.truncated = layout.remainder;
    out.s2p = bound_value(q_blocks[0], total.q[0] / dn, n_boot, seed);
    out.s2pp = bound_value(q_blocks[1], total.q[1] / dn, n_boot, seed);
    out.s2ppp = bound_value(q_blocks[2], total.q[2] / dn, n_boot, seed);
    return out;
}

}  // namespace bosonperm
