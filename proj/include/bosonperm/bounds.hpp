#pragma once

#include <cstdint>

#include "bosonperm/permanent.hpp"
#include "bosonperm/stats.hpp"

namespace bosonperm {

/// Quantities of one random phase vector r, with v = M r:
///   q1 = prod_i |v_i|
///   q2 = (sum_i |v_i| / n)^n
///   q3 = (||v||_2 / sqrt(n))^n
/// and the Glynn sample p built from the same r. Per sample
/// Re p <= q1 <= q2 <= q3, and q3 <= 1 whenever ||M||_2 <= 1.
struct BoundSample {
    Complex p{0.0, 0.0};
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
};

BoundSample bound_sample(const GlynnKernel& kernel, std::uint64_t seed, std::uint64_t index,
                         GlynnKernel::Workspace& ws);

BoundSample bound_samples(const ComplexMatrix& m, std::uint64_t seed, std::uint64_t index);

/// Relative slack on every link of the chain, covering rounding at ties.
inline constexpr double kChainSlack = 1e-10;

/// True when Re p <= q1 <= q2 <= q3 holds to within kChainSlack and, if
/// `unit_norm`, q3 <= 1 + kChainSlack.
bool chain_holds(const BoundSample& s, bool unit_norm);

struct BoundValue {
    double mean = 0.0;   ///< sample mean of q
    double std_error = 0.0;  ///< bootstrap error of the mean
    double s2 = 0.0;     ///< -ln mean
    double sigma = 0.0;
    bool infinite = false;  ///< mean == 0, bound is +inf
};

struct BoundEstimates {
    BoundValue s2p;    ///< -ln E[q1]
    BoundValue s2pp;   ///< -ln E[q2]
    BoundValue s2ppp;  ///< -ln E[q3]
    PermanentEstimate perm;  ///< Glynn estimate from the same phase vectors
    Complex perm_bootstrap_average{0.0, 0.0};
    std::uint64_t truncated = 0;
    std::uint64_t n_total = 0;
    std::uint64_t chain_violations = 0;
    bool unit_norm = false;  ///< ||M||_2 <= 1 + 1e-8, so q3 <= 1 was checked
};

/// One pass computing p, q1, q2, q3 from shared phase vectors. Sample
/// indices and keys match glynn_estimate, so `perm` equals its result.
BoundEstimates bound_entropies(const ComplexMatrix& m, std::uint64_t n_total, std::uint64_t seed,
                               unsigned workers, std::uint64_t n_block = kDefaultBlockCount,
                               std::uint64_t n_boot = kDefaultBootstrapCount);

}  // namespace bosonperm
