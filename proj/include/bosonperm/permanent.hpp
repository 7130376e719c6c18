#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bosonperm/blocking.hpp"
#include "bosonperm/types.hpp"

namespace bosonperm {

enum class PermanentMethod { ExactNaive, ExactBBFG, GlynnSampled };

std::string to_string(PermanentMethod method);

/// Point estimate of a permanent. Exact methods carry zero errors; the
/// sampled method gets its errors from the blocking/bootstrap analysis.
struct PermanentEstimate {
    Complex mean{0.0, 0.0};
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::uint64_t n_total = 0;
    PermanentMethod method = PermanentMethod::ExactBBFG;
};

inline constexpr int kNaiveMaxSize = 12;
inline constexpr int kDefaultExactCap = 34;

/// Throws std::invalid_argument unless the matrix is square, non-empty and
/// finite.
void validate_matrix(const ComplexMatrix& m);

/// Sum over all n! permutations. Test oracle; n <= 12.
Complex perm_naive(const ComplexMatrix& m);

/// Balasubramanian-Bax-Franklin-Glynn expansion over sign vectors with the
/// first sign fixed, enumerated in Gray-code order so every step flips one
/// sign and updates the column sums in O(n). Total cost O(n 2^(n-1)).
Complex perm_bbfg(const ComplexMatrix& m, int max_size = kDefaultExactCap);

/// A complex number held as mantissa * 2^exponent so long products of small
/// factors never underflow.
struct ScaledComplex {
    Complex mantissa{0.0, 0.0};
    std::int64_t exponent = 0;

    bool is_zero() const { return mantissa == Complex(0.0, 0.0); }
    Complex value() const;
    /// ln|Re| and ln|Im|; -inf for a zero part.
    double log_abs_real() const;
    double log_abs_imag() const;
};

/// Precomputed split-storage copy of a matrix for repeated Glynn draws.
///
/// A sample with index m draws phases theta_i ~ U[0, 2 pi) from Philox keyed
/// by (seed, GlynnPhases) at counter (m, i / 4, 0, 0), sets r_i =
/// exp(i theta_i), v = M r, and returns p = prod_i conj(r_i) v_i.
class GlynnKernel {
public:
    explicit GlynnKernel(const ComplexMatrix& m);

    int size() const { return n_; }

    /// Scratch buffers; one per thread.
    struct Workspace {
        std::vector<double> r_re, r_im, v_re, v_im;
    };
    Workspace make_workspace() const;

    /// Fills ws.r_* with the phases of sample `index` and ws.v_* with M r.
    void draw(std::uint64_t seed, std::uint64_t index, Workspace& ws) const;

    /// prod_i conj(r_i) v_i for the vectors currently in `ws`.
    static ScaledComplex glynn_product(const Workspace& ws, int n);

    ScaledComplex sample_scaled(std::uint64_t seed, std::uint64_t index, Workspace& ws) const;
    Complex sample(std::uint64_t seed, std::uint64_t index, Workspace& ws) const {
        return sample_scaled(seed, index, ws).value();
    }

private:
    int n_;
    std::vector<double> col_re_;  // column-major: col_re_[j * n + i] = Re M[i][j]
    std::vector<double> col_im_;
};

/// Single Glynn draw; bit-identical for a fixed (matrix, seed, index).
Complex glynn_sample(const ComplexMatrix& m, std::uint64_t seed, std::uint64_t index);

/// Raw sample values for indices [first, last).
struct SampleBatch {
    std::vector<Complex> values;
    std::uint64_t seed = 0;
    std::uint64_t first = 0;
    std::uint64_t last = 0;
};

inline constexpr std::uint64_t kDefaultBatchSize = 1ULL << 16;

/// Streams samples [0, n_total) in index-ordered batches of `batch_size`,
/// computing each batch on `workers` threads. The callback sees batches in
/// order on the calling thread.
void glynn_stream(const GlynnKernel& kernel, std::uint64_t seed, std::uint64_t n_total,
                  unsigned workers, const std::function<void(const SampleBatch&)>& sink,
                  std::uint64_t batch_size = kDefaultBatchSize);

struct GlynnRun {
    PermanentEstimate estimate;  ///< mean over all n_total samples, zero errors
    BlockSummary blocks;
};

inline constexpr std::uint64_t kDefaultBlockCount = 1024;

/// Sample mean of glynn_sample over indices [0, n_total). Samples are
/// summed per block in index order and blocks are reduced in block order, so
/// the result is the same for every worker count. When n_total < n_block
/// every sample forms its own block.
GlynnRun glynn_estimate(const ComplexMatrix& m, std::uint64_t n_total, std::uint64_t seed,
                        unsigned workers, std::uint64_t n_block = kDefaultBlockCount);

}  // namespace bosonperm
