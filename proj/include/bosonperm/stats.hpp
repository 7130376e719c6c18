#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bosonperm/blocking.hpp"
#include "bosonperm/permanent.hpp"

namespace bosonperm {

// ---------------------------------------------------------------------------
// Blocking and bootstrap

/// Splits an in-memory stream into n_block contiguous blocks. A trailing
/// remainder below 1% of the stream is dropped and recorded in `truncated`.
BlockSummary block_means(std::span<const Complex> samples, std::uint64_t n_block);

struct BootstrapResult {
    std::vector<Complex> resample_means;
    Complex mean{0.0, 0.0};              ///< grand mean of the block means
    Complex resample_average{0.0, 0.0};  ///< mean of the resample means
    double stderr_re = 0.0;
    double stderr_im = 0.0;
};

inline constexpr std::uint64_t kDefaultBootstrapCount = 4096;

/// Draws n_boot resamples of the block means with replacement. Indices come
/// from Philox keyed by (seed, Bootstrap), a stream disjoint from the sample
/// phases. stderr_* is the standard deviation of the resample means.
BootstrapResult bootstrap(const BlockSummary& summary, std::uint64_t n_boot, std::uint64_t seed);

/// Fills stderr_re/stderr_im of a sampled estimate from a bootstrap.
PermanentEstimate with_errors(PermanentEstimate estimate, const BootstrapResult& boot);

// ---------------------------------------------------------------------------
// Entropy

struct EntropyPoint {
    double t = 0.0;
    double s2 = 0.0;
    double sigma_s2 = 0.0;
    double perm_re = 0.0;
    double perm_im = 0.0;
    double sigma_perm_re = 0.0;
    double sigma_perm_im = 0.0;
    std::uint64_t n_total = 0;
    int ns = 0;
    /// Re(perm) - sigma <= 0: the error bar cannot be trusted.
    bool unreliable_error = false;

    double density() const { return s2 / ns; }
    double sigma_density() const { return sigma_s2 / ns; }
};

/// Raised when the real part of an estimate is not positive, so S2 is
/// undefined at the attained precision.
class NonPositivePermanent : public std::runtime_error {
public:
    explicit NonPositivePermanent(const PermanentEstimate& estimate);
    const PermanentEstimate& estimate() const { return estimate_; }

private:
    PermanentEstimate estimate_;
};

/// s2 = -ln Re(perm); sigma = |ln(Re + sigma_re) - ln Re|, replaced by
/// sigma_re / Re once that ratio is below 1e-3.
EntropyPoint entropy_from_permanent(const PermanentEstimate& estimate, double t, int ns);

struct ImagConsistency {
    double ratio = 0.0;  ///< |Im mean| / sigma_im
    bool anomalous = false;
};

inline constexpr double kImagAnomalyThreshold = 3.0;

ImagConsistency imag_consistency(const PermanentEstimate& estimate);

// ---------------------------------------------------------------------------
// Sample-distribution histograms of x = -ln(+-part(p))

enum class Part { Re, Im };

/// Bins centred on integer multiples of `bin_width`.
struct Histogram {
    double bin_width = 0.25;
    std::map<std::int64_t, std::uint64_t> counts;

    void add(double x);
    std::uint64_t count() const;
    /// (bin centre, count / (normalizer * width)) rows in ascending x.
    std::vector<std::pair<double, double>> density(std::uint64_t normalizer) const;
    /// Centre of the most populated bin; NaN when empty.
    double peak() const;
};

/// Positive and negative histograms, normalised by the total number of
/// samples seen so the two areas plus the zero fraction add to one.
class SignHistogram {
public:
    explicit SignHistogram(Part part, double bin_width = 0.25);

    void add(const ScaledComplex& sample);
    void add(Complex sample);

    Part part() const { return part_; }
    const Histogram& positive() const { return positive_; }
    const Histogram& negative() const { return negative_; }
    std::uint64_t zeros() const { return zeros_; }
    std::uint64_t total() const { return total_; }
    double positive_weight() const;
    double negative_weight() const;

private:
    void add_signed(double value, double log_abs);

    Part part_;
    Histogram positive_;
    Histogram negative_;
    std::uint64_t zeros_ = 0;
    std::uint64_t total_ = 0;
};

SignHistogram sign_histogram(std::span<const Complex> samples, Part part,
                             double bin_width = 0.25);

// ---------------------------------------------------------------------------
// Error-scaling law sigma = sqrt(c / N_total), c = 2^(alpha Ns - beta)

/// (N_total, sigma) pairs for one system size.
struct ScalingSeries {
    double ns = 0.0;
    std::vector<std::pair<double, double>> sigma_by_n_total;
};

struct ScalingFit {
    double alpha = 0.0;
    double beta = 0.0;
    double alpha_err = 0.0;
    double beta_err = 0.0;
    std::vector<std::pair<double, double>> points;  ///< (Ns, c)
    std::vector<double> residuals;                  ///< in log2 c
};

/// Least squares on ln sigma vs ln N_total with the slope pinned to -1/2;
/// returns c. Needs >= 3 points.
double scaling_constant(std::span<const std::pair<double, double>> sigma_by_n_total);

/// Free least-squares slope of ln sigma vs ln N_total. Needs >= 2 points.
double loglog_slope(std::span<const std::pair<double, double>> sigma_by_n_total);

/// Extracts c per series, then fits log2 c = alpha Ns - beta by ordinary
/// least squares. Needs >= 3 series.
ScalingFit scaling_fit(std::span<const ScalingSeries> series);

/// Fits alpha, beta directly from (Ns, c) pairs.
ScalingFit fit_scaling_constants(std::vector<std::pair<double, double>> points);

}  // namespace bosonperm
