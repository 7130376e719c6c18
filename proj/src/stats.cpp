#include "bosonperm/stats.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bosonperm/rng.hpp"

namespace bosonperm {

BlockSummary block_means(std::span<const Complex> samples, std::uint64_t n_block) {
    const auto layout = BlockLayout::make(samples.size(), n_block);
    BlockSummary summary;
    summary.block_size = layout.block_size;
    summary.n_total = layout.blocked_samples();
    summary.truncated = layout.remainder;
    summary.block_means.reserve(layout.n_block);
    for (std::uint64_t j = 0; j < layout.n_block; ++j) {
        Complex sum{0.0, 0.0};
        for (std::uint64_t k = layout.block_first(j); k < layout.block_last(j); ++k) {
            sum += samples[k];
        }
        summary.block_means.push_back(sum / static_cast<double>(layout.block_size));
    }
    return summary;
}

BootstrapResult bootstrap(const BlockSummary& summary, std::uint64_t n_boot, std::uint64_t seed) {
    if (n_boot < 2) throw std::invalid_argument("bootstrap: n_boot must be at least 2");
    const std::uint64_t n_block = summary.block_means.size();
    if (n_block == 0) throw std::invalid_argument("bootstrap: no blocks");

    BootstrapResult result;
    result.mean = summary.grand_mean();
    result.resample_means.reserve(n_boot);
    const Philox4x64::Key key{seed, static_cast<std::uint64_t>(StreamDomain::Bootstrap)};
    for (std::uint64_t k = 0; k < n_boot; ++k) {
        Complex sum{0.0, 0.0};
        for (std::uint64_t q = 0; 4 * q < n_block; ++q) {
            const auto words = Philox4x64::generate({k, q, 0, 0}, key);
            for (std::uint64_t w = 0; w < 4 && 4 * q + w < n_block; ++w) {
                sum += summary.block_means[to_bounded(words[w], n_block)];
            }
        }
        result.resample_means.push_back(sum / static_cast<double>(n_block));
    }

    Complex avg{0.0, 0.0};
    for (const auto& q : result.resample_means) avg += q;
    avg /= static_cast<double>(n_boot);
    double var_re = 0.0, var_im = 0.0;
    for (const auto& q : result.resample_means) {
        var_re += (q.real() - avg.real()) * (q.real() - avg.real());
        var_im += (q.imag() - avg.imag()) * (q.imag() - avg.imag());
    }
    result.resample_average = avg;
    result.stderr_re = std::sqrt(var_re / static_cast<double>(n_boot - 1));
    result.stderr_im = std::sqrt(var_im / static_cast<double>(n_boot - 1));
    return result;
}

PermanentEstimate with_errors(PermanentEstimate estimate, const BootstrapResult& boot) {
    estimate.stderr_re = boot.stderr_re;
    estimate.stderr_im = boot.stderr_im;
    return estimate;
}

namespace {
std::string describe_nonpositive(const PermanentEstimate& e) {
    std::ostringstream out;
    out.precision(17);
    out << "estimate consistent with zero permanent; increase N_total (Re mean = "
        << e.mean.real() << ", stderr_re = " << e.stderr_re << ", n_total = " << e.n_total
        << ")";
    return out.str();
}
}  // namespace

NonPositivePermanent::NonPositivePermanent(const PermanentEstimate& estimate)
    : std::runtime_error(describe_nonpositive(estimate)), estimate_(estimate) {}

EntropyPoint entropy_from_permanent(const PermanentEstimate& estimate, double t, int ns) {
    const double re = estimate.mean.real();
    if (!(re > 0.0)) throw NonPositivePermanent(estimate);

    EntropyPoint point;
    point.t = t;
    point.ns = ns;
    point.n_total = estimate.n_total;
    point.perm_re = re;
    point.perm_im = estimate.mean.imag();
    point.sigma_perm_re = estimate.stderr_re;
    point.sigma_perm_im = estimate.stderr_im;
    point.s2 = 0.0 - std::log(re);  // +0 rather than -0 for perm = 1
    const double relative = estimate.stderr_re / re;
    point.sigma_s2 = relative < 1e-3 ? relative : std::abs(std::log1p(relative));
    point.unreliable_error = re - estimate.stderr_re <= 0.0;
    return point;
}

ImagConsistency imag_consistency(const PermanentEstimate& estimate) {
    const double im = std::abs(estimate.mean.imag());
    ImagConsistency report;
    if (estimate.stderr_im > 0.0) {
        report.ratio = im / estimate.stderr_im;
    } else {
        report.ratio = im > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    report.anomalous = report.ratio > kImagAnomalyThreshold;
    return report;
}

// ---------------------------------------------------------------------------

void Histogram::add(double x) {
    const auto bin = static_cast<std::int64_t>(std::floor(x / bin_width + 0.5));
    ++counts[bin];
}

std::uint64_t Histogram::count() const {
    std::uint64_t n = 0;
    for (const auto& [bin, c] : counts) n += c;
    return n;
}

std::vector<std::pair<double, double>> Histogram::density(std::uint64_t normalizer) const {
    std::vector<std::pair<double, double>> rows;
    rows.reserve(counts.size());
    const double scale = normalizer > 0 ? 1.0 / (static_cast<double>(normalizer) * bin_width) : 0.0;
    for (const auto& [bin, c] : counts) {
        rows.emplace_back(static_cast<double>(bin) * bin_width, static_cast<double>(c) * scale);
    }
    return rows;
}

double Histogram::peak() const {
    if (counts.empty()) return std::numeric_limits<double>::quiet_NaN();
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return static_cast<double>(best->first) * bin_width;
}

SignHistogram::SignHistogram(Part part, double bin_width)
    : part_(part), positive_{bin_width, {}}, negative_{bin_width, {}} {
    if (!(bin_width > 0.0)) throw std::invalid_argument("histogram: bin width must be positive");
}

void SignHistogram::add_signed(double value, double log_abs) {
    ++total_;
    if (value > 0.0) {
        positive_.add(-log_abs);
    } else if (value < 0.0) {
        negative_.add(-log_abs);
    } else {
        ++zeros_;
    }
}

void SignHistogram::add(const ScaledComplex& sample) {
    if (part_ == Part::Re) {
        add_signed(sample.mantissa.real(), sample.log_abs_real());
    } else {
        add_signed(sample.mantissa.imag(), sample.log_abs_imag());
    }
}

void SignHistogram::add(Complex sample) {
    const double v = part_ == Part::Re ? sample.real() : sample.imag();
    add_signed(v, std::log(std::abs(v)));
}

double SignHistogram::positive_weight() const {
    return total_ ? static_cast<double>(positive_.count()) / static_cast<double>(total_) : 0.0;
}

double SignHistogram::negative_weight() const {
    return total_ ? static_cast<double>(negative_.count()) / static_cast<double>(total_) : 0.0;
}

SignHistogram sign_histogram(std::span<const Complex> samples, Part part, double bin_width) {
    if (samples.empty()) throw std::invalid_argument("sign_histogram: no samples");
    SignHistogram hist(part, bin_width);
    for (const auto& s : samples) hist.add(s);
    return hist;
}

// ---------------------------------------------------------------------------

double scaling_constant(std::span<const std::pair<double, double>> sigma_by_n_total) {
    if (sigma_by_n_total.size() < 3) {
        throw std::invalid_argument("scaling_constant: need at least 3 (N_total, sigma) points");
    }
    // ln sigma = 0.5 ln c - 0.5 ln N  =>  ln c = mean(2 ln sigma + ln N)
    double acc = 0.0;
    for (const auto& [n, sigma] : sigma_by_n_total) {
        if (!(n > 0.0) || !(sigma > 0.0)) {
            throw std::invalid_argument("scaling_constant: N_total and sigma must be positive");
        }
        acc += 2.0 * std::log(sigma) + std::log(n);
    }
    return std::exp(acc / static_cast<double>(sigma_by_n_total.size()));
}

namespace {
struct LineFit {
    double slope = 0.0, intercept = 0.0, slope_err = 0.0, intercept_err = 0.0;
    std::vector<double> residuals;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("least squares: abscissae are all equal");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.residuals.push_back(r);
        ssr += r * r;
    }
    if (x.size() > 2) {
        const double s2 = ssr / (n - 2.0);
        fit.slope_err = std::sqrt(s2 / sxx);
        fit.intercept_err = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    }
    return fit;
}
}  // namespace

double loglog_slope(std::span<const std::pair<double, double>> sigma_by_n_total) {
    if (sigma_by_n_total.size() < 2) {
        throw std::invalid_argument("loglog_slope: need at least 2 points");
    }
    std::vector<double> x, y;
    for (const auto& [n, sigma] : sigma_by_n_total) {
        x.push_back(std::log(n));
        y.push_back(std::log(sigma));
    }
    return least_squares(x, y).slope;
}

ScalingFit fit_scaling_constants(std::vector<std::pair<double, double>> points) {
    if (points.size() < 3) {
        throw std::invalid_argument("scaling_fit: need at least 3 system sizes");
    }
    std::vector<double> x, y;
    for (const auto& [ns, c] : points) {
        if (!(c > 0.0)) throw std::invalid_argument("scaling_fit: c must be positive");
        x.push_back(ns);
        y.push_back(std::log2(c));
    }
    const auto line = least_squares(x, y);
    ScalingFit fit;
    fit.alpha = line.slope;
    fit.beta = -line.intercept;
    fit.alpha_err = line.slope_err;
    fit.beta_err = line.intercept_err;
    fit.points = std::move(points);
    fit.residuals = line.residuals;
    return fit;
}

ScalingFit scaling_fit(std::span<const ScalingSeries> series) {
    if (series.size() < 3) {
        throw std::invalid_argument("scaling_fit: need at least 3 system sizes");
    }
    std::vector<std::pair<double, double>> points;
    for (const auto& s : series) {
        points.emplace_back(s.ns, scaling_constant(s.sigma_by_n_total));
    }
    return fit_scaling_constants(std::move(points));
}

}  // namespace bosonperm
