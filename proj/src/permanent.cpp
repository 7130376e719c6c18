#include "bosonperm/permanent.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bosonperm/rng.hpp"

namespace bosonperm {

namespace {

// Products stay within [2^-kScaleBits, 2^kScaleBits] between renormalizations,
// so a single multiply can neither overflow nor leave the normal range.
constexpr int kScaleBits = 400;
const double kScaleHigh = std::ldexp(1.0, kScaleBits);
const double kScaleLow = std::ldexp(1.0, -kScaleBits);

inline void renormalize(double& re, double& im, std::int64_t& exponent) {
    int e = 0;
    std::frexp(std::max(std::abs(re), std::abs(im)), &e);
    re = std::ldexp(re, -e);
    im = std::ldexp(im, -e);
    exponent += e;
}

inline bool out_of_range(double re, double im) {
    const double a = std::max(std::abs(re), std::abs(im));
    return a < kScaleLow || a > kScaleHigh;
}

inline Complex mul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}

void naive_recurse(const ComplexMatrix& m, int row, std::uint32_t used, Complex partial,
                   Complex& total) {
    const int n = static_cast<int>(m.rows());
    if (row == n) {
        total += partial;
        return;
    }
    for (int col = 0; col < n; ++col) {
        if (used & (1U << col)) continue;
        naive_recurse(m, row + 1, used | (1U << col), mul(partial, m(row, col)), total);
    }
}

}  // namespace

std::string to_string(PermanentMethod method) {
    switch (method) {
        case PermanentMethod::ExactNaive: return "exact_naive";
        case PermanentMethod::ExactBBFG: return "exact_bbfg";
        case PermanentMethod::GlynnSampled: return "glynn_sampled";
    }
    return "unknown";
}

void validate_matrix(const ComplexMatrix& m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
        throw std::invalid_argument("permanent: matrix must be square and non-empty");
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw std::invalid_argument("permanent: matrix has a non-finite entry");
        }
    }
}

Complex perm_naive(const ComplexMatrix& m) {
    validate_matrix(m);
    if (m.rows() > kNaiveMaxSize) {
        throw std::invalid_argument("perm_naive: n = " + std::to_string(m.rows()) +
                                    " exceeds the permutation-sum cap of 12");
    }
    Complex total{0.0, 0.0};
    naive_recurse(m, 0, 0, Complex(1.0, 0.0), total);
    return total;
}

Complex perm_bbfg(const ComplexMatrix& m, int max_size) {
    validate_matrix(m);
    const int n = static_cast<int>(m.rows());
    if (n > max_size || n > 62) {
        throw std::invalid_argument("perm_bbfg: n = " + std::to_string(n) +
                                    " exceeds the exact cap of " + std::to_string(max_size) +
                                    "; use the sampled estimator instead");
    }
    std::vector<double> sum_re(n), sum_im(n);
    for (int j = 0; j < n; ++j) {
        Complex s{0.0, 0.0};
        for (int i = 0; i < n; ++i) s += m(i, j);
        sum_re[j] = s.real();
        sum_im[j] = s.imag();
    }
    std::vector<int> delta(n, 1);

    auto column_product = [&] {
        double pr = 1.0, pi = 0.0;
        for (int j = 0; j < n; ++j) {
            const double re = pr * sum_re[j] - pi * sum_im[j];
            pi = pr * sum_im[j] + pi * sum_re[j];
            pr = re;
        }
        return Complex(pr, pi);
    };

    Complex total = column_product();
    double sign = 1.0;
    const std::uint64_t terms = 1ULL << (n - 1);
    for (std::uint64_t k = 1; k < terms; ++k) {
        const int row = std::countr_zero(k) + 1;
        delta[row] = -delta[row];
        const double twice = 2.0 * delta[row];
        for (int j = 0; j < n; ++j) {
            const Complex a = m(row, j);
            sum_re[j] += twice * a.real();
            sum_im[j] += twice * a.imag();
        }
        sign = -sign;
        total += sign * column_product();
    }
    return total / std::ldexp(1.0, n - 1);
}

Complex ScaledComplex::value() const {
    const auto e = static_cast<int>(std::clamp<std::int64_t>(exponent, -4000, 4000));
    return {std::ldexp(mantissa.real(), e), std::ldexp(mantissa.imag(), e)};
}

double ScaledComplex::log_abs_real() const {
    return std::log(std::abs(mantissa.real())) + static_cast<double>(exponent) * std::numbers::ln2;
}

double ScaledComplex::log_abs_imag() const {
    return std::log(std::abs(mantissa.imag())) + static_cast<double>(exponent) * std::numbers::ln2;
}

GlynnKernel::GlynnKernel(const ComplexMatrix& m) : n_(static_cast<int>(m.rows())) {
    validate_matrix(m);
    const auto n = static_cast<std::size_t>(n_);
    col_re_.resize(n * n);
    col_im_.resize(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const Complex a = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            col_re_[j * n + i] = a.real();
            col_im_[j * n + i] = a.imag();
        }
    }
}

GlynnKernel::Workspace GlynnKernel::make_workspace() const {
    const auto n = static_cast<std::size_t>(n_);
    return Workspace{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                     std::vector<double>(n)};
}

void GlynnKernel::draw(std::uint64_t seed, std::uint64_t index, Workspace& ws) const {
    const auto n = static_cast<std::size_t>(n_);
    const Philox4x64::Key key{seed, static_cast<std::uint64_t>(StreamDomain::GlynnPhases)};
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    for (std::size_t q = 0; 4 * q < n; ++q) {
        const auto words = Philox4x64::generate({index, q, 0, 0}, key);
        for (std::size_t w = 0; w < 4 && 4 * q + w < n; ++w) {
            const double theta = kTwoPi * to_unit_double(words[w]);
            ws.r_re[4 * q + w] = std::cos(theta);
            ws.r_im[4 * q + w] = std::sin(theta);
        }
    }

    double* __restrict vr = ws.v_re.data();
    double* __restrict vi = ws.v_im.data();
    std::fill(vr, vr + n, 0.0);
    std::fill(vi, vi + n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double rr = ws.r_re[j];
        const double ri = ws.r_im[j];
        const double* __restrict cr = col_re_.data() + j * n;
        const double* __restrict ci = col_im_.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) {
            vr[i] += cr[i] * rr - ci[i] * ri;
            vi[i] += cr[i] * ri + ci[i] * rr;
        }
    }
}

ScaledComplex GlynnKernel::glynn_product(const Workspace& ws, int n) {
    double pr = 1.0, pi = 0.0;
    std::int64_t exponent = 0;
    for (int i = 0; i < n; ++i) {
        const double rr = ws.r_re[i], ri = ws.r_im[i];
        const double vr = ws.v_re[i], vi = ws.v_im[i];
        // conj(r_i) * v_i
        double fr = rr * vr + ri * vi;
        double fi = rr * vi - ri * vr;
        if (fr == 0.0 && fi == 0.0) return ScaledComplex{};
        if (out_of_range(fr, fi)) renormalize(fr, fi, exponent);
        const double re = pr * fr - pi * fi;
        pi = pr * fi + pi * fr;
        pr = re;
        if (out_of_range(pr, pi)) {
            if (pr == 0.0 && pi == 0.0) return ScaledComplex{};
            renormalize(pr, pi, exponent);
        }
    }
    return ScaledComplex{Complex(pr, pi), exponent};
}

ScaledComplex GlynnKernel::sample_scaled(std::uint64_t seed, std::uint64_t index,
                                         Workspace& ws) const {
    draw(seed, index, ws);
    return glynn_product(ws, n_);
}

Complex glynn_sample(const ComplexMatrix& m, std::uint64_t seed, std::uint64_t index) {
    const GlynnKernel kernel(m);
    auto ws = kernel.make_workspace();
    return kernel.sample(seed, index, ws);
}

void glynn_stream(const GlynnKernel& kernel, std::uint64_t seed, std::uint64_t n_total,
                  unsigned workers, const std::function<void(const SampleBatch&)>& sink,
                  std::uint64_t batch_size) {
    if (batch_size == 0) throw std::invalid_argument("glynn_stream: batch_size must be positive");
    workers = resolve_workers(workers);
    for (std::uint64_t first = 0; first < n_total; first += batch_size) {
        SampleBatch batch;
        batch.seed = seed;
        batch.first = first;
        batch.last = std::min(n_total, first + batch_size);
        batch.values.resize(batch.last - batch.first);
        const std::uint64_t len = batch.last - batch.first;
        const std::uint64_t chunks = std::min<std::uint64_t>(workers, len);
        run_indexed<int>(chunks, workers, [&](std::size_t c) {
            auto ws = kernel.make_workspace();
            const std::uint64_t lo = len * c / chunks, hi = len * (c + 1) / chunks;
            for (std::uint64_t k = lo; k < hi; ++k) {
                batch.values[k] = kernel.sample(seed, first + k, ws);
            }
            return 0;
        });
        sink(batch);
    }
}

GlynnRun glynn_estimate(const ComplexMatrix& m, std::uint64_t n_total, std::uint64_t seed,
                        unsigned workers, std::uint64_t n_block) {
    if (n_total == 0) throw std::invalid_argument("glynn_estimate: n_total must be positive");
    const GlynnKernel kernel(m);
    const auto layout = BlockLayout::make(n_total, std::min(n_block, n_total));

    // Unit n_block (if any) is the truncated tail.
    const std::size_t units = layout.n_block + (layout.remainder > 0 ? 1 : 0);
    const auto sums = run_indexed<Complex>(units, workers, [&](std::size_t u) {
        auto ws = kernel.make_workspace();
        const std::uint64_t first = u < layout.n_block ? layout.block_first(u)
                                                       : layout.blocked_samples();
        const std::uint64_t last = u < layout.n_block ? layout.block_last(u) : n_total;
        Complex sum{0.0, 0.0};
        for (std::uint64_t k = first; k < last; ++k) sum += kernel.sample(seed, k, ws);
        return sum;
    });

    GlynnRun run;
    run.blocks.block_size = layout.block_size;
    run.blocks.n_total = layout.blocked_samples();
    run.blocks.truncated = layout.remainder;
    run.blocks.block_means.reserve(layout.n_block);
    Complex total{0.0, 0.0};
    for (std::size_t u = 0; u < units; ++u) {
        total += sums[u];
        if (u < layout.n_block) {
            run.blocks.block_means.push_back(sums[u] / static_cast<double>(layout.block_size));
        }
    }
    run.estimate.mean = total / static_cast<double>(n_total);
    run.estimate.n_total = n_total;
    run.estimate.method = PermanentMethod::GlynnSampled;
    return run;
}

}  // namespace bosonperm
