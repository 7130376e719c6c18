#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bosonperm/quench.hpp"
#include "bosonperm/stats.hpp"

using namespace bosonperm;

TEST(Blocking, ConstantStream) {
    const std::vector<Complex> stream(600, Complex(3.0, 0.0));
    for (std::uint64_t n_block : {1, 6, 100, 600}) {
        const auto summary = block_means(stream, n_block);
        for (const auto& m : summary.block_means) EXPECT_EQ(m, Complex(3.0, 0.0));
    }
}

TEST(Blocking, FourValues) {
    const std::vector<Complex> stream{1.0, 2.0, 3.0, 4.0};
    const auto summary = block_means(stream, 2);
    ASSERT_EQ(summary.n_block(), 2u);
    EXPECT_EQ(summary.block_means[0], Complex(1.5));
    EXPECT_EQ(summary.block_means[1], Complex(3.5));
    EXPECT_EQ(summary.grand_mean(), Complex(2.5));
}

TEST(Blocking, GrandMeanMatchesStreamMean) {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> normal(0.3, 2.0);
    std::vector<Complex> stream(1 << 14);
    for (auto& v : stream) v = Complex(normal(gen), normal(gen));
    Complex direct(0.0);
    for (const auto& v : stream) direct += v;
    direct /= static_cast<double>(stream.size());
    const auto summary = block_means(stream, 1024);
    EXPECT_LT(std::abs(summary.grand_mean() - direct), 1e-12);
    EXPECT_EQ(summary.truncated, 0u);
}

TEST(Blocking, RemainderRules) {
    EXPECT_EQ(BlockLayout::make(1005, 100).remainder, 5u);
    EXPECT_THROW(BlockLayout::make(1050, 100), std::invalid_argument);  // 50 dropped = 4.8%
    EXPECT_THROW(BlockLayout::make(10, 11), std::invalid_argument);
    EXPECT_THROW(BlockLayout::make(10, 0), std::invalid_argument);
}

TEST(Bootstrap, IdenticalBlocksHaveNoError) {
    BlockSummary summary;
    summary.block_means.assign(64, Complex(0.25, -1.0));
    summary.block_size = 10;
    summary.n_total = 640;
    const auto boot = bootstrap(summary, 256, 3);
    EXPECT_EQ(boot.stderr_re, 0.0);
    EXPECT_EQ(boot.stderr_im, 0.0);
    EXPECT_EQ(boot.mean, Complex(0.25, -1.0));
}

TEST(Bootstrap, MatchesAnalyticError) {
    const std::uint64_t n_block = 1024;
    const double analytic = 1.0 / std::sqrt(static_cast<double>(n_block));
    std::mt19937_64 gen(2);
    std::normal_distribution<double> normal;
    for (std::uint64_t seed : {1, 2, 3}) {
        BlockSummary summary;
        for (std::uint64_t j = 0; j < n_block; ++j) {
            summary.block_means.emplace_back(normal(gen), normal(gen));
        }
        summary.block_size = 1;
        summary.n_total = n_block;
        const auto boot = bootstrap(summary, 2048, seed);
        EXPECT_NEAR(boot.stderr_re / analytic, 1.0, 0.2);
        EXPECT_NEAR(boot.stderr_im / analytic, 1.0, 0.2);
        EXPECT_LT(std::abs(boot.resample_average - boot.mean), 4.0 * analytic / std::sqrt(2048.0));
    }
}

TEST(Bootstrap, Deterministic) {
    BlockSummary summary;
    for (int j = 0; j < 50; ++j) summary.block_means.emplace_back(j * 0.1, -j * 0.2);
    const auto a = bootstrap(summary, 100, 9);
    const auto b = bootstrap(summary, 100, 9);
    EXPECT_EQ(a.resample_means, b.resample_means);
    EXPECT_NE(a.resample_means, bootstrap(summary, 100, 10).resample_means);
}

TEST(Bootstrap, RejectsDegenerateInput) {
    BlockSummary empty;
    EXPECT_THROW(bootstrap(empty, 100, 1), std::invalid_argument);
    BlockSummary one;
    one.block_means.emplace_back(1.0);
    EXPECT_THROW(bootstrap(one, 1, 1), std::invalid_argument);
}

namespace {
PermanentEstimate estimate(Complex mean, double stderr_re, double stderr_im = 0.0) {
    PermanentEstimate e;
    e.mean = mean;
    e.stderr_re = stderr_re;
    e.stderr_im = stderr_im;
    e.n_total = 1000;
    e.method = PermanentMethod::GlynnSampled;
    return e;
}
}  // namespace

TEST(Entropy, UnitPermanent) {
    const auto p = entropy_from_permanent(estimate(1.0, 0.01), 0.0, 4);
    EXPECT_EQ(p.s2, 0.0);
    EXPECT_FALSE(std::signbit(p.s2));
    EXPECT_NEAR(p.sigma_s2, std::log(1.01), 1e-15);
    EXPECT_NEAR(p.sigma_s2, 0.00995, 1e-5);
    EXPECT_FALSE(p.unreliable_error);
}

TEST(Entropy, ExactInverseE) {
    const auto p = entropy_from_permanent(estimate(std::exp(-1.0), 0.0), 2.0, 4);
    EXPECT_NEAR(p.s2, 1.0, 1e-15);
    EXPECT_EQ(p.sigma_s2, 0.0);
    EXPECT_NEAR(p.density(), 0.25, 1e-15);
}

TEST(Entropy, SmallRelativeErrorIsLinear) {
    const auto p = entropy_from_permanent(estimate(0.5, 1e-6), 0.0, 2);
    EXPECT_EQ(p.sigma_s2, 2e-6);
}

TEST(Entropy, NonPositiveThrowsWithEstimate) {
    try {
        entropy_from_permanent(estimate(-0.001, 0.01), 1.0, 8);
        FAIL() << "expected NonPositivePermanent";
    } catch (const NonPositivePermanent& e) {
        EXPECT_EQ(e.estimate().mean.real(), -0.001);
        EXPECT_NE(std::string(e.what()).find("increase N_total"), std::string::npos);
    }
    EXPECT_THROW(entropy_from_permanent(estimate(0.0, 0.0), 1.0, 8), NonPositivePermanent);
}

TEST(Entropy, UnreliableWhenErrorExceedsMean) {
    const auto p = entropy_from_permanent(estimate(0.01, 0.02), 1.0, 8);
    EXPECT_TRUE(p.unreliable_error);
    EXPECT_NEAR(p.sigma_s2, std::log(3.0), 1e-14);
}

TEST(ImagConsistency, Cases) {
    auto r = imag_consistency(estimate(Complex(1.0, 0.0), 0.1, 0.1));
    EXPECT_EQ(r.ratio, 0.0);
    EXPECT_FALSE(r.anomalous);
    r = imag_consistency(estimate(Complex(1.0, 1.0), 0.1, 0.1));
    EXPECT_NEAR(r.ratio, 10.0, 1e-12);
    EXPECT_TRUE(r.anomalous);
    r = imag_consistency(estimate(Complex(1.0, 1e-3), 0.1, 0.0));
    EXPECT_TRUE(std::isinf(r.ratio));
    EXPECT_TRUE(r.anomalous);
    r = imag_consistency(estimate(Complex(1.0, 0.0), 0.0, 0.0));
    EXPECT_FALSE(r.anomalous);
}

TEST(Histogram, DeltaAtOne) {
    const std::vector<Complex> samples(500, Complex(std::exp(-1.0), 0.0));
    const auto h = sign_histogram(samples, Part::Re);
    EXPECT_EQ(h.negative().count(), 0u);
    ASSERT_EQ(h.positive().counts.size(), 1u);
    EXPECT_DOUBLE_EQ(h.positive().peak(), 1.0);
    const auto rows = h.positive().density(h.total());
    EXPECT_DOUBLE_EQ(rows[0].second * h.positive().bin_width, 1.0);
    EXPECT_EQ(h.positive_weight(), 1.0);
}

TEST(Histogram, SignsAndZeros) {
    const std::vector<Complex> samples{{-std::exp(-2.0), 0.5}, {0.0, -0.5}, {std::exp(-3.0), 0.0}};
    const auto re = sign_histogram(samples, Part::Re, 0.5);
    EXPECT_EQ(re.zeros(), 1u);
    EXPECT_DOUBLE_EQ(re.negative().peak(), 2.0);
    EXPECT_DOUBLE_EQ(re.positive().peak(), 3.0);
    const auto im = sign_histogram(samples, Part::Im, 0.5);
    EXPECT_EQ(im.positive().count(), 1u);
    EXPECT_EQ(im.negative().count(), 1u);
    EXPECT_EQ(im.zeros(), 1u);
    EXPECT_THROW(sign_histogram({}, Part::Re), std::invalid_argument);
    EXPECT_THROW(SignHistogram(Part::Re, 0.0), std::invalid_argument);
}

TEST(Histogram, DensityIntegratesToWeight) {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> normal(0.0, 1.0);
    SignHistogram h(Part::Re, 0.25);
    for (int k = 0; k < 10000; ++k) h.add(Complex(normal(gen), 0.0));
    double area = 0.0;
    for (const auto& [x, d] : h.positive().density(h.total())) area += d * 0.25;
    EXPECT_NEAR(area, h.positive_weight(), 1e-12);
    EXPECT_NEAR(h.positive_weight() + h.negative_weight(), 1.0, 1e-12);
}

TEST(Histogram, ScaledSamplesMatchPlain) {
    SignHistogram a(Part::Re), b(Part::Re);
    ScaledComplex s{Complex(0.75, -0.5), -3};
    a.add(s);
    b.add(s.value());
    EXPECT_EQ(a.positive().counts, b.positive().counts);
}

TEST(ScalingFit, RecoversExactLaw) {
    std::vector<ScalingSeries> series;
    for (int ns : {16, 20, 24, 28, 32}) {
        ScalingSeries s{static_cast<double>(ns), {}};
        const double c = std::exp2(0.2 * ns - 9.0);
        for (int k = 14; k <= 22; k += 2) {
            const double n = std::exp2(k);
            s.sigma_by_n_total.emplace_back(n, std::sqrt(c / n));
        }
        series.push_back(s);
    }
    const auto fit = scaling_fit(series);
    EXPECT_NEAR(fit.alpha, 0.2, 1e-12);
    EXPECT_NEAR(fit.beta, 9.0, 1e-10);
    for (double r : fit.residuals) EXPECT_NEAR(r, 0.0, 1e-10);
    EXPECT_NEAR(loglog_slope(series[0].sigma_by_n_total), -0.5, 1e-12);
}

TEST(ScalingFit, RequiresEnoughPoints) {
    std::vector<std::pair<double, double>> two{{1024, 0.1}, {4096, 0.05}};
    EXPECT_THROW(scaling_constant(two), std::invalid_argument);
    EXPECT_THROW(fit_scaling_constants({{16, 1.0}, {20, 2.0}}), std::invalid_argument);
    EXPECT_THROW(loglog_slope(std::span(two).first(1)), std::invalid_argument);
}

// Sample distributions on a 16-site chain: positive Re dominates right after
// the quench; by tJ = 2 Ns the two signs carry comparable weight.
TEST(Histogram, ChainEarlyAndLateTimes) {
    const QuenchProblem problem(LatticeSpec::chain(16));
    const std::uint64_t n = 1 << 15;
    auto collect = [&](double t) {
        GlynnKernel kernel(problem.matrix_at(t).a);
        SignHistogram re(Part::Re), im(Part::Im);
        glynn_stream(kernel, 5, n, 1, [&](const SampleBatch& b) {
            for (const auto& v : b.values) {
                re.add(v);
                im.add(v);
            }
        });
        return std::pair{re, im};
    };
    const auto [early_re, early_im] = collect(1.0);
    EXPECT_GT(early_re.positive_weight(), 10.0 * early_re.negative_weight());
    EXPECT_GT(early_re.negative().peak() - early_re.positive().peak(), 2.0);

    const auto [late_re, late_im] = collect(32.0);
    EXPECT_LT(late_re.positive_weight(), 2.0 * late_re.negative_weight());
    EXPECT_LE(std::abs(late_re.positive().peak() - late_re.negative().peak()), 1.0);
    for (const auto* im : {&early_im, &late_im}) {
        EXPECT_NEAR(im->positive_weight(), im->negative_weight(), 0.03);
    }
}
