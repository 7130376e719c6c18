#include "bosonperm/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bosonperm/rng.hpp"

namespace bosonperm {

std::vector<double> TimeGrid::values() const {
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        ts.push_back(start);
        return ts;
    }
    for (int k = 0; k < points; ++k) {
        ts.push_back(start + (end - start) * k / (points - 1));
    }
    return ts;
}

std::uint64_t auto_n_total(int ns) {
    if (ns < 0) throw std::invalid_argument("auto_n_total: negative size");
    const int exponent = 12 + (ns + 4) / 5;
    if (exponent > 62) throw std::invalid_argument("auto_n_total: Ns too large for 64-bit counts");
    return 1ULL << exponent;
}

std::string NTotalRule::describe() const {
    return automatic ? "auto" : std::to_string(value);
}

NTotalRule NTotalRule::parse(const std::string& text) {
    if (text == "auto") return NTotalRule{true, 0};
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || v == 0 || text.front() == '-') {
        throw std::invalid_argument("n-total must be 'auto' or a positive integer, got '" + text +
                                    "'");
    }
    return NTotalRule{false, v};
}

void RunConfig::validate() const {
    lattice.validate();
    if (grid.points < 1) throw std::invalid_argument("config: t-points must be positive");
    if (!(grid.end >= grid.start)) throw std::invalid_argument("config: t-end must be >= t-start");
    if (!n_total.automatic && n_total.value == 0) {
        throw std::invalid_argument("config: n-total must be positive");
    }
    if (n_block == 0) throw std::invalid_argument("config: n-block must be positive");
    if (n_boot < 2) throw std::invalid_argument("config: n-boot must be at least 2");
    if (!(bin_width > 0.0)) throw std::invalid_argument("config: bin width must be positive");
}

std::uint64_t point_seed(std::uint64_t base, std::uint64_t index) {
    return mix_seed(base, index);
}

std::string to_string(PointStatus status) {
    switch (status) {
        case PointStatus::Ok: return "ok";
        case PointStatus::UnreliableError: return "unreliable_error";
        case PointStatus::NonPositive: return "nonpositive_estimate";
    }
    return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void fill_from_estimate(PointRecord& rec, const PermanentEstimate& est, double t, int ns) {
    try {
        rec.point = entropy_from_permanent(est, t, ns);
        rec.status = rec.point.unreliable_error ? PointStatus::UnreliableError : PointStatus::Ok;
    } catch (const NonPositivePermanent& err) {
        rec.status = PointStatus::NonPositive;
        rec.message = err.what();
        rec.point = EntropyPoint{};
        rec.point.t = t;
        rec.point.ns = ns;
        rec.point.n_total = est.n_total;
        rec.point.s2 = std::numeric_limits<double>::quiet_NaN();
        rec.point.sigma_s2 = std::numeric_limits<double>::quiet_NaN();
        rec.point.perm_re = est.mean.real();
        rec.point.perm_im = est.mean.imag();
        rec.point.sigma_perm_re = est.stderr_re;
        rec.point.sigma_perm_im = est.stderr_im;
    }
}

}  // namespace

PointRecord exact_point(const ComplexMatrix& a, double t, int exact_cap) {
    const auto start = Clock::now();
    PointRecord rec;
    rec.method = PermanentMethod::ExactBBFG;
    PermanentEstimate est;
    est.mean = perm_bbfg(a, exact_cap);
    est.method = PermanentMethod::ExactBBFG;
    fill_from_estimate(rec, est, t, static_cast<int>(a.rows()));
    rec.seconds = seconds_since(start);
    return rec;
}

PointRecord sampled_point(const ComplexMatrix& a, double t, const RunConfig& config,
                          std::uint64_t seed) {
    const auto start = Clock::now();
    const int ns = static_cast<int>(a.rows());
    const std::uint64_t n_total = config.n_total.resolve(ns);
    PointRecord rec;
    rec.method = PermanentMethod::GlynnSampled;
    rec.seed = seed;

    PermanentEstimate est;
    if (config.bounds) {
        auto bounds = bound_entropies(a, n_total, seed, config.workers, config.n_block,
                                      config.n_boot);
        est = bounds.perm;
        rec.bootstrap_average = bounds.perm_bootstrap_average;
        rec.truncated = bounds.truncated;
        rec.bounds = std::move(bounds);
    } else {
        const auto run = glynn_estimate(a, n_total, seed, config.workers, config.n_block);
        const auto boot = bootstrap(run.blocks, config.n_boot, seed);
        est = with_errors(run.estimate, boot);
        rec.bootstrap_average = boot.resample_average;
        rec.truncated = run.blocks.truncated;
    }
    rec.imag_ratio = imag_consistency(est).ratio;
    fill_from_estimate(rec, est, t, ns);
    rec.seconds = seconds_since(start);
    return rec;
}

DynamicsResult run_dynamics(const RunConfig& config) {
    config.validate();
    const QuenchProblem problem(config.lattice);
    DynamicsResult result;
    result.config = config;
    const auto times = config.grid.values();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto a = problem.matrix_at(times[k]);
        result.records.push_back(config.use_exact()
                                     ? exact_point(a.a, times[k], config.exact_cap)
                                     : sampled_point(a.a, times[k], config, point_seed(config.seed, k)));
    }
    return result;
}

std::vector<CompareRow> run_compare(const RunConfig& config) {
    config.validate();
    const int ns = config.lattice.num_sites();
    if (ns > config.exact_cap) {
        throw std::invalid_argument("compare: Ns = " + std::to_string(ns) +
                                    " is above the exact cap " + std::to_string(config.exact_cap));
    }
    auto finish = [](CompareRow& row) {
        row.difference = row.sampled.point.s2 - row.s2_exact;
        const double sigma = row.sampled.point.sigma_s2;
        if (sigma > 0.0) {
            row.pull = row.difference / sigma;
        } else {
            row.pull = row.difference == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
    };

    std::vector<CompareRow> rows;
    {
        const ComplexMatrix identity = ComplexMatrix::Identity(ns, ns);
        CompareRow row;
        row.self_test = true;
        row.s2_exact = exact_point(identity, 0.0, config.exact_cap).point.s2;
        row.sampled = sampled_point(identity, 0.0, config, config.seed);
        finish(row);
        rows.push_back(std::move(row));
    }
    const QuenchProblem problem(config.lattice);
    const auto times = config.grid.values();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto a = problem.matrix_at(times[k]);
        CompareRow row;
        row.t = times[k];
        row.s2_exact = exact_point(a.a, times[k], config.exact_cap).point.s2;
        row.sampled = sampled_point(a.a, times[k], config, point_seed(config.seed, k));
        finish(row);
        rows.push_back(std::move(row));
    }
    return rows;
}

void ScalingRequest::validate() const {
    if (sizes.size() < 3) throw std::invalid_argument("scaling: need at least 3 system sizes");
    if (n_total_grid.size() < 3) throw std::invalid_argument("scaling: need at least 3 N_total values");
    if (replicates < 8) throw std::invalid_argument("scaling: need at least 8 replicates");
    for (auto n : n_total_grid) {
        if (n == 0) throw std::invalid_argument("scaling: N_total values must be positive");
    }
}

double ScalingRequest::time_for(const LatticeSpec& lattice) const {
    if (fixed_time) return *fixed_time;
    return time_factor *
           (lattice.dimension == Dimension::OneD ? lattice.num_sites() : lattice.lx);
}

ScalingResult run_scaling(const RunConfig& base, const ScalingRequest& request) {
    request.validate();
    ScalingResult result;
    for (std::size_t si = 0; si < request.sizes.size(); ++si) {
        const auto& lattice = request.sizes[si];
        lattice.validate();
        const int ns = lattice.num_sites();
        const double t = request.time_for(lattice);
        std::optional<EntanglementMatrixA> a;
        if (!request.synthetic) a = QuenchProblem(lattice).matrix_at(t);

        ScalingSeries series;
        series.ns = ns;
        for (std::size_t ni = 0; ni < request.n_total_grid.size(); ++ni) {
            ScalingCell cell;
            cell.lattice = lattice;
            cell.t = t;
            cell.n_total = request.n_total_grid[ni];
            if (request.synthetic) {
                const auto [alpha, beta] = *request.synthetic;
                const double c = std::exp2(alpha * ns - beta);
                cell.sigma_density.push_back(std::sqrt(c / static_cast<double>(cell.n_total)));
            } else {
                RunConfig cfg = base;
                cfg.lattice = lattice;
                cfg.n_total = NTotalRule{false, cell.n_total};
                cfg.bounds = false;
                for (int r = 0; r < request.replicates; ++r) {
                    const std::uint64_t seed =
                        mix_seed(mix_seed(mix_seed(base.seed, si), ni), static_cast<std::uint64_t>(r));
                    const auto rec = sampled_point(a->a, t, cfg, seed);
                    if (rec.status == PointStatus::NonPositive) {
                        ++cell.failures;
                        continue;
                    }
                    cell.sigma_density.push_back(rec.point.sigma_density());
                    cell.s2.push_back(rec.point.s2);
                }
            }
            const auto k = static_cast<double>(cell.sigma_density.size());
            if (k > 0) {
                double mean = 0.0;
                for (double s : cell.sigma_density) mean += s;
                mean /= k;
                double var = 0.0;
                for (double s : cell.sigma_density) var += (s - mean) * (s - mean);
                cell.mean_sigma_density = mean;
                cell.spread = k > 1 ? std::sqrt(var / (k - 1) / k) : 0.0;
                series.sigma_by_n_total.emplace_back(static_cast<double>(cell.n_total), mean);
            }
            result.cells.push_back(std::move(cell));
        }
        result.slopes.push_back(series.sigma_by_n_total.size() >= 2
                                    ? loglog_slope(series.sigma_by_n_total)
                                    : std::numeric_limits<double>::quiet_NaN());
        result.series.push_back(std::move(series));
    }
    result.fit = scaling_fit(result.series);
    return result;
}

std::vector<HistogramSet> run_histograms(const RunConfig& config, const std::vector<double>& times) {
    config.validate();
    const QuenchProblem problem(config.lattice);
    const int ns = problem.num_sites();
    const std::uint64_t n_total = config.n_total.resolve(ns);
    const auto layout = BlockLayout::make(n_total, std::min(config.n_block, n_total));

    std::vector<HistogramSet> sets;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto a = problem.matrix_at(times[k]);
        const GlynnKernel kernel(a.a);
        const std::uint64_t seed = point_seed(config.seed, k);
        HistogramSet set{times[k], SignHistogram(Part::Re, config.bin_width),
                         SignHistogram(Part::Im, config.bin_width), {}};
        std::vector<Complex> block_sums(layout.n_block, Complex(0.0, 0.0));
        glynn_stream(kernel, seed, n_total, config.workers, [&](const SampleBatch& batch) {
            for (std::uint64_t i = batch.first; i < batch.last; ++i) {
                const Complex p = batch.values[i - batch.first];
                set.re.add(p);
                set.im.add(p);
                if (i < layout.blocked_samples()) block_sums[i / layout.block_size] += p;
            }
        });
        BlockSummary blocks;
        blocks.block_size = layout.block_size;
        blocks.n_total = layout.blocked_samples();
        blocks.truncated = layout.remainder;
        for (const auto& s : block_sums) {
            blocks.block_means.push_back(s / static_cast<double>(layout.block_size));
        }
        set.boot = bootstrap(blocks, config.n_boot, seed);
        sets.push_back(std::move(set));
    }
    return sets;
}

}  // namespace bosonperm
