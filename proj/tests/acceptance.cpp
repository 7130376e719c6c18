// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. `acceptance 4 7` runs a subset; `--extended` adds the 40-site
// exact comparison (hours on one core).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bosonperm/bounds.hpp"
#include "bosonperm/io.hpp"
#include "bosonperm/pipeline.hpp"
#include "bosonperm/quench.hpp"
#include "bosonperm/rng.hpp"

using namespace bosonperm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ComplexMatrix random_matrix(int n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = Complex(u(gen), u(gen));
    }
    return m;
}

RunConfig chain_run(int ns, double t_end, int points, unsigned workers) {
    RunConfig config;
    config.lattice = LatticeSpec::chain(ns);
    config.grid = TimeGrid{0.0, t_end, points};
    config.n_total = NTotalRule{};  // auto
    config.seed = 2024;
    config.workers = workers;
    return config;
}

// The 16-site comparison run shared by criteria 4, 7, 8 and 11.
const std::vector<CompareRow>& chain16_compare() {
    static const auto rows = run_compare(chain_run(16, 32.0, 33, 1));
    return rows;
}

Outcome exact_oracle() {
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<int> size(2, 8);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const auto m = random_matrix(size(gen), gen);
        const auto naive = perm_naive(m);
        worst = std::max(worst, std::abs(perm_bbfg(m) - naive) / std::abs(naive));
    }
    return {worst < 1e-10, fmt("200 matrices, worst relative error %.3g (< 1e-10)", worst)};
}

Outcome estimator_correctness() {
    std::mt19937_64 gen(2);
    int within = 0;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const auto m = random_matrix(6, gen);
        const auto exact = perm_bbfg(m);
        const auto run = glynn_estimate(m, 100000, 1000 + k, 1, 1000);
        const auto boot = bootstrap(run.blocks, kDefaultBootstrapCount, 1000 + k);
        const double pull_re = std::abs(run.estimate.mean.real() - exact.real()) / boot.stderr_re;
        const double pull_im = std::abs(run.estimate.mean.imag() - exact.imag()) / boot.stderr_im;
        const double pull = std::max(pull_re, pull_im);
        worst = std::max(worst, pull);
        within += pull < 4.0;
    }
    return {within >= 19, fmt("%d/20 within 4 stderr in Re and Im (need 19), worst %.2f", within, worst)};
}

const std::vector<LatticeSpec>& anchor_lattices() {
    static const std::vector<LatticeSpec> specs{LatticeSpec::chain(4), LatticeSpec::chain(8),
                                                LatticeSpec::chain(16), LatticeSpec::square(4, 4)};
    return specs;
}

Outcome zero_entanglement() {
    bool ok = true;
    std::string detail;
    for (const auto& spec : anchor_lattices()) {
        const QuenchProblem problem(spec);
        const auto a = problem.matrix_at(0.0).a;
        const auto exact = exact_point(a, 0.0, kDefaultExactCap).point;
        RunConfig config;
        config.lattice = spec;
        config.workers = 1;
        const auto sampled = sampled_point(a, 0.0, config, 7).point;
        const bool pass = exact.s2 == 0.0 && std::abs(sampled.s2) <= 3.0 * sampled.sigma_s2;
        ok = ok && pass;
        detail += fmt("%s exact %g sampled %g+-%g; ", spec.describe().c_str(), exact.s2,
                      sampled.s2, sampled.sigma_s2);
    }
    return {ok, detail};
}

Outcome chain16_agreement() {
    const auto& rows = chain16_compare();
    int points = 0, within = 0;
    double max_pull = 0.0;
    for (const auto& row : rows) {
        if (row.self_test) continue;
        ++points;
        within += std::abs(row.pull) <= 3.0;
        max_pull = std::max(max_pull, std::abs(row.pull));
    }
    const double fraction = static_cast<double>(within) / points;
    return {fraction >= 0.95 && max_pull < 5.0,
            fmt("%d/%d points within 3 sigma (need 95%%), max |pull| %.2f (< 5), N_total %llu",
                within, points, max_pull,
                static_cast<unsigned long long>(rows.back().sampled.point.n_total))};
}

Outcome error_scaling() {
    const QuenchProblem problem(LatticeSpec::chain(20));
    const auto a = problem.matrix_at(40.0).a;
    const int replicates = 8;
    std::vector<std::pair<double, double>> series;
    std::string detail;
    for (int k = 14; k <= 22; ++k) {
        RunConfig config;
        config.lattice = problem.spec();
        config.n_total = NTotalRule{false, 1ULL << k};
        config.workers = 0;
        double sum = 0.0;
        for (int r = 0; r < replicates; ++r) {
            sum += sampled_point(a, 40.0, config, mix_seed(mix_seed(5, k), r)).point.sigma_density();
        }
        series.emplace_back(std::ldexp(1.0, k), sum / replicates);
    }
    const double slope = loglog_slope(series);
    return {std::abs(slope + 0.5) <= 0.05,
            fmt("log-log slope %.4f over N_total = 2^14..2^22 (target -0.5 +- 0.05), c = %.4g",
                slope, scaling_constant(series))};
}

Outcome exponent_fit() {
    RunConfig base;
    base.workers = 0;
    base.seed = 6;
    ScalingRequest request;
    for (int ns : {16, 20, 24, 28, 32}) request.sizes.push_back(LatticeSpec::chain(ns));
    request.n_total_grid = {1ULL << 15, 1ULL << 17, 1ULL << 19};
    request.replicates = 8;
    const auto result = run_scaling(base, request);
    int failures = 0;
    for (const auto& cell : result.cells) failures += cell.failures;
    const auto& fit = result.fit;
    return {fit.alpha >= 0.1 && fit.alpha <= 0.35,
            fmt("alpha = %.3f(%.0f), beta = %.2f(%.0f) (alpha in [0.1, 0.35]), %d failed replicates",
                fit.alpha, fit.alpha_err * 1000, fit.beta, fit.beta_err * 100, failures)};
}

Outcome imaginary_consistency() {
    double worst = 0.0;
    int bad = 0;
    for (const auto& row : chain16_compare()) {
        if (row.self_test) continue;
        worst = std::max(worst, row.sampled.imag_ratio);
        bad += !(row.sampled.imag_ratio < 3.0);
    }
    return {bad == 0, fmt("max |Im|/sigma_Im = %.2f over 33 points (< 3)", worst)};
}

Outcome matrix_invariants() {
    double herm = 0.0, stoch = 0.0, norm = 0.0, z_lo = 0.0, z_hi = 0.0, unit = 0.0;
    int built = 0;
    auto check = [&](const QuenchProblem& problem, double t) {
        const auto y = problem.propagator_at(t);
        const auto z = correlation_z(y, problem.pattern(), problem.cut());
        const auto a = assemble_a(z).a;
        herm = std::max(herm, hermiticity_error(a));
        stoch = std::max(stoch, stochastic_error(a));
        norm = std::max(norm, std::abs(spectral_norm(a) - 1.0));
        const auto [lo, hi] = hermitian_spectrum_range(z.z);
        z_lo = std::min(z_lo, lo);
        z_hi = std::max(z_hi, hi - 1.0);
        unit = std::max(unit, unitarity_error(y.y));
        ++built;
    };
    for (const auto& spec : anchor_lattices()) check(QuenchProblem(spec), 0.0);
    const QuenchProblem chain(LatticeSpec::chain(16));
    for (double t : TimeGrid{0.0, 32.0, 33}.values()) check(chain, t);
    const bool ok = herm < 1e-12 && stoch < 1e-10 && norm < 1e-8 && z_lo >= -1e-10 &&
                    z_hi <= 1e-10 && unit < 1e-10;
    return {ok, fmt("%d matrices: hermiticity %.2g, row/col sums %.2g, | ||A||-1 | %.2g, "
                    "Z spectrum [%.2g, 1%+.2g], unitarity %.2g",
                    built, herm, stoch, norm, z_lo, z_hi, unit)};
}

Outcome bound_chain() {
    const QuenchProblem problem(LatticeSpec::chain(16));
    bool ok = true;
    std::string detail;
    for (double t : {1.0, 32.0}) {
        const auto a = problem.matrix_at(t).a;
        GlynnKernel kernel(a);
        auto ws = kernel.make_workspace();
        const bool unit_norm = spectral_norm(a) <= 1.0 + 1e-8;
        std::uint64_t violations = 0;
        const std::uint64_t n = 100000;
        for (std::uint64_t k = 0; k < n; ++k) {
            violations += !chain_holds(bound_sample(kernel, 9, k, ws), unit_norm);
        }
        const auto b = bound_entropies(a, n, 9, 1, 1000);
        const bool ordered =
            b.s2p.s2 >= b.s2pp.s2 && b.s2pp.s2 >= b.s2ppp.s2 && b.s2ppp.s2 >= 0.0;
        ok = ok && unit_norm && violations == 0 && b.chain_violations == 0 && ordered;
        detail += fmt("tJ=%g: %llu/%llu samples violate, S2'=%.4f S2''=%.4f S2'''=%.4f; ", t,
                      static_cast<unsigned long long>(violations),
                      static_cast<unsigned long long>(n), b.s2p.s2, b.s2pp.s2, b.s2ppp.s2);
    }
    return {ok, detail};
}

Outcome long_time_plateau() {
    const QuenchProblem problem(LatticeSpec::chain(32));
    RunConfig config;
    config.lattice = problem.spec();
    config.workers = 0;
    const auto rec = sampled_point(problem.matrix_at(64.0).a, 64.0, config, 10);
    const double density = rec.point.density();
    const bool ok = rec.status == PointStatus::Ok && density >= 0.2 && density <= 0.4;
    return {ok, fmt("S2/Ns = %.4f +- %.4f at tJ = 64 with N_total = %llu (in [0.2, 0.4])", density,
                    rec.point.sigma_density(),
                    static_cast<unsigned long long>(rec.point.n_total))};
}

Outcome determinism() {
    std::vector<std::string> csvs;
    for (unsigned workers : {1u, 4u, 8u}) {
        std::ostringstream out;
        io::write_compare_csv(out, run_compare(chain_run(16, 32.0, 33, workers)));
        csvs.push_back(out.str());
    }
    const bool ok = csvs[0] == csvs[1] && csvs[0] == csvs[2];
    return {ok, fmt("compare CSV for workers 1/4/8: %s (%zu bytes)",
                    ok ? "byte-identical" : "DIFFERENT", csvs[0].size())};
}

Outcome statistical_machinery() {
    std::mt19937_64 gen(12);
    std::normal_distribution<double> normal;
    const std::uint64_t n_block = 1024;
    BlockSummary summary;
    for (std::uint64_t j = 0; j < n_block; ++j) summary.block_means.emplace_back(normal(gen), normal(gen));
    summary.block_size = 1;
    summary.n_total = n_block;
    const auto boot = bootstrap(summary, kDefaultBootstrapCount, 12);
    const double analytic = 1.0 / std::sqrt(static_cast<double>(n_block));
    const double ratio = boot.stderr_re / analytic;

    std::vector<Complex> stream(1 << 16);
    for (auto& v : stream) v = Complex(normal(gen), normal(gen));
    Complex direct(0.0);
    for (const auto& v : stream) direct += v;
    direct /= static_cast<double>(stream.size());
    const double identity = std::abs(block_means(stream, n_block).grand_mean() - direct);

    return {std::abs(ratio - 1.0) <= 0.2 && identity < 1e-12,
            fmt("bootstrap/analytic stderr = %.3f (within 20%%), grand-mean identity %.2g (< 1e-12)",
                ratio, identity)};
}

Outcome extended_chain40() {
    auto config = chain_run(40, 80.0, 9, 0);
    config.n_total = NTotalRule{false, 1ULL << 20};
    int within = 0, points = 0;
    for (const auto& row : run_compare(config)) {
        if (row.self_test) continue;
        ++points;
        within += std::abs(row.pull) <= 3.0;
    }
    return {within * 100 >= 95 * points, fmt("%d/%d within 3 sigma", within, points)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"exact-oracle equivalence", exact_oracle},
        {"estimator correctness", estimator_correctness},
        {"zero-entanglement anchor", zero_entanglement},
        {"16-site chain exact vs sampled", chain16_agreement},
        {"error-scaling law", error_scaling},
        {"exponent fit", exponent_fit},
        {"imaginary-part consistency", imaginary_consistency},
        {"matrix invariants", matrix_invariants},
        {"bound chain", bound_chain},
        {"long-time plateau", long_time_plateau},
        {"determinism", determinism},
        {"statistical machinery", statistical_machinery},
    };
    std::set<int> only;
    bool extended = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--extended") == 0) {
            extended = true;
        } else {
            only.insert(std::atoi(argv[i]));
        }
    }

    int failed = 0;
    auto report = [&](const std::string& label, const char* name, const std::function<Outcome()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = fn();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %s %s: %s [%.1fs]\n", outcome.pass ? "PASS" : "FAIL", label.c_str(), name,
                    outcome.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !outcome.pass;
    };
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && !only.count(id)) continue;
        report(fmt("criterion %2d", id), criteria[k].first, criteria[k].second);
    }
    if (extended) report("extended", "40-site chain exact vs sampled", extended_chain40);
    return failed == 0 ? 0 : 1;
}
