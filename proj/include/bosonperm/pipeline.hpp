#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bosonperm/bounds.hpp"
#include "bosonperm/lattice.hpp"
#include "bosonperm/permanent.hpp"
#include "bosonperm/quench.hpp"
#include "bosonperm/stats.hpp"

namespace bosonperm {

/// Linearly spaced, both ends included.
struct TimeGrid {
    double start = 0.0;
    double end = 0.0;
    int points = 64;

    std::vector<double> values() const;
};

/// 2^(12 + ceil(Ns / 5)): the next power of two at or above 2^(0.2 Ns + 12).
std::uint64_t auto_n_total(int ns);

struct NTotalRule {
    bool automatic = true;
    std::uint64_t value = 0;

    std::uint64_t resolve(int ns) const { return automatic ? auto_n_total(ns) : value; }
    std::string describe() const;
    /// "auto" or a positive integer.
    static NTotalRule parse(const std::string& text);
};

struct RunConfig {
    LatticeSpec lattice;
    TimeGrid grid;
    NTotalRule n_total;
    std::uint64_t n_block = kDefaultBlockCount;
    std::uint64_t n_boot = kDefaultBootstrapCount;
    std::uint64_t seed = 1;
    unsigned workers = 0;  ///< 0 = all hardware threads
    bool exact = false;
    bool bounds = false;
    int exact_cap = kDefaultExactCap;
    double bin_width = 0.25;

    void validate() const;
    bool use_exact() const { return exact && lattice.num_sites() <= exact_cap; }
};

/// Seed of time point `index`; the bootstrap for that point uses the same
/// value under its own stream domain.
std::uint64_t point_seed(std::uint64_t base, std::uint64_t index);

enum class PointStatus { Ok, UnreliableError, NonPositive };

std::string to_string(PointStatus status);

struct PointRecord {
    EntropyPoint point;
    PointStatus status = PointStatus::Ok;
    PermanentMethod method = PermanentMethod::ExactBBFG;
    std::uint64_t seed = 0;
    Complex bootstrap_average{0.0, 0.0};
    std::uint64_t truncated = 0;
    double imag_ratio = 0.0;
    double seconds = 0.0;
    std::string message;
    std::optional<BoundEstimates> bounds;
};

/// S2 of one matrix, exact or sampled. Never throws for a non-positive
/// estimate; the record's status says so instead.
PointRecord exact_point(const ComplexMatrix& a, double t, int exact_cap);
PointRecord sampled_point(const ComplexMatrix& a, double t, const RunConfig& config,
                          std::uint64_t seed);

struct DynamicsResult {
    RunConfig config;
    std::vector<PointRecord> records;
};

DynamicsResult run_dynamics(const RunConfig& config);

struct CompareRow {
    bool self_test = false;
    double t = 0.0;
    double s2_exact = 0.0;
    PointRecord sampled;
    double difference = 0.0;
    double pull = 0.0;
};

/// Exact vs sampled at every grid time, preceded by an identity-matrix
/// self-test row.
std::vector<CompareRow> run_compare(const RunConfig& config);

struct ScalingRequest {
    std::vector<LatticeSpec> sizes;
    std::vector<std::uint64_t> n_total_grid;
    int replicates = 32;
    /// t = time_factor * Ns in 1D and time_factor * Lx in 2D.
    double time_factor = 2.0;
    std::optional<double> fixed_time;
    /// Replace measured errors with sqrt(2^(alpha Ns - beta) / N_total).
    std::optional<std::pair<double, double>> synthetic;

    void validate() const;
    double time_for(const LatticeSpec& lattice) const;
};

struct ScalingCell {
    LatticeSpec lattice;
    double t = 0.0;
    std::uint64_t n_total = 0;
    std::vector<double> sigma_density;  ///< one per successful replicate
    std::vector<double> s2;
    int failures = 0;
    double mean_sigma_density = 0.0;
    double spread = 0.0;  ///< standard error of the mean over replicates
};

struct ScalingResult {
    std::vector<ScalingCell> cells;
    std::vector<ScalingSeries> series;
    std::vector<double> slopes;  ///< free log-log slope per size
    ScalingFit fit;
};

ScalingResult run_scaling(const RunConfig& base, const ScalingRequest& request);

struct HistogramSet {
    double t = 0.0;
    SignHistogram re{Part::Re};
    SignHistogram im{Part::Im};
    BootstrapResult boot;
};

std::vector<HistogramSet> run_histograms(const RunConfig& config, const std::vector<double>& times);

}  // namespace bosonperm
