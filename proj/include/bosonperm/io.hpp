#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bosonperm/pipeline.hpp"

namespace bosonperm::io {

/// 17 significant digits, so every double round-trips.
std::string format_double(double value);

inline constexpr const char* kDynamicsHeader =
    "t,s2,sigma_s2,s2_density,sigma_s2_density,perm_re,perm_im,sigma_perm_re,sigma_perm_im,"
    "n_total,ns,status";

void write_dynamics_csv(std::ostream& out, const std::vector<PointRecord>& records);
void write_bounds_csv(std::ostream& out, const std::vector<PointRecord>& records);
void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);
void write_scaling_csv(std::ostream& out, const ScalingResult& result);
void write_fit_csv(std::ostream& out, const ScalingResult& result);

/// Two columns: bin centre x and probability density.
void write_histogram(std::ostream& out, const Histogram& hist, std::uint64_t normalizer);
/// Equal-width histogram of Re of the bootstrap resample means.
void write_bootstrap_histogram(std::ostream& out, const BootstrapResult& boot, int bins = 64);

/// hist_ns<Ns>_t<t>_<re|im>_<pos|neg>.dat
std::string histogram_filename(int ns, double t, Part part, bool positive);
std::string bootstrap_filename(int ns, double t);

/// Parses "re+imj", "re-imj", "re", "imj" (exponents allowed).
Complex parse_complex(const std::string& token);

/// First line n, then n lines of n whitespace-separated complex entries.
ComplexMatrix read_matrix(std::istream& in);
ComplexMatrix read_matrix_file(const std::filesystem::path& path);

nlohmann::json config_json(const RunConfig& config);
nlohmann::json record_json(const PointRecord& record);
nlohmann::json rng_json(const RunConfig& config, std::size_t n_points);
/// Top-level manifest: tool version, command, config, RNG keys, per-point
/// records (timing, seeds, warnings) and any extra sections.
nlohmann::json manifest(const std::string& command, const RunConfig& config,
                        const std::vector<PointRecord>& records);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace bosonperm::io
