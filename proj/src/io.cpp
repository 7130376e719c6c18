#include "bosonperm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bosonperm/rng.hpp"

namespace bosonperm::io {

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::string format_short(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
}

void write_point_columns(std::ostream& out, const EntropyPoint& p) {
    out << format_double(p.t) << ',' << format_double(p.s2) << ',' << format_double(p.sigma_s2)
        << ',' << format_double(p.density()) << ',' << format_double(p.sigma_density()) << ','
        << format_double(p.perm_re) << ',' << format_double(p.perm_im) << ','
        << format_double(p.sigma_perm_re) << ',' << format_double(p.sigma_perm_im) << ','
        << p.n_total << ',' << p.ns;
}

}  // namespace

void write_dynamics_csv(std::ostream& out, const std::vector<PointRecord>& records) {
    out << kDynamicsHeader << '\n';
    for (const auto& rec : records) {
        write_point_columns(out, rec.point);
        out << ',' << to_string(rec.status) << '\n';
    }
}

void write_bounds_csv(std::ostream& out, const std::vector<PointRecord>& records) {
    out << "t,s2,sigma_s2,s2p,sigma_s2p,s2pp,sigma_s2pp,s2ppp,sigma_s2ppp,chain_violations,"
           "n_total,ns\n";
    for (const auto& rec : records) {
        if (!rec.bounds) continue;
        const auto& b = *rec.bounds;
        out << format_double(rec.point.t) << ',' << format_double(rec.point.s2) << ','
            << format_double(rec.point.sigma_s2) << ',' << format_double(b.s2p.s2) << ','
            << format_double(b.s2p.sigma) << ',' << format_double(b.s2pp.s2) << ','
            << format_double(b.s2pp.sigma) << ',' << format_double(b.s2ppp.s2) << ','
            << format_double(b.s2ppp.sigma) << ',' << b.chain_violations << ',' << b.n_total
            << ',' << rec.point.ns << '\n';
    }
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
    out << "kind,t,s2_exact,s2_sampled,sigma_s2,difference,pull,perm_re,perm_im,sigma_perm_re,"
           "sigma_perm_im,n_total,ns,status\n";
    for (const auto& row : rows) {
        const auto& p = row.sampled.point;
        out << (row.self_test ? "identity_self_test" : "point") << ',' << format_double(row.t)
            << ',' << format_double(row.s2_exact) << ',' << format_double(p.s2) << ','
            << format_double(p.sigma_s2) << ',' << format_double(row.difference) << ','
            << format_double(row.pull) << ',' << format_double(p.perm_re) << ','
            << format_double(p.perm_im) << ',' << format_double(p.sigma_perm_re) << ','
            << format_double(p.sigma_perm_im) << ',' << p.n_total << ',' << p.ns << ','
            << to_string(row.sampled.status) << '\n';
    }
}

void write_scaling_csv(std::ostream& out, const ScalingResult& result) {
    out << "ns,lx,ly,t,n_total,replicates,failures,sigma_density_mean,sigma_density_spread,c\n";
    for (const auto& cell : result.cells) {
        const double c = cell.mean_sigma_density * cell.mean_sigma_density *
                         static_cast<double>(cell.n_total);
        out << cell.lattice.num_sites() << ',' << cell.lattice.lx << ',' << cell.lattice.ly << ','
            << format_double(cell.t) << ',' << cell.n_total << ',' << cell.sigma_density.size()
            << ',' << cell.failures << ',' << format_double(cell.mean_sigma_density) << ','
            << format_double(cell.spread) << ',' << format_double(c) << '\n';
    }
}

void write_fit_csv(std::ostream& out, const ScalingResult& result) {
    const auto& fit = result.fit;
    out << "ns,c,residual_log2,loglog_slope,alpha,alpha_err,beta,beta_err\n";
    for (std::size_t i = 0; i < fit.points.size(); ++i) {
        out << format_double(fit.points[i].first) << ',' << format_double(fit.points[i].second)
            << ',' << format_double(fit.residuals[i]) << ','
            << format_double(i < result.slopes.size() ? result.slopes[i] : std::nan("")) << ','
            << format_double(fit.alpha) << ',' << format_double(fit.alpha_err) << ','
            << format_double(fit.beta) << ',' << format_double(fit.beta_err) << '\n';
    }
}

void write_histogram(std::ostream& out, const Histogram& hist, std::uint64_t normalizer) {
    for (const auto& [x, density] : hist.density(normalizer)) {
        out << format_double(x) << ' ' << format_double(density) << '\n';
    }
}

void write_bootstrap_histogram(std::ostream& out, const BootstrapResult& boot, int bins) {
    if (boot.resample_means.empty() || bins < 1) return;
    double lo = boot.resample_means.front().real(), hi = lo;
    for (const auto& q : boot.resample_means) {
        lo = std::min(lo, q.real());
        hi = std::max(hi, q.real());
    }
    if (hi == lo) {
        out << format_double(lo) << ' ' << format_double(1.0) << '\n';
        return;
    }
    const double width = (hi - lo) / bins;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
    for (const auto& q : boot.resample_means) {
        auto b = static_cast<int>((q.real() - lo) / width);
        ++counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))];
    }
    const double norm = 1.0 / (static_cast<double>(boot.resample_means.size()) * width);
    for (int b = 0; b < bins; ++b) {
        out << format_double(lo + (b + 0.5) * width) << ' '
            << format_double(static_cast<double>(counts[static_cast<std::size_t>(b)]) * norm)
            << '\n';
    }
}

std::string histogram_filename(int ns, double t, Part part, bool positive) {
    return "hist_ns" + std::to_string(ns) + "_t" + format_short(t) + "_" +
           (part == Part::Re ? "re" : "im") + "_" + (positive ? "pos" : "neg") + ".dat";
}

std::string bootstrap_filename(int ns, double t) {
    return "boot_ns" + std::to_string(ns) + "_t" + format_short(t) + "_re.dat";
}

Complex parse_complex(const std::string& token) {
    auto fail = [&] { throw std::invalid_argument("cannot parse complex entry '" + token + "'"); };
    if (token.empty()) fail();
    std::string body = token;
    const bool has_imag = body.back() == 'j' || body.back() == 'i';
    if (has_imag) body.pop_back();

    // Split at the last sign that is not leading and does not follow an exponent marker.
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto to_double = [&](const std::string& s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            fail();
        }
        if (used != s.size()) fail();
        return v;
    };
    if (!has_imag) {
        if (split != std::string::npos) fail();
        return {to_double(body), 0.0};
    }
    if (split == std::string::npos) return {0.0, to_double(body)};
    return {to_double(body.substr(0, split)), to_double(body.substr(split))};
}

ComplexMatrix read_matrix(std::istream& in) {
    long long n = 0;
    if (!(in >> n) || n < 1) throw std::invalid_argument("matrix file: first line must be n >= 1");
    ComplexMatrix m(n, n);
    for (long long i = 0; i < n; ++i) {
        for (long long j = 0; j < n; ++j) {
            std::string token;
            if (!(in >> token)) {
                throw std::invalid_argument("matrix file: expected " + std::to_string(n * n) +
                                            " entries, ran out at row " + std::to_string(i + 1));
            }
            m(i, j) = parse_complex(token);
        }
    }
    std::string extra;
    if (in >> extra) throw std::invalid_argument("matrix file: trailing content '" + extra + "'");
    return m;
}

ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file " + path.string());
    return read_matrix(in);
}

nlohmann::json config_json(const RunConfig& c) {
    return {
        {"lattice",
         {{"dimension", c.lattice.dimension == Dimension::OneD ? 1 : 2},
          {"lx", c.lattice.lx},
          {"ly", c.lattice.ly},
          {"ns", c.lattice.num_sites()},
          {"j", c.lattice.hopping}}},
        {"time_grid",
         {{"t_start", c.grid.start}, {"t_end", c.grid.end}, {"n_points", c.grid.points},
          {"spacing", "linear"}}},
        {"n_total", {{"rule", c.n_total.describe()}, {"resolved", c.n_total.resolve(c.lattice.num_sites())}}},
        {"n_block", c.n_block},
        {"n_boot", c.n_boot},
        {"seed", c.seed},
        {"workers", resolve_workers(c.workers)},
        {"exact", c.exact},
        {"exact_cap", c.exact_cap},
        {"exact_path_used", c.use_exact()},
        {"bounds", c.bounds},
        {"hist_bin_width", c.bin_width},
    };
}

namespace {
nlohmann::json complex_json(Complex z) { return {z.real(), z.imag()}; }
}  // namespace

nlohmann::json record_json(const PointRecord& r) {
    nlohmann::json j = {
        {"t", r.point.t},
        {"method", to_string(r.method)},
        {"status", to_string(r.status)},
        {"seconds", r.seconds},
    };
    if (r.method == PermanentMethod::GlynnSampled) {
        j["seed"] = r.seed;
        j["grand_mean"] = complex_json({r.point.perm_re, r.point.perm_im});
        j["bootstrap_average"] = complex_json(r.bootstrap_average);
        j["truncated_samples"] = r.truncated;
        j["imag_ratio"] = r.imag_ratio;
        j["unreliable_error"] = r.point.unreliable_error;
    }
    if (!r.message.empty()) j["message"] = r.message;
    if (r.bounds) {
        const auto& b = *r.bounds;
        auto bound = [](const BoundValue& v) {
            return nlohmann::json{{"mean", v.mean}, {"stderr", v.std_error}, {"s2", v.s2},
                                  {"sigma", v.sigma}, {"infinite", v.infinite}};
        };
        j["bounds"] = {{"s2p", bound(b.s2p)},
                       {"s2pp", bound(b.s2pp)},
                       {"s2ppp", bound(b.s2ppp)},
                       {"chain_violations", b.chain_violations},
                       {"unit_norm", b.unit_norm}};
    }
    return j;
}

nlohmann::json rng_json(const RunConfig& c, std::size_t n_points) {
    auto seeds = nlohmann::json::array();
    for (std::size_t k = 0; k < n_points; ++k) seeds.push_back(point_seed(c.seed, k));
    return {
        {"algorithm", "philox4x64-10"},
        {"base_seed", c.seed},
        {"point_seed_rule", "splitmix64(base_seed + golden_gamma * (index + 1))"},
        {"point_seeds", seeds},
        {"glynn_key", {"point_seed", static_cast<std::uint64_t>(StreamDomain::GlynnPhases)}},
        {"glynn_counter", "(sample_index, phase_index / 4, 0, 0)"},
        {"bootstrap_key", {"point_seed", static_cast<std::uint64_t>(StreamDomain::Bootstrap)}},
        {"bootstrap_counter", "(resample_index, block_draw / 4, 0, 0)"},
    };
}

nlohmann::json manifest(const std::string& command, const RunConfig& config,
                        const std::vector<PointRecord>& records) {
    nlohmann::json points = nlohmann::json::array();
    std::uint64_t warnings = 0, failures = 0, truncated = 0;
    for (const auto& r : records) {
        points.push_back(record_json(r));
        if (r.status == PointStatus::UnreliableError) ++warnings;
        if (r.status == PointStatus::NonPositive) ++failures;
        truncated = std::max(truncated, r.truncated);
    }
    return {
        {"tool", "bosonperm"},
        {"version", BOSONPERM_VERSION},
        {"command", command},
        {"config", config_json(config)},
        {"rng", rng_json(config, records.size())},
        {"flags",
         {{"unreliable_error_points", warnings},
          {"nonpositive_points", failures},
          {"max_truncated_samples", truncated}}},
        {"points", points},
    };
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace bosonperm::io
