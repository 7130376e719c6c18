// Command-line front end: dynamics, scaling, compare, hist, perm.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bosonperm/io.hpp"
#include "bosonperm/pipeline.hpp"

namespace fs = std::filesystem;
using namespace bosonperm;

namespace {

struct SharedOptions {
    int dim = 1;
    int lx = 16;
    int ly = 1;
    double hopping = 1.0;
    double t_start = 0.0;
    double t_end = 10.0;
    int t_points = 64;
    std::string n_total = "auto";
    std::uint64_t n_block = kDefaultBlockCount;
    std::uint64_t n_boot = kDefaultBootstrapCount;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    bool exact = false;
    bool bounds = false;
    int exact_cap = kDefaultExactCap;
    double bin_width = 0.25;
    std::string out = ".";

    RunConfig to_config() const {
        RunConfig c;
        c.lattice.dimension = dim == 1 ? Dimension::OneD : Dimension::TwoD;
        c.lattice.lx = lx;
        c.lattice.ly = dim == 1 ? 1 : ly;
        c.lattice.hopping = hopping;
        c.grid = TimeGrid{t_start, t_end, t_points};
        c.n_total = NTotalRule::parse(n_total);
        c.n_block = n_block;
        c.n_boot = n_boot;
        c.seed = seed;
        c.workers = workers;
        c.exact = exact;
        c.bounds = bounds;
        c.exact_cap = exact_cap;
        c.bin_width = bin_width;
        c.validate();
        return c;
    }
};

void add_shared(CLI::App* app, SharedOptions& o) {
    app->add_option("--dim", o.dim, "Lattice dimension")->check(CLI::IsMember({1, 2}));
    app->add_option("--lx", o.lx, "Sites along x (Ns in 1D)");
    app->add_option("--ly", o.ly, "Sites along y (2D only)");
    app->add_option("--j", o.hopping, "Hopping energy J");
    app->add_option("--t-start", o.t_start, "First time point (units of 1/J)");
    app->add_option("--t-end", o.t_end, "Last time point");
    app->add_option("--t-points", o.t_points, "Number of linearly spaced time points");
    app->add_option("--n-total", o.n_total, "Samples per point: integer or 'auto' = 2^(12+ceil(Ns/5))");
    app->add_option("--n-block", o.n_block, "Blocks for the blocking analysis");
    app->add_option("--n-boot", o.n_boot, "Bootstrap resamples");
    app->add_option("--seed", o.seed, "Base RNG seed");
    app->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    app->add_flag("--exact", o.exact, "Use the exact BBFG permanent when Ns <= exact cap");
    app->add_option("--exact-cap", o.exact_cap, "Largest n for the exact permanent");
    app->add_flag("--bounds", o.bounds, "Also estimate the lower-bound entropies S2', S2'', S2'''");
    app->add_option("--bin-width", o.bin_width, "Histogram bin width in x = -ln|p|");
    app->add_option("--out", o.out, "Output directory");
}

std::string to_text(const std::function<void(std::ostream&)>& writer) {
    std::ostringstream s;
    writer(s);
    return s.str();
}

std::uint64_t parse_count(const std::string& text) {
    if (text.rfind("2^", 0) == 0) return 1ULL << std::stoi(text.substr(2));
    return std::stoull(text);
}

LatticeSpec parse_size(const std::string& text, int dim, double hopping) {
    const auto x = text.find('x');
    if (x == std::string::npos) {
        if (dim != 1) throw std::invalid_argument("2D sizes must look like 6x4, got " + text);
        return LatticeSpec::chain(std::stoi(text), hopping);
    }
    return LatticeSpec::square(std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1)), hopping);
}

int run_dynamics_cmd(const SharedOptions& o) {
    const auto config = o.to_config();
    const auto result = run_dynamics(config);
    const fs::path dir(o.out);
    io::write_text_file(dir / "dynamics.csv",
                        to_text([&](std::ostream& s) { io::write_dynamics_csv(s, result.records); }));
    if (config.bounds && !config.use_exact()) {
        io::write_text_file(dir / "bounds.csv",
                            to_text([&](std::ostream& s) { io::write_bounds_csv(s, result.records); }));
    }
    io::write_text_file(dir / "manifest.json",
                        io::manifest("dynamics", config, result.records).dump(2) + "\n");
    std::cerr << "dynamics: " << result.records.size() << " points for "
              << config.lattice.describe() << " -> " << (dir / "dynamics.csv").string() << '\n';
    return 0;
}

int run_compare_cmd(const SharedOptions& o) {
    const auto config = o.to_config();
    const auto rows = run_compare(config);
    const fs::path dir(o.out);
    io::write_text_file(dir / "compare.csv",
                        to_text([&](std::ostream& s) { io::write_compare_csv(s, rows); }));
    std::vector<PointRecord> records;
    int within3 = 0, points = 0;
    double max_pull = 0.0;
    for (const auto& row : rows) {
        records.push_back(row.sampled);
        if (row.self_test) continue;
        ++points;
        if (std::abs(row.pull) < 3.0) ++within3;
        max_pull = std::max(max_pull, std::abs(row.pull));
    }
    auto m = io::manifest("compare", config, records);
    m["summary"] = {{"points", points}, {"within_3_sigma", within3}, {"max_abs_pull", max_pull}};
    io::write_text_file(dir / "manifest.json", m.dump(2) + "\n");
    std::cerr << "compare: " << within3 << "/" << points << " points within 3 sigma, max |pull| "
              << max_pull << '\n';
    return 0;
}

int run_scaling_cmd(const SharedOptions& o, const std::vector<std::string>& sizes,
                     const std::vector<std::string>& grid, int replicates, double time_factor,
                     double fixed_time, double syn_alpha, double syn_beta) {
    auto config = o.to_config();
    ScalingRequest req;
    for (const auto& s : sizes) req.sizes.push_back(parse_size(s, o.dim, o.hopping));
    for (const auto& g : grid) req.n_total_grid.push_back(parse_count(g));
    req.replicates = replicates;
    req.time_factor = time_factor;
    if (fixed_time >= 0.0) req.fixed_time = fixed_time;
    if (!std::isnan(syn_alpha)) req.synthetic = std::make_pair(syn_alpha, syn_beta);
    const auto result = run_scaling(config, req);
    const fs::path dir(o.out);
    io::write_text_file(dir / "scaling.csv",
                        to_text([&](std::ostream& s) { io::write_scaling_csv(s, result); }));
    io::write_text_file(dir / "scaling_fit.csv",
                        to_text([&](std::ostream& s) { io::write_fit_csv(s, result); }));
    nlohmann::json m = {
        {"tool", "bosonperm"},
        {"version", BOSONPERM_VERSION},
        {"command", "scaling"},
        {"config", io::config_json(config)},
        {"sizes", sizes},
        {"n_total_grid", req.n_total_grid},
        {"replicates", replicates},
        {"time_factor", time_factor},
        {"replicate_seed_rule", "mix(mix(mix(seed, size_index), n_total_index), replicate)"},
        {"synthetic", req.synthetic.has_value()},
        {"fit",
         {{"alpha", result.fit.alpha},
          {"alpha_err", result.fit.alpha_err},
          {"beta", result.fit.beta},
          {"beta_err", result.fit.beta_err}}},
        {"loglog_slopes", result.slopes},
    };
    io::write_text_file(dir / "manifest.json", m.dump(2) + "\n");
    std::cout << "alpha = " << result.fit.alpha << " +- " << result.fit.alpha_err
              << "  beta = " << result.fit.beta << " +- " << result.fit.beta_err << '\n';
    return 0;
}

int run_hist_cmd(const SharedOptions& o, const std::vector<double>& times) {
    const auto config = o.to_config();
    const auto sets = run_histograms(config, times);
    const fs::path dir(o.out);
    const int ns = config.lattice.num_sites();
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& set : sets) {
        for (const auto* h : {&set.re, &set.im}) {
            for (bool positive : {true, false}) {
                const auto& hist = positive ? h->positive() : h->negative();
                io::write_text_file(dir / io::histogram_filename(ns, set.t, h->part(), positive),
                                    to_text([&](std::ostream& s) {
                                        io::write_histogram(s, hist, h->total());
                                    }));
            }
        }
        io::write_text_file(dir / io::bootstrap_filename(ns, set.t), to_text([&](std::ostream& s) {
                                io::write_bootstrap_histogram(s, set.boot);
                            }));
        summary.push_back({{"t", set.t},
                           {"re_positive_weight", set.re.positive_weight()},
                           {"re_negative_weight", set.re.negative_weight()},
                           {"re_positive_peak", set.re.positive().peak()},
                           {"re_negative_peak", set.re.negative().peak()},
                           {"im_positive_weight", set.im.positive_weight()},
                           {"im_negative_weight", set.im.negative_weight()},
                           {"zeros", set.re.zeros()}});
    }
    nlohmann::json m = {{"tool", "bosonperm"},
                        {"version", BOSONPERM_VERSION},
                        {"command", "hist"},
                        {"config", io::config_json(config)},
                        {"rng", io::rng_json(config, times.size())},
                        {"times", times},
                        {"histograms", summary}};
    io::write_text_file(dir / "manifest.json", m.dump(2) + "\n");
    std::cerr << "hist: wrote " << sets.size() * 5 << " files to " << dir.string() << '\n';
    return 0;
}

int run_perm_cmd(const std::string& path, const std::string& method, const std::string& n_total,
                 std::uint64_t seed, unsigned workers, std::uint64_t n_block, std::uint64_t n_boot,
                 int exact_cap) {
    const auto m = io::read_matrix_file(path);
    const int n = static_cast<int>(m.rows());
    auto print = [](const std::string& label, Complex z) {
        std::cout << label << ' ' << io::format_double(z.real()) << ' ' << io::format_double(z.imag())
                  << '\n';
    };
    if ((method == "naive" || method == "all") && n <= kNaiveMaxSize) print("naive", perm_naive(m));
    if ((method == "bbfg" || method == "all") && n <= exact_cap) print("bbfg", perm_bbfg(m, exact_cap));
    if (method == "sampled" || method == "all") {
        const std::uint64_t count = NTotalRule::parse(n_total).resolve(n);
        const auto run = glynn_estimate(m, count, seed, workers, n_block);
        const auto est = with_errors(run.estimate, bootstrap(run.blocks, n_boot, seed));
        print("sampled", est.mean);
        std::cout << "sampled_stderr " << io::format_double(est.stderr_re) << ' '
                  << io::format_double(est.stderr_im) << '\n'
                  << "n_total " << count << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Second Renyi entropy after a density-wave quench in free-boson lattices, via "
                 "exact and sampled matrix permanents"};
    app.require_subcommand(1);

    SharedOptions dyn_opts, cmp_opts, scl_opts, hist_opts;
    auto* dynamics = app.add_subcommand("dynamics", "S2(t) on a time grid");
    add_shared(dynamics, dyn_opts);

    auto* compare = app.add_subcommand("compare", "Exact vs sampled S2 on a time grid");
    add_shared(compare, cmp_opts);

    auto* scaling = app.add_subcommand("scaling", "Error-scaling experiment and (alpha, beta) fit");
    add_shared(scaling, scl_opts);
    std::vector<std::string> sizes{"16", "20", "24", "28", "32"};
    std::vector<std::string> grid{"2^14", "2^16", "2^18"};
    int replicates = 32;
    double time_factor = 2.0, fixed_time = -1.0;
    double syn_alpha = std::nan(""), syn_beta = 0.0;
    scaling->add_option("--sizes", sizes, "System sizes: Ns (1D) or LxxLy (2D)")->delimiter(',');
    scaling->add_option("--n-total-grid", grid, "N_total values (integers or 2^k)")->delimiter(',');
    scaling->add_option("--replicates", replicates, "Independent runs per (Ns, N_total)");
    scaling->add_option("--time-factor", time_factor, "t = factor * Ns (1D) or factor * Lx (2D)");
    scaling->add_option("--time", fixed_time, "Fixed time instead of the factor rule");
    scaling->add_option("--synthetic-alpha", syn_alpha, "Inject errors from the exact law");
    scaling->add_option("--synthetic-beta", syn_beta, "Beta for synthetic injection");

    auto* hist = app.add_subcommand("hist", "Sample-distribution histograms");
    add_shared(hist, hist_opts);
    std::vector<double> times{1.0};
    hist->add_option("--times", times, "Times at which to histogram samples")->delimiter(',');

    auto* perm = app.add_subcommand("perm", "Permanent of a matrix file");
    std::string matrix_path, method = "all", perm_n_total = "auto";
    std::uint64_t perm_seed = 1, perm_block = kDefaultBlockCount, perm_boot = kDefaultBootstrapCount;
    unsigned perm_workers = 0;
    int perm_cap = kDefaultExactCap;
    perm->add_option("matrix", matrix_path, "Matrix file")->required()->check(CLI::ExistingFile);
    perm->add_option("--method", method)->check(CLI::IsMember({"all", "naive", "bbfg", "sampled"}));
    perm->add_option("--n-total", perm_n_total, "Samples for the sampled method");
    perm->add_option("--seed", perm_seed);
    perm->add_option("--workers", perm_workers);
    perm->add_option("--n-block", perm_block);
    perm->add_option("--n-boot", perm_boot);
    perm->add_option("--exact-cap", perm_cap);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dynamics) return run_dynamics_cmd(dyn_opts);
        if (*compare) return run_compare_cmd(cmp_opts);
        if (*scaling) {
            return run_scaling_cmd(scl_opts, sizes, grid, replicates, time_factor, fixed_time,
                                   syn_alpha, syn_beta);
        }
        if (*hist) return run_hist_cmd(hist_opts, times);
        if (*perm) {
            return run_perm_cmd(matrix_path, method, perm_n_total, perm_seed, perm_workers,
                                perm_block, perm_boot, perm_cap);
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
