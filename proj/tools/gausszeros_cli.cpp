// gausszeros command-line front end.
#include "gausszeros/densities.hpp"
#include "gausszeros/errors.hpp"
#include "gausszeros/moments.hpp"
#include "gausszeros/pair_correlation.hpp"
#include "gausszeros/parallel.hpp"
#include "gausszeros/partitions.hpp"
#include "gausszeros/simulation.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace gausszeros;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::string command;
    std::string model = "bargmann-fock";
    std::string points;
    std::string partition;
    double R = 50.0;
    long n = 0;  // 0: command default
    std::uint64_t seed = 1;
    int threads = 0;
    double tolerance = 1e-8;
    double zmax = 8.0;
    double step = 0.0;  // fcurve spacing / simulation grid step; 0: command default
    std::string phi = "indicator:0,1";
    int p = 4;
    bool zeros = false;
    std::string out;
    std::string format;  // json | csv; empty: command default
};

ordered_json to_json(const RunConfig& c) {
    return ordered_json{{"command", c.command},     {"model", c.model},   {"points", c.points},
                        {"partition", c.partition}, {"R", c.R},           {"n", c.n},
                        {"seed", c.seed},           {"threads", c.threads}, {"tolerance", c.tolerance},
                        {"zmax", c.zmax},           {"step", c.step},     {"phi", c.phi},
                        {"p", c.p},                 {"zeros", c.zeros},   {"out", c.out},
                        {"format", c.format}};
}

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + item + "'");
        }
    }
    return v;
}

// "0,0.5;1,2" -> two configurations
std::vector<Configuration> parse_configurations(const std::string& text) {
    if (text.empty()) throw ConfigError("--points is required");
    std::vector<Configuration> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        auto x = parse_numbers(item);
        if (x.empty()) throw ConfigError("empty configuration in --points");
        out.push_back(std::move(x));
    }
    return out;
}

MonteCarloSpec mc_spec(const RunConfig& c) {
    MonteCarloSpec mc;
    if (c.n > 0) mc.samples = static_cast<std::uint64_t>(c.n);
    mc.seed = c.seed;
    mc.threads = c.threads;
    return mc;
}

QuadratureSpec quad_spec(const RunConfig& c) {
    if (!(c.tolerance > 0)) throw ConfigError("--tolerance must be positive");
    QuadratureSpec q;
    q.abs_tolerance = c.tolerance;
    return q;
}

std::string format_of(const RunConfig& c, const char* fallback) {
    const std::string f = c.format.empty() ? fallback : c.format;
    if (f != "json" && f != "csv") throw ConfigError("--format must be json or csv");
    return f;
}

// Test function moved to start at 0 (stationarity) and the window it needs.
struct ShiftedPhi {
    TestFunction phi;
    double window;
};

ShiftedPhi shifted_phi(const std::string& text, double R) {
    TestFunction orig = TestFunction::parse(text);
    const double lo = orig.lo;
    TestFunction t = orig;
    t.eval = [f = orig.eval, lo](double x) { return f(x + lo); };
    t.lo = 0.0;
    t.hi = orig.hi - lo;
    for (auto& k : t.kinks) k -= lo;
    return {t, R * t.hi};
}

SimulationSpec sim_spec(const RunConfig& c, double window, long default_n) {
    SimulationSpec s;
    s.window_length = window;
    if (c.step > 0) s.grid_step = c.step;
    s.num_samples = static_cast<std::uint64_t>(c.n > 0 ? c.n : default_n);
    s.master_seed = c.seed;
    s.threads = c.threads;
    return s;
}

ordered_json density_json(const Configuration& x, const DensityResult& r) {
    return ordered_json{{"points", x},
                        {"rho", r.rho},
                        {"d", r.d_value},
                        {"n", r.n_value},
                        {"n_std_error", r.n_std_error},
                        {"partition", r.partition_used.to_string()},
                        {"vandermonde", r.vandermonde_factor}};
}

int cmd_rho(const RunConfig& c, std::ostream& os) {
    const auto model = resolve_model(c.model);
    for (const auto& x : parse_configurations(c.points)) {
        DensityResult r;
        if (c.partition.empty()) {
            r = rho_k(*model, x, mc_spec(c));
        } else {
            r = rho_with_partition(*model, x, IndexPartition::parse(c.partition), mc_spec(c));
        }
        os << density_json(x, r).dump() << '\n';
    }
    return 0;
}

int cmd_sigma2(const RunConfig& c, std::ostream& os) {
    const auto model = resolve_model(c.model);
    const auto q = quad_spec(c);
    const auto s = sigma_squared(*model, q);
    const auto b = sigma_lower_bound(*model, q);
    const bool converged = s.converged && b.converged;
    os << ordered_json{{"model", model->name()},
                       {"sigma2", s.value},
                       {"sigma2_error", s.abs_error},
                       {"lower_bound", b.value},
                       {"lower_bound_error", b.abs_error},
                       {"converged", converged}}
              .dump()
       << '\n';
    if (!converged) throw QuadratureNotConverged("sigma2 quadrature did not reach the tolerance");
    return 0;
}

std::vector<double> statistics(const std::vector<ZeroSample>& samples, const TestFunction& phi, double R) {
    std::vector<double> v(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) v[i] = linear_statistic(samples[i], phi, R);
    return v;
}

void write_csv_header(std::ostream& os) { os << "quantity,estimate,stderr,ci_lo,ci_hi,n\n"; }

void write_csv_row(std::ostream& os, const std::string& q, double est, double se, double lo, double hi,
                   std::size_t n) {
    os << q << ',' << ordered_json(est).dump() << ',' << ordered_json(se).dump() << ','
       << ordered_json(lo).dump() << ',' << ordered_json(hi).dump() << ',' << n << '\n';
}

int cmd_simulate(const RunConfig& c, std::ostream& os) {
    const auto model = resolve_model(c.model);
    const auto [phi, window] = shifted_phi(c.phi, c.R);
    const auto spec = sim_spec(c, window, 1000);
    const auto samples = simulate_zeros(model, spec);
    const auto stats = statistics(samples, phi, c.R);
    if (format_of(c, "json") == "json") {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            ordered_json line{{"replicate", i},
                              {"seed", samples[i].replicate_seed},
                              {"count", samples[i].zeros.size()},
                              {"stat", stats[i]}};
            if (c.zeros) line["zeros"] = samples[i].zeros;
            os << line.dump() << '\n';
        }
        return 0;
    }
    const double n = double(stats.size());
    double mean = 0.0;
    for (double s : stats) mean += s;
    mean /= n;
    double ss = 0.0;
    for (double s : stats) ss += (s - mean) * (s - mean);
    const double var = stats.size() > 1 ? ss / (n - 1) : 0.0;
    const double se = std::sqrt(var / n);
    write_csv_header(os);
    write_csv_row(os, "mean_stat", mean, se, mean - 1.96 * se, mean + 1.96 * se, stats.size());
    write_csv_row(os, "predicted_mean", expected_linear_statistic(phi, c.R), 0, 0, 0, 0);
    write_csv_row(os, "var_stat_over_R", var / c.R, 0, 0, 0, stats.size());
    return 0;
}

int cmd_moments(const RunConfig& c, std::ostream& os) {
    if (c.p < 1 || c.p > 6) throw ConfigError("--p must lie in 1..6");
    const auto model = resolve_model(c.model);
    const auto [phi, window] = shifted_phi(c.phi, c.R);
    const auto spec = sim_spec(c, window, 2000);
    const auto stats = statistics(simulate_zeros(model, spec), phi, c.R);
    const auto est = moments_from_statistics(stats, expected_linear_statistic(phi, c.R), {c.p},
                                             derive_seed(c.seed, 0xb0075712ull))
                         .front();
    const double predicted =
        predicted_central_moment(*model, std::vector<TestFunction>(c.p, phi), c.R, quad_spec(c));
    if (format_of(c, "json") == "json") {
        os << ordered_json{{"order", est.order},      {"estimate", est.estimate},
                           {"std_error", est.std_error}, {"ci_lo", est.ci_lo},
                           {"ci_hi", est.ci_hi},      {"predicted", predicted},
                           {"n", est.num_samples},    {"R", c.R},
                           {"phi", c.phi}}
                  .dump()
           << '\n';
    } else {
        write_csv_header(os);
        write_csv_row(os, "m" + std::to_string(c.p), est.estimate, est.std_error, est.ci_lo, est.ci_hi,
                      est.num_samples);
        write_csv_row(os, "predicted_m" + std::to_string(c.p), predicted, 0, 0, 0, 0);
    }
    return 0;
}

int cmd_clustering(const RunConfig& c, std::ostream& os) {
    const auto model = resolve_model(c.model);
    if (c.partition.empty()) throw ConfigError("--partition is required");
    const auto part = IndexPartition::parse(c.partition);
    for (const auto& x : parse_configurations(c.points)) {
        const auto r = clustering_ratio(*model, x, part, mc_spec(c));
        os << ordered_json{{"points", x},
                           {"partition", part.to_string()},
                           {"ratio", r.ratio},
                           {"deviation", static_cast<double>(r.deviation)},
                           {"bound", r.bound},
                           {"eta", std::isfinite(r.eta) ? ordered_json(r.eta) : ordered_json(nullptr)}}
                  .dump()
           << '\n';
    }
    return 0;
}

int cmd_vanishing(const RunConfig& c, std::ostream& os) {
    const auto model = resolve_model(c.model);
    for (const auto& y : parse_configurations(c.points)) {
        const auto v = vanishing_constant(*model, y, mc_spec(c));
        os << ordered_json{{"points", y},
                           {"value", v.value},
                           {"std_error", v.std_error},
                           {"partition", v.partition.to_string()}}
                  .dump()
           << '\n';
    }
    return 0;
}

int cmd_fcurve(const RunConfig& c, std::ostream& os) {
    const auto model = resolve_model(c.model);
    const double step = c.step > 0 ? c.step : 0.01;
    if (!(c.zmax > 0)) throw ConfigError("--zmax must be positive");
    const long count = std::lround(std::floor(c.zmax / step + 1e-9));
    const bool csv = format_of(c, "csv") == "csv";
    if (csv) os << "z,F\n";
    for (long i = 1; i <= count; ++i) {
        const double z = double(i) * step;
        const double f = two_point_F(*model, z);
        if (csv) {
            os << ordered_json(z).dump() << ',' << ordered_json(f).dump() << '\n';
        } else {
            os << ordered_json{{"z", z}, {"F", f}}.dump() << '\n';
        }
    }
    return 0;
}

void apply_config_file(const std::string& path, RunConfig& c, CLI::App& app) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    const auto known = to_json(c);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.contains(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
    }
    // flags given on the command line win
    auto given = [&](const std::string& key) {
        if (key == "command") return !c.command.empty();
        auto* opt = app.get_option_no_throw("--" + key);
        return opt && opt->count() > 0;
    };
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& k = it.key();
            if (given(k)) continue;
            const auto& v = it.value();
            if (k == "command") c.command = v.get<std::string>();
            else if (k == "model") c.model = v.get<std::string>();
            else if (k == "points") c.points = v.get<std::string>();
            else if (k == "partition") c.partition = v.get<std::string>();
            else if (k == "R") c.R = v.get<double>();
            else if (k == "n") c.n = v.get<long>();
            else if (k == "seed") c.seed = v.get<std::uint64_t>();
            else if (k == "threads") c.threads = v.get<int>();
            else if (k == "tolerance") c.tolerance = v.get<double>();
            else if (k == "zmax") c.zmax = v.get<double>();
            else if (k == "step") c.step = v.get<double>();
            else if (k == "phi") c.phi = v.get<std::string>();
            else if (k == "p") c.p = v.get<int>();
            else if (k == "zeros") c.zeros = v.get<bool>();
            else if (k == "out") c.out = v.get<std::string>();
            else if (k == "format") c.format = v.get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-set statistics of stationary Gaussian processes"};
    app.require_subcommand(0, 1);  // a --config file may name the command
    app.fallthrough();
    RunConfig c;
    std::string config_path;
    bool dump = false;

    app.add_option("--model", c.model, "preset (bargmann-fock, cauchy, sinc) or spectral-table .json")
        ->capture_default_str();
    app.add_option("--points", c.points, "configuration(s): comma separated, ';' between configurations");
    app.add_option("--partition", c.partition, "index partition, e.g. \"{0,1},{2}\"");
    app.add_option("--R", c.R, "scale R (simulation window R * support of phi)")->capture_default_str();
    app.add_option("--n", c.n, "Monte Carlo samples / replicates (0: command default)")->capture_default_str();
    app.add_option("--seed", c.seed, "master seed")->capture_default_str();
    app.add_option("--threads", c.threads, "worker threads (0: GAUSSZEROS_THREADS or hardware)")
        ->capture_default_str();
    app.add_option("--tolerance", c.tolerance, "absolute quadrature tolerance")->capture_default_str();
    app.add_option("--zmax", c.zmax, "fcurve upper end")->capture_default_str();
    app.add_option("--step", c.step, "fcurve spacing or simulation grid step (0: default)")
        ->capture_default_str();
    app.add_option("--phi", c.phi, "test function: indicator:a,b | gaussian:c,w | table:xs|ys")
        ->capture_default_str();
    app.add_option("--p", c.p, "moment order for 'moments'")->capture_default_str();
    app.add_flag("--zeros", c.zeros, "include zero lists in 'simulate' JSON lines");
    app.add_option("--out", c.out, "output file (default stdout)");
    app.add_option("--format", c.format, "json or csv");
    app.add_option("--config", config_path, "JSON config file (keys as printed by --dump-config)");
    app.add_flag("--dump-config", dump, "print the resolved config as JSON and exit");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"rho", "k-point density rho_k"},
        {"sigma2", "variance constant and its lower bound"},
        {"simulate", "simulate zero sets; JSON lines per replicate or CSV summary"},
        {"moments", "empirical central moment vs prediction"},
        {"clustering", "clustering ratio for a partition"},
        {"vanishing", "vanishing constant at a diagonal configuration"},
        {"fcurve", "table of F(z)"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ErrorCategory::Config);
    }
    if (!app.get_subcommands().empty()) c.command = app.get_subcommands().front()->get_name();

    try {
        if (!config_path.empty()) apply_config_file(config_path, c, app);
        if (c.command.empty()) throw ConfigError("a subcommand is required (or a --config naming one)");
        if (dump) {
            std::cout << to_json(c).dump(2) << '\n';
            return 0;
        }
        std::ofstream file;
        if (!c.out.empty()) {
            file.open(c.out);
            if (!file) throw ConfigError("cannot open output file " + c.out);
        }
        std::ostream& os = c.out.empty() ? std::cout : file;
        os.precision(17);
        if (c.command == "rho") return cmd_rho(c, os);
        if (c.command == "sigma2") return cmd_sigma2(c, os);
        if (c.command == "simulate") return cmd_simulate(c, os);
        if (c.command == "moments") return cmd_moments(c, os);
        if (c.command == "clustering") return cmd_clustering(c, os);
        if (c.command == "vanishing") return cmd_vanishing(c, os);
        if (c.command == "fcurve") return cmd_fcurve(c, os);
        throw ConfigError("unknown command " + c.command);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::Numerics);
    }
}
