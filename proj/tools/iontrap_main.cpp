// Command-line front end: single runs, parameter sweeps and the built-in
// verification suite for the trapped-ion revival simulator.
//
// Exit codes: 0 success, 1 usage/config error, 2 physics precondition
// violation (regime, truncation, detection span), 3 I/O error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "iontrap/analytic.hpp"
#include "iontrap/io.hpp"
#include "iontrap/propagator.hpp"
#include "iontrap/revivals.hpp"

namespace fs = std::filesystem;
using namespace iontrap;

namespace {

struct RunConfig {
    double nu = 1.0;
    double omega = 0.5;
    double delta = 0.0;
    double eta = 0.5;
    double alpha_re = 0.0;
    double alpha_im = 0.0;
    double tau_max = 100.0;
    double tau_step = 0.05;
    int n_max = 0;  // 0 = auto
    std::string mode = "analytic";
    double window = 8.0 * std::numbers::pi;
    std::string out_dir = "out";
    bool envelope_in_report = true;
};

/// Parse "a+bi" / "a-bi" / "bi" / "a" into a complex number.
std::complex<double> parse_complex(const std::string& text) {
    std::string s = text;
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty()) throw CLI::ValidationError("alpha", "empty complex literal");
    if (s.back() == 'i' || s.back() == 'j') {
        s.pop_back();
        // split at the last +/- that is not an exponent sign or leading sign
        std::size_t split = std::string::npos;
        for (std::size_t k = s.size(); k-- > 1;) {
            if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
                split = k;
                break;
            }
        }
        if (split == std::string::npos)
            return {0.0, s.empty() || s == "+" ? 1.0 : s == "-" ? -1.0
                                                               : std::stod(s)};
        const std::string re = s.substr(0, split);
        std::string im = s.substr(split);
        if (im == "+") im = "1";
        if (im == "-") im = "-1";
        return {std::stod(re), std::stod(im)};
    }
    return {std::stod(s), 0.0};
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const IoError*>(&e)) return 3;
    return 2;
}

void emit_error(const std::string& type, const std::string& message) {
    json err{{"error", {{"type", type}, {"message", message}}}};
    std::cerr << err.dump() << std::endl;
}

struct RunOutput {
    double first_value = 0.0;
    bool super_detected = false;
};

/// Execute one configuration: write series.csv, report.json and, in
/// compare mode, compare_summary.json into cfg.out_dir.
RunOutput run_one(const RunConfig& cfg) {
    IonParams p = IonParams::make(cfg.nu, cfg.omega, cfg.delta, cfg.eta);
    CoherentAmplitude a =
        CoherentAmplitude::make({cfg.alpha_re, cfg.alpha_im}, cfg.eta);
    const int n_max = cfg.n_max > 0 ? cfg.n_max : auto_n_max_aligned(a);
    const std::vector<double> grid = make_tau_grid(cfg.tau_max, cfg.tau_step);

    std::optional<ExcitationSeries> series;
    std::optional<ExcitationSeries> oracle;
    if (cfg.mode == "analytic") {
        series = mean_excitation_analytic(a, p, grid, n_max);
    } else if (cfg.mode == "oracle_rwa") {
        series = evolve_matrix_pipeline(p, a, grid, HamiltonianChoice::rwa, n_max);
    } else if (cfg.mode == "oracle_full") {
        series = evolve_matrix_pipeline(p, a, grid,
                                       HamiltonianChoice::transformed_full, n_max);
    } else if (cfg.mode == "lab_full") {
        series = evolve_matrix_pipeline(p, a, grid, HamiltonianChoice::lab_full,
                                       n_max);
    } else if (cfg.mode == "compare") {
        series = mean_excitation_analytic(a, p, grid, n_max);
        oracle = evolve_matrix_pipeline(p, a, grid, HamiltonianChoice::rwa, n_max);
    } else {
        throw CLI::ValidationError("mode", "unknown mode: " + cfg.mode);
    }

    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create " + cfg.out_dir + ": " + ec.message());

    write_series_csv(cfg.out_dir + "/series.csv", *series,
                     oracle ? &*oracle : nullptr);

    if (oracle) {
        double max_dev = 0.0, at_tau = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double d = std::abs(series->n_mean[i] - oracle->n_mean[i]);
            if (d > max_dev) {
                max_dev = d;
                at_tau = grid[i];
            }
        }
        write_json_file(cfg.out_dir + "/compare_summary.json",
                        json{{"max_abs_dev", max_dev},
                             {"at_tau", at_tau},
                             {"n_points", grid.size()},
                             {"series", "analytic"},
                             {"oracle", "oracle_rwa"}});
    }

    RevivalReport rep = detect_revivals(*series, {.window = cfg.window});
    json report = report_to_json(rep, *series, n_max, cfg.mode,
                                 cfg.envelope_in_report);
    write_json_file(cfg.out_dir + "/report.json", report);
    return RunOutput{series->n_mean.front(), rep.super_revival_detected};
}

void add_run_options(CLI::App* cmd, RunConfig& cfg, std::string& alpha_str,
                     std::string& config_path) {
    cmd->add_option("--nu", cfg.nu, "trap frequency");
    cmd->add_option("--omega", cfg.omega, "Rabi frequency");
    cmd->add_option("--delta", cfg.delta, "detuning");
    cmd->add_option("--eta", cfg.eta, "Lamb-Dicke parameter");
    cmd->add_option("--alpha", alpha_str,
                    "coherent amplitude, e.g. 0.5+5.0i");
    cmd->add_option("--alpha-re", cfg.alpha_re, "Re(alpha)");
    cmd->add_option("--alpha-im", cfg.alpha_im, "Im(alpha)");
    cmd->add_option("--tau-max", cfg.tau_max, "last scaled time");
    cmd->add_option("--tau-step", cfg.tau_step, "grid step in tau");
    cmd->add_option("--n-max", cfg.n_max, "Fock levels (0 = auto rule)");
    cmd->add_option("--mode", cfg.mode,
                    "analytic|oracle_rwa|oracle_full|lab_full|compare");
    cmd->add_option("--window", cfg.window, "envelope window (tau units)");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_flag("--envelope,!--no-envelope", cfg.envelope_in_report,
                  "include envelope arrays in report.json");
    cmd->add_option("--config", config_path,
                    "flat key=value config file; flags override it");
}

/// Flat key=value configuration; values already given as flags win.
void apply_config_file(const CLI::App& cmd, const std::string& path,
                       RunConfig& cfg, std::string& alpha_str) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    const bool alpha_given = cmd.count("--alpha") || cmd.count("--alpha-re") ||
                             cmd.count("--alpha-im");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line.erase(std::remove(line.begin(), line.end(), ' '), line.end());
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError(
                "config", "expected key=value at line " + std::to_string(line_no));
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        auto overridden = [&](const char* flag) { return cmd.count(flag) > 0; };
        if (key == "nu") { if (!overridden("--nu")) cfg.nu = std::stod(value); }
        else if (key == "omega") { if (!overridden("--omega")) cfg.omega = std::stod(value); }
        else if (key == "delta") { if (!overridden("--delta")) cfg.delta = std::stod(value); }
        else if (key == "eta") { if (!overridden("--eta")) cfg.eta = std::stod(value); }
        else if (key == "alpha") { if (!alpha_given) alpha_str = value; }
        else if (key == "alpha-re") { if (!alpha_given) cfg.alpha_re = std::stod(value); }
        else if (key == "alpha-im") { if (!alpha_given) cfg.alpha_im = std::stod(value); }
        else if (key == "tau-max") { if (!overridden("--tau-max")) cfg.tau_max = std::stod(value); }
        else if (key == "tau-step") { if (!overridden("--tau-step")) cfg.tau_step = std::stod(value); }
        else if (key == "n-max") { if (!overridden("--n-max")) cfg.n_max = std::stoi(value); }
        else if (key == "mode") { if (!overridden("--mode")) cfg.mode = value; }
        else if (key == "window") { if (!overridden("--window")) cfg.window = std::stod(value); }
        else if (key == "out") { if (!overridden("--out")) cfg.out_dir = value; }
        else throw CLI::ValidationError("config", "unknown key: " + key);
    }
}

// ---------------------------------------------------------------------
// sweep

struct SweepAxis {
    std::string key;
    std::vector<double> values;
};

SweepAxis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw CLI::ValidationError("sweep", "expected key=v1,v2,...: " + text);
    SweepAxis axis;
    axis.key = text.substr(0, eq);
    std::stringstream list(text.substr(eq + 1));
    std::string cell;
    while (std::getline(list, cell, ',')) axis.values.push_back(std::stod(cell));
    if (axis.values.empty())
        throw CLI::ValidationError("sweep", "axis has no values: " + text);
    return axis;
}

void apply_axis_value(RunConfig& cfg, const std::string& key, double v) {
    if (key == "nu") cfg.nu = v;
    else if (key == "omega") cfg.omega = v;
    else if (key == "delta") cfg.delta = v;
    else if (key == "eta") cfg.eta = v;
    else if (key == "alpha-re") cfg.alpha_re = v;
    else if (key == "alpha-im") cfg.alpha_im = v;
    else if (key == "alpha-abs" || key == "alpha-arg") {
        std::complex<double> al{cfg.alpha_re, cfg.alpha_im};
        double r = std::abs(al), th = std::arg(al);
        (key == "alpha-abs" ? r : th) = v;
        cfg.alpha_re = r * std::cos(th);
        cfg.alpha_im = r * std::sin(th);
    }
    else if (key == "tau-max") cfg.tau_max = v;
    else if (key == "tau-step") cfg.tau_step = v;
    else if (key == "n-max") cfg.n_max = int(v);
    else throw CLI::ValidationError("sweep", "unknown axis key: " + key);
}

int run_sweep(const RunConfig& base, const std::vector<std::string>& axis_args,
              std::size_t cap, const std::string& out_dir) {
    std::vector<SweepAxis> axes;
    for (const std::string& s : axis_args) axes.push_back(parse_axis(s));
    if (axes.empty())
        throw CLI::ValidationError("sweep", "at least one --axis required");

    std::size_t total = 1;
    for (const SweepAxis& ax : axes) total *= ax.values.size();
    if (total > cap)
        throw Error("sweep: " + std::to_string(total) +
                    " points exceed cap " + std::to_string(cap));

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    struct PointResult {
        json params;
        std::string dir;
        std::string status;
        bool super_detected = false;
    };
    std::vector<PointResult> results(total);

    auto config_for = [&](std::size_t index) {
        RunConfig cfg = base;
        json par = json::object();
        std::size_t rem = index;
        for (const SweepAxis& ax : axes) {
            const double v = ax.values[rem % ax.values.size()];
            rem /= ax.values.size();
            apply_axis_value(cfg, ax.key, v);
            par[ax.key] = v;
        }
        char name[32];
        std::snprintf(name, sizeof name, "point_%04zu", index);
        cfg.out_dir = out_dir + "/" + name;
        return std::pair<RunConfig, json>{cfg, par};
    };

    std::atomic<std::size_t> next{0};
    const unsigned workers = std::max(
        1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                               unsigned(total)));
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            auto [cfg, par] = config_for(i);
            PointResult& res = results[i];
            res.params = par;
            res.dir = fs::path(cfg.out_dir).filename().string();
            try {
                RunOutput out = run_one(cfg);
                res.status = "ok";
                res.super_detected = out.super_detected;
            } catch (const std::exception& e) {
                res.status = std::string("error: ") + e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    json index;
    index["count"] = total;
    json points = json::array();
    for (std::size_t i = 0; i < total; ++i)
        points.push_back({{"index", i},
                          {"params", results[i].params},
                          {"dir", results[i].dir},
                          {"status", results[i].status},
                          {"super_revival_detected", results[i].super_detected}});
    index["points"] = points;
    write_json_file(out_dir + "/index.json", index);

    for (const PointResult& r : results)
        if (r.status != "ok") return 2;
    return 0;
}

// ---------------------------------------------------------------------
// verify

bool check(const char* name, double measured, double bound) {
    const bool ok = measured <= bound;
    std::printf("[%s] %-58s %.3e (bound %.1e)\n", ok ? "PASS" : "FAIL", name,
                measured, bound);
    return ok;
}

int run_verify() {
    bool all = true;
    IonParams p = IonParams::make(1.0, 0.5, 0.0, 0.5);

    {  // unitarity of the transformation, displacement, propagator
        SpaceDims dims(80);
        OperatorMatrix t = build_T(p, dims);
        all &= check("T^dag T = 1 (full space)",
                     identity_defect_interior(Matrix(t.m.adjoint() * t.m), 80,
                                              true, 80),
                     1e-10);
        OperatorMatrix d = build_displacement(p.beta, 80);
        all &= check("D^dag D = 1 (full space)",
                     identity_defect_interior(Matrix(d.m.adjoint() * d.m), 80,
                                              false, 80),
                     1e-10);
        for (double tau : {1.7, 31.45}) {
            OperatorMatrix u = jc_propagator(tau, dims);
            all &= check("U_I^dag U_I = 1 (interior)",
                         identity_defect_interior(Matrix(u.m.adjoint() * u.m),
                                                  80, true,
                                                  80 - kPropagationMargin),
                         1e-10);
        }
    }

    for (double eta : {0.1, 0.5}) {  // transform identity
        IonParams pe = IonParams::make(1.0, 0.5, 0.0, eta);
        SpaceDims dims(64);
        OperatorMatrix h = build_full_hamiltonian(pe, dims);
        OperatorMatrix t = build_T(pe, dims);
        OperatorMatrix hp = build_transformed_hamiltonian(pe, dims);
        Matrix diff = t.m * h.m * t.m.adjoint() - hp.m;
        const int interior = 64 - conjugation_interior_margin(eta);
        all &= check("T H T^dag matches closed form (interior)",
                     max_abs_interior(diff, 64, true, interior), 1e-6);
    }

    for (cplx av : {cplx(5.0, 0.5), cplx(0.5, 5.0)}) {  // closed form vs oracle
        CoherentAmplitude a = CoherentAmplitude::make(av, p.eta);
        auto grid = make_tau_grid(60.0, 0.05);
        ExcitationSeries ana = mean_excitation_analytic(a, p, grid);
        ExcitationSeries orc =
            evolve_matrix_pipeline(p, a, grid, HamiltonianChoice::rwa);
        double dev = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            dev = std::max(dev, std::abs(ana.n_mean[i] - orc.n_mean[i]));
        all &= check("closed form matches matrix oracle (tau <= 60)", dev, 1e-6);
    }

    std::printf("%s\n", all ? "verify: all checks passed"
                            : "verify: FAILURES present");
    return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trapped-ion collapse/revival simulator"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string alpha_str;
    std::string config_path;

    CLI::App* run_cmd = app.add_subcommand("run", "single simulation");
    add_run_options(run_cmd, cfg, alpha_str, config_path);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep");
    RunConfig sweep_base;
    std::string sweep_alpha_str;
    std::string sweep_config_path;
    std::vector<std::string> axis_args;
    std::size_t cap = 10000;
    std::string sweep_out = "sweep_out";
    add_run_options(sweep_cmd, sweep_base, sweep_alpha_str, sweep_config_path);
    sweep_cmd->add_option("--axis", axis_args,
                          "sweep axis key=v1,v2,... (repeatable)");
    sweep_cmd->add_option("--cap", cap, "maximum number of grid points");

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the built-in invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (run_cmd->parsed()) {
            if (!config_path.empty())
                apply_config_file(*run_cmd, config_path, cfg, alpha_str);
            if (!alpha_str.empty()) {
                auto al = parse_complex(alpha_str);
                cfg.alpha_re = al.real();
                cfg.alpha_im = al.imag();
            }
            RunOutput out = run_one(cfg);
            std::cout << "n_mean(0) = " << format_double(out.first_value)
                      << "\nsuper_revival_detected = "
                      << (out.super_detected ? "true" : "false")
                      << "\noutputs in " << cfg.out_dir << std::endl;
            return 0;
        }
        if (sweep_cmd->parsed()) {
            if (!sweep_config_path.empty())
                apply_config_file(*sweep_cmd, sweep_config_path, sweep_base,
                                  sweep_alpha_str);
            if (!sweep_alpha_str.empty()) {
                auto al = parse_complex(sweep_alpha_str);
                sweep_base.alpha_re = al.real();
                sweep_base.alpha_im = al.imag();
            }
            // per-point outputs land under the sweep output directory
            sweep_out = sweep_base.out_dir;
            return run_sweep(sweep_base, axis_args, cap, sweep_out);
        }
        if (verify_cmd->parsed()) return run_verify();
    } catch (const CLI::Error& e) {
        emit_error("usage", e.what());
        return 1;
    } catch (const Error& e) {
        emit_error("physics", e.what());
        return exit_code_for(e);
    } catch (const std::invalid_argument& e) {
        emit_error("usage", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 3;
    }
    return 1;
}
