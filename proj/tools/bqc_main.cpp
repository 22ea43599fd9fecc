// bqc: numerical laboratory for 2D Boussinesq flow near stratified Couette.
//
// Subcommands: linear, toy, weights, simulate, rates, sweep.
// Exit codes: 0 ok, 1 usage error, 2 numeric failure, 3 check failure.

#include "bqc/diagnostics.hpp"
#include "bqc/io.hpp"
#include "bqc/lemmas.hpp"
#include "bqc/linear_theory.hpp"
#include "bqc/multipliers.hpp"
#include "bqc/spectral.hpp"
#include "bqc/sweep.hpp"
#include "bqc/toy_model.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitCheck = 3;

struct Range {
    double lo = 0.0;
    double hi = 1.0;
    int n = 1;
};

Range parse_range(const std::string& text) {
    Range r;
    std::istringstream in(text);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() == 1) {
        r.lo = r.hi = std::stod(parts[0]);
        r.n = 1;
    } else if (parts.size() == 3) {
        r.lo = std::stod(parts[0]);
        r.hi = std::stod(parts[1]);
        r.n = std::stoi(parts[2]);
        if (r.n < 1) throw CLI::ValidationError("range count must be >= 1");
    } else {
        throw CLI::ValidationError("expected VALUE or LO:HI:N, got '" + text + "'");
    }
    return r;
}

std::vector<double> range_values(const Range& r, bool log_spaced) {
    std::vector<double> vals;
    if (r.n == 1) return {r.lo};
    for (int i = 0; i < r.n; ++i) {
        const double f = double(i) / double(r.n - 1);
        vals.push_back(log_spaced ? r.lo * std::pow(r.hi / r.lo, f) : r.lo + (r.hi - r.lo) * f);
    }
    return vals;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) out.push_back(part);
    return out;
}

int cmd_weights(const std::string& tab_k, const std::string& tab_eta, const std::string& tab_t,
                const std::string& lemma, std::size_t samples, std::uint64_t seed,
                const std::string& out_path, bool check, const bqc::ParsedConfig& cfg) {
    const bqc::MultiplierParams& mp = cfg.multipliers;
    if (!lemma.empty()) {
        std::vector<std::string> ids;
        if (lemma == "all")
            ids = bqc::lemma_ids();
        else
            ids = split_list(lemma);
        std::vector<std::vector<double>> rows;
        std::ostringstream text;
        text << "lemma_id,n,sup_ratio,p99,p50,inf_ratio\n";
        bool all_finite = true;
        for (const auto& id : ids) {
            const bqc::RatioReport rep = bqc::sample_lemma_ratios(id, samples, seed, mp);
            text << rep.lemma_id << "," << rep.n << "," << bqc::format_double(rep.sup_ratio)
                 << "," << bqc::format_double(rep.p99) << "," << bqc::format_double(rep.p50)
                 << "," << bqc::format_double(rep.inf_ratio) << "\n";
            all_finite = all_finite && std::isfinite(rep.sup_ratio);
        }
        if (out_path.empty())
            std::cout << text.str();
        else {
            std::ofstream out(out_path);
            out << text.str();
        }
        if (check && !all_finite) {
            std::cerr << "check failed: non-finite lemma ratio\n";
            return kExitCheck;
        }
        return kExitOk;
    }

    const long long k = std::stoll(tab_k);
    const Range eta_r = parse_range(tab_eta);
    const Range t_r = parse_range(tab_t);
    const bqc::LambdaFn lam(mp);
    std::vector<std::vector<double>> rows;
    for (double eta : range_values(eta_r, false)) {
        for (double t : range_values(t_r, false)) {
            const auto w = bqc::weight_w(k, eta, t, mp);
            const auto m = bqc::multiplier_m(k, eta, t, mp);
            const double lam_t = lam(t);
            rows.push_back({double(k), eta, t, bqc::p_symbol(k, eta, t), w.w, w.dtw_over_w, m.m,
                            bqc::multiplier_J(k, eta, t, mp, bqc::JVariant::J),
                            std::exp(bqc::log_multiplier_A(k, eta, t, lam_t, mp,
                                                           bqc::AVariant::A)),
                            std::exp(bqc::log_multiplier_A(k, eta, t, lam_t, mp,
                                                           bqc::AVariant::A_v))});
        }
    }
    bqc::write_csv(out_path.empty() ? "/dev/stdout" : out_path,
                   {"k", "eta", "t", "p", "w", "dtw_over_w", "m", "J", "A", "A_v"}, rows);
    return kExitOk;
}

int cmd_linear(double beta, double eta_max, int n_eta, const std::string& k_set, double t0,
               double t1, double tol, const std::string& out_path, bool check) {
    bqc::EnsembleConfig ecfg;
    ecfg.beta = beta;
    ecfg.eta_max = eta_max;
    ecfg.n_eta = n_eta;
    ecfg.t0 = t0;
    ecfg.t1 = t1;
    ecfg.tol = tol;
    ecfg.k_set.clear();
    for (const auto& v : split_list(k_set)) ecfg.k_set.push_back(std::stoll(v));

    const bqc::NormSeries series = bqc::ensemble_norms(ecfg);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        rows.push_back({series.t[i], series.values.at("norm_theta_neq")[i],
                        series.values.at("norm_ux_neq")[i], series.values.at("norm_uy")[i],
                        series.values.at("norm_omega_neq")[i],
                        series.values.at("norm_gradL_theta")[i]});
    }
    bqc::write_csv(out_path.empty() ? "/dev/stdout" : out_path,
                   {"t", "norm_theta_neq", "norm_ux_neq", "norm_uy", "norm_omega_neq",
                    "norm_gradL_theta"},
                   rows);
    if (check) {
        const double lo = std::max(20.0, t0 + 1.0), hi = t1;
        const auto fits = bqc::ensemble_rates(series, lo, hi);
        bool ok = true;
        for (const auto& f : fits) {
            double want = 0.0, tol_w = 0.05;
            if (f.name == "norm_theta_neq" || f.name == "norm_ux_neq") want = -0.5;
            if (f.name == "norm_uy") {
                want = -1.5;
                tol_w = 0.10;
            }
            if (f.name == "norm_omega_neq" || f.name == "norm_gradL_theta") want = 0.5;
            const bool pass = std::abs(f.slope - want) <= tol_w;
            ok = ok && pass;
            std::cerr << (pass ? "[pass] " : "[FAIL] ") << f.name << " slope "
                      << bqc::format_double(f.slope, 4) << " target "
                      << bqc::format_double(want, 3) << " +- " << bqc::format_double(tol_w, 3)
                      << "\n";
        }
        if (!ok) return kExitCheck;
    }
    return kExitOk;
}

int cmd_toy(const std::string& sigmas_text, double tol, const std::string& model,
            const std::string& out_path, bool check) {
    const bqc::ToyModelKind kind =
        model == "bm15" ? bqc::ToyModelKind::bm15 : bqc::ToyModelKind::boussinesq;
    std::vector<double> sigmas;
    for (const auto& v : split_list(sigmas_text)) sigmas.push_back(std::stod(v));
    std::vector<std::vector<double>> rows;
    double env_c = 0.0;
    for (double s : sigmas) {
        const bqc::ToyRun run = bqc::integrate_toy(s, tol, kind);
        rows.push_back({s, std::exp(run.log_f_r_mid), std::exp(run.log_f_nr_mid),
                        std::exp(run.log_f_r_end), std::exp(run.log_f_nr_end)});
        env_c = std::max(env_c, bqc::envelope_constant(run, 2.0));
    }
    std::vector<std::string> footer;
    if (sigmas.size() >= 2) {
        const bqc::ToyExponents ex = bqc::fit_growth_exponent(sigmas, tol, kind);
        footer.push_back("# gamma_r = " + bqc::format_double(ex.gamma_r, 6));
        footer.push_back("# gamma_nr_mid = " + bqc::format_double(ex.gamma_nr_mid, 6));
        footer.push_back("# gamma_nr_end = " + bqc::format_double(ex.gamma_nr_end, 6));
        footer.push_back("# r2 = " + bqc::format_double(ex.r2, 8));
    }
    footer.push_back("# envelope_constant_gamma2 = " + bqc::format_double(env_c, 6));
    bqc::write_csv(out_path.empty() ? "/dev/stdout" : out_path,
                   {"sigma", "f_r_mid", "f_nr_mid", "f_r_end", "f_nr_end"}, rows, footer);
    if (check && env_c > 10.0) {
        std::cerr << "check failed: envelope constant " << env_c << " exceeds 10\n";
        return kExitCheck;
    }
    return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& overrides,
                 bool linear_only) {
    bqc::ParsedConfig cfg =
        config_path.empty() ? bqc::parse_config_text("") : bqc::parse_config_file(config_path);
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--set expects key=value, got '" + ov + "'");
        bqc::apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
    }
    std::filesystem::create_directories(cfg.sim.out_dir);

    const auto t_start = std::chrono::steady_clock::now();
    bqc::RunOptions opt;
    opt.nonlinear = !linear_only;
    opt.write_outputs = true;
    bqc::RunResult res = bqc::run_simulation(cfg.sim, cfg.multipliers, opt);
    const std::string diag_path = cfg.sim.out_dir + "/diagnostics.csv";
    bqc::write_diagnostics_csv(res.rows, diag_path);

    bqc::RunManifest manifest;
    manifest.version = "0.1.0";
    manifest.seed = cfg.sim.seed;
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    manifest.guard_horizon = res.guard_horizon;
    manifest.guard_exceeded = res.guard_exceeded;
    manifest.wraparound_max = res.wraparound_max;
    manifest.cfl_worst = res.cfl_worst;
    manifest.outputs = res.outputs;
    manifest.outputs.push_back(diag_path);
    manifest.config_echo_text = bqc::config_echo(cfg);
    bqc::write_manifest(manifest, cfg.sim.out_dir + "/manifest.txt");

    if (res.guard_exceeded)
        std::cerr << "note: t_end exceeds the resolution horizon guard ("
                  << bqc::format_double(res.guard_horizon, 4) << ")\n";
    if (res.cfl_worst > 1.0)
        std::cerr << "warning: CFL violation, worst dt/dt_cfl = "
                  << bqc::format_double(res.cfl_worst, 4) << "\n";
    std::cout << "wrote " << diag_path << " (" << res.rows.size() << " rows)\n";
    return kExitOk;
}

int cmd_rates(const std::string& in_path, double t0, double t1, const std::string& out_path) {
    const auto rows = bqc::read_diagnostics_csv(in_path);
    std::vector<double> t;
    std::map<std::string, std::vector<double>> series;
    for (const auto& r : rows) {
        t.push_back(r.t);
        series["l2_omega_neq"].push_back(r.l2_omega_neq);
        series["l2_gradtheta_neq"].push_back(r.l2_gradtheta_neq);
        series["l2_ux_neq"].push_back(r.l2_ux_neq);
        series["l2_uy_neq"].push_back(r.l2_uy_neq);
        series["l2_theta_neq"].push_back(r.l2_theta_neq);
    }
    std::ofstream out(out_path.empty() ? "/dev/stdout" : out_path);
    out << "norm_name,window_lo,window_hi,slope,stderr\n";
    for (const auto& [name, vals] : series) {
        const bqc::RateFit fit = bqc::rate_fit(t, vals, t0, t1, name);
        out << name << "," << bqc::format_double(t0) << "," << bqc::format_double(t1) << ","
            << bqc::format_double(fit.slope) << "," << bqc::format_double(fit.stderr_slope)
            << "\n";
    }
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& axes_text,
              int jobs, const std::string& out_dir) {
    bqc::ParsedConfig cfg =
        config_path.empty() ? bqc::parse_config_text("") : bqc::parse_config_file(config_path);
    std::vector<bqc::SweepAxis> axes;
    for (const auto& ax : axes_text) {
        const auto eq = ax.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--axis expects key=v1,v2,... got '" + ax + "'");
        axes.push_back({ax.substr(0, eq), split_list(ax.substr(eq + 1))});
    }
    const bqc::SweepResult res = bqc::run_sweep(cfg, axes, jobs, out_dir);
    std::cout << "sweep: " << res.n_runs << " runs, " << res.n_failed << " failed, aggregate at "
              << res.aggregate_path << "\n";
    return res.n_failed == 0 ? kExitOk : kExitNumeric;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bqc: stratified Couette-Boussinesq numerical laboratory"};
    app.require_subcommand(1);

    // weights
    auto* weights = app.add_subcommand("weights", "tabulate Fourier weights / run lemma suites");
    std::string w_tab, w_k = "1", w_eta = "100", w_t = "0:200:50", w_lemma, w_out;
    std::size_t w_samples = 10000;
    std::uint64_t w_seed = 20240901;
    bool w_check = false;
    std::string w_config;
    weights->add_option("--tabulate", w_tab,
                        "K,ETA-RANGE,T-RANGE (ranges LO:HI:N), e.g. 2,1:100:50,0:200:100");
    weights->add_option("--k", w_k, "wavenumber for tabulation");
    weights->add_option("--eta", w_eta, "eta range LO:HI:N (or single value)");
    weights->add_option("--t", w_t, "time range LO:HI:N (or single value)");
    weights->add_option("--lemma", w_lemma, "lemma id (or 'all') for a ratio suite");
    weights->add_option("--samples", w_samples, "samples per lemma suite");
    weights->add_option("--seed", w_seed, "suite seed");
    weights->add_option("--out", w_out, "output CSV path (default stdout)");
    weights->add_option("--config", w_config, "config file for multiplier parameters");
    weights->add_flag("--check", w_check, "exit 3 unless every ratio is finite");

    // linear
    auto* linear = app.add_subcommand("linear", "linearized per-mode ensemble rates");
    double l_beta = 1.0, l_eta_max = 64.0, l_t0 = 0.0, l_t1 = 2000.0, l_tol = 1e-9;
    int l_n_eta = 2048;
    std::string l_kset = "1,-1", l_out;
    bool l_check = false;
    linear->add_option("--beta", l_beta, "Brunt-Vaisala frequency (> 1/2)");
    linear->add_option("--eta-max", l_eta_max, "eta grid extent");
    linear->add_option("--n-eta", l_n_eta, "eta grid points");
    linear->add_option("--k-set", l_kset, "comma-separated wavenumbers");
    linear->add_option("--t0", l_t0, "start time");
    linear->add_option("--t1", l_t1, "end time");
    linear->add_option("--tol", l_tol, "integrator tolerance");
    linear->add_option("--out", l_out, "output CSV path (default stdout)");
    linear->add_flag("--check", l_check, "exit 3 unless fitted slopes match theory");

    // toy
    auto* toy = app.add_subcommand("toy", "resonant/non-resonant toy model");
    std::string t_sigmas = "10,100,1000,10000", t_model = "boussinesq", t_out;
    double t_tol = 1e-10;
    bool t_check = false;
    toy->add_option("--sigmas", t_sigmas, "comma-separated sigma values");
    toy->add_option("--tol", t_tol, "integrator tolerance");
    toy->add_option("--model", t_model, "boussinesq or bm15")
        ->check(CLI::IsMember({"boussinesq", "bm15"}));
    toy->add_option("--out", t_out, "output CSV path (default stdout)");
    toy->add_flag("--check", t_check, "exit 3 unless gamma=2 envelopes hold with C <= 10");

    // simulate
    auto* simulate = app.add_subcommand(
        "simulate",
        "pseudo-spectral nonlinear run\n"
        "  config keys (key = value lines, '#' comments, unknown keys rejected):\n"
        "    beta epsilon s lambda0 lambda_prime gamma sigma_weight q kmax nv lv\n"
        "    dt t_end dealias preset seed out_dir snapshot_every diag_every");
    std::string s_config;
    std::vector<std::string> s_overrides;
    bool s_linear_only = false;
    simulate->add_option("--config", s_config, "key = value config file");
    simulate->add_option("--set", s_overrides, "override key=value (repeatable)");
    simulate->add_flag("--linear-only", s_linear_only, "disable the nonlinear terms");

    // rates
    auto* rates = app.add_subcommand("rates", "fit power-law exponents from a run CSV");
    std::string r_in, r_out;
    double r_t0 = 10.0, r_t1 = 50.0;
    rates->add_option("--in", r_in, "diagnostics CSV from `simulate`")->required();
    rates->add_option("--t0", r_t0, "window start");
    rates->add_option("--t1", r_t1, "window end");
    rates->add_option("--out", r_out, "output CSV path (default stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep");
    std::string sw_config, sw_out = "sweep_out";
    std::vector<std::string> sw_axes;
    int sw_jobs = 1;
    sweep->add_option("--config", sw_config, "template config file");
    sweep->add_option("--axis", sw_axes, "axis key=v1,v2,... (repeatable)")->required();
    sweep->add_option("--jobs", sw_jobs, "parallel runs");
    sweep->add_option("--out-dir", sw_out, "sweep output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (weights->parsed()) {
            const bqc::ParsedConfig cfg = w_config.empty() ? bqc::parse_config_text("")
                                                           : bqc::parse_config_file(w_config);
            if (!w_tab.empty()) {
                const auto parts = split_list(w_tab);
                if (parts.size() != 3)
                    throw CLI::ValidationError("--tabulate expects K,ETA-RANGE,T-RANGE");
                w_k = parts[0];
                w_eta = parts[1];
                w_t = parts[2];
            }
            return cmd_weights(w_k, w_eta, w_t, w_lemma, w_samples, w_seed, w_out, w_check, cfg);
        }
        if (linear->parsed())
            return cmd_linear(l_beta, l_eta_max, l_n_eta, l_kset, l_t0, l_t1, l_tol, l_out,
                              l_check);
        if (toy->parsed()) return cmd_toy(t_sigmas, t_tol, t_model, t_out, t_check);
        if (simulate->parsed()) return cmd_simulate(s_config, s_overrides, s_linear_only);
        if (rates->parsed()) return cmd_rates(r_in, r_t0, r_t1, r_out);
        if (sweep->parsed()) return cmd_sweep(sw_config, sw_axes, sw_jobs, sw_out);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
