#include "bqc/sweep.hpp"

#include "bqc/diagnostics.hpp"
#include "bqc/spectral.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bqc {

namespace {

struct RunOutcome {
    bool ok = false;
    std::string error;
    std::vector<double> slopes; // omega, gradtheta, ux, uy, theta
};

RunOutcome execute_run(ParsedConfig cfg, std::uint64_t seed, const std::string& dir) {
    RunOutcome outcome;
    try {
        std::filesystem::create_directories(dir);
        cfg.sim.seed = seed;
        cfg.sim.out_dir = dir;
        cfg.raw["seed"] = std::to_string(seed);
        cfg.raw["out_dir"] = dir;

        const auto t_start = std::chrono::steady_clock::now();
        RunOptions opt;
        opt.write_outputs = true;
        RunResult res = run_simulation(cfg.sim, cfg.multipliers, opt);
        write_diagnostics_csv(res.rows, dir + "/diagnostics.csv");

        RunManifest manifest;
        manifest.version = "0.1.0";
        manifest.seed = seed;
        manifest.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        manifest.guard_horizon = res.guard_horizon;
        manifest.guard_exceeded = res.guard_exceeded;
        manifest.wraparound_max = res.wraparound_max;
        manifest.cfl_worst = res.cfl_worst;
        manifest.outputs = res.outputs;
        manifest.outputs.push_back(dir + "/diagnostics.csv");
        manifest.config_echo_text = config_echo(cfg);
        write_manifest(manifest, dir + "/manifest.txt");

        const double lo = std::max(1.0, cfg.sim.t_end / 5.0);
        const double hi = cfg.sim.t_end;
        std::vector<double> t;
        std::vector<double> s_om, s_gth, s_ux, s_uy, s_th;
        for (const DiagRow& r : res.rows) {
            t.push_back(r.t);
            s_om.push_back(r.l2_omega_neq);
            s_gth.push_back(r.l2_gradtheta_neq);
            s_ux.push_back(r.l2_ux_neq);
            s_uy.push_back(r.l2_uy_neq);
            s_th.push_back(r.l2_theta_neq);
        }
        for (const auto* v : {&s_om, &s_gth, &s_ux, &s_uy, &s_th})
            outcome.slopes.push_back(rate_fit(t, *v, lo, hi).slope);
        outcome.ok = true;
    } catch (const std::exception& e) {
        outcome.error = e.what();
    }
    return outcome;
}

} // namespace

SweepResult run_sweep(const ParsedConfig& templ, const std::vector<SweepAxis>& axes,
                      int parallelism, const std::string& out_dir) {
    if (axes.empty()) throw std::invalid_argument("sweep: need at least one axis");
    for (const auto& ax : axes)
        if (ax.values.empty()) throw std::invalid_argument("sweep: empty axis " + ax.key);

    std::size_t total = 1;
    for (const auto& ax : axes) total *= ax.values.size();
    std::filesystem::create_directories(out_dir);

    // lexicographic enumeration: the last axis varies fastest
    auto values_at = [&](std::size_t index) {
        std::vector<std::string> vals(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            vals[a] = axes[a].values[index % axes[a].values.size()];
            index /= axes[a].values.size();
        }
        return vals;
    };

    std::vector<RunOutcome> outcomes(total);
    const int jobs = std::max(1, parallelism);
    std::size_t next = 0;
    while (next < total) {
        const std::size_t batch = std::min<std::size_t>(jobs, total - next);
        std::vector<std::thread> workers;
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t index = next + b;
            workers.emplace_back([&, index]() {
                try {
                    ParsedConfig cfg = templ;
                    const auto vals = values_at(index);
                    for (std::size_t a = 0; a < axes.size(); ++a)
                        apply_override(cfg, axes[a].key, vals[a]);
                    char name[32];
                    std::snprintf(name, sizeof(name), "run_%04zu", index);
                    outcomes[index] =
                        execute_run(std::move(cfg), templ.sim.seed + index, out_dir + "/" + name);
                } catch (const std::exception& e) {
                    outcomes[index].ok = false;
                    outcomes[index].error = e.what();
                }
            });
        }
        for (auto& w : workers) w.join();
        next += batch;
    }

    SweepResult result;
    result.n_runs = total;
    result.aggregate_path = out_dir + "/aggregate.csv";
    std::ofstream out(result.aggregate_path);
    if (!out) throw std::runtime_error("cannot open " + result.aggregate_path);
    out << "run_index";
    for (const auto& ax : axes) out << "," << ax.key;
    out << ",status,slope_omega_neq,slope_gradtheta_neq,slope_ux_neq,slope_uy_neq,"
           "slope_theta_neq\n";
    for (std::size_t i = 0; i < total; ++i) {
        out << i;
        for (const auto& v : values_at(i)) out << "," << v;
        if (outcomes[i].ok) {
            out << ",ok";
            for (double s : outcomes[i].slopes) out << "," << format_double(s);
        } else {
            ++result.n_failed;
            out << ",failed,,,,,";
        }
        out << "\n";
    }
    return result;
}

} // namespace bqc
