// Acceptance suite: one pass/fail line per criterion, every tolerance pinned.
// Criteria 6 and 8 share one 256x256 nonlinear reference run.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bqc/diagnostics.hpp"
#include "bqc/io.hpp"
#include "bqc/lemmas.hpp"
#include "bqc/linear_theory.hpp"
#include "bqc/multipliers.hpp"
#include "bqc/rng.hpp"
#include "bqc/spectral.hpp"
#include "bqc/toy_model.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>

using namespace bqc;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

// the criterion-6 reference run, shared with criterion 8
const RunResult& reference_run() {
    static std::optional<RunResult> cached;
    if (!cached) {
        SimConfig cfg;
        cfg.beta = 1.0;
        cfg.epsilon = 0.005;
        cfg.kmax = 127;
        cfg.nv = 256;
        cfg.lv = 8.0 * M_PI;
        cfg.dt = 0.02;
        cfg.t_end = 50.0;
        cfg.preset = "gaussian-stripe";
        cfg.diag_every = 0.25;
        MultiplierParams mp;
        mp.set_beta(cfg.beta);
        RunOptions opt;
        opt.nonlinear = true;
        opt.weighted_diags = true;
        cached = run_simulation(cfg, mp, opt);
    }
    return *cached;
}

double slope_of(const std::vector<DiagRow>& rows, double DiagRow::* field, double lo, double hi) {
    std::vector<double> t, v;
    for (const auto& r : rows) {
        t.push_back(r.t);
        v.push_back(r.*field);
    }
    return rate_fit(t, v, lo, hi).slope;
}

} // namespace

TEST_CASE("criterion 1: linear damping/growth rates") {
    const auto t0 = std::chrono::steady_clock::now();
    EnsembleConfig cfg;
    cfg.beta = 1.0;
    cfg.eta_max = 64.0;
    cfg.n_eta = 2048;
    cfg.k_set = {1, -1};
    cfg.t0 = 0.0;
    cfg.t1 = 2000.0;
    cfg.tol = 1e-8;
    const NormSeries series = ensemble_norms(cfg);
    const auto fits = ensemble_rates(series, 20.0, 2000.0);
    const double elapsed = seconds_since(t0);

    struct Want {
        const char* name;
        double slope, tol;
    };
    const Want wants[] = {{"norm_theta_neq", -0.5, 0.05},
                          {"norm_ux_neq", -0.5, 0.05},
                          {"norm_uy", -1.5, 0.10},
                          {"norm_omega_neq", 0.5, 0.05},
                          {"norm_gradL_theta", 0.5, 0.05}};
    bool pass = elapsed < 60.0;
    std::string detail = "rates on t in [20, 2000]:";
    for (const auto& want : wants) {
        double got = 0.0;
        for (const auto& f : fits)
            if (f.name == want.name) got = f.slope;
        const bool ok = std::abs(got - want.slope) <= want.tol;
        pass = pass && ok;
        detail += std::string(" ") + want.name + "=" + fmt(got);
        CHECK_MESSAGE(ok, want.name, " slope ", got, " vs ", want.slope, " +- ", want.tol);
    }
    detail += " (runtime " + fmt(elapsed, 3) + " s < 60 s)";
    CHECK(elapsed < 60.0);
    report(1, pass, detail);
}

TEST_CASE("criterion 2: per-mode Gronwall band") {
    Rng rng(31415);
    bool pass = true;
    double worst_margin = 1e300;
    int n_checked = 0;
    for (int m = 0; m < 200; ++m) {
        ModeState m0;
        m0.k = rng.uniform_int(1, 8) * (rng.uniform() < 0.5 ? -1 : 1);
        m0.eta = rng.uniform(-30.0, 30.0);
        m0.omega_hat = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        m0.theta_hat = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        std::vector<double> times = {0.0};
        for (int j = 0; j <= 48; ++j)
            times.push_back(std::pow(10.0, -1.0 + 4.0 * j / 48.0));
        for (double beta : {0.6, 1.0, 5.0}) {
            const auto [blo, bhi] = gronwall_band(beta);
            const auto traj = integrate_mode(m0, beta, 0.0, 1000.0, 1e-10, times);
            const double e0 = mode_energy(to_symmetrized(traj.front(), beta), m0.k, m0.eta,
                                          times.front(), beta)
                                  .e;
            if (e0 <= 0.0) continue;
            for (const auto& st : traj) {
                const double e =
                    mode_energy(to_symmetrized(st, beta), st.k, st.eta, st.t, beta).e;
                const double ratio = e / e0;
                // zero tolerance modulo integrator error (tol 1e-10)
                const bool ok = ratio >= blo * (1.0 - 1e-7) && ratio <= bhi * (1.0 + 1e-7);
                pass = pass && ok;
                worst_margin = std::min({worst_margin, ratio - blo, bhi - ratio});
                ++n_checked;
                if (!ok)
                    CHECK_MESSAGE(ok, "mode k=", m0.k, " eta=", m0.eta, " beta=", beta,
                                  " t=", st.t, " ratio=", ratio);
            }
        }
    }
    CHECK(pass);
    report(2, pass,
           "E(t)/E(0) inside the rigorous band [e^{-2/(2b-1)}, e^{2/(2b-1)}] for 200 modes x 3 "
           "betas (" +
               std::to_string(n_checked) + " samples, min band margin " + fmt(worst_margin) +
               ")");
}

TEST_CASE("criterion 3: toy-model envelopes") {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> sigmas = {10.0, 100.0, 1000.0, 10000.0};
    double envelope_c = 0.0;
    std::vector<double> log_end;
    bool poly = true;
    for (double s : sigmas) {
        const ToyRun run = integrate_toy(s, 1e-10);
        envelope_c = std::max(envelope_c, envelope_constant(run, 2.0));
        log_end.push_back(run.log_f_nr_end);
        poly = poly && (run.log_f_nr_end / std::log(s) < 8.0);
    }
    // endpoint-exponent stability across the top two decades
    const double slope_mid = (log_end[2] - log_end[1]) / std::log(10.0);
    const double slope_top = (log_end[3] - log_end[2]) / std::log(10.0);
    const double elapsed = seconds_since(t0);

    const bool pass =
        envelope_c <= 10.0 && std::abs(slope_top - slope_mid) <= 0.05 && poly && elapsed < 10.0;
    CHECK(envelope_c <= 10.0);
    CHECK(std::abs(slope_top - slope_mid) <= 0.05);
    CHECK(poly);
    CHECK(elapsed < 10.0);
    report(3, pass,
           "gamma=2 envelope constant " + fmt(envelope_c) + " <= 10, endpoint exponent " +
               fmt(slope_top) + " stable to " + fmt(std::abs(slope_top - slope_mid)) +
               ", polynomial growth, runtime " + fmt(elapsed, 3) + " s < 10 s");
}

TEST_CASE("criterion 4: weight maximal growth") {
    MultiplierParams mp;
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        const double eta = 100.0 * std::pow(1e4, i / 49.0);
        x.push_back(0.5 * mp.mu * std::sqrt(eta) - (mp.mu / 8.0) * std::log(eta));
        y.push_back(-weight_w(1, eta, 0.0, mp).log_w);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(x.size());
    my /= double(x.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    const bool pass = std::abs(slope - 1.0) <= 0.05;
    CHECK(pass);
    report(4, pass,
           "log w^{-1}(0,eta) vs mu sqrt(eta)/2 - (mu/8) log eta over [1e2,1e6]: slope " +
               fmt(slope, 6) + " within 1 +- 0.05");
}

TEST_CASE("criterion 5: weight lemma suites") {
    MultiplierParams mp;
    bool pass = true;
    std::string detail = "10^4-sample suites:";
    for (const auto& id : lemma_ids()) {
        const RatioReport rep = sample_lemma_ratios(id, 10000, 20240901, mp);
        const bool finite = std::isfinite(rep.sup_ratio) && rep.n == 10000;
        pass = pass && finite;
        CHECK_MESSAGE(finite, id, " sup ratio ", rep.sup_ratio);
        if (id == "dtw-4.4") {
            const double spread = rep.sup_ratio / rep.inf_ratio;
            const bool band = rep.inf_ratio > 0.0 && spread <= 100.0;
            pass = pass && band;
            CHECK_MESSAGE(band, "dtw-4.4 band spread ", spread);
            detail += " 4.4-spread=" + fmt(spread, 3);
        }
    }
    const auto tri = run_trichotomy_suite(100000, 20240901);
    const bool tri_ok = tri.n == 100000 && tri.n_empty == 0;
    pass = pass && tri_ok;
    CHECK_MESSAGE(tri_ok, "trichotomy empty on ", tri.n_empty, " of ", tri.n);
    detail += " trichotomy-nonempty=100%";

    // w-continuity residuals at the branch points of 10^3 random (k, eta)
    Rng rng(5150);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double eta = rng.uniform(5.0, 5e3);
        const long long k = rng.uniform_int(1, floor_sqrt(eta));
        const auto iv = critical_interval(k, eta);
        for (double tstar : {iv.left, iv.center, iv.right}) {
            const double lm = weight_w(k, eta, std::nextafter(tstar, -1e300), mp).log_w;
            const double lp = weight_w(k, eta, std::nextafter(tstar, 1e300), mp).log_w;
            const double lw = weight_w(k, eta, tstar, mp).log_w;
            worst = std::max(worst, std::abs(lm - lp) / std::max(1.0, std::abs(lw)));
        }
    }
    const bool cont = worst < 1e-12;
    pass = pass && cont;
    CHECK_MESSAGE(cont, "continuity residual ", worst);
    detail += " w-continuity<=" + fmt(worst, 3);
    report(5, pass, detail);
}

namespace {

// exact linearized dynamics for the same stripe data on the solver's eta
// grid: the reference oracle for the criterion-6 slope diagnosis. Samples at
// the provided times so the fit weighting matches the solver rows.
std::array<double, 4> linear_oracle_slopes(double window_lo, double window_hi, double t_end,
                                           std::vector<double> times) {
    if (times.empty()) {
        const int nt = 160;
        for (int j = 0; j <= nt; ++j)
            times.push_back(window_lo * 0.5 *
                            std::pow(t_end / (window_lo * 0.5), double(j) / nt));
    }
    std::vector<double> om2(times.size()), th2(times.size()), uy2(times.size()),
        gth2(times.size());
    for (int n = -84; n <= 84; ++n) {
        const double eta = n / 4.0;
        const double amp = std::exp(-0.5 * eta * eta);
        if (amp < 1e-13) continue;
        ModeState m0;
        m0.k = 1;
        m0.eta = eta;
        m0.omega_hat = amp;
        m0.theta_hat = 0.0;
        const auto traj = integrate_mode(m0, 1.0, 0.0, t_end, 1e-10, times);
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double p = p_symbol(1, eta, traj[j].t);
            om2[j] += std::norm(traj[j].omega_hat);
            th2[j] += std::norm(traj[j].theta_hat);
            gth2[j] += p * std::norm(traj[j].theta_hat);
            uy2[j] += std::norm(traj[j].omega_hat) / (p * p);
        }
    }
    auto slope = [&](std::vector<double>& v) {
        std::vector<double> vv;
        for (double x : v) vv.push_back(std::sqrt(x));
        return rate_fit(times, vv, window_lo, window_hi).slope;
    };
    return {slope(om2), slope(gth2), slope(uy2), slope(th2)};
}

} // namespace

TEST_CASE("criterion 6: nonlinear desk-scale instability") {
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult& run = reference_run();
    const double elapsed = seconds_since(t0);

    struct Want {
        const char* name;
        double DiagRow::* field;
        double lo, hi;
    };
    const Want wants[] = {{"omega_neq", &DiagRow::l2_omega_neq, 0.35, 0.65},
                          {"gradtheta_neq", &DiagRow::l2_gradtheta_neq, 0.35, 0.65},
                          {"uy_neq", &DiagRow::l2_uy_neq, -1.7, -1.3},
                          {"theta_neq", &DiagRow::l2_theta_neq, -0.65, -0.35}};
    bool pass = true;
    std::string detail = "256^2, T=50, eps=0.005 slopes on [10,50]:";
    std::array<double, 4> got{};
    for (int i = 0; i < 4; ++i) {
        const auto& want = wants[i];
        const double slope = slope_of(run.rows, want.field, 10.0, 50.0);
        got[i] = slope;
        const bool ok = slope >= want.lo && slope <= want.hi;
        pass = pass && ok;
        CHECK_MESSAGE(ok, want.name, " slope ", slope, " in [", want.lo, ",", want.hi, "]");
        detail += std::string(" ") + want.name + "=" + fmt(slope);
    }
    CHECK(elapsed < 600.0);
    pass = pass && elapsed < 600.0;
    detail += " (runtime " + fmt(elapsed, 3) + " s < 600 s)";
    report(6, pass, detail);

    if (!pass) {
        // diagnosis: the nonlinear run agrees with the exact linearized
        // dynamics of the same data; the window, not the solver, sets the
        // measured slopes (theta^in = 0 makes every mode phase-coherent in
        // the 2 sqrt(beta^2-1/4) log t oscillation, period 3.63 in log t
        // against a window spanning log 5 = 1.61)
        std::vector<double> row_times;
        for (const auto& r : run.rows)
            if (r.t > 0.0) row_times.push_back(r.t);
        const auto lin = linear_oracle_slopes(10.0, 50.0, 50.0, row_times);
        const double dev = std::max({std::abs(lin[0] - got[0]), std::abs(lin[1] - got[1]),
                                     std::abs(lin[2] - got[2]), std::abs(lin[3] - got[3])});
        std::printf("       diagnosis: exact linearized slopes on [10,50] are omega=%s "
                    "gradtheta=%s uy=%s theta=%s; max |solver - linear| = %s\n",
                    fmt(lin[0]).c_str(), fmt(lin[1]).c_str(), fmt(lin[2]).c_str(),
                    fmt(lin[3]).c_str(), fmt(dev).c_str());
        const auto lin_long = linear_oracle_slopes(10.0, 376.0, 400.0, {});
        std::printf("       diagnosis: over one full oscillation period [10,376] the "
                    "linearized slopes are omega=%s gradtheta=%s uy=%s theta=%s\n",
                    fmt(lin_long[0]).c_str(), fmt(lin_long[1]).c_str(),
                    fmt(lin_long[2]).c_str(), fmt(lin_long[3]).c_str());
        std::fflush(stdout);
    }
}

TEST_CASE("criterion 7: conservation oracles") {
    // (a) beta = 0: relative enstrophy drift <= 1e-6 over T = 20
    SimConfig cfg;
    cfg.beta = 0.0;
    cfg.epsilon = 0.01;
    cfg.kmax = 63;
    cfg.nv = 128;
    cfg.lv = 8.0 * M_PI;
    cfg.dt = 0.02;
    cfg.t_end = 20.0;
    cfg.diag_every = 1.0;
    MultiplierParams mp; // multiplier params unused with weighted_diags off
    RunOptions opt;
    opt.weighted_diags = false;
    const RunResult euler = run_simulation(cfg, mp, opt);
    double drift = 0.0;
    const double z0 = euler.rows.front().enstrophy;
    for (const auto& r : euler.rows) drift = std::max(drift, std::abs(r.enstrophy - z0) / z0);
    const bool enstrophy_ok = drift <= 1e-6;
    CHECK_MESSAGE(enstrophy_ok, "enstrophy drift ", drift);

    // (b) beta = 1: energy-balance residual <= 1e-6 relative per unit time
    SimConfig bc = cfg;
    bc.beta = 1.0;
    bc.dt = 0.008;
    bc.diag_every = 0.008;
    const RunResult bal = run_simulation(bc, mp, opt);
    const double q0 = bal.rows.front().energy_quad;
    double scale = 0.0;
    for (const auto& r : bal.rows) scale = std::max(scale, 2.0 * r.energy_quad);
    double resid_int = 0.0, resid_fd = 0.0;
    for (std::size_t i = 0; i < bal.rows.size(); ++i) {
        const auto& r = bal.rows[i];
        if (r.t > 0.0)
            resid_int = std::max(
                resid_int, std::abs(r.energy_quad - q0 + r.flux_integral) / std::max(r.t, 1.0));
        if (i > 0 && i + 1 < bal.rows.size()) {
            const auto& rm = bal.rows[i - 1];
            const auto& rp = bal.rows[i + 1];
            const double delta = 0.5 * (rp.t - rm.t);
            const double dqdt = (rp.energy_quad - rm.energy_quad) / (2.0 * delta);
            resid_fd = std::max(resid_fd, std::abs(dqdt + r.flux_inst) * delta);
        }
    }
    const bool balance_ok = resid_int <= 1e-6 * scale && resid_fd <= 1e-6 * scale;
    CHECK_MESSAGE(balance_ok, "residuals ", resid_int, " (integrated), ", resid_fd,
                  " (centered FD x dt) vs tolerance ", 1e-6 * scale);

    const bool pass = enstrophy_ok && balance_ok;
    report(7, pass,
           "beta=0 enstrophy drift " + fmt(drift) + " <= 1e-6; beta=1 energy-balance residual " +
               fmt(resid_int) + " (integrated) / " + fmt(resid_fd) + " (FD) <= " +
               fmt(1e-6 * scale));
}

TEST_CASE("criterion 8: bootstrap-shape monitor") {
    const RunResult& run = reference_run();
    const double eps = 0.005;
    const auto rep = bootstrap_monitor(run.rows, eps);
    const bool el_ok = rep.sup_EL_over_EL1 <= 10.0;
    const bool en_ok = rep.sup_En_over_En1t <= 10.0;
    const bool ev_ok = std::isfinite(rep.sup_Ev_over_eps2t);
    CHECK_MESSAGE(el_ok, "sup E_L(t)/E_L(1) = ", rep.sup_EL_over_EL1);
    CHECK_MESSAGE(en_ok, "sup E_n(t)/(E_n(1)<t>) = ", rep.sup_En_over_En1t);
    CHECK(ev_ok);
    const bool pass = el_ok && en_ok && ev_ok;
    report(8, pass,
           "sup E_L/E_L(1)=" + fmt(rep.sup_EL_over_EL1) + " (<=10), sup E_n/(E_n(1)<t>)=" +
               fmt(rep.sup_En_over_En1t) + " (<=10), sup E_v/(eps^2 <t>)=" +
               fmt(rep.sup_Ev_over_eps2t) + " (reported), sup <t>^2 vdot/eps=" +
               fmt(rep.sup_vdot_t2_over_eps) + ", int G_w[Z] dt=" + fmt(rep.int_G_w_Z));
}

TEST_CASE("criterion 9: cross-module consistency (solver vs per-mode integrator)") {
    SimConfig cfg;
    cfg.beta = 1.0;
    cfg.kmax = 7;
    cfg.nv = 32;
    cfg.lv = 8.0 * M_PI;
    cfg.dt = 0.0025;
    GridSpec g{cfg.kmax, cfg.nv, cfg.lv, cfg.dealias};
    FftWorkspace ws(g);
    SolverState st;
    st.omega = SpectralField(g);
    st.theta = SpectralField(g);
    struct Seeded {
        int k, n;
        cplx om, th;
    };
    const std::vector<Seeded> modes = {{1, 2, {0.7, -0.2}, {0.1, 0.3}},
                                       {1, -7, {0.05, 0.6}, {-0.3, 0.2}},
                                       {2, -5, {-0.4, 0.5}, {0.0, -0.6}},
                                       {3, 8, {0.2, 0.2}, {0.9, 0.0}},
                                       {4, 1, {-0.1, -0.8}, {0.4, 0.4}}};
    for (const auto& m : modes) {
        st.omega.at(m.k, m.n) = m.om;
        st.omega.at(-m.k, -m.n) = std::conj(m.om);
        st.theta.at(m.k, m.n) = m.th;
        st.theta.at(-m.k, -m.n) = std::conj(m.th);
    }
    const int nsteps = int(std::lround(100.0 / cfg.dt));
    for (int i = 0; i < nsteps; ++i) step_rk4(st, cfg.dt, cfg, ws, false);

    double worst = 0.0;
    for (const auto& m : modes) {
        ModeState m0;
        m0.k = m.k;
        m0.eta = g.eta(m.n);
        m0.omega_hat = m.om;
        m0.theta_hat = m.th;
        const auto traj = integrate_mode(m0, cfg.beta, 0.0, 100.0, 1e-12, {100.0});
        worst = std::max(worst, std::abs(st.omega.at(m.k, m.n) - traj.front().omega_hat));
        worst = std::max(worst, std::abs(st.theta.at(m.k, m.n) - traj.front().theta_hat));
    }
    const bool pass = worst <= 1e-8;
    CHECK_MESSAGE(pass, "max per-mode deviation ", worst);
    report(9, pass,
           "linear-only solver matches integrate_mode over t in [0,100]: max deviation " +
               fmt(worst) + " <= 1e-8");
}
