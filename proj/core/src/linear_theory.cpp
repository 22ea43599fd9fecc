#include "bqc/linear_theory.hpp"

#include "bqc/multipliers.hpp"
#include "bqc/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bqc {

namespace {

void require_k(long long k) {
    if (k == 0) throw std::invalid_argument("linear theory excludes the zero mode (k = 0)");
}

double quarter_root(double x) { return std::sqrt(std::sqrt(x)); }

} // namespace

SymmetrizedState to_symmetrized(const ModeState& mode, double beta) {
    require_k(mode.k);
    const double pk2 = p_symbol(mode.k, mode.eta, mode.t) / double(mode.k * mode.k);
    const double root = quarter_root(pk2);
    SymmetrizedState sym;
    sym.z = mode.omega_hat / root;
    sym.q = cplx(0.0, 1.0) * double(mode.k) * beta * root * mode.theta_hat;
    return sym;
}

ModeState from_symmetrized(const SymmetrizedState& sym, long long k, double eta, double t,
                           double beta) {
    require_k(k);
    const double pk2 = p_symbol(k, eta, t) / double(k * k);
    const double root = quarter_root(pk2);
    ModeState mode;
    mode.k = k;
    mode.eta = eta;
    mode.t = t;
    mode.omega_hat = sym.z * root;
    mode.theta_hat = sym.q / (cplx(0.0, 1.0) * double(k) * beta * root);
    return mode;
}

std::pair<cplx, cplx> mode_rhs(const ModeState& state, double beta) {
    require_k(state.k);
    const double p = p_symbol(state.k, state.eta, state.t);
    const cplx ik(0.0, double(state.k));
    return {-beta * beta * ik * state.theta_hat, -(ik / p) * state.omega_hat};
}

ModeEnergy mode_energy(const SymmetrizedState& sym, long long k, double eta, double t,
                       double beta) {
    require_k(k);
    if (!(beta > 0.5)) throw std::invalid_argument("mode_energy: beta must exceed 1/2");
    const double p = p_symbol(k, eta, t);
    const double cross = dt_p_symbol(k, eta, t) / (std::abs(double(k)) * std::sqrt(p));
    const double zz = std::norm(sym.z) + std::norm(sym.q);
    ModeEnergy en;
    en.e = 0.5 * (zz + (0.5 / beta) * cross * std::real(sym.z * std::conj(sym.q)));
    en.coercivity_low = 0.5 * (1.0 - 0.5 / beta) * zz;
    en.coercivity_high = 0.5 * (1.0 + 0.5 / beta) * zz;
    return en;
}

std::pair<double, double> gronwall_band(double beta) {
    if (!(beta > 0.5)) throw std::invalid_argument("gronwall_band: beta must exceed 1/2");
    // Both directions use |Re(Z conj Q)| <= (|Z|^2+|Q|^2)/2 together with the
    // lower coercivity bound, so the exponent is symmetric:
    //   |d/dt log E| <= D(t)/(2(2 beta - 1)),  integral of D <= 4.
    const double ex = 2.0 / (2.0 * beta - 1.0);
    return {std::exp(-ex), std::exp(ex)};
}

std::pair<cplx, cplx> mode_velocity(const ModeState& mode) {
    require_k(mode.k);
    const double p = p_symbol(mode.k, mode.eta, mode.t);
    const double shear = mode.eta - double(mode.k) * mode.t;
    const cplx i(0.0, 1.0);
    return {i * shear * mode.omega_hat / p, -i * double(mode.k) * mode.omega_hat / p};
}

std::vector<ModeState> integrate_mode(const ModeState& mode0, double beta, double t0, double t1,
                                      double tol, const std::vector<double>& sample_times) {
    require_k(mode0.k);
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_mode: tol must be positive");
    const long long k = mode0.k;
    const double eta = mode0.eta;
    const double critical = eta / double(k);

    // the per-step tolerance sits a factor below the requested trajectory
    // tolerance so that accumulation over long horizons stays within it
    Rk45<4> solver(
        [k, eta, beta](double t, const std::array<double, 4>& y, std::array<double, 4>& dy) {
            ModeState st;
            st.k = k;
            st.eta = eta;
            st.t = t;
            st.omega_hat = cplx(y[0], y[1]);
            st.theta_hat = cplx(y[2], y[3]);
            const auto [dw, dth] = mode_rhs(st, beta);
            dy = {dw.real(), dw.imag(), dth.real(), dth.imag()};
        },
        tol / 8.0, tol / 8.0);

    std::array<double, 4> y = {mode0.omega_hat.real(), mode0.omega_hat.imag(),
                               mode0.theta_hat.real(), mode0.theta_hat.imag()};
    std::vector<ModeState> out;
    out.reserve(sample_times.size());
    solver.integrate(
        y, t0, t1, sample_times,
        [&](double t, const std::array<double, 4>& s) {
            ModeState st;
            st.k = k;
            st.eta = eta;
            st.t = t;
            st.omega_hat = cplx(s[0], s[1]);
            st.theta_hat = cplx(s[2], s[3]);
            out.push_back(st);
        },
        [critical](double t) { return 0.1 * (1.0 + std::abs(t - critical)); });
    return out;
}

NormSeries ensemble_norms(const EnsembleConfig& cfg) {
    if (!(cfg.t1 > cfg.t0 && cfg.t0 >= 0.0)) throw std::invalid_argument("bad time window");
    if (cfg.n_eta < 2) throw std::invalid_argument("need at least 2 eta points");

    // geometric sampling to support log-log fits
    std::vector<double> times;
    times.reserve(cfg.n_samples + 1);
    const double t_first = std::max(cfg.t0, 1e-2);
    times.push_back(cfg.t0);
    for (int i = 0; i <= cfg.n_samples; ++i) {
        const double t = t_first * std::pow(cfg.t1 / t_first, double(i) / cfg.n_samples);
        if (t > times.back() + 1e-12) times.push_back(t);
    }

    const double d_eta = 2.0 * cfg.eta_max / (cfg.n_eta - 1);
    const std::size_t nt = times.size();
    std::vector<double> th2(nt, 0.0), ux2(nt, 0.0), uy2(nt, 0.0), om2(nt, 0.0), gth2(nt, 0.0);

    for (long long k : cfg.k_set) {
        for (int i = 0; i < cfg.n_eta; ++i) {
            const double eta = -cfg.eta_max + d_eta * i;
            const double wq = (i == 0 || i == cfg.n_eta - 1) ? 0.5 * d_eta : d_eta; // trapezoid
            const double amp = std::exp(-eta * eta / (2.0 * cfg.spectrum_width * cfg.spectrum_width));
            if (amp < 1e-14) continue;
            ModeState m0;
            m0.k = k;
            m0.eta = eta;
            m0.t = cfg.t0;
            m0.omega_hat = amp;
            m0.theta_hat = amp;
            const auto traj = integrate_mode(m0, cfg.beta, cfg.t0, cfg.t1, cfg.tol, times);
            for (std::size_t j = 0; j < nt; ++j) {
                const ModeState& st = traj[j];
                const double p = p_symbol(k, eta, st.t);
                const auto [ux, uy] = mode_velocity(st);
                th2[j] += wq * std::norm(st.theta_hat);
                ux2[j] += wq * std::norm(ux);
                uy2[j] += wq * std::norm(uy);
                om2[j] += wq * std::norm(st.omega_hat);
                gth2[j] += wq * p * std::norm(st.theta_hat);
            }
        }
    }

    NormSeries series;
    series.t = times;
    auto root = [](std::vector<double>& v) {
        for (double& x : v) x = std::sqrt(x);
        return v;
    };
    series.values["norm_theta_neq"] = root(th2);
    series.values["norm_ux_neq"] = root(ux2);
    series.values["norm_uy"] = root(uy2);
    series.values["norm_omega_neq"] = root(om2);
    series.values["norm_gradL_theta"] = root(gth2);
    return series;
}

std::vector<RateFit> ensemble_rates(const NormSeries& series, double window_lo, double window_hi) {
    std::vector<RateFit> fits;
    for (const auto& [name, vals] : series.values) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < series.t.size(); ++i) {
            if (series.t[i] >= window_lo && series.t[i] <= window_hi && vals[i] > 0.0) {
                lx.push_back(std::log(series.t[i]));
                ly.push_back(std::log(vals[i]));
            }
        }
        if (lx.size() < 8) throw std::invalid_argument("rate window too short for " + name);
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= lx.size();
        my /= ly.size();
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        RateFit fit;
        fit.name = name;
        fit.slope = sxy / sxx;
        double ss = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double r = ly[i] - my - fit.slope * (lx[i] - mx);
            ss += r * r;
        }
        fit.stderr_slope = (lx.size() > 2) ? std::sqrt(ss / double(lx.size() - 2) / sxx) : 0.0;
        fit.window_lo = window_lo;
        fit.window_hi = window_hi;
        fit.n = lx.size();
        fits.push_back(fit);
    }
    return fits;
}

} // namespace bqc
