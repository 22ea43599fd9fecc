#include "bqc/toy_model.hpp"

#include "bqc/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bqc {

std::pair<double, double> toy_rhs(double tau, double f_r, double f_nr, double sigma,
                                  ToyModelKind kind) {
    if (!(sigma >= 1.0)) throw std::invalid_argument("toy model requires sigma >= 1");
    const double den = 1.0 + tau * tau;
    if (kind == ToyModelKind::bm15) return {f_nr / sigma, sigma / den * f_r};
    const double c_r = std::pow(sigma, -0.5) * std::pow(den, -0.25);
    const double c_nr = std::pow(sigma, 0.5) * std::pow(den, -0.75);
    return {c_r * f_nr, c_nr * f_r};
}

ToyRun integrate_toy(double sigma, double tol, ToyModelKind kind, std::size_t n_store) {
    if (!(sigma >= 1.0)) throw std::invalid_argument("toy model requires sigma >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");

    // sample grid: log-spaced in (1+|tau|) on each side, tau = 0 included
    std::vector<double> taus;
    const std::size_t half = n_store / 2;
    for (std::size_t i = 0; i <= half; ++i)
        taus.push_back(-(std::pow(1.0 + sigma, 1.0 - double(i) / half) - 1.0));
    for (std::size_t i = 1; i <= half; ++i)
        taus.push_back(std::pow(1.0 + sigma, double(i) / half) - 1.0);
    taus.front() = -sigma;
    taus.back() = sigma;

    // State carries (f_R, f_NR) scaled by exp(offset); the system is linear,
    // so rescaling both components is exact and avoids overflow.
    double offset = 0.0;
    Rk45<2> solver(
        [sigma, kind](double tau, const std::array<double, 2>& y, std::array<double, 2>& dy) {
            const auto [dr, dnr] = toy_rhs(tau, y[0], y[1], sigma, kind);
            dy = {dr, dnr};
        },
        tol, 0.0);

    ToyRun run;
    run.sigma = sigma;
    std::array<double, 2> y = {1.0, 1.0};

    // integrate in segments between sample times so the rescaling can happen
    // at sample boundaries without touching the solver internals
    run.tau.reserve(taus.size());
    run.log_f_r.reserve(taus.size());
    run.log_f_nr.reserve(taus.size());
    double t_prev = -sigma;
    for (double tau : taus) {
        if (tau > t_prev) solver.integrate(y, t_prev, tau, {}, [](double, const auto&) {});
        t_prev = tau;
        run.tau.push_back(tau);
        run.log_f_r.push_back(std::log(y[0]) + offset);
        run.log_f_nr.push_back(std::log(y[1]) + offset);
        const double big = std::max(y[0], y[1]);
        if (big > 1e250) {
            y[0] /= big;
            y[1] /= big;
            offset += std::log(big);
        }
        if (tau == 0.0) {
            run.log_f_r_mid = run.log_f_r.back();
            run.log_f_nr_mid = run.log_f_nr.back();
        }
    }
    run.log_f_r_end = run.log_f_r.back();
    run.log_f_nr_end = run.log_f_nr.back();
    return run;
}

double envelope_constant(const ToyRun& run, double g) {
    const double ls = std::log(run.sigma);
    double log_c = -1e300;
    for (std::size_t i = 0; i < run.tau.size(); ++i) {
        const double lt = std::log1p(std::abs(run.tau[i]));
        double env_r, env_nr;
        if (run.tau[i] <= 0.0) {
            env_r = g * ls - g * lt;
            env_nr = (g + 0.5) * ls - (g + 0.5) * lt;
        } else {
            env_r = g * ls + (g + 0.5) * lt;
            env_nr = (g + 0.5) * ls + g * lt;
        }
        log_c = std::max({log_c, run.log_f_r[i] - env_r, run.log_f_nr[i] - env_nr});
    }
    return std::exp(log_c);
}

ToyExponents fit_growth_exponent(const std::vector<double>& sigmas, double tol,
                                 ToyModelKind kind) {
    if (sigmas.size() < 2) throw std::invalid_argument("need at least two sigma values");
    std::vector<double> lx, y_r, y_nr_mid, y_nr_end;
    for (double s : sigmas) {
        const ToyRun run = integrate_toy(s, tol, kind);
        lx.push_back(std::log(s));
        y_r.push_back(run.log_f_r_mid);
        y_nr_mid.push_back(run.log_f_nr_mid);
        y_nr_end.push_back(run.log_f_nr_end);
    }
    auto slope = [&](const std::vector<double>& y, double* r2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += y[i];
        }
        mx /= lx.size();
        my /= lx.size();
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (y[i] - my);
            syy += (y[i] - my) * (y[i] - my);
        }
        if (sxx == 0.0) throw std::invalid_argument("degenerate regression");
        if (r2) *r2 = (syy > 0.0) ? sxy * sxy / (sxx * syy) : 1.0;
        return sxy / sxx;
    };
    ToyExponents ex;
    ex.gamma_r = slope(y_r, nullptr);
    ex.gamma_nr_mid = slope(y_nr_mid, nullptr);
    ex.gamma_nr_end = slope(y_nr_end, &ex.r2);
    return ex;
}

} // namespace bqc
