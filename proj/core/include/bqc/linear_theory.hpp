#pragma once

#include "bqc/params.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bqc {

using cplx = std::complex<double>;

/// One Fourier mode (k, eta) of the linearized system at time t.
/// The zero mode is constant under the linear flow and excluded (k != 0).
struct ModeState {
    long long k = 1;
    double eta = 0.0;
    double t = 0.0;
    cplx omega_hat{0.0, 0.0};
    cplx theta_hat{0.0, 0.0};
};

/// Symmetrized pair Z = (p/k^2)^{-1/4} omega_hat, Q = (p/k^2)^{1/4} i k beta theta_hat.
struct SymmetrizedState {
    cplx z{0.0, 0.0};
    cplx q{0.0, 0.0};
};

SymmetrizedState to_symmetrized(const ModeState& mode, double beta);
ModeState from_symmetrized(const SymmetrizedState& sym, long long k, double eta, double t,
                           double beta);

/// Linearized right-hand side: (d omega_hat, d theta_hat) = (-i beta^2 k theta_hat,
/// -(i k / p) omega_hat).
std::pair<cplx, cplx> mode_rhs(const ModeState& state, double beta);

/// Pointwise-in-frequency energy E = (1/2)[|Z|^2 + |Q|^2 +
/// (1/2beta) Re( dt_p/(|k| p^{1/2}) Z conj(Q) )], coercive for beta > 1/2.
struct ModeEnergy {
    double e = 0.0;
    double coercivity_low = 0.0;  ///< (1 - 1/(2 beta))/2 * (|Z|^2 + |Q|^2)
    double coercivity_high = 0.0; ///< (1 + 1/(2 beta))/2 * (|Z|^2 + |Q|^2)
};
ModeEnergy mode_energy(const SymmetrizedState& sym, long long k, double eta, double t,
                       double beta);

/// Rigorous multiplicative band for E(t)/E(0):
/// [exp(-2/(2 beta - 1)), exp(2/(2 beta - 1))], uniform in (k, eta). Both
/// edges follow from the Gronwall inequality with the coercivity constant
/// and total variation <= 4 of dt_p/(|k| p^{1/2}).
std::pair<double, double> gronwall_band(double beta);

/// Velocity mode (u^x, u^y) = (i (eta - k t) omega_hat / p, -i k omega_hat / p).
std::pair<cplx, cplx> mode_velocity(const ModeState& mode);

/// Adaptive integration of one mode over [t0, t1] (either direction), with a
/// step ceiling 0.1*(1 + |t - eta/k|) near the critical time. Returns the
/// states at `sample_times` (which must be sorted along the direction of
/// integration). Throws if the state becomes non-finite, reporting the time.
std::vector<ModeState> integrate_mode(const ModeState& mode0, double beta, double t0, double t1,
                                      double tol, const std::vector<double>& sample_times);

/// Power-law fit result (see diagnostics::rate_fit).
struct RateFit {
    std::string name;
    double slope = 0.0;
    double stderr_slope = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::size_t n = 0;
};

/// Ensemble norms of the linear theory on a uniform eta-grid.
struct EnsembleConfig {
    double beta = 1.0;
    double eta_max = 64.0;
    int n_eta = 2048;
    std::vector<long long> k_set = {1, -1};
    double t0 = 0.0;
    double t1 = 2000.0;
    double tol = 1e-9;
    int n_samples = 160;          ///< geometric time samples for the series
    double spectrum_width = 8.0;  ///< Gaussian width of the initial data in eta
};

/// Named time series of the ensemble L^2 norms.
struct NormSeries {
    std::vector<double> t;
    std::map<std::string, std::vector<double>> values;
};

/// Integrates every (k, eta) mode from Gaussian-in-eta data and assembles
/// ||theta_neq||, ||u^x_neq||, ||u^y||, ||omega_neq||, ||gradL_theta|| by
/// trapezoid quadrature in eta. Deterministic; modes reduced in fixed order.
NormSeries ensemble_norms(const EnsembleConfig& cfg);

/// Log-log least-squares fit of each ensemble norm on [window_lo, window_hi].
std::vector<RateFit> ensemble_rates(const NormSeries& series, double window_lo, double window_hi);

} // namespace bqc
