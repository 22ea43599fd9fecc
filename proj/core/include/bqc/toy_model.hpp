#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bqc {

/// Trajectory of the resonant/non-resonant pair over tau in [-sigma, sigma],
/// integrated from f_R = f_NR = 1 at tau = -sigma. Values are stored as
/// logarithms: the pair grows polynomially in sigma but overflows doubles
/// for extreme sigma.
struct ToyRun {
    double sigma = 1.0;
    std::vector<double> tau;
    std::vector<double> log_f_r;
    std::vector<double> log_f_nr;

    double log_f_r_mid = 0.0;  ///< log f_R(0)
    double log_f_nr_mid = 0.0; ///< log f_NR(0)
    double log_f_r_end = 0.0;  ///< log f_R(sigma)
    double log_f_nr_end = 0.0; ///< log f_NR(sigma)
};

enum class ToyModelKind {
    boussinesq, ///< d f_R = sigma^{-1/2} (1+tau^2)^{-1/4} f_NR, d f_NR = sigma^{1/2} (1+tau^2)^{-3/4} f_R
    bm15        ///< d f_R = sigma^{-1} f_NR,                    d f_NR = sigma (1+tau^2)^{-1} f_R
};

/// Right-hand side (d f_R, d f_NR) at (tau, f_r, f_nr); sigma = eta/k^2 >= 1.
std::pair<double, double> toy_rhs(double tau, double f_r, double f_nr, double sigma,
                                  ToyModelKind kind = ToyModelKind::boussinesq);

/// Adaptive integration of the toy system; ~n_store samples are kept, spaced
/// uniformly in log(1+|tau|) on each side of tau = 0 (0 always sampled).
ToyRun integrate_toy(double sigma, double tol, ToyModelKind kind = ToyModelKind::boussinesq,
                     std::size_t n_store = 512);

/// Envelope check of the polynomial bounds with exponent gamma_env:
///   f_R  <= C sigma^g (1+|tau|)^{-g}       on [-sigma,0],  <= C sigma^g (1+tau)^{g+1/2} on [0,sigma]
///   f_NR <= C sigma^{g+1/2} (1+|tau|)^{-g-1/2} on [-sigma,0], <= C sigma^{g+1/2} (1+tau)^g on [0,sigma]
/// Returns the smallest constant C that makes all four hold along the run.
double envelope_constant(const ToyRun& run, double gamma_env);

/// Growth exponents from runs over several sigma (>= 4 values recommended):
/// slope of log f_R(0) and of log f_NR(sigma) against log sigma.
struct ToyExponents {
    double gamma_r = 0.0;      ///< slope of log f_R(0) vs log sigma
    double gamma_nr_mid = 0.0; ///< slope of log f_NR(0) vs log sigma
    double gamma_nr_end = 0.0; ///< slope of log f_NR(sigma) vs log sigma
    double r2 = 0.0;           ///< fit quality of the gamma_nr_end regression
};
ToyExponents fit_growth_exponent(const std::vector<double>& sigmas, double tol,
                                 ToyModelKind kind = ToyModelKind::boussinesq);

} // namespace bqc
