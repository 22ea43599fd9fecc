#pragma once

#include "bqc/linear_theory.hpp"
#include "bqc/multipliers.hpp"
#include "bqc/params.hpp"
#include "bqc/spectral.hpp"

#include <map>
#include <string>
#include <vector>

namespace bqc {

/// L^2 norm with the series convention ||f||^2 = 2 pi lv sum |f_hat|^2
/// (Parseval-consistent with the trapezoid grid quadrature in physical space).
double l2_norm(const SpectralField& f);

/// Zero mode (k = 0 row) and its complement; zero + nonzero == f bit-exactly.
std::pair<SpectralField, SpectralField> project_modes(const SpectralField& f);

/// Gevrey-Sobolev norm (sum_k int <k,eta>^{2 sigma} e^{2 lam |k,eta|^s}
/// |f_hat|^2 d eta)^{1/2}, computed in log-sum-exp form so large weights do
/// not overflow. sigma = 0 recovers the plain Gevrey norm; lam = sigma = 0
/// recovers the L^2 norm.
double gevrey_sobolev_norm(const SpectralField& f, double lam, double sig, double s);
/// log of the same norm (finite even when the norm itself overflows a double).
double log_gevrey_sobolev_norm(const SpectralField& f, double lam, double sig, double s);

/// Same norm for a function of v only (one spectral row, eta_n = 2 pi n / lv).
double gevrey_sobolev_norm_v(const std::vector<cplx>& row, double lv, double lam, double sig,
                             double s);

enum class CkWhich { lambda, w, m };

/// Cauchy-Kovalevskaya terms generated by the time dependence of A:
///   G_w[f]      = || sqrt(dt w / w) sqrt(A A~) f ||^2
///   G_m[f]      = || sqrt(dt m / m) A f ||^2
///   G_lambda[f] = -lambda_dot || |nabla|^{s/2} A f ||^2
double ck_term(const SpectralField& f, double t, const MultiplierParams& mp, const LambdaFn& lam,
               CkWhich which);

/// Weighted energies of the symmetrized pair and the natural variables:
///   E_L = (1/2)[ ||AZ||^2 + ||AQ||^2 + (1/2 beta) <(dt p / |k| p^(1/2)) AZ, AQ> ]
///   E_n = (1/2)[ ||A Omega||^2 + beta^2 ||A grad_L Theta||^2 ]
/// together with the CK terms of Z and Q. Modes whose amplitudes fall below
/// floor_rel times the field maximum are excluded from the weighted sums
/// (measurement band; round-off modes otherwise dominate through A).
struct WeightedDiagnostics {
    double E_L = 0.0;
    double E_n = 0.0;
    double G_lambda_Z = 0.0, G_w_Z = 0.0, G_m_Z = 0.0;
    double G_lambda_Q = 0.0, G_w_Q = 0.0, G_m_Q = 0.0;
};
WeightedDiagnostics weighted_energies(const SpectralField& omega, const SpectralField& theta,
                                      double t, const MultiplierParams& mp, const LambdaFn& lam,
                                      double floor_rel = 0.0);

/// Coordinate-system quantities on the v grid (v ~ y identification):
///   h     = (1/t) int_0^t omega_0(s, v) ds
///   H     = (omega_0(t, v) - h)/t
///   v_dot = (1/t) [ u^x_0(t, v) - (1/t) int_0^t u^x_0 ]
///   phi   = int_0^t u^x_0
struct CoordDiag {
    double t = 0.0;
    double lv = 0.0;
    std::vector<double> h, H, v_dot, phi;        ///< physical values on the v grid
    std::vector<cplx> h_hat, H_hat, vdot_hat;    ///< spectral rows
};
CoordDiag coordinate_diagnostics(const ZeroModeHistory& history, double t);

/// Coordinate-change energy
///   E_v = (1/2) ( <t>^{2+2s} ||A <dv>^{-s} H||^2
///               + (1/C1)( ||A^v h||^2 + <t>^{-2s} ||A^v |dv|^s h||^2 ) ).
double energy_Ev(const CoordDiag& coord, double t, const MultiplierParams& mp,
                 const LambdaFn& lam, double c1 = 10.0);

/// Least-squares slope of log(value) against log(t) on [window_lo, window_hi].
/// Requires >= 8 samples in the window, all positive.
RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& values,
                 double window_lo, double window_hi, const std::string& name = "");

/// Bootstrap-shape monitor over a run: sup_t of the H1-H4 quantities (their
/// nominal 8/128/16 constants hide unstated factors, so the suprema are
/// reported, not asserted) plus the time-integrated CK terms.
struct BootstrapReport {
    double sup_EL_over_eps2 = 0.0;
    double sup_En_over_eps2t = 0.0;
    double sup_Ev_over_eps2t = 0.0;
    double sup_vdot_t2_over_eps = 0.0;
    double int_G_lambda_Z = 0.0, int_G_w_Z = 0.0, int_G_m_Z = 0.0;
    double sup_EL_over_EL1 = 0.0;     ///< sup_t E_L(t)/E_L(1)
    double sup_En_over_En1t = 0.0;    ///< sup_t E_n(t)/(E_n(1) <t>)
};
BootstrapReport bootstrap_monitor(const std::vector<DiagRow>& rows, double eps);

} // namespace bqc
