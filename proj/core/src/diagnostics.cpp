#include "bqc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bqc {

namespace {

constexpr double kLogZero = -1e300;

double volume(const GridSpec& g) { return 2.0 * M_PI * g.lv; }

} // namespace

double l2_norm(const SpectralField& f) {
    double s = 0.0;
    for (const cplx& c : f.a) s += std::norm(c);
    return std::sqrt(volume(f.grid) * s);
}

std::pair<SpectralField, SpectralField> project_modes(const SpectralField& f) {
    SpectralField zero(f.grid), nonzero = f;
    for (int in = 0; in < f.grid.nv; ++in) {
        const std::size_t i = f.grid.index(0, f.grid.n_of(in));
        zero.a[i] = f.a[i];
        nonzero.a[i] = 0.0;
    }
    return {zero, nonzero};
}

double log_gevrey_sobolev_norm(const SpectralField& f, double lam, double sig, double s) {
    if (lam < 0.0) throw std::invalid_argument("gevrey norm: lambda must be nonnegative");
    const GridSpec& g = f.grid;
    std::vector<double> exponents;
    exponents.reserve(g.size());
    double hi = kLogZero;
    for (int ik = 0; ik < g.nz(); ++ik) {
        const int k = g.k_of(ik);
        for (int in = 0; in < g.nv; ++in) {
            const int n = g.n_of(in);
            const double m = std::abs(f.a[std::size_t(ik) * g.nv + in]);
            if (m == 0.0) continue;
            const double e = 2.0 * lam * std::pow(knorm(double(k), g.eta(n)), s) +
                             2.0 * sig * std::log(jap2(double(k), g.eta(n))) + 2.0 * std::log(m);
            exponents.push_back(e);
            hi = std::max(hi, e);
        }
    }
    if (exponents.empty()) return kLogZero;
    double sum = 0.0;
    for (double e : exponents) sum += std::exp(e - hi);
    return 0.5 * (hi + std::log(sum) + std::log(volume(g)));
}

double gevrey_sobolev_norm(const SpectralField& f, double lam, double sig, double s) {
    const double lg = log_gevrey_sobolev_norm(f, lam, sig, s);
    return lg <= kLogZero ? 0.0 : std::exp(lg);
}

double gevrey_sobolev_norm_v(const std::vector<cplx>& row, double lv, double lam, double sig,
                             double s) {
    double hi = kLogZero;
    std::vector<double> exponents;
    const int nv = int(row.size());
    for (int in = 0; in < nv; ++in) {
        const int n = in <= nv / 2 ? in : in - nv;
        const double eta = 2.0 * M_PI * double(n) / lv;
        const double m = std::abs(row[in]);
        if (m == 0.0) continue;
        const double e = 2.0 * lam * std::pow(std::abs(eta), s) + 2.0 * sig * std::log(jap(eta)) +
                         2.0 * std::log(m);
        exponents.push_back(e);
        hi = std::max(hi, e);
    }
    if (exponents.empty()) return 0.0;
    double sum = 0.0;
    for (double e : exponents) sum += std::exp(e - hi);
    return std::exp(0.5 * (hi + std::log(sum) + std::log(lv)));
}

double ck_term(const SpectralField& f, double t, const MultiplierParams& mp, const LambdaFn& lam,
               CkWhich which) {
    const GridSpec& g = f.grid;
    const double lam_t = lam(t);
    const double lam_dot = lam.dot(t);
    double sum = 0.0;
    for (int ik = 0; ik < g.nz(); ++ik) {
        const int k = g.k_of(ik);
        for (int in = 0; in < g.nv; ++in) {
            const int n = g.n_of(in);
            const double m = std::norm(f.a[std::size_t(ik) * g.nv + in]);
            if (m == 0.0) continue;
            const double eta = g.eta(n);
            const double logA = log_multiplier_A(k, eta, t, lam_t, mp, AVariant::A);
            switch (which) {
            case CkWhich::w: {
                const double logAt = log_multiplier_A(k, eta, t, lam_t, mp, AVariant::A_tilde);
                sum += weight_w(k, eta, t, mp).dtw_over_w * std::exp(logA + logAt) * m;
                break;
            }
            case CkWhich::m:
                sum += multiplier_m(k, eta, t, mp).dtm_over_m * std::exp(2.0 * logA) * m;
                break;
            case CkWhich::lambda:
                sum += -lam_dot * std::pow(knorm(double(k), eta), mp.s) * std::exp(2.0 * logA) * m;
                break;
            }
        }
    }
    return volume(g) * sum;
}

WeightedDiagnostics weighted_energies(const SpectralField& omega, const SpectralField& theta,
                                      double t, const MultiplierParams& mp, const LambdaFn& lam,
                                      double floor_rel) {
    if (!(mp.beta > 0.5))
        throw std::invalid_argument("weighted energies require beta > 1/2");
    const GridSpec& g = omega.grid;
    const double lam_t = lam(t);
    const double lam_dot = lam.dot(t);
    const double floor_om = floor_rel * omega.max_abs();
    const double floor_th = floor_rel * theta.max_abs();

    WeightedDiagnostics wd;
    double el_zz = 0.0, el_cross = 0.0, en_om = 0.0, en_gth = 0.0;
    for (int ik = 0; ik < g.nz(); ++ik) {
        const int k = g.k_of(ik);
        for (int in = 0; in < g.nv; ++in) {
            const int n = g.n_of(in);
            const std::size_t i = std::size_t(ik) * g.nv + in;
            const double eta = g.eta(n);
            const double am_om = std::abs(omega.a[i]);
            const double am_th = std::abs(theta.a[i]);
            const bool use_om = am_om > floor_om && am_om > 0.0;
            const bool use_th = am_th > floor_th && am_th > 0.0;
            if (!use_om && !use_th) continue;

            const double logA = log_multiplier_A(k, eta, t, lam_t, mp, AVariant::A);
            const double A2 = std::exp(2.0 * logA);
            const double p = p_symbol(k, eta, t);
            if (use_om) en_om += A2 * am_om * am_om;
            if (use_th) en_gth += A2 * p * am_th * am_th;
            if (k == 0) continue;

            // symmetrized pair
            const double root = std::sqrt(std::sqrt(p / double(k * k)));
            const cplx z = use_om ? omega.a[i] / root : cplx(0.0, 0.0);
            const cplx q =
                use_th ? cplx(0.0, 1.0) * double(k) * mp.beta * root * theta.a[i] : cplx(0.0, 0.0);
            const double z2 = std::norm(z), q2 = std::norm(q);
            el_zz += A2 * (z2 + q2);
            const double cross = dt_p_symbol(k, eta, t) / (std::abs(double(k)) * std::sqrt(p));
            el_cross += A2 * cross * std::real(z * std::conj(q));

            const double logAt = log_multiplier_A(k, eta, t, lam_t, mp, AVariant::A_tilde);
            const double AAt = std::exp(logA + logAt);
            const double dtw = weight_w(k, eta, t, mp).dtw_over_w;
            const double dtm = multiplier_m(k, eta, t, mp).dtm_over_m;
            const double nab = std::pow(knorm(double(k), eta), mp.s);
            wd.G_w_Z += dtw * AAt * z2;
            wd.G_w_Q += dtw * AAt * q2;
            wd.G_m_Z += dtm * A2 * z2;
            wd.G_m_Q += dtm * A2 * q2;
            wd.G_lambda_Z += -lam_dot * nab * A2 * z2;
            wd.G_lambda_Q += -lam_dot * nab * A2 * q2;
        }
    }
    const double vol = volume(g);
    wd.E_L = 0.5 * vol * (el_zz + (0.5 / mp.beta) * el_cross);
    wd.E_n = 0.5 * vol * (en_om + mp.beta * mp.beta * en_gth);
    wd.G_w_Z *= vol;
    wd.G_w_Q *= vol;
    wd.G_m_Z *= vol;
    wd.G_m_Q *= vol;
    wd.G_lambda_Z *= vol;
    wd.G_lambda_Q *= vol;
    return wd;
}

CoordDiag coordinate_diagnostics(const ZeroModeHistory& history, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("coordinate diagnostics undefined at t = 0");
    if (history.times.size() < 2) throw std::invalid_argument("insufficient zero-mode history");
    std::size_t idx = history.times.size();
    while (idx > 0 && history.times[idx - 1] > t + 1e-9) --idx;
    if (idx == 0) throw std::invalid_argument("insufficient zero-mode history");
    --idx;
    if (std::abs(history.times[idx] - t) > 1e-6 * std::max(1.0, t))
        throw std::invalid_argument("zero-mode history not sampled at requested time");

    const int nv = history.nv;
    std::vector<cplx> int_omega(nv, cplx(0.0, 0.0)), int_u0x(nv, cplx(0.0, 0.0));
    for (std::size_t j = 0; j + 1 <= idx; ++j) {
        const double h = history.times[j + 1] - history.times[j];
        for (int in = 0; in < nv; ++in) {
            int_omega[in] += 0.5 * h * (history.omega0[j][in] + history.omega0[j + 1][in]);
            int_u0x[in] += 0.5 * h * (history.u0x[j][in] + history.u0x[j + 1][in]);
        }
    }

    CoordDiag coord;
    coord.t = t;
    coord.lv = history.lv;
    coord.h_hat.resize(nv);
    coord.H_hat.resize(nv);
    coord.vdot_hat.resize(nv);
    std::vector<cplx> phi_hat(nv);
    for (int in = 0; in < nv; ++in) {
        coord.h_hat[in] = int_omega[in] / t;
        coord.H_hat[in] = (history.omega0[idx][in] - coord.h_hat[in]) / t;
        coord.vdot_hat[in] = (history.u0x[idx][in] - int_u0x[in] / t) / t;
        phi_hat[in] = int_u0x[in];
    }
    coord.h = ifft_v(coord.h_hat);
    coord.H = ifft_v(coord.H_hat);
    coord.v_dot = ifft_v(coord.vdot_hat);
    coord.phi = ifft_v(phi_hat);
    return coord;
}

double energy_Ev(const CoordDiag& coord, double t, const MultiplierParams& mp,
                 const LambdaFn& lam, double c1) {
    if (!(t > 0.0)) throw std::invalid_argument("E_v undefined at t = 0");
    const double lam_t = lam(t);
    const int nv = int(coord.h_hat.size());
    const double t2s = std::pow(jap(t), -2.0 * mp.s);
    double sum_h = 0.0, sum_hs = 0.0, sum_H = 0.0;
    for (int in = 0; in < nv; ++in) {
        const int n = in <= nv / 2 ? in : in - nv;
        const double eta = 2.0 * M_PI * double(n) / coord.lv;
        const double h2 = std::norm(coord.h_hat[in]);
        const double H2 = std::norm(coord.H_hat[in]);
        if (h2 > 0.0) {
            const double Av = std::exp(log_multiplier_A(0, eta, t, lam_t, mp, AVariant::A_v));
            sum_h += Av * Av * h2;
            sum_hs += Av * Av * std::pow(std::abs(eta), 2.0 * mp.s) * h2;
        }
        if (H2 > 0.0) {
            const double A0 = std::exp(log_multiplier_A(0, eta, t, lam_t, mp, AVariant::A));
            const double scaled = A0 / std::pow(jap(eta), mp.s);
            sum_H += scaled * scaled * H2;
        }
    }
    const double vol = coord.lv;
    return 0.5 * (std::pow(jap(t), 2.0 + 2.0 * mp.s) * vol * sum_H +
                  (vol / c1) * (sum_h + t2s * sum_hs));
}

RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& values,
                 double window_lo, double window_hi, const std::string& name) {
    if (t.size() != values.size()) throw std::invalid_argument("rate_fit: length mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window_lo || t[i] > window_hi) continue;
        if (!(values[i] > 0.0))
            throw std::invalid_argument("rate_fit: nonpositive value inside window");
        if (!(t[i] > 0.0)) throw std::invalid_argument("rate_fit: nonpositive time");
        lx.push_back(std::log(t[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 8) throw std::invalid_argument("rate_fit: window holds fewer than 8 samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= double(lx.size());
    my /= double(lx.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("rate_fit: degenerate window");
    RateFit fit;
    fit.name = name;
    fit.slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - my - fit.slope * (lx[i] - mx);
        ss += r * r;
    }
    fit.stderr_slope = lx.size() > 2 ? std::sqrt(ss / double(lx.size() - 2) / sxx) : 0.0;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    fit.n = lx.size();
    return fit;
}

BootstrapReport bootstrap_monitor(const std::vector<DiagRow>& rows, double eps) {
    BootstrapReport rep;
    if (rows.empty() || !(eps > 0.0)) return rep;
    const double eps2 = eps * eps;
    double EL1 = 0.0, En1 = 0.0;
    for (const DiagRow& r : rows) {
        if (r.t >= 1.0 - 1e-9) {
            EL1 = r.E_L;
            En1 = r.E_n;
            break;
        }
    }
    const DiagRow* prev = nullptr;
    for (const DiagRow& r : rows) {
        const double jt = jap(r.t);
        rep.sup_EL_over_eps2 = std::max(rep.sup_EL_over_eps2, r.E_L / eps2);
        rep.sup_En_over_eps2t = std::max(rep.sup_En_over_eps2t, r.E_n / (eps2 * jt));
        rep.sup_Ev_over_eps2t = std::max(rep.sup_Ev_over_eps2t, r.E_v / (eps2 * jt));
        rep.sup_vdot_t2_over_eps =
            std::max(rep.sup_vdot_t2_over_eps, jt * jt * r.vdot_gnorm / eps);
        if (EL1 > 0.0) rep.sup_EL_over_EL1 = std::max(rep.sup_EL_over_EL1, r.E_L / EL1);
        if (En1 > 0.0 && r.t >= 1.0 - 1e-9)
            rep.sup_En_over_En1t = std::max(rep.sup_En_over_En1t, r.E_n / (En1 * jt));
        if (prev && prev->t >= 1.0 - 1e-9) {
            const double h = r.t - prev->t;
            rep.int_G_lambda_Z += 0.5 * h * (prev->G_lambda_Z + r.G_lambda_Z);
            rep.int_G_w_Z += 0.5 * h * (prev->G_w_Z + r.G_w_Z);
            rep.int_G_m_Z += 0.5 * h * (prev->G_m_Z + r.G_m_Z);
        }
        prev = &r;
    }
    return rep;
}

} // namespace bqc
