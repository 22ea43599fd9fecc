#include "bqc/spectral.hpp"

#include "bqc/diagnostics.hpp"
#include "bqc/io.hpp"
#include "bqc/multipliers.hpp"
#include "bqc/rng.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace bqc {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

void SpectralField::apply_dealias_mask() {
    const int kc = grid.kcut(), nc = grid.ncut();
    for (int ik = 0; ik < grid.nz(); ++ik) {
        const int k = grid.k_of(ik);
        for (int in = 0; in < grid.nv; ++in) {
            const int n = grid.n_of(in);
            if (std::abs(k) > kc || std::abs(n) > nc) a[std::size_t(ik) * grid.nv + in] = 0.0;
        }
    }
}

void SpectralField::enforce_hermitian() {
    const int nz = grid.nz(), nv = grid.nv;
    for (int ik = 0; ik < nz; ++ik) {
        const int k = grid.k_of(ik);
        if (k == nz / 2) { // unpaired Nyquist row
            for (int in = 0; in < nv; ++in) a[std::size_t(ik) * nv + in] = 0.0;
            continue;
        }
        for (int in = 0; in < nv; ++in) {
            const int n = grid.n_of(in);
            if (n == nv / 2) {
                a[std::size_t(ik) * nv + in] = 0.0;
                continue;
            }
            if (k > 0 || (k == 0 && n > 0)) {
                const std::size_t i = std::size_t(ik) * nv + in;
                const std::size_t j = grid.index(-k, -n);
                const cplx avg = 0.5 * (a[i] + std::conj(a[j]));
                a[i] = avg;
                a[j] = std::conj(avg);
            }
        }
    }
    // the (0,0) coefficient of a real field is real
    a[grid.index(0, 0)] = cplx(a[grid.index(0, 0)].real(), 0.0);
}

double SpectralField::max_abs() const {
    double m = 0.0;
    for (const cplx& c : a) m = std::max(m, std::abs(c));
    return m;
}

FftWorkspace::FftWorkspace(const GridSpec& grid) : grid_(grid) {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    std::vector<cplx> dummy(grid.size());
    auto* p = reinterpret_cast<fftw_complex*>(dummy.data());
    plan_fwd_ = fftw_plan_dft_2d(grid.nz(), grid.nv, p, p, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft_2d(grid.nz(), grid.nv, p, p, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("FFTW plan creation failed");
}

std::vector<cplx>& FftWorkspace::buffer(std::size_t i) const {
    std::vector<cplx>& buf = pool_.at(i);
    buf.resize(grid_.size());
    return buf;
}

FftWorkspace::~FftWorkspace() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void FftWorkspace::to_physical(std::vector<cplx>& data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
}

void FftWorkspace::to_spectral(std::vector<cplx>& data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
    const double scale = 1.0 / double(data.size());
    for (cplx& c : data) c *= scale;
}

std::vector<cplx> fft_v(const std::vector<double>& values, double /*lv*/) {
    const int n = int(values.size());
    std::vector<cplx> data(values.begin(), values.end());
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_plan plan = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    for (cplx& c : data) c /= double(n);
    return data;
}

std::vector<double> ifft_v(const std::vector<cplx>& coeffs) {
    const int n = int(coeffs.size());
    std::vector<cplx> data = coeffs;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_plan plan = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = data[i].real();
    return out;
}

SpectralField biot_savart_sheared(const SpectralField& omega, double t, FftWorkspace&) {
    SpectralField psi(omega.grid);
    const GridSpec& g = omega.grid;
    for (int ik = 0; ik < g.nz(); ++ik) {
        const int k = g.k_of(ik);
        for (int in = 0; in < g.nv; ++in) {
            const int n = g.n_of(in);
            if (k == 0 && n == 0) continue;
            const std::size_t i = std::size_t(ik) * g.nv + in;
            psi.a[i] = -omega.a[i] / p_symbol(k, g.eta(n), t);
        }
    }
    return psi;
}

namespace {

// derivative fields of f: dz = i k f, dvl = i (eta - k t) f
void fill_derivatives(const SpectralField& f, double t, std::vector<cplx>& dz,
                      std::vector<cplx>& dvl) {
    const GridSpec& g = f.grid;
    dz.resize(g.size());
    dvl.resize(g.size());
    for (int ik = 0; ik < g.nz(); ++ik) {
        const int k = g.k_of(ik);
        for (int in = 0; in < g.nv; ++in) {
            const int n = g.n_of(in);
            const std::size_t i = std::size_t(ik) * g.nv + in;
            dz[i] = cplx(0.0, double(k)) * f.a[i];
            dvl[i] = cplx(0.0, g.eta(n) - double(k) * t) * f.a[i];
        }
    }
}

double max_abs_of(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const cplx& c : v) m = std::max(m, std::abs(c));
    return m;
}

} // namespace

SpectralField nonlinear_transport(const SpectralField& f, const SpectralField& psi, double t,
                                  FftWorkspace& ws) {
    if (!(f.grid == psi.grid)) throw std::invalid_argument("transport: grid mismatch");
    const GridSpec& g = f.grid;
    std::vector<cplx> upsi_z, upsi_v, f_z, f_v;
    fill_derivatives(psi, t, upsi_z, upsi_v);
    fill_derivatives(f, t, f_z, f_v);
    ws.to_physical(upsi_z);
    ws.to_physical(upsi_v);
    ws.to_physical(f_z);
    ws.to_physical(f_v);
    SpectralField out(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        out.a[i] = -upsi_v[i] * f_z[i] + upsi_z[i] * f_v[i];
    ws.to_spectral(out.a);
    out.apply_dealias_mask();
    return out;
}

void rhs_into(const SolverState& state, const SimConfig& cfg, FftWorkspace& ws, bool nonlinear,
              RhsResult& res) {
    const GridSpec& g = state.omega.grid;
    if (!(res.domega.grid == g) || res.domega.a.size() != g.size()) res.domega = SpectralField(g);
    if (!(res.dtheta.grid == g) || res.dtheta.a.size() != g.size()) res.dtheta = SpectralField(g);
    res.umax_x = res.umax_y = 0.0;
    const double t = state.t;

    // psi and its two grad_L components live in workspace scratch
    std::vector<cplx>& psi = ws.buffer(0);
    for (int ik = 0; ik < g.nz(); ++ik) {
        const int k = g.k_of(ik);
        for (int in = 0; in < g.nv; ++in) {
            const int n = g.n_of(in);
            const std::size_t i = std::size_t(ik) * g.nv + in;
            psi[i] = (k == 0 && n == 0) ? cplx(0.0, 0.0)
                                        : -state.omega.a[i] / p_symbol(k, g.eta(n), t);
        }
    }
    std::vector<cplx>& psi_z = ws.buffer(1);
    std::vector<cplx>& psi_v = ws.buffer(2);
    for (int ik = 0; ik < g.nz(); ++ik) {
        const int k = g.k_of(ik);
        for (int in = 0; in < g.nv; ++in) {
            const int n = g.n_of(in);
            const std::size_t i = std::size_t(ik) * g.nv + in;
            psi_z[i] = cplx(0.0, double(k)) * psi[i];
            psi_v[i] = cplx(0.0, g.eta(n) - double(k) * t) * psi[i];
        }
    }
    double flux = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        flux += std::real(-psi_v[i] * std::conj(psi_z[i]));
    res.flux = 2.0 * M_PI * g.lv * flux;

    std::vector<cplx>& n_omega = ws.buffer(3);
    std::vector<cplx>& n_theta = ws.buffer(4);
    if (nonlinear) {
        ws.to_physical(psi_z);
        ws.to_physical(psi_v);
        res.umax_x = max_abs_of(psi_v);
        res.umax_y = max_abs_of(psi_z);
        std::vector<cplx>& f_z = ws.buffer(5);
        std::vector<cplx>& f_v = ws.buffer(6);
        for (int which = 0; which < 2; ++which) {
            const SpectralField& f = which == 0 ? state.omega : state.theta;
            std::vector<cplx>& nf = which == 0 ? n_omega : n_theta;
            for (int ik = 0; ik < g.nz(); ++ik) {
                const int k = g.k_of(ik);
                for (int in = 0; in < g.nv; ++in) {
                    const int n = g.n_of(in);
                    const std::size_t i = std::size_t(ik) * g.nv + in;
                    f_z[i] = cplx(0.0, double(k)) * f.a[i];
                    f_v[i] = cplx(0.0, g.eta(n) - double(k) * t) * f.a[i];
                }
            }
            ws.to_physical(f_z);
            ws.to_physical(f_v);
            for (std::size_t i = 0; i < g.size(); ++i)
                nf[i] = -psi_v[i] * f_z[i] + psi_z[i] * f_v[i];
            ws.to_spectral(nf);
        }
    } else {
        std::fill(n_omega.begin(), n_omega.end(), cplx(0.0, 0.0));
        std::fill(n_theta.begin(), n_theta.end(), cplx(0.0, 0.0));
    }

    const int kc = g.kcut(), nc = g.ncut();
    for (int ik = 0; ik < g.nz(); ++ik) {
        const int k = g.k_of(ik);
        for (int in = 0; in < g.nv; ++in) {
            const int n = g.n_of(in);
            const std::size_t i = std::size_t(ik) * g.nv + in;
            if (std::abs(k) > kc || std::abs(n) > nc || (k == 0 && n == 0)) {
                res.domega.a[i] = res.dtheta.a[i] = 0.0;
                continue;
            }
            const cplx ikc(0.0, double(k));
            res.domega.a[i] = -cfg.beta * cfg.beta * ikc * state.theta.a[i] - n_omega[i];
            res.dtheta.a[i] = ikc * psi[i] - n_theta[i];
        }
    }
}

RhsResult rhs(const SolverState& state, const SimConfig& cfg, FftWorkspace& ws, bool nonlinear) {
    RhsResult res;
    rhs_into(state, cfg, ws, nonlinear, res);
    return res;
}

StepInfo step_rk4(SolverState& state, double dt, const SimConfig& cfg, FftWorkspace& ws,
                  bool nonlinear) {
    StepInfo info;
    const GridSpec& g = state.omega.grid;
    const std::size_t sz = g.size();
    // accumulator and stage state kept out of the scratch pool used by rhs
    std::vector<cplx>& acc_om = ws.buffer(7);
    std::vector<cplx>& acc_th = ws.buffer(8);
    static thread_local SolverState stage;
    static thread_local RhsResult k;
    if (!(stage.omega.grid == g) || stage.omega.a.size() != g.size()) {
        stage.omega = SpectralField(g);
        stage.theta = SpectralField(g);
    }

    auto add_weighted = [&](double w) {
        for (std::size_t i = 0; i < sz; ++i) {
            acc_om[i] += w * k.domega.a[i];
            acc_th[i] += w * k.dtheta.a[i];
        }
    };
    auto make_stage = [&](const SolverState& base, double c) {
        for (std::size_t i = 0; i < sz; ++i) {
            stage.omega.a[i] = base.omega.a[i] + c * k.domega.a[i];
            stage.theta.a[i] = base.theta.a[i] + c * k.dtheta.a[i];
        }
        stage.t = base.t + c;
        stage.omega.apply_dealias_mask();
        stage.theta.apply_dealias_mask();
        stage.omega.enforce_hermitian();
        stage.theta.enforce_hermitian();
    };

    std::fill(acc_om.begin(), acc_om.end(), cplx(0.0, 0.0));
    std::fill(acc_th.begin(), acc_th.end(), cplx(0.0, 0.0));
    const double c6 = dt / 6.0, c3 = dt / 3.0;
    double flux = 0.0;

    rhs_into(state, cfg, ws, nonlinear, k); // k1
    info.umax_x = k.umax_x;
    info.umax_y = k.umax_y;
    flux += c6 * k.flux;
    add_weighted(c6);
    make_stage(state, 0.5 * dt);

    rhs_into(stage, cfg, ws, nonlinear, k); // k2
    flux += c3 * k.flux;
    add_weighted(c3);
    make_stage(state, 0.5 * dt);

    rhs_into(stage, cfg, ws, nonlinear, k); // k3
    flux += c3 * k.flux;
    add_weighted(c3);
    make_stage(state, dt);

    rhs_into(stage, cfg, ws, nonlinear, k); // k4
    flux += c6 * k.flux;
    add_weighted(c6);

    for (std::size_t i = 0; i < sz; ++i) {
        state.omega.a[i] += acc_om[i];
        state.theta.a[i] += acc_th[i];
    }
    state.t += dt;
    state.omega.apply_dealias_mask();
    state.theta.apply_dealias_mask();
    state.omega.enforce_hermitian();
    state.theta.enforce_hermitian();
    info.flux_increment = flux;
    return info;
}

SolverState init_perturbation(const SimConfig& cfg, const MultiplierParams& mp) {
    cfg.validate();
    GridSpec grid{cfg.kmax, cfg.nv, cfg.lv, cfg.dealias};
    SolverState st;
    st.t = 0.0;
    st.omega = SpectralField(grid);
    st.theta = SpectralField(grid);

    auto gaussian_stripe = [&](SpectralField& f, double amplitude) {
        // amplitude * e^{-v^2/2} cos z; Fourier series coefficients of the
        // periodized Gaussian (correction < 1e-6 for lv >= 8 pi)
        const double c = std::sqrt(2.0 * M_PI) / grid.lv;
        for (int n = -grid.nv / 2 + 1; n < grid.nv / 2; ++n) {
            const double eta = grid.eta(n);
            const cplx coeff = 0.5 * amplitude * c * std::exp(-0.5 * eta * eta);
            f.at(1, n) = coeff;
            f.at(-1, -n) = std::conj(coeff);
        }
    };

    if (cfg.preset == "gaussian-stripe") {
        gaussian_stripe(st.omega, cfg.epsilon);
    } else if (cfg.preset == "paired") {
        gaussian_stripe(st.omega, cfg.epsilon);
        gaussian_stripe(st.theta, cfg.epsilon);
    } else if (cfg.preset == "random-gevrey") {
        auto fill_random = [&](SpectralField& f, std::uint64_t tag) {
            const int kc = grid.kcut(), nc = grid.ncut();
            for (int k = 0; k <= kc; ++k) {
                for (int n = -nc; n <= nc; ++n) {
                    if (k == 0 && n <= 0) continue; // lower half mirrored
                    const std::uint64_t idx = std::uint64_t(k) * (2 * nc + 1) + (n + nc);
                    const double u = double(Rng::at(cfg.seed ^ tag, idx) >> 11) * 0x1.0p-53;
                    const double phase = 2.0 * M_PI * u;
                    const double amp =
                        cfg.epsilon *
                        std::exp(-mp.lambda0 *
                                 std::pow(double(k) + std::abs(grid.eta(n)), mp.s));
                    const cplx val = amp * cplx(std::cos(phase), std::sin(phase));
                    f.at(k, n) = val;
                    f.at(-k, -n) = std::conj(val);
                }
            }
        };
        fill_random(st.omega, 0x6f6d656761ULL);
        fill_random(st.theta, 0x7468657461ULL);
    } else {
        throw std::invalid_argument("unknown preset: " + cfg.preset);
    }
    st.omega.apply_dealias_mask();
    st.theta.apply_dealias_mask();
    st.omega.enforce_hermitian();
    st.theta.enforce_hermitian();
    st.omega.a[grid.index(0, 0)] = 0.0;
    st.theta.a[grid.index(0, 0)] = 0.0;
    return st;
}

namespace {

std::vector<cplx> zero_mode_row(const SpectralField& f) {
    std::vector<cplx> row(f.grid.nv);
    for (int in = 0; in < f.grid.nv; ++in) row[in] = f.a[f.grid.index(0, f.grid.n_of(in))];
    return row;
}

// u^x zero mode: u^x_0(n) = -i eta psi_hat(0,n) = i omega_hat(0,n)/eta (n != 0)
std::vector<cplx> u0x_row(const SpectralField& omega) {
    const GridSpec& g = omega.grid;
    std::vector<cplx> row(g.nv, cplx(0.0, 0.0));
    for (int in = 0; in < g.nv; ++in) {
        const int n = g.n_of(in);
        if (n == 0) continue;
        row[in] = cplx(0.0, 1.0) * omega.a[g.index(0, n)] / g.eta(n);
    }
    return row;
}

double wraparound_ratio(const SpectralField& omega, FftWorkspace& ws) {
    std::vector<cplx> phys = omega.a;
    ws.to_physical(phys);
    const GridSpec& g = omega.grid;
    double edge = 0.0, all = 0.0;
    // the v grid runs 0..lv with the seam v = +-lv/2 at row nv/2; the edge
    // band is |v - lv/2| <= 0.05 lv
    const int margin = std::max(1, g.nv / 20);
    for (int ik = 0; ik < g.nz(); ++ik) {
        for (int in = 0; in < g.nv; ++in) {
            const double m = std::abs(phys[std::size_t(ik) * g.nv + in]);
            all = std::max(all, m);
            if (std::abs(in - g.nv / 2) <= margin) edge = std::max(edge, m);
        }
    }
    return all > 0.0 ? edge / all : 0.0;
}

} // namespace

RunResult run_simulation(const SimConfig& cfg, const MultiplierParams& mp, const RunOptions& opt) {
    cfg.validate();
    mp.validate();
    GridSpec grid{cfg.kmax, cfg.nv, cfg.lv, cfg.dealias};
    FftWorkspace ws(grid);
    LambdaFn lam(mp);

    RunResult res;
    res.guard_horizon = grid.eta_band() / std::max(1, grid.kcut());
    res.guard_exceeded = cfg.t_end > res.guard_horizon;

    SolverState st = init_perturbation(cfg, mp);

    const bool concentrated = cfg.preset != "random-gevrey";
    if (concentrated && cfg.epsilon > 0.0) {
        const double wrap0 = wraparound_ratio(st.omega, ws);
        if (wrap0 > opt.wraparound_warn)
            throw std::runtime_error(
                "initial data is not concentrated: edge amplitude is " +
                format_double(wrap0, 3) + " of the maximum (limit " +
                format_double(opt.wraparound_warn, 3) + "); increase lv");
        res.wraparound_max = wrap0;
    }

    const long long nsteps = std::max(1LL, (long long)std::llround(cfg.t_end / cfg.dt));
    const double dt = cfg.t_end / double(nsteps);

    res.history.lv = grid.lv;
    res.history.nv = grid.nv;
    auto store_history = [&]() {
        if (!opt.store_history) return;
        res.history.times.push_back(st.t);
        res.history.omega0.push_back(zero_mode_row(st.omega));
        res.history.u0x.push_back(u0x_row(st.omega));
    };

    double flux_integral = 0.0;
    const double dz = 2.0 * M_PI / grid.nz();
    const double dv = grid.lv / grid.nv;

    auto make_row = [&](double wall_t) {
        DiagRow row;
        row.t = wall_t;
        const GridSpec& g = grid;
        double om2 = 0.0, th2 = 0.0, gth2 = 0.0, ux2 = 0.0, uy2 = 0.0;
        double om2_all = 0.0, u2_all = 0.0, th2_all = 0.0;
        for (int ik = 0; ik < g.nz(); ++ik) {
            const int k = g.k_of(ik);
            for (int in = 0; in < g.nv; ++in) {
                const int n = g.n_of(in);
                const std::size_t i = std::size_t(ik) * g.nv + in;
                const double w2 = std::norm(st.omega.a[i]);
                const double t2 = std::norm(st.theta.a[i]);
                const double p = p_symbol(k, g.eta(n), wall_t);
                om2_all += w2;
                th2_all += t2;
                if (k != 0 || n != 0) {
                    const double psi2 = w2 / (p * p);
                    const double shear = g.eta(n) - double(k) * wall_t;
                    u2_all += (shear * shear + double(k) * double(k)) * psi2;
                }
                if (k != 0) {
                    om2 += w2;
                    th2 += t2;
                    gth2 += p * t2;
                    const double psi2 = w2 / (p * p);
                    const double shear = g.eta(n) - double(k) * wall_t;
                    ux2 += shear * shear * psi2;
                    uy2 += double(k) * double(k) * psi2;
                }
            }
        }
        const double vol = 2.0 * M_PI * g.lv;
        row.l2_omega_neq = std::sqrt(vol * om2);
        row.l2_theta_neq = std::sqrt(vol * th2);
        row.l2_gradtheta_neq = std::sqrt(vol * gth2);
        row.l2_ux_neq = std::sqrt(vol * ux2);
        row.l2_uy_neq = std::sqrt(vol * uy2);
        row.enstrophy = vol * om2_all;
        row.energy_quad = 0.5 * vol * u2_all + 0.5 * cfg.beta * cfg.beta * vol * th2_all;
        row.flux_integral = flux_integral;
        {
            // instantaneous int u^x u^y dz dv from the spectral state
            double fx = 0.0;
            for (int ik = 0; ik < g.nz(); ++ik) {
                const int k = g.k_of(ik);
                if (k == 0) continue;
                for (int in = 0; in < g.nv; ++in) {
                    const int n = g.n_of(in);
                    const std::size_t i = std::size_t(ik) * g.nv + in;
                    const double p = p_symbol(k, g.eta(n), wall_t);
                    const double shear = g.eta(n) - double(k) * wall_t;
                    // u^x u^y~ = (-i shear Psi)(conj(i k Psi)) = -shear k |Psi|^2
                    fx += -shear * double(k) * std::norm(st.omega.a[i]) / (p * p);
                }
            }
            row.flux_inst = vol * fx;
        }
        if (opt.weighted_diags) {
            const WeightedDiagnostics wd =
                weighted_energies(st.omega, st.theta, wall_t, mp, lam, opt.diag_floor_rel);
            row.E_L = wd.E_L;
            row.E_n = wd.E_n;
            row.G_lambda_Z = wd.G_lambda_Z;
            row.G_w_Z = wd.G_w_Z;
            row.G_m_Z = wd.G_m_Z;
            row.G_lambda_Q = wd.G_lambda_Q;
            row.G_w_Q = wd.G_w_Q;
            row.G_m_Q = wd.G_m_Q;
            if (wall_t >= 1.0 && opt.store_history && !res.history.times.empty()) {
                const CoordDiag coord = coordinate_diagnostics(res.history, wall_t);
                row.E_v = energy_Ev(coord, wall_t, mp, lam);
                row.vdot_gnorm =
                    gevrey_sobolev_norm_v(coord.vdot_hat, g.lv, lam(wall_t), mp.sigma - 6.0, mp.s);
            }
        }
        return row;
    };

    store_history();
    res.rows.push_back(make_row(0.0));

    double next_diag = cfg.diag_every;
    double next_snapshot = (cfg.snapshot_every > 0.0) ? cfg.snapshot_every : -1.0;

    for (long long step = 0; step < nsteps; ++step) {
        const StepInfo info = step_rk4(st, dt, cfg, ws, opt.nonlinear);
        st.t = double(step + 1) * dt; // keep the clock free of accumulation drift
        flux_integral += info.flux_increment;
        store_history();

        if (opt.nonlinear && opt.check_cfl && info.umax_x > 0.0 && info.umax_y > 0.0) {
            const double cfl_dt = 0.5 * std::min(dz / info.umax_x, dv / info.umax_y);
            res.cfl_worst = std::max(res.cfl_worst, dt / cfl_dt);
        }

        const bool last = (step == nsteps - 1);
        if (st.t >= next_diag - 1e-9 || last) {
            if (!std::isfinite(st.omega.max_abs()) || !std::isfinite(st.theta.max_abs()))
                throw std::runtime_error("solver state became non-finite at t=" +
                                         std::to_string(st.t));
            const double wrap = wraparound_ratio(st.omega, ws);
            res.wraparound_max = std::max(res.wraparound_max, wrap);
            if (concentrated && wrap > opt.wraparound_warn) res.wraparound_warned = true;
            if (concentrated && wrap > opt.wraparound_abort)
                throw std::runtime_error("wrap-around contamination exceeded " +
                                         format_double(opt.wraparound_abort, 3) +
                                         " of the field maximum at t=" + std::to_string(st.t));
            res.rows.push_back(make_row(st.t));
            while (next_diag <= st.t + 1e-9) next_diag += cfg.diag_every;
        }
        if (next_snapshot > 0.0 && (st.t >= next_snapshot - 1e-9 || last) && opt.write_outputs) {
            const std::string path =
                cfg.out_dir + "/snapshot_t" + format_double(st.t, 6) + ".bqc";
            write_snapshot(st, cfg, path);
            res.outputs.push_back(path);
            while (next_snapshot <= st.t + 1e-9) next_snapshot += cfg.snapshot_every;
        }
    }

    res.final_state = std::move(st);
    return res;
}

} // namespace bqc
