#pragma once

#include "bqc/params.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace bqc {

using cplx = std::complex<double>;

/// Doubly periodic spectral grid: z in [0, 2pi) carries integer wavenumbers
/// k in [-kmax, kmax] on a transform grid of nz = 2(kmax+1) points; v in
/// [-lv/2, lv/2) carries eta_n = 2 pi n / lv, n in [-nv/2, nv/2). The 2/3-rule
/// mask keeps |k| <= kcut, |n| <= ncut, which is alias-free for quadratic
/// products on the unpadded grid.
struct GridSpec {
    int kmax = 127;
    int nv = 256;
    double lv = 8.0 * M_PI;
    double dealias = 2.0 / 3.0;

    int nz() const { return 2 * (kmax + 1); }
    int kcut() const { return int(std::floor(dealias * nz() / 2.0)); }
    int ncut() const { return int(std::floor(dealias * nv / 2.0)); }
    std::size_t size() const { return std::size_t(nz()) * std::size_t(nv); }
    double eta(int n) const { return 2.0 * M_PI * double(n) / lv; }
    double eta_band() const { return M_PI * double(nv) / lv; } ///< max resolvable |eta|

    int k_of(int ik) const { return ik <= nz() / 2 ? ik : ik - nz(); }
    int n_of(int in) const { return in <= nv / 2 ? in : in - nv; }
    std::size_t index(int k, int n) const {
        const int ik = k >= 0 ? k : k + nz();
        const int in = n >= 0 ? n : n + nv;
        return std::size_t(ik) * nv + in;
    }
    bool operator==(const GridSpec& o) const {
        return kmax == o.kmax && nv == o.nv && lv == o.lv && dealias == o.dealias;
    }
};

/// Complex Fourier coefficients of a real scalar field (Hermitian symmetry
/// F(k,n) = conj(F(-k,-n)); dealiased shell identically zero).
struct SpectralField {
    GridSpec grid;
    std::vector<cplx> a;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), a(g.size(), cplx(0.0, 0.0)) {}

    cplx& at(int k, int n) { return a[grid.index(k, n)]; }
    const cplx& at(int k, int n) const { return a[grid.index(k, n)]; }

    void apply_dealias_mask();
    void enforce_hermitian();
    double max_abs() const;
};

struct SolverState {
    double t = 0.0;
    SpectralField omega;
    SpectralField theta;
};

/// FFT workspace bound to one grid (FFTW plans; deterministic ESTIMATE mode).
/// Also owns the stepping scratch buffers, so the per-step hot path does not
/// allocate; a workspace therefore serves one stepping loop at a time.
class FftWorkspace {
  public:
    explicit FftWorkspace(const GridSpec& grid);
    ~FftWorkspace();
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    /// In-place unnormalized inverse transform: coefficients -> grid values.
    void to_physical(std::vector<cplx>& data) const;
    /// In-place forward transform with 1/(nz*nv): grid values -> coefficients.
    void to_spectral(std::vector<cplx>& data) const;

    const GridSpec& grid() const { return grid_; }

    /// Lazily sized scratch buffer of grid size (index-stable, i < 16).
    std::vector<cplx>& buffer(std::size_t i) const;

  private:
    GridSpec grid_;
    void* plan_fwd_;
    void* plan_bwd_;
    mutable std::array<std::vector<cplx>, 16> pool_;
};

/// One-dimensional transforms on the v-grid (for zero-mode diagnostics).
std::vector<cplx> fft_v(const std::vector<double>& values, double lv);
std::vector<double> ifft_v(const std::vector<cplx>& coeffs);

/// Streamfunction in the sheared frame: psi_hat = -omega_hat / p_k(t, eta_n),
/// with the (0,0) mode set to zero.
SpectralField biot_savart_sheared(const SpectralField& omega, double t, FftWorkspace& ws);

/// Pseudo-spectral transport term N(f, psi) = grad_L^perp(psi) . grad_L(f),
/// dealiased by the 2/3 mask. The discrete pairing <N(f,psi), f> vanishes to
/// round-off on dealiased fields.
SpectralField nonlinear_transport(const SpectralField& f, const SpectralField& psi, double t,
                                  FftWorkspace& ws);

/// Full right-hand side; umax_* are the physical-space velocity maxima from
/// the evaluation (for CFL checks); flux = integral of u^x u^y dz dv.
struct RhsResult {
    SpectralField domega;
    SpectralField dtheta;
    double umax_x = 0.0;
    double umax_y = 0.0;
    double flux = 0.0;
};
RhsResult rhs(const SolverState& state, const SimConfig& cfg, FftWorkspace& ws, bool nonlinear);
/// Allocation-free variant writing into an existing result.
void rhs_into(const SolverState& state, const SimConfig& cfg, FftWorkspace& ws, bool nonlinear,
              RhsResult& out);

/// Classical RK4 step; the dealias mask and Hermitian symmetry are reapplied
/// after every stage. Returns the velocity maxima observed at the first
/// stage and accumulates the energy-flux integral with RK4 weights.
struct StepInfo {
    double umax_x = 0.0;
    double umax_y = 0.0;
    double flux_increment = 0.0;
};
StepInfo step_rk4(SolverState& state, double dt, const SimConfig& cfg, FftWorkspace& ws,
                  bool nonlinear);

/// Initial data presets (all mean-free):
///   gaussian-stripe: omega = eps e^{-v^2/2} cos z, theta = 0
///   paired:          omega and theta both Gaussian stripes of amplitude eps
///   random-gevrey:   random phases, amplitude eps e^{-lambda0 (|k|+|eta|)^s}
SolverState init_perturbation(const SimConfig& cfg, const MultiplierParams& mp);

/// Zero-mode history (spectral k = 0 rows) for coordinate diagnostics.
struct ZeroModeHistory {
    double lv = 0.0;
    int nv = 0;
    std::vector<double> times;
    std::vector<std::vector<cplx>> omega0; ///< omega_hat(0, n) per stored time
    std::vector<std::vector<cplx>> u0x;    ///< u^x_hat(0, n) per stored time
};

/// One diagnostics row of a run (fixed CSV schema, see io.hpp).
struct DiagRow {
    double t = 0.0;
    double l2_omega_neq = 0.0;
    double l2_gradtheta_neq = 0.0;
    double l2_ux_neq = 0.0;
    double l2_uy_neq = 0.0;
    double l2_theta_neq = 0.0;
    double E_L = 0.0;
    double E_n = 0.0;
    double E_v = 0.0;
    double G_lambda_Z = 0.0;
    double G_w_Z = 0.0;
    double G_m_Z = 0.0;
    double G_lambda_Q = 0.0;
    double G_w_Q = 0.0;
    double G_m_Q = 0.0;
    double vdot_gnorm = 0.0;   ///< ||v_dot||_{G^{lambda(t), sigma-6}}
    double enstrophy = 0.0;    ///< ||Omega||^2
    double energy_quad = 0.0;  ///< (1/2)||u||^2 + (beta^2/2)||theta||^2
    double flux_integral = 0.0;///< integral_0^t of int u^x u^y dz dv
    double flux_inst = 0.0;    ///< int u^x u^y dz dv at this time
};

struct RunOptions {
    bool nonlinear = true;
    bool weighted_diags = true;   ///< compute E_L/E_n/E_v and CK terms
    double diag_floor_rel = 1e-13;///< weighted sums skip modes below this relative amplitude
    bool store_history = true;
    bool write_outputs = false;   ///< write diagnostics.csv/snapshots/manifest via io
    bool check_cfl = true;
    /// Wrap-around monitor (edge band |v| >= 0.45 lv, concentrated presets
    /// only). Initial data above the warn level aborts outright; during the
    /// run the ratio is recorded, exceeding the warn level raises a flag and
    /// exceeding the abort level stops the run. The abort level is above the
    /// warn level because the streamfunction of a concentrated stripe has a
    /// genuine e^{-|v|} tail (~3.5e-6 of max at lv = 8 pi) that internal-wave
    /// radiation deposits at the seam without distorting the bulk rates.
    double wraparound_warn = 1e-6;
    double wraparound_abort = 1e-3;
};

struct RunResult {
    std::vector<DiagRow> rows;
    ZeroModeHistory history;
    SolverState final_state;
    double guard_horizon = 0.0;   ///< (pi nv / lv)/kcut resolution-horizon guard
    bool guard_exceeded = false;
    double wraparound_max = 0.0;  ///< max edge amplitude ratio seen
    bool wraparound_warned = false;
    double cfl_worst = 0.0;       ///< max of dt / cfl_dt seen
    std::vector<std::string> outputs; ///< files written (when write_outputs)
};

/// Integrate to t_end, collecting diagnostics at cfg.diag_every. Aborts with
/// an exception on NaN (reporting the time) or when the wrap-around monitor
/// exceeds 1e-6 of the field maximum.
RunResult run_simulation(const SimConfig& cfg, const MultiplierParams& mp,
                         const RunOptions& opt = {});

} // namespace bqc
