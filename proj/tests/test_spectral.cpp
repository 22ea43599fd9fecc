#include <doctest.h>

#include "bqc/diagnostics.hpp"
#include "bqc/linear_theory.hpp"
#include "bqc/multipliers.hpp"
#include "bqc/rng.hpp"
#include "bqc/spectral.hpp"

#include <cmath>
#include <stdexcept>

using namespace bqc;

namespace {

SimConfig small_config() {
    SimConfig cfg;
    cfg.kmax = 15;
    cfg.nv = 32;
    cfg.lv = 8.0 * M_PI;
    cfg.epsilon = 0.01;
    return cfg;
}

SpectralField random_dealiased(const GridSpec& g, std::uint64_t seed, double amp = 1.0) {
    SpectralField f(g);
    Rng rng(seed);
    for (int k = -g.kcut(); k <= g.kcut(); ++k)
        for (int n = -g.ncut(); n <= g.ncut(); ++n) {
            if (k == 0 && n == 0) continue;
            f.at(k, n) = amp * cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        }
    f.enforce_hermitian();
    f.apply_dealias_mask();
    return f;
}

} // namespace

TEST_CASE("grid bookkeeping") {
    GridSpec g;
    g.kmax = 127;
    g.nv = 256;
    CHECK(g.nz() == 256);
    CHECK(g.kcut() == 85);
    CHECK(g.ncut() == 85);
    CHECK(g.eta(4) == doctest::Approx(1.0)); // lv = 8 pi
    CHECK(g.k_of(g.index(-3, 5) / g.nv) == -3);
}

TEST_CASE("biot-savart in the sheared frame") {
    const SimConfig cfg = small_config();
    GridSpec g{cfg.kmax, cfg.nv, cfg.lv, cfg.dealias};
    FftWorkspace ws(g);
    SpectralField omega(g);
    omega.at(1, 0) = 1.0;
    omega.at(-1, 0) = 1.0;

    auto psi = biot_savart_sheared(omega, 0.0, ws);
    CHECK(psi.at(1, 0) == cplx(-1.0, 0.0)); // p = 1 at t = 0

    auto psi_t = biot_savart_sheared(omega, 3.0, ws);
    CHECK(psi_t.at(1, 0).real() == doctest::Approx(-1.0 / 10.0)); // p = 1 + 9

    // Delta_L applied back recovers omega exactly
    SpectralField f = random_dealiased(g, 1);
    const double t = 2.5;
    auto p2 = biot_savart_sheared(f, t, ws);
    for (int k = -g.kcut(); k <= g.kcut(); ++k)
        for (int n = -g.ncut(); n <= g.ncut(); ++n) {
            if (k == 0 && n == 0) continue;
            const cplx back = -p2.at(k, n) * p_symbol(k, g.eta(n), t);
            CHECK(std::abs(back - f.at(k, n)) < 1e-12);
        }
}

TEST_CASE("nonlinear transport: support, zero cases and skew symmetry") {
    const SimConfig cfg = small_config();
    GridSpec g{cfg.kmax, cfg.nv, cfg.lv, cfg.dealias};
    FftWorkspace ws(g);

    // psi = 0 -> N = 0
    SpectralField f = random_dealiased(g, 2);
    SpectralField zero(g);
    auto n0 = nonlinear_transport(f, zero, 1.0, ws);
    for (const cplx& c : n0.a) CHECK(std::abs(c) == 0.0);

    // single-mode interaction k=1 x k=1 -> output only at k in {0, 2}
    SpectralField a(g), b(g);
    a.at(1, 2) = cplx(0.3, 0.1);
    a.at(-1, -2) = std::conj(a.at(1, 2));
    b.at(1, 5) = cplx(-0.2, 0.4);
    b.at(-1, -5) = std::conj(b.at(1, 5));
    auto nab = nonlinear_transport(a, b, 0.7, ws);
    for (int k = -g.kcut(); k <= g.kcut(); ++k)
        for (int n = -g.ncut(); n <= g.ncut(); ++n)
            if (k != 0 && std::abs(k) != 2)
                CHECK(std::abs(nab.at(k, n)) < 1e-16);

    // discrete integration by parts: <N(f,psi), f> ~ 0 on dealiased fields
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        SpectralField ff = random_dealiased(g, seed);
        SpectralField psi = random_dealiased(g, seed + 100);
        auto nf = nonlinear_transport(ff, psi, 1.3, ws);
        cplx pairing(0.0, 0.0);
        double norm_f = 0.0, norm_n = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            pairing += nf.a[i] * std::conj(ff.a[i]);
            norm_f += std::norm(ff.a[i]);
            norm_n += std::norm(nf.a[i]);
        }
        CHECK(std::abs(pairing) / std::sqrt(norm_f * norm_n) < 1e-12);
    }

    SpectralField mismatched{GridSpec{7, 16, 1.0, 2.0 / 3.0}};
    CHECK_THROWS_AS(nonlinear_transport(f, mismatched, 0.0, ws), std::invalid_argument);
}

TEST_CASE("rhs consistency with the per-mode linear theory") {
    SimConfig cfg = small_config();
    cfg.beta = 1.7;
    GridSpec g{cfg.kmax, cfg.nv, cfg.lv, cfg.dealias};
    FftWorkspace ws(g);
    SolverState st;
    st.t = 1.2;
    st.omega = random_dealiased(g, 10, 1e-3);
    st.theta = random_dealiased(g, 11, 1e-3);

    const RhsResult lin = rhs(st, cfg, ws, false);
    for (int k = -g.kcut(); k <= g.kcut(); ++k) {
        if (k == 0) continue;
        for (int n = -g.ncut(); n <= g.ncut(); ++n) {
            ModeState m;
            m.k = k;
            m.eta = g.eta(n);
            m.t = st.t;
            m.omega_hat = st.omega.at(k, n);
            m.theta_hat = st.theta.at(k, n);
            const auto [dw, dth] = mode_rhs(m, cfg.beta);
            CHECK(std::abs(lin.domega.at(k, n) - dw) < 1e-15);
            CHECK(std::abs(lin.dtheta.at(k, n) - dth) < 1e-15);
        }
    }

    // zero state -> zero rhs
    SolverState z;
    z.omega = SpectralField(g);
    z.theta = SpectralField(g);
    const RhsResult zr = rhs(z, cfg, ws, true);
    for (const cplx& c : zr.domega.a) CHECK(std::abs(c) == 0.0);
    for (const cplx& c : zr.dtheta.a) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("rk4 step: hermitian symmetry, mean-free and reality preserved") {
    SimConfig cfg = small_config();
    GridSpec g{cfg.kmax, cfg.nv, cfg.lv, cfg.dealias};
    FftWorkspace ws(g);
    SolverState st;
    st.omega = random_dealiased(g, 20, 1e-2);
    st.theta = random_dealiased(g, 21, 1e-2);

    for (int i = 0; i < 25; ++i) step_rk4(st, 0.01, cfg, ws, true);

    CHECK(std::abs(st.omega.at(0, 0)) == 0.0);
    CHECK(std::abs(st.theta.at(0, 0)) == 0.0);
    for (int k = -g.kcut(); k <= g.kcut(); ++k)
        for (int n = -g.ncut(); n <= g.ncut(); ++n) {
            const cplx lhs = st.omega.at(k, n);
            const cplx rhsv = std::conj(st.omega.at(-k, -n));
            CHECK(lhs.real() == rhsv.real());
            CHECK(lhs.imag() == rhsv.imag());
        }

    // physical-space imaginary part below 1e-12 of the amplitude
    std::vector<cplx> phys = st.omega.a;
    ws.to_physical(phys);
    double max_re = 0.0, max_im = 0.0;
    for (const cplx& c : phys) {
        max_re = std::max(max_re, std::abs(c.real()));
        max_im = std::max(max_im, std::abs(c.imag()));
    }
    CHECK(max_im < 1e-12 * max_re);
}

TEST_CASE("rk4 order: halving dt reduces the terminal error ~16x") {
    SimConfig cfg = small_config();
    cfg.epsilon = 0.05; // make the nonlinearity visible
    GridSpec g{cfg.kmax, cfg.nv, cfg.lv, cfg.dealias};
    FftWorkspace ws(g);
    const MultiplierParams mp;
    cfg.preset = "paired";
    const SolverState init = init_perturbation(cfg, mp);

    auto run_with = [&](double dt) {
        SolverState st = init;
        const int n = int(std::lround(2.0 / dt));
        for (int i = 0; i < n; ++i) step_rk4(st, dt, cfg, ws, true);
        return st;
    };
    const SolverState ref = run_with(0.00125);
    const SolverState c1 = run_with(0.02);
    const SolverState c2 = run_with(0.01);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        e1 = std::max(e1, std::abs(c1.omega.a[i] - ref.omega.a[i]));
        e2 = std::max(e2, std::abs(c2.omega.a[i] - ref.omega.a[i]));
    }
    CHECK(e1 / e2 > 10.0); // 4th order would give ~16
    CHECK(e1 / e2 < 24.0);
}

TEST_CASE("init presets") {
    SimConfig cfg = small_config();
    cfg.kmax = 31;
    cfg.nv = 64;

    // eps = 0 -> zero state
    SimConfig z = cfg;
    z.epsilon = 0.0;
    const MultiplierParams mp;
    const SolverState zs = init_perturbation(z, mp);
    CHECK(zs.omega.max_abs() == 0.0);
    CHECK(zs.theta.max_abs() == 0.0);

    // gaussian stripe L2 norm: eps * (pi^{1/2} pi)^{1/2}
    const SolverState gs = init_perturbation(cfg, mp);
    const double expected = cfg.epsilon * std::sqrt(std::sqrt(M_PI) * M_PI);
    CHECK(l2_norm(gs.omega) == doctest::Approx(expected).epsilon(1e-6));
    CHECK(gs.theta.max_abs() == 0.0);
    CHECK(std::abs(gs.omega.at(0, 0)) == 0.0);

    // paired: theta too
    SimConfig pc = cfg;
    pc.preset = "paired";
    const SolverState ps = init_perturbation(pc, mp);
    CHECK(l2_norm(ps.theta) == doctest::Approx(expected).epsilon(1e-6));

    // random-gevrey: bit-for-bit reproducible, seed-sensitive, Hermitian
    SimConfig rc = cfg;
    rc.preset = "random-gevrey";
    rc.seed = 777;
    const SolverState r1 = init_perturbation(rc, mp);
    const SolverState r2 = init_perturbation(rc, mp);
    CHECK(r1.omega.a == r2.omega.a);
    CHECK(r1.theta.a == r2.theta.a);
    rc.seed = 778;
    const SolverState r3 = init_perturbation(rc, mp);
    CHECK(r1.omega.a != r3.omega.a);
    GridSpec g{rc.kmax, rc.nv, rc.lv, rc.dealias};
    for (int k = -g.kcut(); k <= g.kcut(); ++k)
        for (int n = -g.ncut(); n <= g.ncut(); ++n)
            CHECK(r1.omega.at(k, n) == std::conj(r1.omega.at(-k, -n)));

    SimConfig bad = cfg;
    bad.preset = "nope";
    CHECK_THROWS_AS(init_perturbation(bad, mp), std::invalid_argument);
}

TEST_CASE("linear-only solver matches integrate_mode over long horizons") {
    // cross-module oracle: a handful of populated modes, t in [0, 100]
    SimConfig cfg;
    cfg.kmax = 7;
    cfg.nv = 32;
    cfg.lv = 8.0 * M_PI;
    cfg.beta = 1.0;
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
                                       {2, -5, {-0.4, 0.5}, {0.0, -0.6}},
                                       {3, 8, {0.2, 0.2}, {0.9, 0.0}}};
    for (const auto& m : modes) {
        st.omega.at(m.k, m.n) = m.om;
        st.omega.at(-m.k, -m.n) = std::conj(m.om);
        st.theta.at(m.k, m.n) = m.th;
        st.theta.at(-m.k, -m.n) = std::conj(m.th);
    }

    const int nsteps = int(std::lround(100.0 / cfg.dt));
    for (int i = 0; i < nsteps; ++i) step_rk4(st, cfg.dt, cfg, ws, false);

    for (const auto& m : modes) {
        ModeState m0;
        m0.k = m.k;
        m0.eta = g.eta(m.n);
        m0.t = 0.0;
        m0.omega_hat = m.om;
        m0.theta_hat = m.th;
        const auto traj = integrate_mode(m0, cfg.beta, 0.0, 100.0, 1e-12, {100.0});
        CHECK(std::abs(st.omega.at(m.k, m.n) - traj.front().omega_hat) < 1e-8);
        CHECK(std::abs(st.theta.at(m.k, m.n) - traj.front().theta_hat) < 1e-8);
    }
}

TEST_CASE("run_simulation: zero data stays zero; guards are reported") {
    SimConfig cfg = small_config();
    cfg.kmax = 15;
    cfg.nv = 32;
    cfg.epsilon = 0.0;
    cfg.t_end = 1.0;
    cfg.dt = 0.05;
    cfg.diag_every = 0.5;
    const MultiplierParams mp;
    RunOptions opt;
    opt.weighted_diags = false;
    const RunResult res = run_simulation(cfg, mp, opt);
    for (const auto& row : res.rows) {
        CHECK(row.l2_omega_neq == 0.0);
        CHECK(row.l2_theta_neq == 0.0);
    }
    CHECK(res.guard_horizon == doctest::Approx((M_PI * 32 / cfg.lv) / 10.0));
}

TEST_CASE("initial data not concentrated enough aborts with a clear error") {
    SimConfig cfg = small_config();
    cfg.kmax = 15;
    cfg.nv = 32;
    cfg.lv = 2.0 * M_PI; // Gaussian stripe of width 1 does not fit
    cfg.t_end = 1.0;
    const MultiplierParams mp;
    RunOptions opt;
    opt.weighted_diags = false;
    CHECK_THROWS_WITH_AS(run_simulation(cfg, mp, opt),
                         doctest::Contains("not concentrated"), std::runtime_error);
}

TEST_CASE("rhs on a default-dimension grid (fresh result buffers)") {
    // regression: a default-constructed RhsResult carries the default grid
    // dimensions with empty storage; rhs must still allocate
    SimConfig cfg;
    GridSpec g{cfg.kmax, cfg.nv, cfg.lv, cfg.dealias};
    FftWorkspace ws(g);
    SolverState st;
    st.omega = SpectralField(g);
    st.theta = SpectralField(g);
    st.omega.at(1, 4) = cplx(0.1, 0.2);
    st.omega.at(-1, -4) = std::conj(st.omega.at(1, 4));
    const RhsResult r = rhs(st, cfg, ws, true);
    CHECK(r.domega.a.size() == g.size());
    CHECK(std::abs(r.dtheta.at(1, 4)) > 0.0);
}
