#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bqc {

/// Parameter bundle governing every Fourier weight and multiplier.
///
/// Constraints (validated by validate()):
///   beta > 1/2 (Miles-Howard), c_beta = 1/(2*beta - 1)
///   1/2 < s <= 1, lambda0 > lambda_prime > 0
///   gamma in (1,2), mu = 4*(1/2 + 2*gamma) exactly
///   sigma > 16, 1/2 < q <= 1/4 + s/2
///   delta_lambda > 0, calibrated so that 2*lambda(t) > lambda0 + lambda_prime.
struct MultiplierParams {
    double beta = 1.0;
    double s = 0.6;
    double lambda0 = 1.0;
    double lambda_prime = 0.2;
    double gamma = 1.5;
    double mu = 14.0;          // 4*(1/2 + 2*gamma)
    double sigma = 20.0;
    double q = 0.55;           // 1/4 + s/2 by default
    double delta_lambda = 0.0; // 0 means "auto-calibrate" (see lambda_calibrate)
    double c_beta = 1.0;       // 1/(2*beta - 1)

    void set_gamma(double g) {
        gamma = g;
        mu = 4.0 * (0.5 + 2.0 * g);
    }
    void set_beta(double b) {
        beta = b;
        c_beta = 1.0 / (2.0 * b - 1.0);
    }
    void set_s(double s_new) {
        s = s_new;
        q = 0.25 + 0.5 * s_new;
    }

    void validate() const {
        if (!(beta > 0.5)) throw std::invalid_argument("beta must exceed 1/2");
        if (!(s > 0.5 && s <= 1.0)) throw std::invalid_argument("s must lie in (1/2, 1]");
        if (!(lambda0 > lambda_prime && lambda_prime > 0.0))
            throw std::invalid_argument("need lambda0 > lambda_prime > 0");
        if (!(gamma > 1.0 && gamma < 2.0)) throw std::invalid_argument("gamma must lie in (1,2)");
        if (std::abs(mu - 4.0 * (0.5 + 2.0 * gamma)) > 1e-12)
            throw std::invalid_argument("mu must equal 4*(1/2+2*gamma)");
        if (!(sigma > 16.0)) throw std::invalid_argument("sigma must exceed 16");
        if (!(q > 0.5 && q <= 0.25 + 0.5 * s + 1e-12))
            throw std::invalid_argument("q must lie in (1/2, 1/4 + s/2]");
        if (std::abs(c_beta - 1.0 / (2.0 * beta - 1.0)) > 1e-12)
            throw std::invalid_argument("c_beta must equal 1/(2*beta-1)");
    }
};

/// Simulation configuration for the pseudo-spectral solver.
///
/// Spectral storage covers k in [-kmax, kmax] and n in [-nv/2, nv/2); the
/// transform grid is (2*(kmax+1)) x nv points, and the 2/3-rule mask keeps
/// |k| <= floor(dealias*(kmax+1)) and |n| <= floor(dealias*nv/2).
struct SimConfig {
    double beta = 1.0;
    double epsilon = 0.005;
    int kmax = 127;
    int nv = 256;
    double lv = 8.0 * M_PI;
    double dt = 0.02;
    double t_end = 50.0;
    double dealias = 2.0 / 3.0;
    std::uint64_t seed = 12345;
    std::string preset = "gaussian-stripe";
    std::string out_dir = ".";
    double snapshot_every = 0.0; // 0 disables snapshots
    double diag_every = 0.5;

    void validate() const {
        if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
        if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
        if (kmax < 2) throw std::invalid_argument("kmax must be at least 2");
        if (nv < 8 || nv % 2 != 0) throw std::invalid_argument("nv must be even and >= 8");
        if (!(lv > 0.0)) throw std::invalid_argument("lv must be positive");
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
        if (!(dealias > 0.0 && dealias <= 1.0))
            throw std::invalid_argument("dealias must lie in (0,1]");
        if (preset != "gaussian-stripe" && preset != "paired" && preset != "random-gevrey")
            throw std::invalid_argument("unknown preset: " + preset);
        if (snapshot_every < 0.0) throw std::invalid_argument("snapshot_every must be >= 0");
        if (!(diag_every > 0.0)) throw std::invalid_argument("diag_every must be positive");
    }
};

} // namespace bqc
