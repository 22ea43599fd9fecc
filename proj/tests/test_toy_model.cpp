#include <doctest.h>

#include "bqc/toy_model.hpp"

#include <cmath>
#include <stdexcept>

using namespace bqc;

TEST_CASE("toy right-hand side") {
    auto [dr, dnr] = toy_rhs(0.0, 1.0, 1.0, 1.0);
    CHECK(dr == doctest::Approx(1.0));
    CHECK(dnr == doctest::Approx(1.0));

    auto [dr2, dnr2] = toy_rhs(0.0, 1.0, 0.0, 4.0);
    CHECK(dr2 == 0.0);
    CHECK(dnr2 == doctest::Approx(2.0));

    // product of the coefficients is (1+tau^2)^{-1}, independent of sigma
    for (double sigma : {1.0, 7.0, 100.0}) {
        for (double tau : {-3.0, 0.0, 2.5}) {
            auto [a, b] = toy_rhs(tau, 1.0, 0.0, sigma);
            auto [c, d] = toy_rhs(tau, 0.0, 1.0, sigma);
            (void)a;
            (void)d;
            CHECK(b * c == doctest::Approx(1.0 / (1.0 + tau * tau)).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(toy_rhs(0.0, 1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("toy integration: positivity and monotonicity") {
    const ToyRun run = integrate_toy(1.0, 1e-10);
    CHECK(run.log_f_r_end > 0.0); // f_R(1) > 1
    CHECK(run.log_f_nr_end > 0.0);
    for (std::size_t i = 1; i < run.tau.size(); ++i) {
        CHECK(run.log_f_r[i] >= run.log_f_r[i - 1] - 1e-10);
        CHECK(run.log_f_nr[i] >= run.log_f_nr[i - 1] - 1e-10);
    }
}

TEST_CASE("toy envelopes with gamma = 2 hold with a single small constant") {
    double c = 0.0;
    for (double sigma : {10.0, 100.0, 1000.0, 10000.0}) {
        const ToyRun run = integrate_toy(sigma, 1e-10);
        c = std::max(c, envelope_constant(run, 2.0));
        // spot check: f_R(0) <= 10 sigma^2
        CHECK(run.log_f_r_mid <= std::log(10.0) + 2.0 * std::log(sigma));
    }
    CHECK(c <= 10.0);
}

TEST_CASE("toy growth exponents: reproducible, consistent, power-law") {
    const std::vector<double> sigmas = {10.0, 100.0, 1000.0, 10000.0};
    const auto ex1 = fit_growth_exponent(sigmas, 1e-10);
    const auto ex2 = fit_growth_exponent(sigmas, 1e-10);
    CHECK(ex1.gamma_r == ex2.gamma_r); // deterministic integrator

    // halving the tolerance moves the endpoints by < 1e-6 relative
    const auto run_a = integrate_toy(1000.0, 1e-10);
    const auto run_b = integrate_toy(1000.0, 5e-11);
    CHECK(std::abs(run_a.log_f_nr_end - run_b.log_f_nr_end) < 1e-6);

    // reproducible to 1e-3 across tolerance changes
    const auto ex3 = fit_growth_exponent(sigmas, 1e-9);
    CHECK(std::abs(ex1.gamma_r - ex3.gamma_r) < 1e-3);

    // exponent bookkeeping: gamma_nr_end ~ gamma_r + slope of f_NR(0)
    CHECK(std::abs(ex1.gamma_nr_end - (ex1.gamma_r + ex1.gamma_nr_mid)) < 0.1);
    CHECK(ex1.r2 > 0.99);

    // polynomiality: log f_NR(sigma)/log sigma bounded uniformly
    for (double sigma : sigmas) {
        const ToyRun run = integrate_toy(sigma, 1e-10);
        CHECK(run.log_f_nr_end / std::log(sigma) < 6.0);
    }
}

TEST_CASE("comparison toy model differs in its endpoint exponent") {
    const std::vector<double> sigmas = {10.0, 100.0, 1000.0, 10000.0};
    const auto bq = fit_growth_exponent(sigmas, 1e-10, ToyModelKind::boussinesq);
    const auto bm = fit_growth_exponent(sigmas, 1e-10, ToyModelKind::bm15);
    CHECK(integrate_toy(1.0, 1e-10, ToyModelKind::bm15).log_f_nr_end > 0.0);
    CHECK(std::abs(bq.gamma_nr_end - bm.gamma_nr_end) > 0.05);
    // WKB exponent spreads: sqrt(5) for the homogeneous model (indicial
    // a(a-1) = 1), sqrt(17)/2 for this one (a(a-1) + a/2 = 1)
    CHECK(bm.gamma_nr_end == doctest::Approx(std::sqrt(5.0)).epsilon(0.05));
    CHECK(bq.gamma_nr_end == doctest::Approx(std::sqrt(17.0) / 2.0).epsilon(0.05));
}
