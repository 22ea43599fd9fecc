#include "bqc/lemmas.hpp"

#include "bqc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace bqc {

TrichotomyCases classify_trichotomy(long long k, long long l, double eta, double xi, double t,
                                    double C) {
    if (!(C >= 1.0)) throw std::invalid_argument("trichotomy: C must be >= 1");
    if (!(std::abs(eta) <= C * std::abs(xi) && std::abs(xi) <= C * std::abs(eta)))
        throw std::invalid_argument("trichotomy: eta, xi not comparable within C");
    if (!critical_interval(k, eta).contains(t) || !critical_interval(l, xi).contains(t))
        throw std::invalid_argument("trichotomy: t must lie in both critical intervals");
    TrichotomyCases cases;
    const double thr = 1.0 / (10.0 * C);
    cases.a = (k == l);
    cases.b = std::abs(t - eta / double(k)) >= thr * std::abs(eta) / double(k * k) &&
              std::abs(t - xi / double(l)) >= thr * std::abs(xi) / double(l * l);
    cases.c = std::abs(eta - xi) >=
              thr * std::max(std::abs(eta) / std::abs(double(l)), std::abs(xi) / std::abs(double(k)));
    return cases;
}

namespace {

constexpr double kEtaMax = 1e4;
constexpr double kTMax = 2e4;
constexpr long long kKMax = 32;

// t_{k,xi} = xi * alpha_k and t_{k-1,xi} = xi * beta_k for xi > 0.
double alpha_of(long long k) {
    const double kk = double(k);
    return (2.0 * kk + 1.0) / (2.0 * kk * (kk + 1.0));
}
double beta_of(long long k) {
    if (k == 1) return 2.0;
    const double kk = double(k);
    return (2.0 * kk - 1.0) / (2.0 * kk * (kk - 1.0));
}

double log_uniform(Rng& rng, double lo, double hi) {
    return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

long long nonzero_wavenumber(Rng& rng) {
    long long k = rng.uniform_int(1, kKMax);
    return rng.uniform() < 0.5 ? -k : k;
}

/// Draw (k, eta, t) with t inside I_{k,eta}; eta in [eta_lo, kEtaMax].
struct IntervalDraw {
    long long k;
    double eta;
    double t;
};
bool draw_in_interval(Rng& rng, double eta_lo, IntervalDraw& out, bool resonant_only) {
    const double eta = log_uniform(rng, eta_lo, kEtaMax);
    const long long K = floor_sqrt(eta);
    if (K < 1) return false;
    const long long k = rng.uniform_int(1, K);
    const auto iv = critical_interval(k, eta);
    if (iv.empty) return false;
    if (resonant_only && !iv.is_resonant) return false;
    out = {k, eta, rng.uniform(iv.left, iv.right)};
    return true;
}

using SampleFn = std::function<bool(Rng&, double&)>;

RatioReport run_suite(const std::string& id, std::size_t n, std::uint64_t seed,
                      const SampleFn& draw) {
    std::vector<double> ratios;
    ratios.reserve(n);
    Rng rng(Rng::mix(seed ^ std::hash<std::string>{}(id)));
    std::size_t attempts = 0;
    const std::size_t max_attempts = 50000 + 4000 * n;
    while (ratios.size() < n && attempts < max_attempts) {
        ++attempts;
        double r;
        if (draw(rng, r) && std::isfinite(r)) ratios.push_back(r);
    }
    if (ratios.empty()) throw std::runtime_error("lemma suite produced no admissible samples: " + id);
    std::sort(ratios.begin(), ratios.end());
    RatioReport rep;
    rep.lemma_id = id;
    rep.n = ratios.size();
    rep.sup_ratio = ratios.back();
    rep.inf_ratio = ratios.front();
    rep.p50 = ratios[(ratios.size() - 1) / 2];
    rep.p99 = ratios[std::size_t(0.99 * double(ratios.size() - 1))];
    return rep;
}

} // namespace

const std::vector<std::string>& lemma_ids() {
    static const std::vector<std::string> ids = {
        "scalar-4.2a",    "scalar-4.2b",    "dtw-4.4",       "wexchange-4.5a",
        "wexchange-4.5b", "wnr-4.6",        "J-4.7-general", "J-4.7-resonant",
        "J-4.7-improved", "J-4.7-good",     "commutator-4.8", "p-exchange",
        "p-ketapc"};
    return ids;
}

RatioReport sample_lemma_ratios(const std::string& lemma_id, std::size_t n_samples,
                                std::uint64_t seed, const MultiplierParams& mp) {
    const double s = mp.s;
    const double mu = mp.mu;

    if (lemma_id == "scalar-4.2a") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            const double b = rng.uniform(1e-3, 100.0);
            const double C = rng.uniform(2.0 + 1e-9, 10.0);
            const double a = b * (1.0 + rng.uniform(-1.0, 1.0) / C);
            const double d = std::abs(a - b);
            if (d == 0.0) {
                r = 0.0;
                return true;
            }
            r = std::abs(std::pow(a, s) - std::pow(b, s)) /
                ((s / std::pow(C - 1.0, 1.0 - s)) * std::pow(d, s));
            return true;
        });
    }
    if (lemma_id == "scalar-4.2b") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            const double b = rng.uniform(1e-3, 100.0);
            const double C = rng.uniform(0.05, 10.0);
            const double u = rng.uniform(std::max(-1.0, -1.0 / C), 1.0);
            const double a = b * (1.0 + u * C);
            r = std::pow(a, s) / (std::pow(C / (1.0 + C), 1.0 - s) *
                                  (std::pow(std::abs(a - b), s) + std::pow(b, s)));
            return true;
        });
    }
    if (lemma_id == "dtw-4.4") {
        // two-sided: both dtw_NR/w_NR and dtw_R/w_R against 1/(1+|eta/k - t|)
        bool emit_resonant = false;
        IntervalDraw d{};
        return run_suite(lemma_id, n_samples, seed, [&, emit_resonant, d](Rng& rng, double& r) mutable {
            if (!emit_resonant) {
                IntervalDraw cand;
                if (!draw_in_interval(rng, 25.0, cand, false)) return false;
                if (cand.t <= 2.0 * std::sqrt(cand.eta)) return false;
                d = cand;
                const double rhs = 1.0 / (1.0 + std::abs(d.eta / double(d.k) - d.t));
                r = weight_wnr(d.eta, d.t, mp).dtw_over_w / rhs;
                emit_resonant = true;
                return true;
            }
            const double rhs = 1.0 / (1.0 + std::abs(d.eta / double(d.k) - d.t));
            r = weight_w(d.k, d.eta, d.t, mp).dtw_over_w / rhs;
            emit_resonant = false;
            return true;
        });
    }
    if (lemma_id == "wexchange-4.5a") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            const double eta = log_uniform(rng, 20.0, kEtaMax);
            const double xi = log_uniform(rng, 20.0, kEtaMax);
            const double lo = 2.0 * std::sqrt(std::max(eta, xi));
            const double hi = 2.0 * std::min(eta, xi);
            if (lo >= hi) return false;
            const double t = rng.uniform(std::max(1.0, lo), hi);
            const long long k = rng.uniform_int(1, kKMax);
            const long long l = rng.uniform_int(1, kKMax);
            const auto wk = weight_w(k, eta, t, mp);
            const auto wl = weight_w(l, xi, t, mp);
            if (wl.dtw_over_w <= 0.0) return false;
            r = (wk.dtw_over_w / wl.dtw_over_w) / jap(eta - xi);
            return true;
        });
    }
    if (lemma_id == "wexchange-4.5b") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            const double eta = log_uniform(rng, 4.0, kEtaMax);
            const double xi = eta * std::exp(rng.uniform(-std::log(2.0), std::log(2.0)));
            const double t = rng.uniform(1.0, kTMax);
            const long long k = rng.uniform_int(1, kKMax);
            const long long l = rng.uniform_int(1, kKMax);
            const double lhs = std::sqrt(weight_w(l, xi, t, mp).dtw_over_w);
            const double rhs = (std::sqrt(weight_w(k, eta, t, mp).dtw_over_w) +
                                std::pow(eta, 0.5 * s) / std::pow(t, s)) *
                               jap(eta - xi);
            r = lhs / rhs;
            return true;
        });
    }
    if (lemma_id == "wnr-4.6") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            const double eta = rng.uniform(-kEtaMax, kEtaMax);
            const double xi = rng.uniform(-kEtaMax, kEtaMax);
            const double t = rng.uniform(0.0, kTMax);
            r = std::exp(weight_wnr(xi, t, mp).log_w - weight_wnr(eta, t, mp).log_w -
                         mu * std::sqrt(std::abs(eta - xi)));
            return true;
        });
    }
    if (lemma_id == "J-4.7-general") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            const long long k = nonzero_wavenumber(rng);
            const long long l = nonzero_wavenumber(rng);
            const double eta = rng.uniform(-kEtaMax, kEtaMax);
            const double xi = rng.uniform(-kEtaMax, kEtaMax);
            const double t = rng.uniform(0.0, kTMax);
            const double bracket =
                std::abs(eta) / (double(k * k) * (1.0 + std::abs(t - eta / double(k))));
            if (bracket <= 0.0) return false;
            const double log_rhs =
                0.5 * std::log(bracket) + 9.0 * mu * std::sqrt(knorm(double(k - l), eta - xi));
            r = std::exp(log_multiplier_J(k, eta, t, mp, JVariant::J) -
                         log_multiplier_J(l, xi, t, mp, JVariant::J) - log_rhs);
            return true;
        });
    }
    if (lemma_id == "J-4.7-resonant") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            const long long k = rng.uniform_int(1, 25);
            const double alpha = alpha_of(k), beta = beta_of(k);
            const double eta_min = std::pow(2.0 / alpha, 2) * 1.01;
            if (eta_min >= kEtaMax) return false;
            const double eta = rng.uniform(eta_min, kEtaMax);
            const auto iv_eta = critical_interval(k, eta);
            if (!iv_eta.is_resonant) return false;
            const double t = rng.uniform(iv_eta.left, iv_eta.right);
            const double lo = std::max(t / beta, eta_min);
            const double hi = t / alpha;
            if (lo >= hi) return false;
            const double xi = rng.uniform(lo, hi);
            const auto iv_xi = critical_interval(k, xi);
            if (!iv_xi.contains_resonant(t)) return false;
            long long l = rng.uniform_int(1, kKMax - 1);
            if (l >= k) ++l;
            const auto wk = weight_w(k, eta, t, mp);
            if (wk.dtw_over_w <= 0.0) return false;
            const double log_rhs = 0.5 * std::log(eta) - std::log(double(k)) +
                                   0.5 * std::log(wk.dtw_over_w) +
                                   23.0 * mu * std::sqrt(knorm(double(k - l), eta - xi));
            r = std::exp(log_multiplier_J(k, eta, t, mp, JVariant::J) -
                         log_multiplier_J(l, xi, t, mp, JVariant::J) - log_rhs);
            return true;
        });
    }
    if (lemma_id == "J-4.7-improved") {
        std::size_t mode = 0;
        return run_suite(lemma_id, n_samples, seed, [&, mode](Rng& rng, double& r) mutable {
            const std::size_t branch = mode++ % 3;
            long long k = nonzero_wavenumber(rng);
            long long l = nonzero_wavenumber(rng);
            double eta = rng.uniform(-kEtaMax, kEtaMax);
            double xi = rng.uniform(-kEtaMax, kEtaMax);
            double t = rng.uniform(0.0, kTMax);
            if (branch == 0) { // t outside the resonant interval of (k,eta)
                if (critical_interval(k, eta).contains_resonant(t)) return false;
            } else if (branch == 1) { // same wavenumber
                l = k;
            } else { // comparable frequencies, resonant for eta, not for xi
                IntervalDraw d;
                if (!draw_in_interval(rng, 16.0, d, true)) return false;
                k = d.k;
                eta = d.eta;
                t = d.t;
                xi = eta * std::exp(rng.uniform(-std::log(2.0), std::log(2.0)));
                if (critical_interval(k, xi).contains_resonant(t)) return false;
            }
            const double log_rhs = 10.0 * mu * std::sqrt(knorm(double(k - l), eta - xi));
            r = std::exp(log_multiplier_J(k, eta, t, mp, JVariant::J) -
                         log_multiplier_J(l, xi, t, mp, JVariant::J) - log_rhs);
            return true;
        });
    }
    if (lemma_id == "J-4.7-good") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            IntervalDraw d;
            if (!draw_in_interval(rng, 16.0, d, true)) return false;
            const long long l = d.k;
            const double xi = d.eta;
            const double t = d.t;
            const double eta = xi * std::exp(rng.uniform(-std::log(2.0), std::log(2.0)));
            const long long k = rng.uniform_int(1, kKMax);
            if (critical_interval(k, eta).contains_resonant(t)) return false;
            const double bracket =
                double(l * l) * (1.0 + std::abs(t - xi / double(l))) / std::abs(xi);
            const double log_rhs =
                0.5 * std::log(bracket) + 11.0 * mu * std::sqrt(knorm(double(k - l), eta - xi));
            r = std::exp(log_multiplier_J(k, eta, t, mp, JVariant::J) -
                         log_multiplier_J(l, xi, t, mp, JVariant::J) - log_rhs);
            return true;
        });
    }
    if (lemma_id == "commutator-4.8") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            const double eta = log_uniform(rng, 16.0, kEtaMax);
            const double xi = log_uniform(rng, 16.0, kEtaMax);
            const long long k = rng.uniform_int(1, kKMax);
            const long long l = rng.uniform_int(1, kKMax);
            const double tmax = 0.5 * std::min(std::sqrt(eta), std::sqrt(xi));
            const double t = rng.uniform(0.0, tmax);
            const double lhs = std::abs(std::expm1(log_multiplier_J(k, eta, t, mp, JVariant::J) -
                                                   log_multiplier_J(l, xi, t, mp, JVariant::J)));
            const double rhs = jap2(double(k - l), eta - xi) /
                               std::sqrt(eta + xi + double(k) + double(l)) *
                               std::exp(11.0 * mu * std::sqrt(knorm(double(k - l), eta - xi)));
            r = lhs / rhs;
            return true;
        });
    }
    if (lemma_id == "p-exchange") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            const long long k = nonzero_wavenumber(rng);
            const long long l = nonzero_wavenumber(rng);
            const double eta = rng.uniform(-kEtaMax, kEtaMax);
            const double xi = rng.uniform(-kEtaMax, kEtaMax);
            const double t = rng.uniform(0.0, kTMax);
            const bool in_k = critical_interval(k, eta).contains(t);
            const bool in_l = critical_interval(l, xi).contains(t);
            double factor = 1.0;
            if (in_k && !in_l)
                factor = std::abs(eta) / (double(k * k) * (1.0 + std::abs(eta / double(k) - t)));
            else if (!in_k && in_l)
                factor = double(l * l) * (1.0 + std::abs(xi / double(l) - t)) / std::abs(xi);
            const double rhs = std::pow(jap2(double(k - l), eta - xi), 3) * factor;
            r = std::sqrt(p_symbol(l, xi, t) / p_symbol(k, eta, t)) / rhs;
            return true;
        });
    }
    if (lemma_id == "p-ketapc") {
        return run_suite(lemma_id, n_samples, seed, [&](Rng& rng, double& r) {
            const long long l = nonzero_wavenumber(rng);
            const double xi = rng.uniform(-kEtaMax, kEtaMax);
            const double t = rng.uniform(1.0, kTMax);
            if (critical_interval(l, xi).contains(t)) return false;
            r = std::pow(knorm(double(l), xi), 1.0 - s) * jap(xi / (double(l) * t)) *
                std::pow(jap(t), 2.0 * s) / p_symbol(l, xi, t);
            return true;
        });
    }
    throw std::invalid_argument("unknown lemma id: " + lemma_id);
}

TrichotomySuite run_trichotomy_suite(std::size_t n_samples, std::uint64_t seed) {
    TrichotomySuite suite;
    Rng rng(Rng::mix(seed ^ 0x7261647369757354ULL));
    std::size_t attempts = 0;
    const std::size_t max_attempts = 50000 + 2000 * n_samples;
    while (suite.n < n_samples && attempts < max_attempts) {
        ++attempts;
        const double eta = log_uniform(rng, 9.0, kEtaMax);
        const long long K = floor_sqrt(eta);
        if (K < 1) continue;
        const long long k = rng.uniform_int(1, K);
        const auto iv = critical_interval(k, eta);
        if (iv.empty) continue;
        const double t = rng.uniform(iv.left, iv.right);
        const long long l = rng.uniform_int(1, kKMax);
        const double lo = std::max(t / beta_of(l), double(l * l) * 1.0000001);
        const double hi = t / alpha_of(l);
        if (lo >= hi) continue;
        const double xi = rng.uniform(lo, hi);
        if (!critical_interval(l, xi).contains(t)) continue;
        const double C = std::max({eta / xi, xi / eta, 1.0}) * (1.0 + 1e-12);
        const auto cases = classify_trichotomy(k, l, eta, xi, t, C);
        ++suite.n;
        if (cases.empty()) ++suite.n_empty;
        if (cases.a) ++suite.n_a;
        if (cases.b) ++suite.n_b;
        if (cases.c) ++suite.n_c;
    }
    return suite;
}

} // namespace bqc
