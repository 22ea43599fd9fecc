#include "bqc/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bqc {

double p_symbol(long long k, double eta, double t) {
    const double kk = double(k);
    const double shear = eta - kk * t;
    return kk * kk + shear * shear;
}

double dt_p_symbol(long long k, double eta, double t) {
    const double kk = double(k);
    return -2.0 * kk * (eta - kk * t);
}

double dtdtp_ratio(long long k, double eta, double t) {
    if (k == 0) throw std::invalid_argument("dtdtp_ratio: k must be nonzero");
    const double tau = eta / double(k) - t;
    const double den = 1.0 + tau * tau;
    return 2.0 / (den * std::sqrt(den));
}

double critical_time(long long k, double eta) {
    const double e = std::abs(eta);
    if (k == 0) return 2.0 * e;
    const double kk = std::abs(double(k));
    return e / kk - e / (2.0 * kk * (kk + 1.0));
}

long long floor_sqrt(double eta) {
    const double a = std::abs(eta);
    long long k = (long long)std::floor(std::sqrt(a));
    while (double(k + 1) * double(k + 1) <= a) ++k;
    while (k > 0 && double(k) * double(k) > a) --k;
    return k;
}

CriticalInterval critical_interval(long long k, double eta) {
    CriticalInterval iv;
    iv.k = k;
    iv.eta = eta;
    if (k == 0 || eta * double(k) < 0.0) return iv;
    const long long K = floor_sqrt(eta);
    const long long ka = std::llabs(k);
    if (ka > K || K == 0) return iv;
    iv.left = critical_time(ka, eta);
    iv.center = std::abs(eta) / double(ka);
    iv.right = critical_time(ka - 1, eta);
    iv.empty = false;
    iv.is_resonant = 2.0 * std::sqrt(std::abs(eta)) <= iv.left;
    return iv;
}

long long ladder_index(double eta, double t) {
    const double e = std::abs(eta);
    const long long K = floor_sqrt(e);
    long long k = (t > 0.0) ? (long long)(e / t) : K;
    k = std::clamp(k, 1LL, K);
    while (k < K && t < critical_time(k, e)) ++k;
    while (k > 1 && t > critical_time(k - 1, e)) --k;
    return k;
}

namespace {

// a_{k,eta} and b_{k,eta} of the weight construction; both vanish only when
// eta = k^2 (the top rung of the ladder).
double a_coeff(long long k, double eta) {
    const double kk = double(k);
    return (2.0 * (kk + 1.0) / kk) * (1.0 - kk * kk / eta);
}
double b_coeff(long long k, double eta) {
    const double kk = double(k);
    if (k == 1) return 1.0 - 1.0 / eta;
    return (2.0 * (kk - 1.0) / kk) * (1.0 - kk * kk / eta);
}

void check_finite(double eta, double t) {
    if (!std::isfinite(eta) || !std::isfinite(t))
        throw std::invalid_argument("weight: non-finite input");
}

} // namespace

double log_w_anchor(long long k, double eta, const MultiplierParams& mp) {
    const double e = std::abs(eta);
    return (0.5 + 2.0 * mp.gamma) * (2.0 * std::lgamma(double(k) + 1.0) - double(k) * std::log(e));
}

WeightValue weight_wnr(double eta, double t, const MultiplierParams& mp) {
    check_finite(eta, t);
    const double e = std::abs(eta);
    WeightValue v;
    if (e <= 2.0 || t >= 2.0 * e) return v; // unity
    const long long K = floor_sqrt(e);
    const double tk_bottom = critical_time(K, e);
    if (t <= tk_bottom) {
        v.branch = WeightBranch::frozen;
        v.log_w = log_w_anchor(K, e, mp);
        v.w = std::exp(v.log_w);
        return v;
    }
    const long long k = ladder_index(e, t);
    const double center = e / double(k);
    const double base = std::log(double(k) * double(k) / e);
    v.branch = WeightBranch::nonresonant;
    if (t >= center) {
        const double b = b_coeff(k, e);
        const double x = 1.0 + b * (t - center);
        v.log_w = mp.gamma * (base + std::log(x)) + log_w_anchor(k - 1, e, mp);
        v.dtw_over_w = mp.gamma * b / x;
    } else {
        const double a = a_coeff(k, e);
        const double x = 1.0 + a * (center - t);
        v.log_w = -(0.5 + mp.gamma) * std::log(x) + mp.gamma * base + log_w_anchor(k - 1, e, mp);
        v.dtw_over_w = (0.5 + mp.gamma) * a / x;
    }
    v.w = std::exp(v.log_w);
    return v;
}

WeightValue weight_w(long long k, double eta, double t, const MultiplierParams& mp) {
    check_finite(eta, t);
    if (k == 0) return weight_wnr(eta, t, mp);
    if (eta < 0.0) { // mirror w_{-k}(t,-eta) = w_k(t,eta)
        eta = -eta;
        k = -k;
    }
    WeightValue v;
    if (k < 0) return v; // opposite signs: w == 1
    const double e = eta;
    if (e <= 2.0 || t >= 2.0 * e) return v;
    const long long K = floor_sqrt(e);
    const double tk_bottom = critical_time(K, e);
    if (t <= tk_bottom) {
        v.branch = WeightBranch::frozen;
        v.log_w = log_w_anchor(K, e, mp);
        v.w = std::exp(v.log_w);
        return v;
    }
    if (k <= K) {
        const double left = critical_time(k, e);
        const double right = critical_time(k - 1, e);
        if (left <= t && t <= right) {
            // resonant branch: w_R = ((k^2/eta)(1 + c|t - eta/k|))^{1/2} w_NR
            const WeightValue nr = weight_wnr(e, t, mp);
            const double center = e / double(k);
            const double base = std::log(double(k) * double(k) / e);
            v.branch = WeightBranch::resonant;
            if (t >= center) {
                const double b = b_coeff(k, e);
                const double x = 1.0 + b * (t - center);
                v.log_w = 0.5 * (base + std::log(x)) + nr.log_w;
                v.dtw_over_w = (0.5 + mp.gamma) * b / x;
            } else {
                const double a = a_coeff(k, e);
                const double x = 1.0 + a * (center - t);
                v.log_w = 0.5 * (base + std::log(x)) + nr.log_w;
                v.dtw_over_w = mp.gamma * a / x;
            }
            v.w = std::exp(v.log_w);
            return v;
        }
    }
    return weight_wnr(e, t, mp);
}

WeightValue weight_wv(double eta, double t, const MultiplierParams& mp) {
    check_finite(eta, t);
    const double e = std::abs(eta);
    WeightValue v;
    if (e <= 2.0 || t >= 2.0 * e) return v;
    const long long K = floor_sqrt(e);
    const double tk_bottom = critical_time(K, e);
    if (t <= tk_bottom) {
        v.branch = WeightBranch::frozen;
        v.log_w = log_w_anchor(K, e, mp);
        v.w = std::exp(v.log_w);
        return v;
    }
    const WeightValue nr = weight_wnr(e, t, mp);
    const long long k = ladder_index(e, t);
    const double center = e / double(k);
    const double base = std::log(double(k) * double(k) / e);
    v.branch = WeightBranch::resonant;
    if (t >= center) {
        const double b = b_coeff(k, e);
        const double x = 1.0 + b * (t - center);
        v.log_w = base + std::log(x) + nr.log_w;
        v.dtw_over_w = (1.0 + mp.gamma) * b / x;
    } else {
        const double a = a_coeff(k, e);
        const double x = 1.0 + a * (center - t);
        v.log_w = base + std::log(x) + nr.log_w;
        v.dtw_over_w = (mp.gamma - 0.5) * a / x;
    }
    v.w = std::exp(v.log_w);
    return v;
}

MValue multiplier_m(long long k, double eta, double t, const MultiplierParams& mp) {
    if (k == 0) return {1.0, 0.0};
    const double x = t - eta / double(k);
    return {std::exp(mp.c_beta * std::atan(x)), mp.c_beta / (1.0 + x * x)};
}

// ---------------------------------------------------------------------------
// lambda(t)
// ---------------------------------------------------------------------------

namespace {

double lam_profile(double tau, double q) { return std::pow(1.0 + tau * tau, -q); }

double simpson_rec(double q, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = lam_profile(lm, q), frm = lam_profile(rm, q);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(q, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(q, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_profile(double q, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double fa = lam_profile(a, q), fb = lam_profile(b, q);
    const double m = 0.5 * (a + b), fm = lam_profile(m, q);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(q, a, b, fa, fm, fb, whole, tol, 48);
}

// tail integral of (1+tau^2)^{-q} over [T, inf), by the binomial series in
// tau^{-2}; accurate to ~1e-16 relative for T >= 16.
double profile_tail(double q, double T) {
    double sum = 0.0;
    double coef = 1.0; // binom(-q, j) accumulated
    for (int j = 0; j < 24; ++j) {
        const double expo = 2.0 * q + 2.0 * j - 1.0;
        const double term = coef * std::pow(T, -expo) / expo;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        coef *= (-q - j) / double(j + 1);
    }
    return sum;
}

constexpr double kTailStart = 64.0;

} // namespace

LambdaFn::LambdaFn(const MultiplierParams& mp) : q_(mp.q) {
    lam1_ = 0.75 * mp.lambda0 + 0.25 * mp.lambda_prime;
    target_inf_ = (5.0 * mp.lambda0 + 3.0 * mp.lambda_prime) / 8.0;
    integral_inf_ = integrate_profile(q_, 1.0, kTailStart, 1e-12) + profile_tail(q_, kTailStart);
    if (mp.delta_lambda > 0.0) {
        delta_ = mp.delta_lambda;
        if (!(2.0 * lambda_infinity() > mp.lambda0 + mp.lambda_prime))
            throw std::invalid_argument(
                "delta_lambda too large: 2 lambda(t) > lambda0 + lambda_prime fails");
        return;
    }
    // Bisection on delta for lambda(inf) = target; lambda(inf) is monotone
    // decreasing in delta, so the bracket below always contains the root.
    double lo = 0.0, hi = 1.0;
    auto lam_inf = [&](double d) { return (1.0 + lam1_) * std::exp(-d * integral_inf_) - 1.0; };
    while (lam_inf(hi) > target_inf_) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (lam_inf(mid) > target_inf_)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16 * hi) break;
    }
    delta_ = 0.5 * (lo + hi);
}

double LambdaFn::profile_integral(double t) const {
    if (t <= 1.0) return 0.0;
    if (t <= kTailStart) return integrate_profile(q_, 1.0, t, 1e-12);
    return integral_inf_ - profile_tail(q_, t);
}

double LambdaFn::operator()(double t) const {
    if (t <= 1.0) return lam1_;
    return (1.0 + lam1_) * std::exp(-delta_ * profile_integral(t)) - 1.0;
}

double LambdaFn::dot(double t) const {
    if (t <= 1.0) return 0.0;
    return -delta_ * std::pow(1.0 + t * t, -q_) * (1.0 + (*this)(t));
}

double LambdaFn::lambda_infinity() const {
    return (1.0 + lam1_) * std::exp(-delta_ * integral_inf_) - 1.0;
}

// ---------------------------------------------------------------------------
// J and A
// ---------------------------------------------------------------------------

double log_multiplier_J(long long k, double eta, double t, const MultiplierParams& mp,
                        JVariant variant) {
    const double head = mp.mu * std::sqrt(std::abs(eta));
    switch (variant) {
    case JVariant::J_v:
        return head - weight_wv(eta, t, mp).log_w;
    case JVariant::J_tilde:
        return head - weight_w(k, eta, t, mp).log_w;
    case JVariant::J:
    default:
        return log_add_exp(head - weight_w(k, eta, t, mp).log_w,
                           mp.mu * std::sqrt(std::abs(double(k))));
    }
}

double multiplier_J(long long k, double eta, double t, const MultiplierParams& mp,
                    JVariant variant) {
    return std::exp(log_multiplier_J(k, eta, t, mp, variant));
}

double log_multiplier_A(long long k, double eta, double t, double lambda_t,
                        const MultiplierParams& mp, AVariant variant) {
    if (variant == AVariant::A_v) {
        return mp.sigma * std::log(jap(eta)) + lambda_t * std::pow(std::abs(eta), mp.s) +
               log_multiplier_J(k, eta, t, mp, JVariant::J_v);
    }
    const JVariant jv = (variant == AVariant::A_tilde) ? JVariant::J_tilde : JVariant::J;
    return mp.sigma * std::log(jap2(double(k), eta)) +
           lambda_t * std::pow(knorm(double(k), eta), mp.s) -
           std::log(multiplier_m(k, eta, t, mp).m) + log_multiplier_J(k, eta, t, mp, jv);
}

double multiplier_A(long long k, double eta, double t, const MultiplierParams& mp,
                    AVariant variant) {
    const LambdaFn lam(mp);
    return std::exp(log_multiplier_A(k, eta, t, lam(t), mp, variant));
}

ADecomposition dt_log_A(long long k, double eta, double t, double lambda_t, double lambda_dot,
                        const MultiplierParams& mp) {
    ADecomposition d;
    d.lambda_term = lambda_dot * std::pow(knorm(double(k), eta), mp.s);
    const double ratio_tilde_over_A =
        std::exp(log_multiplier_A(k, eta, t, lambda_t, mp, AVariant::A_tilde) -
                 log_multiplier_A(k, eta, t, lambda_t, mp, AVariant::A));
    d.w_term = -weight_w(k, eta, t, mp).dtw_over_w * ratio_tilde_over_A;
    d.m_term = -multiplier_m(k, eta, t, mp).dtm_over_m;
    return d;
}

} // namespace bqc
