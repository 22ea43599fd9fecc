#pragma once

#include "bqc/params.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace bqc {

// ---------------------------------------------------------------------------
// Symbols of the sheared Laplacian
// ---------------------------------------------------------------------------

/// p_k(t,eta) = k^2 + (eta - k t)^2. For k = 0 this is eta^2.
double p_symbol(long long k, double eta, double t);

/// d/dt p_k(t,eta) = -2 k (eta - k t); flips sign at the critical time eta/k.
double dt_p_symbol(long long k, double eta, double t);

/// d/dt [ dt_p / (|k| p^{1/2}) ] = 2 / (1 + (eta/k - t)^2)^{3/2}.
/// Positive, maximal (= 2) at the critical time. Requires k != 0.
double dtdtp_ratio(long long k, double eta, double t);

// ---------------------------------------------------------------------------
// Critical times and intervals
// ---------------------------------------------------------------------------

/// t_{k,eta} = |eta|/|k| - |eta|/(2|k|(|k|+1)) for k >= 1; t_{0,eta} = 2|eta|.
double critical_time(long long k, double eta);

/// floor(sqrt(|eta|)) as an integer, robust at perfect squares.
long long floor_sqrt(double eta);

/// The interval I_{k,eta} = [t_{|k|,eta}, eta/k] u [eta/k, t_{|k|-1,eta}],
/// nonempty iff eta*k > 0 and 1 <= |k| <= floor(sqrt(|eta|)). The resonant
/// flag marks 2 sqrt(|eta|) <= t_{|k|,eta}.
struct CriticalInterval {
    long long k = 0;
    double eta = 0.0;
    double left = 0.0;
    double center = 0.0;
    double right = 0.0;
    bool empty = true;
    bool is_resonant = false;

    bool contains(double t) const { return !empty && left <= t && t <= right; }
    bool contains_resonant(double t) const { return is_resonant && contains(t); }
};

CriticalInterval critical_interval(long long k, double eta);

/// Ladder interval index: the unique k' in [1, floor_sqrt(eta)] with
/// t in [t_{k',eta}, t_{k'-1,eta}], for t inside [t_K, 2|eta|]. |eta| > 2.
long long ladder_index(double eta, double t);

// ---------------------------------------------------------------------------
// The weights w, w^v
// ---------------------------------------------------------------------------

enum class WeightBranch { unity, frozen, nonresonant, resonant };

/// Value of a weight at (k, eta, t) together with its logarithm (the weights
/// underflow doubles for |eta| beyond ~1e5) and the analytic logarithmic
/// derivative of the active branch (0 on unity/frozen branches).
struct WeightValue {
    double w = 1.0;
    double log_w = 0.0;
    double dtw_over_w = 0.0;
    WeightBranch branch = WeightBranch::unity;
};

/// Anchor value log w_NR(t_{k,eta}, eta) = (1/2 + 2 gamma) * log((k!)^2 / eta^k).
double log_w_anchor(long long k, double eta, const MultiplierParams& mp);

/// The non-resonant ladder w_NR(t, |eta|); equals the k = 0 weight.
WeightValue weight_wnr(double eta, double t, const MultiplierParams& mp);

/// The main weight w_k(t,eta): w_R on I_{k,eta}, w_NR elsewhere on the ladder,
/// frozen below t_{floor(sqrt(eta)),eta}, and 1 for t >= 2|eta|, |eta| <= 2 or
/// eta*k < 0. Mirror symmetry w_{-k}(t,-eta) = w_k(t,eta).
WeightValue weight_w(long long k, double eta, double t, const MultiplierParams& mp);

/// The coordinate-system weight w^v(t,eta): (k'^2/eta)(1 + c|t - eta/k'|) w_NR
/// on the ladder interval k' containing t, extended piecewise (no reciprocal),
/// so that w^v <= w_NR everywhere.
WeightValue weight_wv(double eta, double t, const MultiplierParams& mp);

// ---------------------------------------------------------------------------
// m, lambda(t), J, A
// ---------------------------------------------------------------------------

/// m_k(t,eta) = exp(C_beta * arctan(t - eta/k)) for k != 0, and 1 for k = 0,
/// together with dt m / m = C_beta / (1 + (t - eta/k)^2).
struct MValue {
    double m = 1.0;
    double dtm_over_m = 0.0;
};
MValue multiplier_m(long long k, double eta, double t, const MultiplierParams& mp);

/// Evaluator for the shrinking Gevrey radius:
///   lambda(t) = (3 lambda0 + lambda')/4 for t <= 1,
///   d/dt lambda = -delta_lambda <t>^{-2q} (1 + lambda) for t > 1,
/// with delta_lambda calibrated (bisection on the closed form) so that
/// lambda(inf) = (5 lambda0 + 3 lambda')/8, strictly above (lambda0+lambda')/2.
class LambdaFn {
  public:
    explicit LambdaFn(const MultiplierParams& mp);

    double operator()(double t) const;      ///< lambda(t)
    double dot(double t) const;             ///< d/dt lambda(t) (0 for t <= 1)
    double lambda_infinity() const;         ///< limit value
    double delta_lambda() const { return delta_; }
    double lambda_one() const { return lam1_; }

    /// integral of <tau>^{-2q} over [1, t] (adaptive, abs error < 1e-10)
    double profile_integral(double t) const;

  private:
    double q_;
    double lam1_;
    double target_inf_;
    double delta_;
    double integral_inf_;
};

enum class JVariant { J, J_tilde, J_v };
enum class AVariant { A, A_tilde, A_v };

/// log J_k(t,eta) for the requested variant:
///   J       = e^{mu |eta|^{1/2}} / w_k + e^{mu |k|^{1/2}}
///   J~      = e^{mu |eta|^{1/2}} / w_k
///   J^v     = e^{mu |eta|^{1/2}} / w^v   (k ignored)
double log_multiplier_J(long long k, double eta, double t, const MultiplierParams& mp,
                        JVariant variant);
double multiplier_J(long long k, double eta, double t, const MultiplierParams& mp,
                    JVariant variant);

/// Decomposition of dt A / A = lambda_dot |k,eta|^s - (dtw/w)(A~/A) - dtm/m.
struct ADecomposition {
    double lambda_term = 0.0; ///< lambda_dot * |k,eta|^s  (<= 0)
    double w_term = 0.0;      ///< -(dtw/w) * (A~/A)       (<= 0)
    double m_term = 0.0;      ///< -dtm/m                  (< 0 for k != 0)
    double total() const { return lambda_term + w_term + m_term; }
};

/// log A_k(t,eta) (or A~, A^v). lambda_t is lambda(t) from a LambdaFn; the
/// convenience overload below evaluates it internally.
///   A   = <k,eta>^sigma e^{lambda(t)|k,eta|^s} m^{-1} J
///   A~  = same with J~
///   A^v = <eta>^sigma e^{lambda(t)|eta|^s} J^v      (k ignored, no m)
double log_multiplier_A(long long k, double eta, double t, double lambda_t,
                        const MultiplierParams& mp, AVariant variant);
double multiplier_A(long long k, double eta, double t, const MultiplierParams& mp,
                    AVariant variant);

/// dt A / A decomposition at (k,eta,t); needs lambda(t) and lambda_dot(t).
ADecomposition dt_log_A(long long k, double eta, double t, double lambda_t, double lambda_dot,
                        const MultiplierParams& mp);

/// log-add-exp helper: log(e^a + e^b) without overflow.
inline double log_add_exp(double a, double b) {
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

/// <a> = sqrt(1 + a^2); <k,eta> = sqrt(1 + k^2 + eta^2); |k,eta| = |k| + |eta|.
inline double jap(double a) { return std::sqrt(1.0 + a * a); }
inline double jap2(double k, double eta) { return std::sqrt(1.0 + k * k + eta * eta); }
inline double knorm(double k, double eta) { return std::abs(k) + std::abs(eta); }

} // namespace bqc
