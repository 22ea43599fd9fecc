#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bqc {

/// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) on a small state
/// vector. Integrates from t0 to t1 (either direction), hitting every time
/// in `samples` exactly; `on_sample` receives the state there.
///
/// `max_step(t)` caps |h| (use it to keep steps small near a critical time);
/// pass nullptr for no cap. Throws on non-finite state, reporting the time.
template <int N>
class Rk45 {
  public:
    using State = std::array<double, N>;
    using Rhs = std::function<void(double t, const State& y, State& dy)>;
    using StepCap = std::function<double(double t)>;

    Rk45(Rhs rhs, double rtol, double atol) : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {}

    void integrate(State& y, double t0, double t1, const std::vector<double>& samples,
                   const std::function<void(double, const State&)>& on_sample,
                   const StepCap& max_step = nullptr) {
        const double dir = (t1 >= t0) ? 1.0 : -1.0;
        double t = t0;
        double h = dir * initial_step(t0, y);
        std::size_t next = 0;
        while (next < samples.size() && dir * (samples[next] - t0) <= 0.0) {
            on_sample(samples[next], y);
            ++next;
        }
        State k1, k2, k3, k4, k5, k6, k7, ytmp, y5, y4;
        rhs_(t, y, k1);
        while (dir * (t1 - t) > 0.0) {
            double hmax = dir * (t1 - t);
            if (max_step) hmax = std::min(hmax, max_step(t));
            if (next < samples.size()) hmax = std::min(hmax, dir * (samples[next] - t) + 1e-14);
            h = dir * std::min(std::abs(h), std::max(hmax, 1e-14));

            // Dormand-Prince tableau
            stage(y, k1, 0.2 * h, ytmp);
            rhs_(t + 0.2 * h, ytmp, k2);
            combine(y, {3.0 / 40 * h, 9.0 / 40 * h}, {&k1, &k2}, ytmp);
            rhs_(t + 0.3 * h, ytmp, k3);
            combine(y, {44.0 / 45 * h, -56.0 / 15 * h, 32.0 / 9 * h}, {&k1, &k2, &k3}, ytmp);
            rhs_(t + 0.8 * h, ytmp, k4);
            combine(y,
                    {19372.0 / 6561 * h, -25360.0 / 2187 * h, 64448.0 / 6561 * h,
                     -212.0 / 729 * h},
                    {&k1, &k2, &k3, &k4}, ytmp);
            rhs_(t + 8.0 / 9.0 * h, ytmp, k5);
            combine(y,
                    {9017.0 / 3168 * h, -355.0 / 33 * h, 46732.0 / 5247 * h, 49.0 / 176 * h,
                     -5103.0 / 18656 * h},
                    {&k1, &k2, &k3, &k4, &k5}, ytmp);
            rhs_(t + h, ytmp, k6);
            combine(y,
                    {35.0 / 384 * h, 0.0, 500.0 / 1113 * h, 125.0 / 192 * h, -2187.0 / 6784 * h,
                     11.0 / 84 * h},
                    {&k1, &k2, &k3, &k4, &k5, &k6}, y5);
            rhs_(t + h, y5, k7);
            combine(y,
                    {5179.0 / 57600 * h, 0.0, 7571.0 / 16695 * h, 393.0 / 640 * h,
                     -92097.0 / 339200 * h, 187.0 / 2100 * h, 1.0 / 40 * h},
                    {&k1, &k2, &k3, &k4, &k5, &k6, &k7}, y4);

            double err = 0.0;
            for (int i = 0; i < N; ++i) {
                double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y5[i]));
                double e = (y5[i] - y4[i]) / sc;
                err += e * e;
            }
            err = std::sqrt(err / N);

            if (err <= 1.0 || std::abs(h) <= 1e-13 * std::max(1.0, std::abs(t))) {
                t += h;
                y = y5;
                k1 = k7; // FSAL
                for (int i = 0; i < N; ++i)
                    if (!std::isfinite(y[i]))
                        throw std::runtime_error("ODE state became non-finite at t=" +
                                                 std::to_string(t));
                while (next < samples.size() && dir * (samples[next] - t) <= 1e-12) {
                    on_sample(samples[next], y);
                    ++next;
                }
            }
            double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(fac, 0.2, 5.0);
        }
        while (next < samples.size()) {
            on_sample(samples[next], y);
            ++next;
        }
    }

  private:
    void stage(const State& y, const State& k, double hk, State& out) const {
        for (int i = 0; i < N; ++i) out[i] = y[i] + hk * k[i];
    }
    void combine(const State& y, std::initializer_list<double> c,
                 std::initializer_list<const State*> ks, State& out) const {
        out = y;
        auto ci = c.begin();
        for (const State* k : ks) {
            for (int i = 0; i < N; ++i) out[i] += (*ci) * (*k)[i];
            ++ci;
        }
    }
    double initial_step(double t0, const State& y) const {
        State dy;
        rhs_(t0, y, dy);
        double ny = 0.0, nd = 0.0;
        for (int i = 0; i < N; ++i) {
            ny = std::max(ny, std::abs(y[i]));
            nd = std::max(nd, std::abs(dy[i]));
        }
        double h = (nd > 0.0) ? 0.01 * (atol_ + rtol_ * ny) / (rtol_ * nd + atol_) : 1e-3;
        return std::clamp(h, 1e-8, 0.1);
    }

    Rhs rhs_;
    double rtol_, atol_;
};

} // namespace bqc
