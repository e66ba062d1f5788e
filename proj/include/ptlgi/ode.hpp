#pragma once

// Embedded Dormand-Prince 5(4) stepper over fixed-size state arrays
// (real or complex elements). Step-size control is the usual PI-free
// 0.9 * err^(-1/5) rule with safety clamps.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>

#include "ptlgi/common.hpp"

namespace ptlgi {

namespace detail {
inline double abs_of(double x) { return std::abs(x); }
inline double abs_of(const std::complex<double>& x) { return std::abs(x); }
}  // namespace detail

struct OdeControls {
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    double max_step = 0.1;
    double min_step = 1e-14;  // below this the problem is declared stiff
    double initial_step = 0.0;  // 0 -> max_step/10
};

// Integrates y' = rhs(t, y) from t0 to t1. on_accept(t, y) fires after the
// initial point and every accepted step (t strictly increasing, ends at t1);
// it may project y, in which case the next stage restarts from the projected
// state.
template <typename T, std::size_t N, typename Rhs, typename OnAccept>
std::array<T, N> rk45_integrate(Rhs&& rhs, std::array<T, N> y, double t0, double t1,
                                const OdeControls& ctl, OnAccept&& on_accept) {
    using State = std::array<T, N>;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                            e4 = b4 - 393.0 / 640, e5 = b5 - -92097.0 / 339200,
                            e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

    if (t1 < t0) throw std::domain_error("rk45: t1 < t0");
    on_accept(t0, y);
    if (t1 == t0) return y;

    double t = t0;
    double h = ctl.initial_step > 0 ? ctl.initial_step : ctl.max_step / 10.0;
    h = std::min(h, t1 - t0);

    State k1 = rhs(t, y);
    State k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, yt{}, ynew{};

    while (t < t1) {
        if (t1 - t < ctl.min_step) break;  // sub-resolution tail from rounding
        h = std::min(h, t1 - t);
        if (h < ctl.min_step)
            throw stiffness_error("rk45: step size underflow at t=" + std::to_string(t));

        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + T(h * a21) * k1[i];
        k2 = rhs(t + c2 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + T(h) * (T(a31) * k1[i] + T(a32) * k2[i]);
        k3 = rhs(t + c3 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + T(h) * (T(a41) * k1[i] + T(a42) * k2[i] + T(a43) * k3[i]);
        k4 = rhs(t + c4 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + T(h) * (T(a51) * k1[i] + T(a52) * k2[i] + T(a53) * k3[i] +
                                   T(a54) * k4[i]);
        k5 = rhs(t + c5 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + T(h) * (T(a61) * k1[i] + T(a62) * k2[i] + T(a63) * k3[i] +
                                   T(a64) * k4[i] + T(a65) * k5[i]);
        k6 = rhs(t + h, yt);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + T(h) * (T(b1) * k1[i] + T(b3) * k3[i] + T(b4) * k4[i] +
                                     T(b5) * k5[i] + T(b6) * k6[i]);
        k7 = rhs(t + h, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const T ei = T(h) * (T(e1) * k1[i] + T(e3) * k3[i] + T(e4) * k4[i] +
                                 T(e5) * k5[i] + T(e6) * k6[i] + T(e7) * k7[i]);
            const double sc =
                ctl.abs_tol +
                ctl.rel_tol * std::max(detail::abs_of(y[i]), detail::abs_of(ynew[i]));
            err = std::max(err, detail::abs_of(ei) / sc);
        }

        if (err <= 1.0) {
            t += h;
            y = ynew;
            on_accept(t, y);
            k1 = rhs(t, y);  // recomputed in case on_accept projected y
        }
        const double factor =
            (err <= 0.0) ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
        h = std::min(h * factor, ctl.max_step);
    }
    return y;
}

template <typename T, std::size_t N, typename Rhs>
std::array<T, N> rk45_integrate(Rhs&& rhs, const std::array<T, N>& y0, double t0,
                                double t1, const OdeControls& ctl) {
    return rk45_integrate(rhs, y0, t0, t1, ctl,
                          [](double, std::array<T, N>&) {});
}

}  // namespace ptlgi
