#pragma once

// Speed of evolution along pure-state trajectories: the three squared
// components, the closed-form extremes on the S_A = 0 geodesic, and the
// order-parameter scan across the PT transition.

#include <cmath>
#include <vector>

#include "ptlgi/dynamics.hpp"

namespace ptlgi {

struct SpeedSample {
    double t = 0;
    double v1_sq = 0;
    double v2_sq = 0;
    double v3_sq = 0;  // signed: -i<[A.sigma, B.sigma]> = 2 J gamma S_n
    double v = 0;
};

// v1^2 = J^2 (1 - 4 Sx^2), v2^2 = (gamma^2/4)(1 - 4 Sz^2), v3^2 = 2 J gamma S_n
// with S_n = -S_y. Only the sum is ever rooted; round-off negatives above
// -1e-10 clamp to zero, anything lower signals a corrupted state. The summed
// form cancels to sqrt(eps) noise where v vanishes (the broken-phase fixed
// points), so v itself is evaluated through the on-sphere identity
// v = |dS/dt|, which is exact there.
inline SpeedSample speed_components(BlochVector s, const PTParams& p) {
    detail::require_pure_bloch(s, 1e-7);
    SpeedSample out;
    out.v1_sq = std::max(0.0, p.J * p.J * (1.0 - 4.0 * s.x * s.x));
    out.v2_sq = std::max(0.0, 0.25 * p.gamma * p.gamma * (1.0 - 4.0 * s.z * s.z));
    out.v3_sq = 2.0 * p.J * p.gamma * (-s.y);
    const double sum = out.v1_sq + out.v2_sq + out.v3_sq;
    if (sum < -1e-10)
        throw inconsistency_error("speed_components: v^2 below round-off floor");
    out.v = norm(bloch_rhs(s, p));
    return out;
}

inline std::vector<SpeedSample> speed_along_trajectory(const Trajectory& traj,
                                                       const PTParams& p) {
    std::vector<SpeedSample> out;
    out.reserve(traj.points.size());
    for (const auto& pt : traj.points) {
        SpeedSample s = speed_components(pt.s, p);
        s.t = pt.t;
        out.push_back(s);
    }
    return out;
}

// Finite-difference speed from |<psi(t)|psi(t+delta)>|^2 = 1 - v^2 delta^2 + ...
// For pure states the fidelity is tr(rho(t) rho(t+delta)). Cross-validation
// hook for the algebraic components.
inline double speed_fidelity_fd(BlochVector s, const PTParams& p, double delta = 1e-5) {
    detail::require_pure_bloch(s, 1e-7);
    const Mat2 rho = density_from_bloch(s);
    const Mat2 rho_d = evolve_density(rho, delta, p);
    const double fid = trace(rho * rho_d).real();
    return std::sqrt(std::max(0.0, 1.0 - fid)) / delta;
}

struct SpeedExtremes {
    double v_max = 0;
    double v_min = 0;
    BlochVector argmax_state;
    BlochVector argmin_state;
};

namespace detail {

inline BlochVector geodesic_state(double alpha) {
    return {0.0, -0.5 * std::sin(alpha), 0.5 * std::cos(alpha)};
}

template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
    static const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

// Scans the S_A = 0 circle S = (0, -sin(a)/2, cos(a)/2); there
// v(a) = |J + (gamma/2) sin a|, so v_max = J + gamma/2 and
// v_min = max(0, J - gamma/2). Grid extremes are polished by golden section.
inline SpeedExtremes geodesic_extremes(const PTParams& p, int n_samples = 10000) {
    if (n_samples < 100)
        throw std::domain_error("geodesic_extremes: n_samples must be >= 100");
    auto v_of = [&p](double a) { return speed_components(detail::geodesic_state(a), p).v; };
    const double da = 2.0 * pi / n_samples;
    int imax = 0, imin = 0;
    double vmax = -1.0, vmin = 1e300;
    for (int i = 0; i < n_samples; ++i) {
        const double v = v_of(i * da);
        if (v > vmax) {
            vmax = v;
            imax = i;
        }
        if (v < vmin) {
            vmin = v;
            imin = i;
        }
    }
    auto neg_v = [&](double a) { return -v_of(a); };
    const double amax =
        detail::golden_section(neg_v, (imax - 1) * da, (imax + 1) * da, 1e-10);
    const double amin = detail::golden_section(v_of, (imin - 1) * da, (imin + 1) * da, 1e-10);
    SpeedExtremes out;
    out.argmax_state = detail::geodesic_state(amax);
    out.argmin_state = detail::geodesic_state(amin);
    out.v_max = v_of(amax);
    out.v_min = v_of(amin);
    return out;
}

struct OrderParamRow {
    double gamma;
    double v_max;
    double v_min;
};

inline std::vector<OrderParamRow> order_parameter_scan(const std::vector<double>& gammas,
                                                       const PTParams& p_base,
                                                       int n_samples = 10000) {
    std::vector<OrderParamRow> rows;
    rows.reserve(gammas.size());
    for (double g : gammas) {
        const SpeedExtremes e = geodesic_extremes(PTParams(p_base.J, g), n_samples);
        rows.push_back({g, e.v_max, e.v_min});
    }
    return rows;
}

// Falsification hook: brute v_max over the whole pure-state sphere (grid plus
// local refinement). The geodesic already carries the global maximum; this
// scan exists to check that claim rather than to be fast.
inline double full_sphere_vmax(const PTParams& p, int n_theta = 721, int n_phi = 1440) {
    auto v_of = [&p](double th, double ph) {
        const BlochVector s{0.5 * std::sin(th) * std::cos(ph),
                            0.5 * std::sin(th) * std::sin(ph), 0.5 * std::cos(th)};
        return speed_components(s, p).v;
    };
    double best = -1.0, bth = 0.0, bph = 0.0;
    for (int i = 0; i <= n_theta; ++i) {
        const double th = pi * i / n_theta;
        for (int j = 0; j < n_phi; ++j) {
            const double ph = 2.0 * pi * j / n_phi;
            const double v = v_of(th, ph);
            if (v > best) {
                best = v;
                bth = th;
                bph = ph;
            }
        }
    }
    double dth = pi / n_theta, dph = 2.0 * pi / n_phi;
    for (int round = 0; round < 40; ++round) {
        for (int i = -2; i <= 2; ++i)
            for (int j = -2; j <= 2; ++j) {
                const double th = std::min(pi, std::max(0.0, bth + i * dth / 2));
                const double ph = bph + j * dph / 2;
                const double v = v_of(th, ph);
                if (v > best) {
                    best = v;
                    bth = th;
                    bph = ph;
                }
            }
        dth /= 2;
        dph /= 2;
    }
    return best;
}

}  // namespace ptlgi
