#pragma once

// Two-level non-Hermitian dynamics for H = J sx - i(gamma/2) sz: normalized
// density-matrix propagation, the equivalent nonlinear Bloch flow, closed-form
// geodesic solutions, fixed points and regime classification.

#include <cmath>
#include <vector>

#include "ptlgi/ode.hpp"
#include "ptlgi/smallmat.hpp"

namespace ptlgi {

struct PTParams {
    double J = 1.0;
    double gamma = 0.0;

    PTParams() = default;
    PTParams(double J_, double gamma_) : J(J_), gamma(gamma_) {
        if (!(J > 0.0) || !std::isfinite(J))
            throw std::invalid_argument("PTParams: J must be positive");
        if (!(gamma >= 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("PTParams: gamma must be >= 0");
    }

    Vec3 a_vec() const { return {J, 0.0, 0.0}; }
    Vec3 b_vec() const { return {0.0, 0.0, 0.5 * gamma}; }
};

enum class Regime { Symmetric, Exceptional, Broken };

inline Regime regime(const PTParams& p) {
    const double eps = 1e-9 * p.J;
    if (std::abs(p.gamma - 2.0 * p.J) <= eps) return Regime::Exceptional;
    return p.gamma < 2.0 * p.J ? Regime::Symmetric : Regime::Broken;
}

inline Mat2 hamiltonian(const PTParams& p) {
    Mat2 h;
    h(0, 0) = cplx(0.0, -0.5 * p.gamma);
    h(0, 1) = p.J;
    h(1, 0) = p.J;
    h(1, 1) = cplx(0.0, 0.5 * p.gamma);
    return h;
}

struct BlochVector {
    double x = 0, y = 0, z = 0;

    double length() const { return std::sqrt(x * x + y * y + z * z); }
    friend BlochVector operator-(BlochVector a, BlochVector b) {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
};

inline double distance(BlochVector a, BlochVector b) { return (a - b).length(); }

struct PureState2 {
    cplx c0, c1;

    // |psi> = [cos(theta/2) e^{i phi}, sin(theta/2)]
    static PureState2 from_angles(double theta, double phi) {
        return {std::cos(0.5 * theta) * std::exp(cplx(0.0, phi)),
                std::sin(0.5 * theta)};
    }

    double norm_sq() const { return std::norm(c0) + std::norm(c1); }

    BlochVector bloch() const {
        const cplx cross = std::conj(c0) * c1;
        const double n = norm_sq();
        return {cross.real() / n, cross.imag() / n,
                0.5 * (std::norm(c0) - std::norm(c1)) / n};
    }

    Mat2 density() const {
        Mat2 r;
        const double n = norm_sq();
        r(0, 0) = std::norm(c0) / n;
        r(0, 1) = c0 * std::conj(c1) / n;
        r(1, 0) = std::conj(r(0, 1));
        r(1, 1) = std::norm(c1) / n;
        return r;
    }
};

inline BlochVector bloch_from_density(const Mat2& rho) {
    return {0.5 * (rho(0, 1) + rho(1, 0)).real(),
            0.5 * (cplx(0, 1) * (rho(0, 1) - rho(1, 0))).real(),
            0.5 * (rho(0, 0) - rho(1, 1)).real()};
}

inline Mat2 density_from_bloch(BlochVector s) {
    Mat2 r;
    r(0, 0) = 0.5 + s.z;
    r(0, 1) = cplx(s.x, -s.y);
    r(1, 0) = cplx(s.x, s.y);
    r(1, 1) = 0.5 - s.z;
    return r;
}

struct EvolvedDensity {
    Mat2 rho;
    // Trace of U_s rho U_s^dag with the scaled propagator (entries O(1)).
    // Values near machine epsilon mean the surviving component fell below the
    // rounding noise of the O(1) intermediates and rho is unreliable.
    double scaled_trace = 0;
};

// rho_t = U rho0 U^dag / tr(U rho0 U^dag), U = exp(-i H t). Uses the scaled
// exponential so broken-phase amplification never overflows; the scale cancels
// in the normalization. The output is re-Hermitized.
inline EvolvedDensity evolve_density_scaled(const Mat2& rho0, double t,
                                            const PTParams& p) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::domain_error("evolve_density: t must be finite and >= 0");
    const Mat2 h = hamiltonian(p);
    const ScaledExp2 u = expm2_scaled(cplx(0.0, -t) * h);
    const Mat2 w = u.m * rho0 * dagger(u.m);
    const double tr = trace(w).real();
    if (!(tr > 1e-300))
        throw evolution_degenerate_error("evolve_density: propagated trace underflow");
    const Mat2 rho = cplx(1.0 / tr) * w;
    return {cplx(0.5) * (rho + dagger(rho)), tr};
}

inline Mat2 evolve_density(const Mat2& rho0, double t, const PTParams& p) {
    return evolve_density_scaled(rho0, t, p).rho;
}

// dS/dt = 2 A x S - B + 4 (B.S) S
inline Vec3 bloch_rhs(BlochVector s, const PTParams& p) {
    const Vec3 sv{s.x, s.y, s.z};
    const Vec3 a = p.a_vec();
    const Vec3 b = p.b_vec();
    const Vec3 rot = cross(a, sv);
    const double bs = dot(b, sv);
    return {2.0 * rot.x - b.x + 4.0 * bs * sv.x, 2.0 * rot.y - b.y + 4.0 * bs * sv.y,
            2.0 * rot.z - b.z + 4.0 * bs * sv.z};
}

struct TrajectoryPoint {
    double t;
    BlochVector s;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    bool uniform_grid = false;
    double dt = 0.0;
};

namespace detail {

inline void require_pure_bloch(BlochVector s, double tol) {
    if (std::abs(s.length() - 0.5) > tol)
        throw std::domain_error("bloch state is not on the pure-state sphere");
}

inline OdeControls bloch_controls(const PTParams& p, double tol) {
    OdeControls ctl;
    ctl.abs_tol = tol;
    ctl.rel_tol = tol;
    ctl.max_step = 0.05 / std::max(p.J, p.gamma);
    return ctl;
}

inline void check_bloch_tol(double tol) {
    if (!(tol >= 1e-12 && tol <= 1e-6))
        throw std::domain_error("bloch integration tol must lie in [1e-12, 1e-6]");
}

}  // namespace detail

inline constexpr double bloch_ode_default_tol = 1e-9;

// Adaptive RK45 trajectory of the Bloch flow; points are the accepted steps.
inline Trajectory evolve_bloch_numeric(BlochVector s0, double t_end, double tol,
                                       const PTParams& p) {
    detail::check_bloch_tol(tol);
    detail::require_pure_bloch(s0, 1e-9);
    Trajectory traj;
    auto rhs = [&p](double, const std::array<double, 3>& y) {
        const Vec3 d = bloch_rhs({y[0], y[1], y[2]}, p);
        return std::array<double, 3>{d.x, d.y, d.z};
    };
    rk45_integrate(rhs, std::array<double, 3>{s0.x, s0.y, s0.z}, 0.0, t_end,
                   detail::bloch_controls(p, tol),
                   [&traj](double t, std::array<double, 3>& y) {
                       traj.points.push_back({t, {y[0], y[1], y[2]}});
                   });
    return traj;
}

inline BlochVector evolve_bloch_at(BlochVector s0, double t, double tol,
                                   const PTParams& p) {
    detail::check_bloch_tol(tol);
    detail::require_pure_bloch(s0, 1e-9);
    auto rhs = [&p](double, const std::array<double, 3>& y) {
        const Vec3 d = bloch_rhs({y[0], y[1], y[2]}, p);
        return std::array<double, 3>{d.x, d.y, d.z};
    };
    const auto y = rk45_integrate(rhs, std::array<double, 3>{s0.x, s0.y, s0.z}, 0.0, t,
                                  detail::bloch_controls(p, tol));
    return {y[0], y[1], y[2]};
}

// Uniform-grid trajectory with floor(t_end/dt_out)+1 rows.
inline Trajectory evolve_bloch_sampled(BlochVector s0, double t_end, double dt_out,
                                       double tol, const PTParams& p) {
    detail::check_bloch_tol(tol);
    detail::require_pure_bloch(s0, 1e-9);
    if (!(dt_out > 0.0)) throw std::domain_error("dt_out must be positive");
    Trajectory traj;
    traj.uniform_grid = true;
    traj.dt = dt_out;
    auto rhs = [&p](double, const std::array<double, 3>& y) {
        const Vec3 d = bloch_rhs({y[0], y[1], y[2]}, p);
        return std::array<double, 3>{d.x, d.y, d.z};
    };
    const auto ctl = detail::bloch_controls(p, tol);
    std::array<double, 3> y{s0.x, s0.y, s0.z};
    // snapped floor so near-integer quotients like 0.3/0.1 keep the last row
    const std::size_t n =
        static_cast<std::size_t>(std::floor(t_end / dt_out + 1e-9));
    traj.points.push_back({0.0, s0});
    for (std::size_t k = 1; k <= n; ++k) {
        const double t0 = (k - 1) * dt_out;
        const double t1 = k * dt_out;
        y = rk45_integrate(rhs, y, t0, t1, ctl);
        traj.points.push_back({t1, {y[0], y[1], y[2]}});
    }
    return traj;
}

// S_n(0) (A + 2 B S_n(0)); the sign selects the geodesic branch taken from
// the initial point (on the geodesic, dS_B/dt(0) = -2 * this value).
inline double path_coefficient(double sn0, const PTParams& p) {
    if (std::abs(sn0) > 0.5 + 1e-9)
        throw std::domain_error("path_coefficient: |S_n| must be <= 1/2");
    return sn0 * (p.J + p.gamma * sn0);
}

struct GeodesicPoint {
    double sb_abs;  // |S_B|; the printed closed form fixes only the magnitude
    double sn;      // signed S_n
};

namespace detail {

// tan(z)/z, entire across z = 0, saturating for large imaginary argument
// (broken regime) where tan(z) -> i sign(Im z).
inline cplx tanc(cplx z) {
    const double az = std::abs(z);
    if (az < 1e-5) {
        const cplx z2 = z * z;
        return 1.0 + z2 / 3.0 + 2.0 * z2 * z2 / 15.0;
    }
    if (std::abs(z.imag()) > 20.0)
        return cplx(0.0, z.imag() > 0 ? 1.0 : -1.0) / z;
    return std::tan(z) / z;
}

struct GeodesicSolution {
    double p0, q0;     // homogeneous tangent-half-angle coordinates at t = 0
    double A, B;       // |A| = J, |B| = gamma/2
    bool fixed_point;  // state sits on the stationary family A + 2B S_n = 0
    double sb0, sn0;
};

// The geodesic flow reduces to the Riccati equation dY/dt = (A+B) + (A-B) Y^2
// in Y = sqrt((A+B)/(A-B)) tan(w(t+C)), w = sqrt(A^2-B^2), with
// S_B = -Y/(1+Y^2), S_n = -(1/2)(Y^2-1)/(Y^2+1). Y(0) is fixed by the initial
// data; evaluation is done homogeneously so poles of tan are harmless and one
// complex code path covers the symmetric, exceptional and broken regimes.
inline GeodesicSolution geodesic_setup(double sb0, double sn0, const PTParams& p) {
    const double A = p.J;
    const double B = 0.5 * p.gamma;
    const double circle = sb0 * sb0 + sn0 * sn0;
    if (std::abs(circle - 0.25) > 1e-9)
        throw std::domain_error("analytic_SB_Sn: initial data off the S_A=0 geodesic");
    const double u = std::sqrt(std::max(0.0, 1.0 - 2.0 * sn0));
    const double v = std::sqrt(std::max(0.0, 1.0 + 2.0 * sn0));
    // C is determined by S_n(0); its consistency with S_B(0) is a contract.
    if (std::abs(0.5 * u * v - std::abs(sb0)) > 1e-8)
        throw std::domain_error("analytic_SB_Sn: S_B(0) inconsistent with S_n(0)");
    GeodesicSolution g;
    g.A = A;
    g.B = B;
    g.sb0 = sb0;
    g.sn0 = sn0;
    g.fixed_point = std::abs(A + 2.0 * B * sn0) <= 1e-12 * (A + 2.0 * B);
    const double sign_y0 = sb0 > 0.0 ? -1.0 : 1.0;
    g.p0 = sign_y0 * u;
    g.q0 = v;
    return g;
}

inline GeodesicPoint geodesic_eval(const GeodesicSolution& g, double t, double* sb_signed) {
    if (g.fixed_point) {
        if (sb_signed) *sb_signed = g.sb0;
        return {std::abs(g.sb0), g.sn0};
    }
    const cplx w = std::sqrt(cplx(g.A * g.A - g.B * g.B));
    const cplx tauc_c = t * tanc(w * t);  // tan(wt)/w
    if (std::abs(tauc_c.imag()) > 1e-10 * std::max(1.0, std::abs(tauc_c.real())))
        throw inconsistency_error("analytic_SB_Sn: imaginary residue in tan(wt)/w");
    const double tau = tauc_c.real();
    double P, Q;
    if (!std::isfinite(tau)) {  // exactly at a tan pole
        P = (g.A + g.B) * g.q0;
        Q = -(g.A - g.B) * g.p0;
    } else {
        P = g.p0 + (g.A + g.B) * tau * g.q0;
        Q = g.q0 - (g.A - g.B) * tau * g.p0;
        const double m = std::max(std::abs(P), std::abs(Q));
        if (m > 1e100) {
            P /= m;
            Q /= m;
        }
    }
    const double d = P * P + Q * Q;
    const double sn = -0.5 * (P * P - Q * Q) / d;
    const double sb = -P * Q / d;
    if (sb_signed) *sb_signed = sb;
    return {std::abs(sb), sn};
}

}  // namespace detail

// Closed-form geodesic solution evaluated from (S_B(0), S_n(0)). Returns |S_B|
// and the signed S_n; the sign of S_B must be reconstructed by continuity.
inline GeodesicPoint analytic_SB_Sn(double sb0, double sn0, double t, const PTParams& p) {
    const auto g = detail::geodesic_setup(sb0, sn0, p);
    return detail::geodesic_eval(g, t, nullptr);
}

// Signed variant following the branch through the initial condition; used by
// the cross-validation suites.
inline double analytic_SB_signed(double sb0, double sn0, double t, const PTParams& p) {
    const auto g = detail::geodesic_setup(sb0, sn0, p);
    double sb = 0;
    detail::geodesic_eval(g, t, &sb);
    return sb;
}

struct FixedPoints {
    BlochVector source;
    BlochVector sink;
    bool degenerate = false;  // coalesced at the exceptional point
    bool attracting = false;  // true only in the broken regime
};

inline BlochVector bloch_from_eigvec(const std::array<cplx, 2>& v) {
    const cplx cross = std::conj(v[0]) * v[1];
    return {cross.real(), cross.imag(), 0.5 * (std::norm(v[0]) - std::norm(v[1]))};
}

// Bloch vectors of the right eigenstates of H. In the broken regime the sink
// is the eigenstate whose eigenvalue has the larger imaginary part (its
// propagator weight dominates under normalization); in the symmetric regime
// both are centers and the labels order by Re(eigenvalue).
inline FixedPoints fixed_points(const PTParams& p) {
    const Eig2 e = eig2(hamiltonian(p));
    FixedPoints fp;
    if (e.degenerate) {
        fp.source = fp.sink = bloch_from_eigvec(e.first.vec);
        fp.degenerate = true;
        fp.attracting = false;
        return fp;
    }
    fp.attracting = regime(p) == Regime::Broken;
    const bool first_is_sink = fp.attracting
                                   ? e.first.value.imag() > e.second.value.imag()
                                   : e.first.value.real() < e.second.value.real();
    const auto& sink_pair = first_is_sink ? e.first : e.second;
    const auto& source_pair = first_is_sink ? e.second : e.first;
    fp.sink = bloch_from_eigvec(sink_pair.vec);
    fp.source = bloch_from_eigvec(source_pair.vec);
    return fp;
}

}  // namespace ptlgi
