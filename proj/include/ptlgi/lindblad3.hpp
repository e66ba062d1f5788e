#pragma once

// Three-level Lindblad dynamics for H = J(|f><e| + |e><f|) - eps_g |g><g| with
// the single dissipator L1 = |g><f|: elementwise master equation, RK45
// integration, the closed-form solutions for the standard initial state and
// the parametric (r3, theta3, phi3) form, and post-selection onto the f-e
// block which reproduces the non-Hermitian qubit dynamics at gamma = gamma1/2.

#include <cmath>

#include "ptlgi/dynamics.hpp"
#include "ptlgi/ode.hpp"
#include "ptlgi/smallmat.hpp"

namespace ptlgi {

struct LindbladParams {
    double J = 1.0;
    double gamma1 = 0.0;
    double eps_g = 1.0;

    LindbladParams() = default;
    LindbladParams(double J_, double gamma1_, double eps_g_ = 1.0)
        : J(J_), gamma1(gamma1_), eps_g(eps_g_) {
        if (!(gamma1 >= 0.0) || !std::isfinite(gamma1))
            throw std::invalid_argument("LindbladParams: gamma1 must be >= 0");
        if (!(J > 0.0)) throw std::invalid_argument("LindbladParams: J must be positive");
    }
};

using Density3 = Mat3;

inline Mat3 h3(const LindbladParams& p) {
    Mat3 h;
    h(0, 1) = p.J;
    h(1, 0) = p.J;
    h(2, 2) = -p.eps_g;
    return h;
}

inline Mat3 l1() {
    Mat3 l;
    l(2, 0) = 1.0;
    return l;
}

// H_eff = H - i (gamma1/2) L1^dag L1. Construction is checked against the
// two-level identification: adding i (gamma1/4) diag(1,1,0) must make the
// upper block equal H_PT at gamma = gamma1/2.
inline Mat3 heff(const LindbladParams& p) {
    Mat3 h = h3(p);
    h(0, 0) -= cplx(0.0, 0.5 * p.gamma1);
    const Mat2 hpt = hamiltonian(PTParams(p.J, 0.5 * p.gamma1));
    Mat2 block;
    block(0, 0) = h(0, 0) + cplx(0.0, 0.25 * p.gamma1);
    block(0, 1) = h(0, 1);
    block(1, 0) = h(1, 0);
    block(1, 1) = h(1, 1) + cplx(0.0, 0.25 * p.gamma1);
    if (frobenius_distance(block, hpt) > 1e-12)
        throw inconsistency_error("heff: block does not reduce to the two-level form");
    return h;
}

// Elementwise master equation (basis order f, e, g).
inline Mat3 lindblad_rhs(const Density3& r, const LindbladParams& p) {
    const double J = p.J, g1 = p.gamma1, eg = p.eps_g;
    const cplx i1(0.0, 1.0);
    Mat3 d;
    d(0, 0) = i1 * J * (r(0, 1) - r(1, 0)) - g1 * r(0, 0);
    d(0, 1) = -0.5 * g1 * r(0, 1) + i1 * J * (r(0, 0) - r(1, 1));
    d(0, 2) = -i1 * (eg * r(0, 2) + J * r(1, 2)) - 0.5 * g1 * r(0, 2);
    d(1, 0) = -0.5 * g1 * r(1, 0) - i1 * J * (r(0, 0) - r(1, 1));
    d(1, 1) = -i1 * J * (r(0, 1) - r(1, 0));
    d(1, 2) = -i1 * (J * r(0, 2) + eg * r(1, 2));
    d(2, 0) = i1 * (eg * r(2, 0) + J * r(2, 1)) - 0.5 * g1 * r(2, 0);
    d(2, 1) = i1 * (J * r(2, 0) + eg * r(2, 1));
    d(2, 2) = g1 * r(0, 0);
    return d;
}

// Abstract GKSL form -i[H,rho] + gamma1 (L rho L^dag - (1/2){L^dag L, rho});
// kept as an independent route for cross-checking the elementwise form.
inline Mat3 lindblad_rhs_dissipator_form(const Density3& r, const LindbladParams& p) {
    const Mat3 h = h3(p);
    const Mat3 l = l1();
    const Mat3 ld = dagger(l);
    const Mat3 ldl = ld * l;
    const cplx i1(0.0, 1.0);
    const Mat3 comm = h * r - r * h;
    const Mat3 jump = l * r * ld;
    const Mat3 anti = ldl * r + r * ldl;
    return (cplx(-1.0) * i1) * comm + cplx(p.gamma1) * jump + cplx(-0.5 * p.gamma1) * anti;
}

// Quantum-jump split -i(H_eff rho - rho H_eff^dag) + gamma1 L rho L^dag.
inline Mat3 lindblad_rhs_jump_form(const Density3& r, const LindbladParams& p) {
    const Mat3 he = heff(p);
    const cplx i1(0.0, 1.0);
    const Mat3 nh = he * r - r * dagger(he);
    const Mat3 jump = l1() * r * dagger(l1());
    return (cplx(-1.0) * i1) * nh + cplx(p.gamma1) * jump;
}

struct IntegrationStats {
    double max_herm_drift = 0;   // removed by per-step symmetrization
    double max_trace_drift = 0;  // monitored, not corrected
    std::size_t accepted_steps = 0;
};

namespace detail {

inline std::array<cplx, 9> to_flat(const Mat3& m) { return m.a; }
inline Mat3 from_flat(const std::array<cplx, 9>& a) { return Mat3{a}; }

// Relative-dominated control: the no-jump block decays by many orders while
// rho_gg stays O(1); a plain absolute tolerance would wash out the block and
// ruin post-selected accuracy. The tiny absolute floor only guards exact
// zeros.
inline OdeControls lindblad_controls(const LindbladParams& p, double tol) {
    OdeControls ctl;
    ctl.abs_tol = 1e-20;
    ctl.rel_tol = tol;
    ctl.max_step = 0.05 / std::max(p.J, std::max(1.0, p.gamma1));
    return ctl;
}

}  // namespace detail

inline Density3 integrate(const Density3& rho0, double t, double tol,
                          const LindbladParams& p, IntegrationStats* stats = nullptr) {
    if (!(t >= 0.0)) throw std::domain_error("integrate: t must be >= 0");
    auto rhs = [&p](double, const std::array<cplx, 9>& y) {
        return detail::to_flat(lindblad_rhs(detail::from_flat(y), p));
    };
    IntegrationStats local;
    auto symmetrize = [&local](double, std::array<cplx, 9>& y) {
        Mat3 m = detail::from_flat(y);
        const Mat3 h = cplx(0.5) * (m + dagger(m));
        local.max_herm_drift = std::max(local.max_herm_drift, frobenius_distance(m, h));
        local.max_trace_drift =
            std::max(local.max_trace_drift, std::abs(trace(h) - cplx(1.0)));
        local.accepted_steps++;
        y = h.a;
    };
    const auto y = rk45_integrate(rhs, detail::to_flat(rho0), 0.0, t,
                                  detail::lindblad_controls(p, tol), symmetrize);
    if (stats) *stats = local;
    return detail::from_flat(y);
}

// Samples the integrated state on the given increasing times (t >= 0).
inline std::vector<Density3> integrate_sampled(const Density3& rho0,
                                               const std::vector<double>& times,
                                               double tol, const LindbladParams& p) {
    std::vector<Density3> out;
    out.reserve(times.size());
    Density3 cur = rho0;
    double t_prev = 0.0;
    for (double t : times) {
        if (t < t_prev) throw std::domain_error("integrate_sampled: times must increase");
        cur = integrate(cur, t - t_prev, tol, p);
        t_prev = t;
        out.push_back(cur);
    }
    return out;
}

namespace detail {

inline void require_unit_j(const LindbladParams& p, const char* who) {
    if (std::abs(p.J - 1.0) > 1e-12)
        throw std::domain_error(std::string(who) + ": closed forms assume J = 1");
}

inline void require_small_imag(cplx z, const char* who) {
    if (std::abs(z.imag()) > 1e-10 * std::max(1.0, std::abs(z.real())))
        throw inconsistency_error(std::string(who) + ": imaginary residue");
}

// sinh(x)/x with the small-argument series.
inline cplx shc(cplx x) {
    if (std::abs(x) < 1e-5) {
        const cplx x2 = x * x;
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sinh(x) / x;
}

}  // namespace detail

// Closed-form solution for the initial state (|f> + i|e>)(<f| - i<e|)/2:
// the five nonzero entries, evaluated with complex intermediates so gamma1
// below, at and above the coalescence value 4 share one code path.
inline Density3 analytic_e15(double t, double gamma1) {
    if (!(t >= 0.0)) throw std::domain_error("analytic_e15: t must be >= 0");
    const cplx om = std::sqrt(cplx(gamma1 * gamma1 - 16.0));
    // e^{-g1 t/2} cosh(t om/2) and e^{-g1 t/2} sinh(t om/2) via one-sided
    // exponentials; Re(om) < gamma1 keeps every exponent non-positive.
    const cplx qp = 0.5 * std::exp(0.5 * t * (om - gamma1));
    const cplx qm = 0.5 * std::exp(0.5 * t * (-om - gamma1));
    const double decay = std::exp(-0.5 * gamma1 * t);
    const cplx ch = qp + qm;       // e^{-g1 t/2} cosh
    const cplx sh = qp - qm;       // e^{-g1 t/2} sinh
    const double denom = 4.0 + gamma1;

    const cplx ff = 0.5 * (4.0 * decay + gamma1 * ch - om * sh) / denom;
    const cplx ee = 0.5 * (4.0 * decay + gamma1 * ch + om * sh) / denom;
    const cplx fe = cplx(0.0, -0.5) * (gamma1 * decay + 4.0 * ch) / denom;
    const cplx gg = 1.0 - (4.0 * decay + gamma1 * ch) / denom;
    detail::require_small_imag(ff, "analytic_e15");
    detail::require_small_imag(ee, "analytic_e15");
    detail::require_small_imag(gg, "analytic_e15");
    detail::require_small_imag(cplx(0.0, 1.0) * fe, "analytic_e15");

    Density3 r;
    r(0, 0) = ff.real();
    r(1, 1) = ee.real();
    r(0, 1) = cplx(0.0, fe.imag());
    r(1, 0) = std::conj(r(0, 1));
    r(2, 2) = gg.real();
    return r;
}

// Closed-form post-selected f-e block for the same initial state.
inline Mat2 analytic_postselected_e14(double t, double gamma1) {
    const cplx om = std::sqrt(cplx(gamma1 * gamma1 - 16.0));
    const cplx qp = 0.5 * std::exp(0.5 * t * (om - gamma1));
    const cplx qm = 0.5 * std::exp(0.5 * t * (-om - gamma1));
    const double decay = std::exp(-0.5 * gamma1 * t);
    const cplx ch = qp + qm;
    const cplx sh = qp - qm;
    const cplx ratio = om * sh / (4.0 * decay + gamma1 * ch);
    const cplx off = (gamma1 * gamma1 - 16.0) * decay /
                     (gamma1 * decay + 4.0 * ch);  // (g1^2-16)/(g1+4 cosh)
    const cplx fe = cplx(0.0, -2.0) / (gamma1 - off);
    detail::require_small_imag(ratio, "analytic_postselected_e14");
    detail::require_small_imag(cplx(0.0, 1.0) * fe, "analytic_postselected_e14");
    Mat2 r;
    r(0, 0) = 0.5 * (1.0 - ratio.real());
    r(1, 1) = 0.5 * (1.0 + ratio.real());
    r(0, 1) = cplx(0.0, fe.imag());
    r(1, 0) = std::conj(r(0, 1));
    return r;
}

struct ParametricForm3 {
    double r3 = 0;
    double theta3 = 0;
    double phi3 = 0;
};

// B1 parametric density matrix; eigenvalues {0, 2 r3, 1 - 2 r3}.
inline Density3 b1_density(double r3, double theta3, double phi3) {
    if (!(r3 >= -1e-12 && r3 <= 0.5 + 1e-12))
        throw std::domain_error("b1_density: r3 must lie in [0, 1/2]");
    Density3 m;
    m(0, 0) = r3 * (1.0 + std::cos(theta3));
    m(1, 1) = r3 * (1.0 - std::cos(theta3));
    m(0, 1) = std::exp(cplx(0.0, -phi3)) * r3 * std::sin(theta3);
    m(1, 0) = std::conj(m(0, 1));
    m(2, 2) = 1.0 - 2.0 * r3;
    return m;
}

inline double bloch_norm3(double r3) {
    return std::sqrt(1.0 / 3.0 - 2.0 * r3 + 4.0 * r3 * r3);
}

// Pure-state embedding of the two-level state |psi(theta,phi)> into the f-e
// block (the g level unpopulated). Matches the B1 form with r3 = 1/2,
// theta3 = theta, phi3 = -phi.
inline Density3 embed_pure(double theta, double phi) {
    const Mat2 rho = PureState2::from_angles(theta, phi).density();
    Density3 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = rho(i, j);
    return m;
}

inline Mat2 postselect(const Density3& rho3) {
    Mat2 block;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) block(i, j) = rho3(i, j);
    const double tr = trace(block).real();
    if (!(tr > 1e-300))
        throw postselect_error("postselect: f-e block trace vanished");
    return cplx(1.0 / tr) * block;
}

// Closed-form (r3, theta3, phi3) for the pure B1 initial state with Bloch
// components s1 = sin(theta) cos(phi), s2 = sin(theta) sin(phi),
// s3 = cos(theta), gamma = gamma1/2, J = 1, omega = sqrt(gamma^2 - 4).
// Written with sinh(x)/x building blocks so omega -> 0 is the plain series
// limit; every regime runs through the same complex path. The result is
// checked against the directly propagated block; a mismatch beyond 1e-5
// flags a transcription problem and raises a domain error.
inline ParametricForm3 analytic_parametric(double t, double gamma, double theta,
                                           double phi) {
    if (!(t >= 0.0)) throw std::domain_error("analytic_parametric: t must be >= 0");
    if (!(gamma >= 0.0)) throw std::domain_error("analytic_parametric: gamma must be >= 0");
    const double s1 = std::sin(theta) * std::cos(phi);
    const double s2 = std::sin(theta) * std::sin(phi);
    const double s3 = std::cos(theta);
    const cplx om = std::sqrt(cplx(gamma * gamma - 4.0));
    const cplx h1 = detail::shc(t * om);          // sinh(t om)/(t om)
    const cplx h2 = detail::shc(0.5 * t * om);    // sinh(t om/2)/(t om/2)
    const cplx big_c = std::cosh(t * om);
    const cplx t2h2sq = t * t * h2 * h2;          // 2 (cosh(t om) - 1)/om^2
    const cplx th1 = t * h1;                      // sinh(t om)/om

    const cplx big_r = 1.0 + 0.5 * gamma * (gamma - 2.0 * s2) * t2h2sq - gamma * s3 * th1;
    const cplx cos3 = (s3 * big_c + (2.0 * s2 - gamma) * th1) / big_r;
    const cplx offd =
        (cplx(s1) +
         cplx(0.0, 1.0) * (s2 + (gamma - 2.0 * s2) * t2h2sq - 2.0 * s3 * th1)) /
        big_r;
    detail::require_small_imag(big_r, "analytic_parametric");
    detail::require_small_imag(cos3, "analytic_parametric");

    ParametricForm3 out;
    out.r3 = 0.5 * std::exp(-gamma * t) * big_r.real();
    const double c3 = std::min(1.0, std::max(-1.0, cos3.real()));
    const double sin3 = std::abs(offd);
    out.theta3 = std::atan2(sin3, c3);
    out.phi3 = (sin3 > 0.0) ? std::arg(offd) : 0.0;

    // Reconstruction oracle: the block solution is
    // e^{-gamma t} M rho2(0) M^dag, M = exp(-i H_PT t) at gamma.
    const PTParams pt(1.0, gamma);
    const Mat2 rho20 = [&] {
        Mat2 m;
        m(0, 0) = 0.5 * (1.0 + s3);
        m(0, 1) = 0.5 * cplx(s1, -s2);
        m(1, 0) = std::conj(m(0, 1));
        m(1, 1) = 0.5 * (1.0 - s3);
        return m;
    }();
    const ScaledExp2 u = expm2_scaled(cplx(0.0, -t) * hamiltonian(pt));
    const double log_scale = -gamma * t + 2.0 * u.log_scale;
    const Mat2 direct = cplx(std::exp(log_scale)) * (u.m * rho20 * dagger(u.m));
    const Density3 recon = b1_density(out.r3, out.theta3, out.phi3);
    Mat2 recon_block;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) recon_block(i, j) = recon(i, j);
    if (frobenius_distance(recon_block, direct) > 1e-5)
        throw std::domain_error("analytic_parametric: reconstruction mismatch");
    return out;
}

struct EquivalenceReport {
    int n_theta = 0, n_phi = 0;
    std::vector<double> gamma1s;
    std::vector<double> times;
    double max_deviation = 0;
    double arg_theta = 0, arg_phi = 0, arg_gamma1 = 0, arg_t = 0;
};

// Frobenius distance between the post-selected 3-level evolution at gamma1
// and the two-level non-Hermitian evolution at gamma = gamma1/2, swept over
// initial states and times. This is the headline consistency check.
inline EquivalenceReport equivalence_sweep(const std::vector<double>& gamma1s,
                                           int n_theta, int n_phi,
                                           const std::vector<double>& times,
                                           double ode_tol = 1e-12) {
    if (n_theta < 2 || n_phi < 1)
        throw std::domain_error("equivalence_sweep: grid too small");
    EquivalenceReport rep;
    rep.n_theta = n_theta;
    rep.n_phi = n_phi;
    rep.gamma1s = gamma1s;
    rep.times = times;
    for (double g1 : gamma1s) {
        const LindbladParams lp(1.0, g1);
        const PTParams pt(1.0, 0.5 * g1);
        for (int i = 0; i < n_theta; ++i) {
            const double theta = pi * i / (n_theta - 1);
            for (int j = 0; j < n_phi; ++j) {
                const double phi = 2.0 * pi * j / n_phi;
                const Density3 rho3 = embed_pure(theta, phi);
                const Mat2 rho2 = PureState2::from_angles(theta, phi).density();
                const auto traj3 = integrate_sampled(rho3, times, ode_tol, lp);
                for (std::size_t k = 0; k < times.size(); ++k) {
                    const Mat2 ps = postselect(traj3[k]);
                    const Mat2 nh = evolve_density(rho2, times[k], pt);
                    const double d = frobenius_distance(ps, nh);
                    if (d > rep.max_deviation) {
                        rep.max_deviation = d;
                        rep.arg_theta = theta;
                        rep.arg_phi = phi;
                        rep.arg_gamma1 = g1;
                        rep.arg_t = times[k];
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace ptlgi
