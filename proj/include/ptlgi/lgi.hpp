#pragma once

// Dichotomic measurements, collapse-and-evolve joint probabilities, two-time
// correlators and the three-time Leggett-Garg parameter K3 under the
// normalized non-Hermitian evolution.

#include <cmath>

#include "ptlgi/dynamics.hpp"

namespace ptlgi {

struct MeasurementDirection {
    double theta_m = 0;
    double phi_m = 0;

    Vec3 unit() const {
        return {std::sin(theta_m) * std::cos(phi_m), std::sin(theta_m) * std::sin(phi_m),
                std::cos(theta_m)};
    }
};

struct Observable {
    Mat2 q;          // n.sigma, eigenvalues +-1
    Mat2 proj_up;    // (I + Q)/2
    Mat2 proj_down;  // (I - Q)/2
};

inline Observable observable(const MeasurementDirection& n) {
    const Vec3 u = n.unit();
    Observable o;
    o.q = pauli_form(0.0, u.x, u.y, u.z);
    o.proj_up = pauli_form(0.5, 0.5 * u.x, 0.5 * u.y, 0.5 * u.z);
    o.proj_down = pauli_form(0.5, -0.5 * u.x, -0.5 * u.y, -0.5 * u.z);
    return o;
}

struct JointProbabilityTable {
    double p_uu = 0, p_ud = 0, p_du = 0, p_dd = 0;

    double sum() const { return p_uu + p_ud + p_du + p_dd; }
};

inline constexpr double collapse_branch_cutoff = 1e-14;

// Broken-phase states exponentially close to the decaying eigendirection lose
// their propagated trace under the rounding of the O(1) intermediates; below
// this floor the conditional state is noise, not physics.
inline constexpr double evolution_noise_floor = 1e-12;

// Projective measurement at ti, conditional evolution to tj, measurement at
// tj. Branches with first-outcome probability below the cutoff contribute
// exactly zero and skip the conditional evolution (no 0/0 in the normalized
// propagation). Evolutions whose scaled trace is below the double-precision
// noise floor raise an inconsistency error instead of returning noise.
inline JointProbabilityTable joint_probs(const Mat2& rho0, const Observable& obs,
                                         double ti, double tj, const PTParams& p) {
    if (!(ti >= 0.0) || !(tj > ti))
        throw std::domain_error("joint_probs: need 0 <= ti < tj");
    const EvolvedDensity at_i = evolve_density_scaled(rho0, ti, p);
    if (at_i.scaled_trace < evolution_noise_floor)
        throw inconsistency_error("joint_probs: state at ti below the noise floor");
    auto clamp01 = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    JointProbabilityTable table;
    const Mat2* projs[2] = {&obs.proj_up, &obs.proj_down};
    double* rows[2][2] = {{&table.p_uu, &table.p_ud}, {&table.p_du, &table.p_dd}};
    for (int a = 0; a < 2; ++a) {
        const double pa = clamp01(trace(*projs[a] * at_i.rho).real());
        if (pa < collapse_branch_cutoff) continue;
        const Mat2 collapsed = cplx(1.0 / pa) * (*projs[a] * at_i.rho * *projs[a]);
        const EvolvedDensity at_j = evolve_density_scaled(collapsed, tj - ti, p);
        if (at_j.scaled_trace < evolution_noise_floor)
            throw inconsistency_error(
                "joint_probs: conditional state below the noise floor");
        for (int b = 0; b < 2; ++b) {
            const double pb = trace(*projs[b] * at_j.rho).real();
            *rows[a][b] = pa * clamp01(pb);
        }
    }
    return table;
}

inline double correlation(const Mat2& rho0, const Observable& obs, double ti, double tj,
                          const PTParams& p) {
    const JointProbabilityTable t = joint_probs(rho0, obs, ti, tj, p);
    return t.p_uu + t.p_dd - t.p_ud - t.p_du;
}

struct LGIConfig {
    double theta = 0;    // initial state polar angle
    double phi = 0;      // initial state phase
    double theta_m = 0;  // measurement direction polar angle
    double phi_m = 0;    // measurement direction azimuth
    double t2 = 0;       // t1 = 0 is fixed
    double t3 = 0;
};

inline double default_t_max(const PTParams& p) { return 50.0 / p.J; }

struct K3Result {
    double c12 = 0, c23 = 0, c13 = 0;
    double k3 = 0;
    LGIConfig config;
    JointProbabilityTable table12, table23, table13;
};

// K3 = C12 + C23 - C13 with t1 = 0. Each correlator is its own experiment;
// in particular C13 involves no measurement at t2.
inline K3Result k3(const LGIConfig& cfg, const PTParams& p, double t_max = 0.0) {
    const double tmax = t_max > 0.0 ? t_max : default_t_max(p);
    if (!(cfg.t2 > 0.0 && cfg.t3 > cfg.t2 && cfg.t3 <= tmax))
        throw std::domain_error("k3: need 0 < t2 < t3 <= t_max");
    const Mat2 rho0 = PureState2::from_angles(cfg.theta, cfg.phi).density();
    const Observable obs = observable({cfg.theta_m, cfg.phi_m});
    K3Result r;
    r.config = cfg;
    r.table12 = joint_probs(rho0, obs, 0.0, cfg.t2, p);
    r.table23 = joint_probs(rho0, obs, cfg.t2, cfg.t3, p);
    r.table13 = joint_probs(rho0, obs, 0.0, cfg.t3, p);
    auto corr = [](const JointProbabilityTable& t) {
        return t.p_uu + t.p_dd - t.p_ud - t.p_du;
    };
    r.c12 = corr(r.table12);
    r.c23 = corr(r.table23);
    r.c13 = corr(r.table13);
    r.k3 = r.c12 + r.c23 - r.c13;
    return r;
}

}  // namespace ptlgi
