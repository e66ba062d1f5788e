#pragma once

// Independent reference implementations used only by tests. These must not
// share code paths with the library routines they check.

#include <random>

#include "ptlgi/dynamics.hpp"
#include "ptlgi/lgi.hpp"
#include "ptlgi/smallmat.hpp"

namespace oracles {

using ptlgi::cplx;
using ptlgi::Mat2;

// Scaling-and-squaring 30-term Taylor exponential.
inline Mat2 expm2_taylor(const Mat2& m) {
    double maxabs = 0;
    for (const auto& z : m.a) maxabs = std::max(maxabs, std::abs(z));
    int squarings = 0;
    double s = 1.0;
    while (maxabs * s > 0.25) {
        s *= 0.5;
        ++squarings;
    }
    const Mat2 ms = cplx(s) * m;
    Mat2 sum = Mat2::identity();
    Mat2 term = Mat2::identity();
    for (int k = 1; k <= 30; ++k) {
        term = cplx(1.0 / k) * (term * ms);
        sum = sum + term;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

inline Mat2 random_mat2(std::mt19937_64& rng, double scale = 1.0) {
    auto u = [&rng] { return 2.0 * ptlgi::uniform01(rng) - 1.0; };
    Mat2 m;
    for (auto& z : m.a) z = scale * cplx(u(), u());
    return m;
}

inline ptlgi::BlochVector random_pure_bloch(std::mt19937_64& rng) {
    const double theta = ptlgi::pi * ptlgi::uniform01(rng);
    const double phi = 2.0 * ptlgi::pi * ptlgi::uniform01(rng);
    return ptlgi::PureState2::from_angles(theta, phi).bloch();
}

// Pure-state-amplitude route to K3: every branch is tracked as a normalized
// state vector, collapses project onto measurement eigenvectors, and joint
// probabilities come from squared amplitudes. Independent of the
// density-matrix collapse pipeline in the library.
inline double k3_amplitude_oracle(const ptlgi::LGIConfig& cfg, const ptlgi::PTParams& p) {
    using namespace ptlgi;
    using Vec2 = std::array<cplx, 2>;
    const Mat2 h = hamiltonian(p);
    auto evolve = [&](const Vec2& v, double t) {
        const Mat2 u = expm2_scaled(cplx(0.0, -t) * h).m;
        Vec2 w{u(0, 0) * v[0] + u(0, 1) * v[1], u(1, 0) * v[0] + u(1, 1) * v[1]};
        const double n = std::sqrt(std::norm(w[0]) + std::norm(w[1]));
        return Vec2{w[0] / n, w[1] / n};
    };
    // eigenvectors of n.sigma: up = (cos(t/2), e^{i phi} sin(t/2))
    const Vec2 up{std::cos(0.5 * cfg.theta_m),
                  std::exp(cplx(0.0, cfg.phi_m)) * std::sin(0.5 * cfg.theta_m)};
    const Vec2 down{-std::conj(up[1]), std::conj(up[0])};
    auto overlap2 = [](const Vec2& a, const Vec2& b) {
        return std::norm(std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]);
    };
    const PureState2 psi0 = PureState2::from_angles(cfg.theta, cfg.phi);
    const Vec2 v0{psi0.c0, psi0.c1};
    auto correlator = [&](double ti, double tj) {
        const Vec2 vi = evolve(v0, ti);
        double c = 0;
        const Vec2* eig[2] = {&up, &down};
        for (int a = 0; a < 2; ++a) {
            const double pa = overlap2(*eig[a], vi);
            if (pa < 1e-14) continue;
            const Vec2 vj = evolve(*eig[a], tj - ti);
            for (int b = 0; b < 2; ++b) {
                const double pb = overlap2(*eig[b], vj);
                c += (a == b ? 1.0 : -1.0) * pa * pb;
            }
        }
        return c;
    };
    return correlator(0.0, cfg.t2) + correlator(cfg.t2, cfg.t3) -
           correlator(0.0, cfg.t3);
}

}  // namespace oracles
