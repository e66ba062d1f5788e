#pragma once

// Exact-size complex linear algebra for the 2x2 / 3x3 matrices this library
// lives on, including a closed-form 2x2 exponential that stays finite and
// accurate at eigenvalue coalescence.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "ptlgi/common.hpp"

namespace ptlgi {

using cplx = std::complex<double>;

inline bool is_finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

struct Vec3 {
    double x = 0, y = 0, z = 0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

template <std::size_t N>
struct SquareMat {
    std::array<cplx, N * N> a{};

    cplx& operator()(std::size_t i, std::size_t j) { return a[i * N + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a[i * N + j]; }

    static SquareMat identity() {
        SquareMat m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }

    bool finite() const {
        for (const auto& z : a)
            if (!is_finite(z)) return false;
        return true;
    }

    friend SquareMat operator+(const SquareMat& x, const SquareMat& y) {
        SquareMat r;
        for (std::size_t k = 0; k < N * N; ++k) r.a[k] = x.a[k] + y.a[k];
        return r;
    }
    friend SquareMat operator-(const SquareMat& x, const SquareMat& y) {
        SquareMat r;
        for (std::size_t k = 0; k < N * N; ++k) r.a[k] = x.a[k] - y.a[k];
        return r;
    }
    friend SquareMat operator*(cplx s, const SquareMat& x) {
        SquareMat r;
        for (std::size_t k = 0; k < N * N; ++k) r.a[k] = s * x.a[k];
        return r;
    }
    friend SquareMat operator*(const SquareMat& x, const SquareMat& y) {
        SquareMat r;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) {
                cplx s = 0;
                for (std::size_t k = 0; k < N; ++k) s += x(i, k) * y(k, j);
                r(i, j) = s;
            }
        return r;
    }
};

using Mat2 = SquareMat<2>;
using Mat3 = SquareMat<3>;

template <std::size_t N>
SquareMat<N> dagger(const SquareMat<N>& m) {
    SquareMat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r(i, j) = std::conj(m(j, i));
    return r;
}

template <std::size_t N>
cplx trace(const SquareMat<N>& m) {
    cplx s = 0;
    for (std::size_t i = 0; i < N; ++i) s += m(i, i);
    return s;
}

template <std::size_t N>
SquareMat<N> scale(cplx s, const SquareMat<N>& m) {
    return s * m;
}

template <std::size_t N>
double frobenius_distance(const SquareMat<N>& x, const SquareMat<N>& y) {
    double s = 0;
    for (std::size_t k = 0; k < N * N; ++k) s += std::norm(x.a[k] - y.a[k]);
    return std::sqrt(s);
}

template <std::size_t N>
double frobenius_norm(const SquareMat<N>& x) {
    double s = 0;
    for (const auto& z : x.a) s += std::norm(z);
    return std::sqrt(s);
}

template <std::size_t N>
bool is_hermitian(const SquareMat<N>& m, double tol = 1e-9) {
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i; j < N; ++j)
            if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    return true;
}

template <std::size_t N>
bool is_unit_trace(const SquareMat<N>& m, double tol = 1e-9) {
    return std::abs(trace(m) - cplx(1.0)) <= tol;
}

inline Mat2 sigma_x() { return Mat2{{cplx(0), cplx(1), cplx(1), cplx(0)}}; }
inline Mat2 sigma_y() { return Mat2{{cplx(0), cplx(0, -1), cplx(0, 1), cplx(0)}}; }
inline Mat2 sigma_z() { return Mat2{{cplx(1), cplx(0), cplx(0), cplx(-1)}}; }

// c*I + d.sigma with complex coefficients.
inline Mat2 pauli_form(cplx c, cplx dx, cplx dy, cplx dz) {
    Mat2 m;
    m(0, 0) = c + dz;
    m(0, 1) = dx - cplx(0, 1) * dy;
    m(1, 0) = dx + cplx(0, 1) * dy;
    m(1, 1) = c - dz;
    return m;
}

struct PauliCoeffs {
    cplx c, dx, dy, dz;
};

inline PauliCoeffs pauli_decompose(const Mat2& m) {
    PauliCoeffs p;
    p.c = 0.5 * (m(0, 0) + m(1, 1));
    p.dz = 0.5 * (m(0, 0) - m(1, 1));
    p.dx = 0.5 * (m(0, 1) + m(1, 0));
    p.dy = cplx(0, 0.5) * (m(0, 1) - m(1, 0));
    return p;
}

namespace detail {

// sinh(mu)/mu, series below the coalescence threshold to avoid 0/0.
inline cplx sinhc(cplx mu, double series_threshold) {
    if (std::abs(mu) < series_threshold) {
        const cplx mu2 = mu * mu;
        return 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0;
    }
    return std::sinh(mu) / mu;
}

}  // namespace detail

inline constexpr double expm2_series_threshold = 1e-6;

// e^M through M = c*I + d.sigma, e^M = e^c (cosh(mu) I + sinh(mu)/mu d.sigma),
// mu = sqrt(d.d). Valid for every finite M including defective ones (mu -> 0).
inline Mat2 expm2(const Mat2& m, double series_threshold = expm2_series_threshold) {
    if (!m.finite()) throw std::domain_error("expm2: non-finite input");
    const PauliCoeffs p = pauli_decompose(m);
    const cplx mu = std::sqrt(p.dx * p.dx + p.dy * p.dy + p.dz * p.dz);
    const cplx ec = std::exp(p.c);
    const cplx ch = std::cosh(mu);
    const cplx sc = detail::sinhc(mu, series_threshold);
    const Mat2 r =
        pauli_form(ec * ch, ec * sc * p.dx, ec * sc * p.dy, ec * sc * p.dz);
    if (!r.finite())
        throw std::domain_error("expm2: overflow; use expm2_scaled for large norms");
    return r;
}

// e^{M - log_scale*I} together with log_scale = Re(c) + |Re(mu)|. The scaled
// matrix has entries of order one for arbitrarily large propagation times, so
// ratios like U rho U^dag / tr(...) never overflow.
struct ScaledExp2 {
    Mat2 m;
    double log_scale;
};

inline ScaledExp2 expm2_scaled(const Mat2& m,
                               double series_threshold = expm2_series_threshold) {
    if (!m.finite()) throw std::domain_error("expm2_scaled: non-finite input");
    const PauliCoeffs p = pauli_decompose(m);
    const cplx mu = std::sqrt(p.dx * p.dx + p.dy * p.dy + p.dz * p.dz);
    const double r = std::abs(mu.real());
    const cplx ep = std::exp(mu - r);    // |.| <= 1
    const cplx em = std::exp(-mu - r);   // |.| <= 1
    const cplx ch = 0.5 * (ep + em);
    cplx sc;
    if (std::abs(mu) < series_threshold) {
        sc = std::exp(cplx(-r)) * detail::sinhc(mu, series_threshold);
    } else {
        sc = 0.5 * (ep - em) / mu;
    }
    const cplx phase = std::exp(cplx(0.0, p.c.imag()));
    ScaledExp2 out;
    out.m = pauli_form(phase * ch, phase * sc * p.dx, phase * sc * p.dy, phase * sc * p.dz);
    out.log_scale = p.c.real() + r;
    return out;
}

inline constexpr double eig2_degeneracy_threshold = 1e-12;

struct EigPair2 {
    cplx value;
    std::array<cplx, 2> vec;  // unit Euclidean norm
};

struct Eig2 {
    EigPair2 first, second;
    bool degenerate = false;
};

namespace detail {

inline std::array<cplx, 2> eigvec2(const Mat2& m, cplx lambda) {
    // (M - lambda I) v = 0; build v from whichever row gives the larger vector.
    const std::array<cplx, 2> r1{m(0, 1), lambda - m(0, 0)};
    const std::array<cplx, 2> r2{lambda - m(1, 1), m(1, 0)};
    const double n1 = std::norm(r1[0]) + std::norm(r1[1]);
    const double n2 = std::norm(r2[0]) + std::norm(r2[1]);
    std::array<cplx, 2> v = (n1 >= n2) ? r1 : r2;
    double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
    if (n == 0.0) {
        // Diagonal matrix: eigenvector is a basis vector.
        v = (std::abs(lambda - m(0, 0)) <= std::abs(lambda - m(1, 1)))
                ? std::array<cplx, 2>{1.0, 0.0}
                : std::array<cplx, 2>{0.0, 1.0};
        n = 1.0;
    }
    return {v[0] / n, v[1] / n};
}

}  // namespace detail

// Eigenpairs through the quadratic formula. Below the discriminant threshold
// the coalesced eigenvector is returned twice with the degeneracy flag set.
inline Eig2 eig2(const Mat2& m, double degeneracy_threshold = eig2_degeneracy_threshold) {
    if (!m.finite()) throw std::domain_error("eig2: non-finite input");
    const cplx tr = trace(m);
    const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const cplx disc = tr * tr - 4.0 * det;
    Eig2 out;
    if (std::abs(disc) < degeneracy_threshold) {
        const cplx lambda = 0.5 * tr;
        const auto v = detail::eigvec2(m, lambda);
        out.first = {lambda, v};
        out.second = {lambda, v};
        out.degenerate = true;
        return out;
    }
    const cplx sq = std::sqrt(disc);
    const cplx l1 = 0.5 * (tr + sq);
    const cplx l2 = 0.5 * (tr - sq);
    out.first = {l1, detail::eigvec2(m, l1)};
    out.second = {l2, detail::eigvec2(m, l2)};
    return out;
}

// Eigenvalues of a Hermitian 3x3 matrix (trigonometric closed form),
// ascending. Used by the positivity predicates.
inline std::array<double, 3> eigvals3_hermitian(const Mat3& m) {
    const double q = trace(m).real() / 3.0;
    Mat3 b = m;
    for (int i = 0; i < 3; ++i) b(i, i) -= q;
    double p2 = 0;
    for (const auto& z : b.a) p2 += std::norm(z);
    const double p = std::sqrt(p2 / 6.0);
    if (p < 1e-300) return {q, q, q};
    const Mat3 bn = cplx(1.0 / p) * b;
    const cplx detb = bn(0, 0) * (bn(1, 1) * bn(2, 2) - bn(1, 2) * bn(2, 1)) -
                      bn(0, 1) * (bn(1, 0) * bn(2, 2) - bn(1, 2) * bn(2, 0)) +
                      bn(0, 2) * (bn(1, 0) * bn(2, 1) - bn(1, 1) * bn(2, 0));
    double r = detb.real() / 2.0;
    r = std::min(1.0, std::max(-1.0, r));
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    std::array<double, 3> e{e1, e2, e3};
    if (e[0] > e[1]) std::swap(e[0], e[1]);
    if (e[1] > e[2]) std::swap(e[1], e[2]);
    if (e[0] > e[1]) std::swap(e[0], e[1]);
    return e;
}

inline bool is_positive_semidefinite(const Mat2& m, double tol = 1e-9) {
    if (!is_hermitian(m, tol)) return false;
    const double tr = trace(m).real();
    const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    const double disc = std::max(0.0, tr * tr - 4.0 * det);
    const double lmin = 0.5 * (tr - std::sqrt(disc));
    return lmin >= -tol;
}

inline bool is_positive_semidefinite(const Mat3& m, double tol = 1e-9) {
    if (!is_hermitian(m, tol)) return false;
    return eigvals3_hermitian(m)[0] >= -tol;
}

}  // namespace ptlgi
