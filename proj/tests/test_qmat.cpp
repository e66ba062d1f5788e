#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "ptlgi/smallmat.hpp"

using namespace ptlgi;

TEST_CASE("expm2 identity cases", "[qmat]") {
    const Mat2 zero{};
    CHECK(frobenius_distance(expm2(zero), Mat2::identity()) < 1e-15);

    // exp(-i (pi/2) sx) = -i sx
    const Mat2 m = cplx(0.0, -0.5 * pi) * sigma_x();
    const Mat2 expected = cplx(0.0, -1.0) * sigma_x();
    CHECK(frobenius_distance(expm2(m), expected) < 1e-14);
}

TEST_CASE("expm2 matches the scaled Taylor oracle", "[qmat]") {
    std::mt19937_64 rng(42);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const Mat2 m = oracles::random_mat2(rng, 1.0);
        worst = std::max(worst, frobenius_distance(expm2(m), oracles::expm2_taylor(m)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("expm2 oracle agreement at spectral radius up to 5", "[qmat]") {
    std::mt19937_64 rng(43);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const Mat2 m = oracles::random_mat2(rng, 2.5);
        const double rel = frobenius_distance(expm2(m), oracles::expm2_taylor(m)) /
                           std::max(1.0, frobenius_norm(oracles::expm2_taylor(m)));
        worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("expm2 multiplicativity on commuting pairs", "[qmat]") {
    std::mt19937_64 rng(44);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        const Mat2 m = oracles::random_mat2(rng, 0.8);
        const Mat2 n = cplx(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0) * m;
        const Mat2 lhs = expm2(m + n);
        const Mat2 rhs = expm2(m) * expm2(n);
        worst = std::max(worst, frobenius_distance(lhs, rhs));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("expm2 continuous across the series switch", "[qmat]") {
    // Matrices tuned so |mu| straddles the 1e-6 threshold.
    std::mt19937_64 rng(45);
    for (int i = 0; i < 50; ++i) {
        const Mat2 dir = oracles::random_mat2(rng, 1.0);
        const PauliCoeffs pc = pauli_decompose(dir);
        const cplx mu = std::sqrt(pc.dx * pc.dx + pc.dy * pc.dy + pc.dz * pc.dz);
        if (std::abs(mu) < 1e-12) continue;
        auto scaled = [&](double target) {
            const cplx f = target / std::abs(mu);
            return pauli_form(0.0, f * pc.dx, f * pc.dy, f * pc.dz);
        };
        // Same matrix evaluated on both sides of the switch: series branch
        // (default threshold) vs direct sinh branch (threshold forced low).
        const Mat2 just_below = scaled(1e-6 * (1.0 - 1e-3));
        CHECK(frobenius_distance(expm2(just_below), expm2(just_below, 1e-12)) < 1e-10);
        const Mat2 just_above = scaled(1e-6 * (1.0 + 1e-3));
        CHECK(frobenius_distance(expm2(just_above, 1e-3), expm2(just_above)) < 1e-10);
    }
}

TEST_CASE("expm2 rejects non-finite input", "[qmat]") {
    Mat2 bad;
    bad(0, 0) = cplx(std::numeric_limits<double>::infinity(), 0.0);
    CHECK_THROWS_AS(expm2(bad), std::domain_error);
}

TEST_CASE("eig2 diagonal and PT examples", "[qmat]") {
    const Eig2 ez = eig2(sigma_z());
    CHECK(!ez.degenerate);
    const auto& plus = ez.first.value.real() > 0 ? ez.first : ez.second;
    const auto& minus = ez.first.value.real() > 0 ? ez.second : ez.first;
    CHECK(std::abs(plus.value - cplx(1.0)) < 1e-14);
    CHECK(std::abs(minus.value - cplx(-1.0)) < 1e-14);
    CHECK(std::abs(std::abs(plus.vec[0]) - 1.0) < 1e-14);
    CHECK(std::abs(plus.vec[1]) < 1e-14);

    // H_PT at J=1, gamma=3: eigenvalues +- i sqrt(1.25)
    Mat2 h;
    h(0, 0) = cplx(0.0, -1.5);
    h(0, 1) = 1.0;
    h(1, 0) = 1.0;
    h(1, 1) = cplx(0.0, 1.5);
    const Eig2 eb = eig2(h);
    CHECK(!eb.degenerate);
    const double kappa = std::sqrt(1.25);
    CHECK(std::abs(std::abs(eb.first.value.imag()) - kappa) < 1e-12);
    CHECK(std::abs(eb.first.value.real()) < 1e-12);
    CHECK(std::abs(eb.first.value + eb.second.value) < 1e-12);
}

TEST_CASE("eig2 coalescence at the exceptional point", "[qmat]") {
    Mat2 h;  // H_PT at J=1, gamma=2
    h(0, 0) = cplx(0.0, -1.0);
    h(0, 1) = 1.0;
    h(1, 0) = 1.0;
    h(1, 1) = cplx(0.0, 1.0);
    const Eig2 e = eig2(h);
    CHECK(e.degenerate);
    CHECK(std::abs(e.first.value) < 1e-12);
    // eigenvector proportional to (1, i)/sqrt(2)
    const cplx ratio = e.first.vec[1] / e.first.vec[0];
    CHECK(std::abs(ratio - cplx(0.0, 1.0)) < 1e-12);
    const double n = std::sqrt(std::norm(e.first.vec[0]) + std::norm(e.first.vec[1]));
    CHECK(std::abs(n - 1.0) < 1e-14);
}

TEST_CASE("eig2 reconstruction M v = lambda v", "[qmat]") {
    std::mt19937_64 rng(46);
    double worst = 0;
    for (int i = 0; i < 500; ++i) {
        const Mat2 m = oracles::random_mat2(rng, 1.5);
        const Eig2 e = eig2(m);
        if (e.degenerate) continue;
        for (const auto& pair : {e.first, e.second}) {
            for (int r = 0; r < 2; ++r) {
                const cplx mv = m(r, 0) * pair.vec[0] + m(r, 1) * pair.vec[1];
                worst = std::max(worst, std::abs(mv - pair.value * pair.vec[r]));
            }
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("basic matrix algebra", "[qmat]") {
    std::mt19937_64 rng(47);
    const Mat2 m = oracles::random_mat2(rng);
    CHECK(frobenius_distance(dagger(dagger(m)), m) == 0.0);
    CHECK(frobenius_distance(m, m) == 0.0);
    CHECK(std::abs(trace(Mat3::identity()) - cplx(3.0)) == 0.0);

    const Mat2 a = oracles::random_mat2(rng);
    const Mat2 b = oracles::random_mat2(rng);
    CHECK(frobenius_distance(dagger(a * b), dagger(b) * dagger(a)) < 1e-14);
    CHECK(std::abs(trace(a * b) - trace(b * a)) < 1e-14);
}

TEST_CASE("hermitian and positivity predicates", "[qmat]") {
    CHECK(is_hermitian(sigma_y()));
    CHECK(!is_hermitian(cplx(0.0, 1.0) * sigma_y() + sigma_x(), 1e-12));
    Mat2 rho;
    rho(0, 0) = 0.75;
    rho(1, 1) = 0.25;
    rho(0, 1) = cplx(0.1, 0.2);
    rho(1, 0) = cplx(0.1, -0.2);
    CHECK(is_unit_trace(rho));
    CHECK(is_positive_semidefinite(rho));
    rho(0, 1) = cplx(0.6, 0.0);
    rho(1, 0) = cplx(0.6, 0.0);
    CHECK(!is_positive_semidefinite(rho));  // determinant negative

    Mat3 m3;
    m3(0, 0) = 0.5;
    m3(1, 1) = 0.5;
    m3(2, 2) = 0.0;
    CHECK(is_positive_semidefinite(m3));
    m3(2, 2) = -0.1;
    CHECK(!is_positive_semidefinite(m3));
    const auto ev = eigvals3_hermitian(m3);
    CHECK(std::abs(ev[0] + 0.1) < 1e-12);
    CHECK(std::abs(ev[2] - 0.5) < 1e-12);
}
