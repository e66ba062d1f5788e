#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "oracles.hpp"
#include "ptlgi/optimize.hpp"

using namespace ptlgi;

TEST_CASE("nelder_mead maximizes a quadratic bowl", "[optimize]") {
    auto bowl = [](const std::vector<double>& x) {
        double s = 0;
        for (double xi : x) s -= (xi - 0.3) * (xi - 0.3);
        return s;
    };
    const std::vector<double> lo(6, 0.0), hi(6, 1.0);
    const std::vector<double> x0{0.9, 0.1, 0.5, 0.7, 0.2, 0.8};
    const NelderMeadResult r = nelder_mead(bowl, x0, lo, hi, 1e-8, 20000);
    REQUIRE(r.converged);
    for (double xi : r.x) CHECK(std::abs(xi - 0.3) < 1e-6);

    // restarting from the optimum barely moves the value
    const NelderMeadResult r2 = nelder_mead(bowl, r.x, lo, hi, 1e-8, 20000);
    CHECK(std::abs(r2.f - r.f) < 1e-8);
}

TEST_CASE("nelder_mead result never falls below its start", "[optimize]") {
    const PTParams p(1.0, 3.0);
    // K3 over (t2, dt3) with the angles frozen at the mechanism values
    const double theta_c = std::acos(std::sqrt(5.0) / 3.0) - 1e-3;
    auto objective = [&](const std::vector<double>& x) {
        try {
            return k3({theta_c, 1.5 * pi, theta_c, 0.5 * pi, x[0], x[0] + x[1]}, p, 100.0)
                .k3;
        } catch (const inconsistency_error&) {
            return -3.0;
        }
    };
    const std::vector<double> lo{1e-9, 1e-9}, hi{50.0, 50.0};
    std::mt19937_64 rng(41);
    for (int i = 0; i < 10; ++i) {
        const std::vector<double> x0{0.2 + 6.0 * uniform01(rng),
                                     0.2 + 6.0 * uniform01(rng)};
        const double f0 = objective(x0);
        const NelderMeadResult r = nelder_mead(objective, x0, lo, hi, 1e-8, 4000);
        CHECK(r.f >= f0 - 1e-12);
    }
}

TEST_CASE("exhausted budget returns best-so-far with the flag", "[optimize]") {
    auto bowl = [](const std::vector<double>& x) {
        double s = 0;
        for (double xi : x) s -= (xi - 0.3) * (xi - 0.3);
        return s;
    };
    const std::vector<double> lo(6, 0.0), hi(6, 1.0);
    const std::vector<double> x0{0.9, 0.1, 0.5, 0.7, 0.2, 0.8};
    const NelderMeadResult r = nelder_mead(bowl, x0, lo, hi, 1e-8, 20);
    CHECK(!r.converged);
    CHECK(r.evaluations <= 20 + 7);  // initial simplex may finish its sweep
    CHECK(r.f >= bowl(x0));
}

TEST_CASE("maximize_k3 rejects a fully frozen space", "[optimize]") {
    SearchSpace space = SearchSpace::full(50.0);
    for (std::size_t i = 0; i < k3_dim; ++i) space.freeze(i, 0.5);
    OptimizerSettings s;
    CHECK_THROWS_AS(maximize_k3(PTParams(1.0, 1.0), space, s), std::domain_error);
}

TEST_CASE("bound folding keeps evaluations inside the box", "[optimize]") {
    // objective punishes out-of-box points hard; folding must hide them
    auto obj = [](const std::vector<double>& x) {
        if (x[0] < 0.0 || x[0] > 1.0) return -1e9;
        return -(x[0] - 0.9) * (x[0] - 0.9);
    };
    const NelderMeadResult r = nelder_mead(obj, {0.05}, {0.0}, {1.0}, 1e-10, 5000);
    CHECK(std::abs(r.x[0] - 0.9) < 1e-6);
    CHECK(r.f > -1e-10);
}

TEST_CASE("maximize_k3 recovers the Lueders bound at gamma=0", "[optimize]") {
    const PTParams p(1.0, 0.0);
    OptimizerSettings s = OptimizerSettings::for_params(p, 777, default_jobs());
    CHECK(s.n_starts == 64);
    const MaximizeResult r = maximize_k3(p, SearchSpace::full(default_t_max(p)), s);
    CHECK(std::abs(r.best.k3_max - 1.5) < 1e-3);
    CHECK(static_cast<int>(r.starts.size()) == s.n_starts);
}

TEST_CASE("optimizer settings scale with the regime", "[optimize]") {
    CHECK(OptimizerSettings::for_params(PTParams(1.0, 1.0), 1).n_starts == 64);
    CHECK(OptimizerSettings::for_params(PTParams(1.0, 3.0), 1).n_starts == 128);
}

TEST_CASE("seeded runs are bit-identical and job-count independent", "[optimize]") {
    const PTParams p(1.0, 1.2);
    const SearchSpace space = SearchSpace::full(default_t_max(p));
    OptimizerSettings a;
    a.seed = 99;
    a.n_starts = 10;
    a.jobs = 1;
    OptimizerSettings b = a;
    b.jobs = 3;
    const MaximizeResult ra = maximize_k3(p, space, a);
    const MaximizeResult rb = maximize_k3(p, space, b);
    const MaximizeResult rc = maximize_k3(p, space, a);
    auto same = [](const ScanRow& x, const ScanRow& y) {
        return std::memcmp(&x, &y, sizeof(ScanRow)) == 0;
    };
    CHECK(same(ra.best, rb.best));
    CHECK(same(ra.best, rc.best));
    REQUIRE(ra.starts.size() == rb.starts.size());
    for (std::size_t i = 0; i < ra.starts.size(); ++i)
        CHECK(same(ra.starts[i], rb.starts[i]));
}

TEST_CASE("freezing a coordinate never increases the maximum", "[optimize]") {
    const PTParams p(1.0, 1.0);
    OptimizerSettings s;
    s.seed = 4242;
    s.n_starts = 48;
    s.jobs = default_jobs();
    const double full = maximize_k3(p, SearchSpace::full(default_t_max(p)), s).best.k3_max;

    SearchSpace at_sigma_y = SearchSpace::full(default_t_max(p));
    at_sigma_y.freeze(2, 0.5 * pi);  // theta_m at the symmetric-phase optimum
    const double frozen_good = maximize_k3(p, at_sigma_y, s).best.k3_max;

    SearchSpace off_value = SearchSpace::full(default_t_max(p));
    off_value.freeze(1, 0.3);  // phi pinned away from the optimal 3pi/2
    const double frozen_bad = maximize_k3(p, off_value, s).best.k3_max;

    CHECK(frozen_good <= full + 1e-9);
    CHECK(frozen_bad <= full + 1e-9);
    // With the 50/J time window the unrestricted optimum sits at multi-period
    // measurement times and beats the sigma_y ansatz by a finite margin, so
    // equality is not asserted here.
    CHECK(frozen_good > 1.5);
}

TEST_CASE("K3 symmetries: geodesic-plane reflection and antipode relabeling",
          "[optimize]") {
    std::mt19937_64 rng(43);
    double worst_reflect = 0, worst_antipode = 0, best_shift_gap = 0;
    for (int i = 0; i < 100; ++i) {
        const PTParams p(1.0, 4.0 * uniform01(rng));
        const double t2 = 0.2 + 3.0 * uniform01(rng);
        const LGIConfig cfg{pi * uniform01(rng),  2.0 * pi * uniform01(rng),
                            pi * uniform01(rng),  2.0 * pi * uniform01(rng),
                            t2,                   t2 + 0.2 + 3.0 * uniform01(rng)};
        double base;
        try {
            base = k3(cfg, p).k3;
        } catch (const inconsistency_error&) {
            continue;
        }

        // reflection through the geodesic plane: phi -> pi - phi, phi_m -> pi - phi_m
        LGIConfig refl = cfg;
        refl.phi = pi - cfg.phi;
        refl.phi_m = pi - cfg.phi_m;
        worst_reflect = std::max(worst_reflect, std::abs(k3(refl, p).k3 - base));

        // measurement antipode: theta_m -> pi - theta_m, phi_m -> phi_m + pi
        LGIConfig anti = cfg;
        anti.theta_m = pi - cfg.theta_m;
        anti.phi_m = cfg.phi_m + pi;
        worst_antipode = std::max(worst_antipode, std::abs(k3(anti, p).k3 - base));

        // phi -> phi + pi together with phi_m -> phi_m + pi is NOT a symmetry
        // of H = J sx - i(gamma/2) sz; record the largest violation seen
        LGIConfig shift = cfg;
        shift.phi = cfg.phi + pi;
        shift.phi_m = cfg.phi_m + pi;
        best_shift_gap = std::max(best_shift_gap, std::abs(k3(shift, p).k3 - base));
    }
    CHECK(worst_reflect < 1e-9);
    CHECK(worst_antipode < 1e-9);
    CHECK(best_shift_gap > 0.1);
}

TEST_CASE("canonicalization folds the measurement antipode", "[optimize]") {
    ScanRow row;
    row.theta_m = 0.3;
    row.phi_m = 1.5 * pi;
    row.phi = 2.0 * pi + 0.1;
    const ScanRow c = canonicalize(row);
    CHECK(std::abs(c.phi_m - 0.5 * pi) < 1e-15);
    CHECK(std::abs(c.theta_m - (pi - 0.3)) < 1e-15);
    CHECK(std::abs(c.phi - 0.1) < 1e-12);
}

TEST_CASE("gamma-scan regression snapshot", "[optimize]") {
    // Frozen from the first computation at this seed; guards the optimizer
    // and dynamics stack against silent numerical drift.
    OptimizerSettings s;
    s.seed = 7;
    s.n_starts = 64;
    s.jobs = default_jobs();
    const auto rows = gamma_scan({0.25, 1.0, 1.75, 2.5}, SearchSpace::full(50.0), s);
    const double expected[4] = {1.601545895562, 2.028568896658, 2.717423559026,
                                2.997648640529};
    REQUIRE(rows.size() == 4u);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(rows[i].k3_max - expected[i]) < 1e-9);
}

TEST_CASE("fixed-measurement scan structure", "[optimize]") {
    const PTParams p(1.0, 1.0);
    OptimizerSettings s;
    s.seed = 20240811;
    s.n_starts = 4;
    s.jobs = default_jobs();
    const FixedScanResult res = fixed_measurement_scan(p, s);
    CHECK(res.rows.size() == 51u * 52u);
    // grid hits theta = pi/2, phi = 3pi/2 exactly
    bool has_peak_cell = false;
    for (const auto& r : res.rows)
        if (std::abs(r.theta - 0.5 * pi) < 1e-12 && std::abs(r.phi - 1.5 * pi) < 1e-12)
            has_peak_cell = true;
    CHECK(has_peak_cell);
    for (const auto& r : res.rows) {
        CHECK(r.k3 <= 3.0 + 1e-12);
        CHECK(r.k3 >= -3.0 - 1e-12);
    }

    // restricted search cannot beat the unrestricted optimum
    OptimizerSettings s2;
    s2.seed = 20240811;
    s2.n_starts = 64;
    s2.jobs = default_jobs();
    const double full = maximize_k3(p, SearchSpace::full(default_t_max(p)), s2).best.k3_max;
    CHECK(res.k3_max <= full + 1e-9);

    CHECK_THROWS_AS(fixed_measurement_scan(p, s, 10, 10), std::domain_error);
}
