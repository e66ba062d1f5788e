#pragma once

// Derivative-free maximization of K3 over {theta, phi, theta_m, phi_m, t2,
// t3-t2}: seeded low-discrepancy multi-start feeding a bounded Nelder-Mead
// simplex, plus the gamma-sweep and fixed-measurement drivers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "ptlgi/common.hpp"
#include "ptlgi/lgi.hpp"

namespace ptlgi {

inline constexpr std::size_t k3_dim = 6;

struct SearchSpace {
    std::array<double, k3_dim> lo{};
    std::array<double, k3_dim> hi{};
    std::array<bool, k3_dim> frozen{};
    std::array<double, k3_dim> frozen_value{};

    // Coordinates: theta, phi, theta_m, phi_m, t2, t3-t2.
    static SearchSpace full(double t_max) {
        SearchSpace s;
        s.lo = {0.0, 0.0, 0.0, 0.0, 1e-9, 1e-9};
        s.hi = {pi, 2.0 * pi, pi, 2.0 * pi, t_max, t_max};
        return s;
    }

    void freeze(std::size_t i, double value) {
        frozen[i] = true;
        frozen_value[i] = value;
    }

    std::size_t active_count() const {
        std::size_t n = 0;
        for (bool f : frozen)
            if (!f) ++n;
        return n;
    }

    void validate() const {
        for (std::size_t i = 0; i < k3_dim; ++i)
            if (!frozen[i] && !(lo[i] < hi[i]))
                throw std::domain_error("SearchSpace: lower bound must be < upper");
    }
};

struct OptimizerSettings {
    int n_starts = 64;
    std::uint64_t seed = 0;
    double simplex_tol = 1e-8;
    long max_evals = 20000;  // per start
    unsigned jobs = 1;

    // Broken-phase optima sit next to a parameter-space boundary (initial
    // state approaching the source fixed point), so those runs get twice the
    // starts.
    static OptimizerSettings for_params(const PTParams& p, std::uint64_t seed,
                                        unsigned jobs = 1) {
        OptimizerSettings s;
        s.seed = seed;
        s.jobs = jobs;
        if (regime(p) == Regime::Broken) s.n_starts = 128;
        return s;
    }
};

namespace detail {

// Triangle-wave fold of x into [lo, hi]; out-of-box simplex points are
// evaluated at their folded image.
inline double fold_into(double x, double lo, double hi) {
    const double width = hi - lo;
    if (width <= 0.0) return lo;
    double y = std::fmod(x - lo, 2.0 * width);
    if (y < 0.0) y += 2.0 * width;
    return lo + (y <= width ? y : 2.0 * width - y);
}

}  // namespace detail

struct NelderMeadResult {
    std::vector<double> x;  // folded into the box
    double f = 0;
    long evaluations = 0;
    bool converged = false;  // false when the evaluation budget ran out
};

// Maximizes f over the box by reflection/expansion/contraction/shrink.
// Deterministic for a given x0. Terminates when the simplex diameter drops
// below tol or the evaluation budget is exhausted (best-so-far returned).
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x0,
                                    const std::vector<double>& lo,
                                    const std::vector<double>& hi, double tol,
                                    long max_evals) {
    const std::size_t n = x0.size();
    long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        std::vector<double> folded(n);
        for (std::size_t i = 0; i < n; ++i) folded[i] = detail::fold_into(x[i], lo[i], hi[i]);
        ++evals;
        return f(folded);
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        const double step = 0.05 * (hi[i] - lo[i]);
        simplex[i + 1][i] += (x0[i] + step <= hi[i]) ? step : -step;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] > fv[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        s2.reserve(n + 1);
        f2.reserve(n + 1);
        for (std::size_t i : idx) {
            s2.push_back(simplex[i]);
            f2.push_back(fv[i]);
        }
        simplex.swap(s2);
        fv.swap(f2);
    };
    auto diameter = [&] {
        double d = 0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d = std::max(d, std::abs(simplex[i][j] - simplex[0][j]));
        return d;
    };

    order();
    bool converged = false;
    while (evals < max_evals) {
        if (diameter() < tol) {
            converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto affine = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            return x;
        };

        const auto xr = affine(-1.0);  // reflect worst through centroid
        const double fr = eval(xr);
        if (fr > fv[0]) {
            const auto xe = affine(-2.0);
            const double fe = eval(xe);
            if (fe > fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if (fr > fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            const bool outside = fr > fv[n];
            const auto xc = affine(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc > (outside ? fr : fv[n])) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fv[i] = eval(simplex[i]);
                }
            }
        }
        order();
    }

    NelderMeadResult out;
    out.x.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.x[i] = detail::fold_into(simplex[0][i], lo[i], hi[i]);
    out.f = fv[0];
    out.evaluations = evals;
    out.converged = converged;
    return out;
}

struct ScanRow {
    double gamma = 0;
    double k3_max = 0;
    double theta = 0, phi = 0, theta_m = 0, phi_m = 0;
    double t2 = 0, t3 = 0;
};

namespace detail {

inline double halton(std::uint64_t index, std::uint64_t base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

// Halton points with a seeded Cranley-Patterson rotation; deterministic for a
// given seed and independent of evaluation order.
inline std::vector<std::array<double, k3_dim>> quasi_random_starts(int n,
                                                                   std::uint64_t seed) {
    static constexpr std::array<std::uint64_t, k3_dim> bases{2, 3, 5, 7, 11, 13};
    std::mt19937_64 rng(seed);
    std::array<double, k3_dim> shift{};
    for (auto& s : shift) s = uniform01(rng);
    std::vector<std::array<double, k3_dim>> pts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < k3_dim; ++d) {
            const double u = halton(static_cast<std::uint64_t>(i + 1), bases[d]) + shift[d];
            pts[static_cast<std::size_t>(i)][d] = u - std::floor(u);
        }
    }
    return pts;
}

inline LGIConfig config_from_coords(const std::array<double, k3_dim>& x) {
    return {x[0], x[1], x[2], x[3], x[4], x[4] + x[5]};
}

}  // namespace detail

// Relabeling Q -> -Q swaps the outcome labels and leaves every correlator
// unchanged, so (theta_m, phi_m) and (pi - theta_m, phi_m + pi) describe the
// same experiment. Reported rows use the image with phi_m in [0, pi).
inline ScanRow canonicalize(ScanRow row) {
    auto wrap = [](double a) {
        double w = std::fmod(a, 2.0 * pi);
        if (w < 0) w += 2.0 * pi;
        return w;
    };
    row.phi = wrap(row.phi);
    row.phi_m = wrap(row.phi_m);
    if (row.phi_m >= pi) {
        row.phi_m = wrap(row.phi_m - pi);
        row.theta_m = pi - row.theta_m;
    }
    return row;
}

struct MaximizeResult {
    ScanRow best;
    std::vector<ScanRow> starts;  // per-start optima, in start order
};

// Multi-start Nelder-Mead over the active coordinates. Ties below 1e-9 are
// broken by smaller t3, then by start index. The winning K3 is re-evaluated
// from scratch through the lgi module before being reported.
inline MaximizeResult maximize_k3(const PTParams& p, const SearchSpace& space,
                                  const OptimizerSettings& settings) {
    space.validate();
    const double t_max = space.hi[4];
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < k3_dim; ++i)
        if (!space.frozen[i]) active.push_back(i);
    if (active.empty()) throw std::domain_error("maximize_k3: all coordinates frozen");

    auto expand = [&](const std::vector<double>& xa) {
        std::array<double, k3_dim> full{};
        for (std::size_t i = 0; i < k3_dim; ++i)
            if (space.frozen[i]) full[i] = space.frozen_value[i];
        for (std::size_t k = 0; k < active.size(); ++k) full[active[k]] = xa[k];
        return full;
    };
    // Configs whose conditional evolutions sink below the double-precision
    // noise floor score as the algebraic minimum, steering the simplex back
    // to numerically trustworthy territory.
    auto objective = [&](const std::vector<double>& xa) {
        try {
            return k3(detail::config_from_coords(expand(xa)), p, 2.0 * t_max).k3;
        } catch (const inconsistency_error&) {
            return -3.0;
        } catch (const evolution_degenerate_error&) {
            return -3.0;
        }
    };

    std::vector<double> lo(active.size()), hi(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
        lo[k] = space.lo[active[k]];
        hi[k] = space.hi[active[k]];
    }

    const auto starts = detail::quasi_random_starts(settings.n_starts, settings.seed);
    std::vector<NelderMeadResult> results(starts.size());
    parallel_for(starts.size(), settings.jobs, [&](std::size_t i) {
        std::vector<double> x0(active.size());
        for (std::size_t k = 0; k < active.size(); ++k)
            x0[k] = lo[k] + starts[i][active[k]] * (hi[k] - lo[k]);
        results[i] =
            nelder_mead(objective, x0, lo, hi, settings.simplex_tol, settings.max_evals);
    });

    // Fresh-simplex restarts from the leading candidates recover from
    // premature contraction on the sharp broken-phase ridge.
    std::vector<std::size_t> order(results.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return results[a].f > results[b].f;
    });
    const std::size_t n_restart = std::min<std::size_t>(8, order.size());
    parallel_for(n_restart, settings.jobs, [&](std::size_t k) {
        const std::size_t i = order[k];
        const NelderMeadResult polished = nelder_mead(
            objective, results[i].x, lo, hi, settings.simplex_tol, settings.max_evals);
        if (polished.f > results[i].f) results[i] = polished;
    });

    MaximizeResult out;
    out.starts.reserve(results.size());
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto full = expand(results[i].x);
        const LGIConfig cfg = detail::config_from_coords(full);
        ScanRow row{p.gamma, results[i].f, cfg.theta,   cfg.phi,
                    cfg.theta_m, cfg.phi_m, cfg.t2, cfg.t3};
        out.starts.push_back(row);
        const ScanRow& cur = out.starts[best_i];
        const ScanRow& cand = out.starts[i];
        if (cand.k3_max > cur.k3_max + 1e-9 ||
            (std::abs(cand.k3_max - cur.k3_max) <= 1e-9 && cand.t3 < cur.t3))
            best_i = i;
    }
    ScanRow best = out.starts[best_i];
    const double check =
        k3({best.theta, best.phi, best.theta_m, best.phi_m, best.t2, best.t3}, p,
           2.0 * t_max)
            .k3;
    if (std::abs(check - best.k3_max) > 1e-10)
        throw inconsistency_error("maximize_k3: optimizer value does not re-evaluate");
    best.k3_max = check;
    out.best = canonicalize(best);
    return out;
}

// Per-gamma maximize_k3 rows, gamma order preserved. Broken-phase entries get
// the doubled start count via OptimizerSettings::for_params.
inline std::vector<ScanRow> gamma_scan(const std::vector<double>& gammas,
                                       const SearchSpace& space,
                                       const OptimizerSettings& settings,
                                       double J = 1.0) {
    std::vector<ScanRow> rows(gammas.size());
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        const PTParams p(J, gammas[i]);
        OptimizerSettings s = settings;
        if (regime(p) == Regime::Broken) s.n_starts = 2 * settings.n_starts;
        rows[i] = maximize_k3(p, space, s).best;
    }
    return rows;
}

struct HeatmapRow {
    double theta, phi, k3;
};

struct FixedScanResult {
    double k3_max = -3.0;
    double theta = 0, phi = 0;
    std::vector<HeatmapRow> rows;  // theta-major order
};

// Freezes the measurement direction (default n = y-hat) and time-optimizes K3
// on a theta-phi grid of the initial state. Grid includes theta in [0, pi]
// and phi in [0, 2pi).
inline FixedScanResult fixed_measurement_scan(const PTParams& p,
                                              const OptimizerSettings& settings,
                                              int n_theta = 51, int n_phi = 52,
                                              double theta_m = 0.5 * pi,
                                              double phi_m = 0.5 * pi,
                                              double t_max = 0.0) {
    if (n_theta * n_phi < 2500)
        throw std::domain_error("fixed_measurement_scan: grid must be >= 50x50");
    const double tmax = t_max > 0.0 ? t_max : default_t_max(p);
    FixedScanResult out;
    out.rows.resize(static_cast<std::size_t>(n_theta) * n_phi);
    OptimizerSettings cell = settings;
    cell.jobs = 1;
    if (cell.n_starts > 16) cell.n_starts = 16;

    parallel_for(out.rows.size(), settings.jobs, [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / n_phi;
        const int j = static_cast<int>(idx) % n_phi;
        const double theta = pi * i / (n_theta - 1);
        const double phi = 2.0 * pi * j / n_phi;
        SearchSpace space = SearchSpace::full(tmax);
        space.freeze(0, theta);
        space.freeze(1, phi);
        space.freeze(2, theta_m);
        space.freeze(3, phi_m);
        OptimizerSettings s = cell;
        s.seed = settings.seed + 0x9e3779b97f4a7c15ull * (idx + 1);
        const MaximizeResult r = maximize_k3(p, space, s);
        out.rows[idx] = {theta, phi, r.best.k3_max};
    });

    for (const auto& row : out.rows) {
        if (row.k3 > out.k3_max) {
            out.k3_max = row.k3;
            out.theta = row.theta;
            out.phi = row.phi;
        }
    }
    return out;
}

}  // namespace ptlgi
