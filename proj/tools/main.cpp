// Command-line front end: batch computations over the non-Hermitian two-level
// dynamics with CSV/JSON outputs and a run manifest on stdout.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptlgi/io.hpp"
#include "ptlgi/verify.hpp"

using json = nlohmann::ordered_json;
using namespace ptlgi;

namespace {

constexpr const char* tool_version = "0.1.0";

struct ManifestWriter {
    json m;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    ManifestWriter(const std::string& subcommand) {
        m["tool"] = "ptlgi";
        m["version"] = tool_version;
        m["subcommand"] = subcommand;
        m["config"] = json::object();
    }

    void config(const std::string& key, const json& value) { m["config"][key] = value; }

    void output_file(const std::string& path, const std::string& content) {
        write_text_file(path, content);
        char digest[32];
        std::snprintf(digest, sizeof(digest), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        json entry;
        entry["path"] = path;
        entry["bytes"] = content.size();
        entry["fnv1a64"] = digest;
        if (!m.contains("outputs")) m["outputs"] = json::array();
        m["outputs"].push_back(entry);
    }

    void emit() {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        m["wall_time_s"] = dt.count();
        std::cout << m.dump(2) << std::endl;
    }
};

double maybe_rad(double angle, bool degrees) { return degrees ? angle * pi / 180.0 : angle; }

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    if (n <= 1) {
        v.push_back(lo);
        return v;
    }
    for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
    return v;
}

json table_json(const JointProbabilityTable& t) {
    json j;
    j["p_uu"] = t.p_uu;
    j["p_ud"] = t.p_ud;
    j["p_du"] = t.p_du;
    j["p_dd"] = t.p_dd;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-Hermitian two-level dynamics: K3 temporal correlations, "
                 "speed of evolution, and the three-level Lindblad cross-check"};
    app.require_subcommand(1);
    app.fallthrough();  // --jobs / --degrees may follow the subcommand
    app.set_config("--config")->description("INI config with one section per subcommand");
    app.allow_config_extras(false);

    bool degrees = false;
    unsigned jobs = default_jobs();
    app.add_flag("--degrees", degrees, "interpret angle options as degrees");
    app.add_option("--jobs", jobs, "worker pool size for scans");

    // ---- evolve ----
    auto* cmd_evolve = app.add_subcommand("evolve", "Bloch trajectory plus speed of evolution");
    struct {
        double J = 1.0, gamma = 0.0, theta = 0.5 * pi, phi = 1.5 * pi;
        double t_end = 10.0, dt_out = 0.01, tol = bloch_ode_default_tol;
        std::string out;
    } ev;
    cmd_evolve->add_option("--J", ev.J, "coupling");
    cmd_evolve->add_option("--gamma", ev.gamma, "gain/loss rate")->required();
    cmd_evolve->add_option("--theta", ev.theta, "initial state polar angle");
    cmd_evolve->add_option("--phi", ev.phi, "initial state phase");
    cmd_evolve->add_option("--t-end", ev.t_end, "final time")->required();
    cmd_evolve->add_option("--dt-out", ev.dt_out, "output sample spacing")->required();
    cmd_evolve->add_option("--tol", ev.tol, "integrator tolerance");
    cmd_evolve->add_option("--out", ev.out, "output CSV path")->required();

    // ---- soe-scan ----
    auto* cmd_soe = app.add_subcommand("soe-scan", "speed extremes over a gamma grid");
    struct {
        double J = 1.0, gmin = 0.0, gmax = 3.0;
        int steps = 31;
        std::string out;
    } so;
    cmd_soe->add_option("--J", so.J, "coupling");
    cmd_soe->add_option("--gamma-min", so.gmin, "grid start");
    cmd_soe->add_option("--gamma-max", so.gmax, "grid end");
    cmd_soe->add_option("--gamma-steps", so.steps, "number of grid points");
    cmd_soe->add_option("--out", so.out, "output CSV path")->required();

    // ---- k3 ----
    auto* cmd_k3 = app.add_subcommand("k3", "single K3 evaluation with audit tables");
    struct {
        double J = 1.0, gamma = 0.0;
        double theta = 0, phi = 0, theta_m = 0, phi_m = 0, t2 = 0, t3 = 0;
        std::string out;
    } kk;
    cmd_k3->add_option("--J", kk.J, "coupling");
    cmd_k3->add_option("--gamma", kk.gamma, "gain/loss rate")->required();
    cmd_k3->add_option("--theta", kk.theta)->required();
    cmd_k3->add_option("--phi", kk.phi)->required();
    cmd_k3->add_option("--theta-m", kk.theta_m)->required();
    cmd_k3->add_option("--phi-m", kk.phi_m)->required();
    cmd_k3->add_option("--t2", kk.t2)->required();
    cmd_k3->add_option("--t3", kk.t3)->required();
    cmd_k3->add_option("--out", kk.out, "audit JSON path")->required();

    // ---- k3-scan ----
    auto* cmd_scan = app.add_subcommand("k3-scan", "optimized K3 over a gamma grid");
    struct {
        double J = 1.0, gmin = 0.25, gmax = 3.0, t_max = 0.0;
        int steps = 12, starts = 64;
        std::uint64_t seed = 0;
        std::string out;
    } sc;
    cmd_scan->add_option("--J", sc.J, "coupling");
    cmd_scan->add_option("--gamma-min", sc.gmin, "grid start");
    cmd_scan->add_option("--gamma-max", sc.gmax, "grid end");
    cmd_scan->add_option("--gamma-steps", sc.steps, "number of grid points");
    cmd_scan->add_option("--t-max", sc.t_max, "time-window bound (default 50/J)");
    cmd_scan->add_option("--starts", sc.starts, "multi-start count (doubled when broken)");
    cmd_scan->add_option("--seed", sc.seed, "RNG seed")->required();
    cmd_scan->add_option("--out", sc.out, "output CSV path")->required();

    // ---- fixed-scan ----
    auto* cmd_fixed = app.add_subcommand("fixed-scan",
                                         "time-optimized K3 heatmap with Q = sigma_y");
    struct {
        double J = 1.0, gamma = 0.0, t_max = 0.0;
        int n_theta = 51, n_phi = 52;
        std::uint64_t seed = 0;
        std::string out;
    } fx;
    cmd_fixed->add_option("--J", fx.J, "coupling");
    cmd_fixed->add_option("--gamma", fx.gamma, "gain/loss rate")->required();
    cmd_fixed->add_option("--grid-theta", fx.n_theta, "theta grid points");
    cmd_fixed->add_option("--grid-phi", fx.n_phi, "phi grid points");
    cmd_fixed->add_option("--t-max", fx.t_max, "time-window bound (default 50/J)");
    cmd_fixed->add_option("--seed", fx.seed, "RNG seed")->required();
    cmd_fixed->add_option("--out", fx.out, "heatmap CSV path")->required();

    // ---- lindblad ----
    auto* cmd_lb = app.add_subcommand("lindblad", "three-level Lindblad dynamics and checks");
    struct {
        double gamma1 = 0.0, t_end = 5.0, dt_out = 0.05, tol = 1e-10;
        double theta = 0.5 * pi, phi = 1.5 * pi;
        std::string check = "none";
        std::string out;
    } lb;
    cmd_lb->add_option("--gamma1", lb.gamma1, "dissipator rate")->required();
    cmd_lb->add_option("--t-end", lb.t_end, "final time");
    cmd_lb->add_option("--dt-out", lb.dt_out, "output sample spacing");
    cmd_lb->add_option("--tol", lb.tol, "integrator tolerance");
    cmd_lb->add_option("--theta", lb.theta, "initial-state angle for --check parametric");
    cmd_lb->add_option("--phi", lb.phi, "initial-state phase for --check parametric");
    cmd_lb->add_option("--check", lb.check, "none|e15|parametric|equivalence")
        ->check(CLI::IsMember({"none", "e15", "parametric", "equivalence"}));
    cmd_lb->add_option("--out", lb.out, "trajectory CSV path")->required();

    // ---- verify ----
    auto* cmd_verify = app.add_subcommand("verify", "run the acceptance checklist");
    bool verify_json = false;
    cmd_verify->add_flag("--json", verify_json, "machine-readable per-criterion results");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*cmd_evolve) {
            ManifestWriter man("evolve");
            const PTParams p(ev.J, ev.gamma);
            const double theta = maybe_rad(ev.theta, degrees);
            const double phi = maybe_rad(ev.phi, degrees);
            man.config("J", ev.J);
            man.config("gamma", ev.gamma);
            man.config("theta", theta);
            man.config("phi", phi);
            man.config("t_end", ev.t_end);
            man.config("dt_out", ev.dt_out);
            man.config("tol", ev.tol);
            const BlochVector s0 = PureState2::from_angles(theta, phi).bloch();
            const Trajectory traj = evolve_bloch_sampled(s0, ev.t_end, ev.dt_out, ev.tol, p);
            const auto speeds = speed_along_trajectory(traj, p);
            std::vector<std::vector<double>> rows;
            rows.reserve(traj.points.size());
            for (std::size_t i = 0; i < traj.points.size(); ++i) {
                const auto& pt = traj.points[i];
                const auto& sp = speeds[i];
                rows.push_back({pt.t, pt.s.x, pt.s.y, pt.s.z, sp.v, sp.v1_sq, sp.v2_sq,
                                sp.v3_sq});
            }
            man.output_file(ev.out,
                            csv_render("t,S_x,S_y,S_z,v,v1_sq,v2_sq,v3_sq", rows));
            man.emit();
            return 0;
        }

        if (*cmd_soe) {
            ManifestWriter man("soe-scan");
            man.config("J", so.J);
            man.config("gamma_min", so.gmin);
            man.config("gamma_max", so.gmax);
            man.config("gamma_steps", so.steps);
            const auto gammas = linspace(so.gmin, so.gmax, so.steps);
            const auto scan = order_parameter_scan(gammas, PTParams(so.J, 0.0));
            man.output_file(so.out, order_parameter_csv(scan));
            man.emit();
            return 0;
        }

        if (*cmd_k3) {
            ManifestWriter man("k3");
            const PTParams p(kk.J, kk.gamma);
            const LGIConfig cfg{maybe_rad(kk.theta, degrees), maybe_rad(kk.phi, degrees),
                                maybe_rad(kk.theta_m, degrees),
                                maybe_rad(kk.phi_m, degrees), kk.t2, kk.t3};
            const K3Result r = k3(cfg, p);
            json audit;
            audit["config"] = {{"J", kk.J},         {"gamma", kk.gamma},
                               {"theta", cfg.theta}, {"phi", cfg.phi},
                               {"theta_m", cfg.theta_m}, {"phi_m", cfg.phi_m},
                               {"t1", 0.0},          {"t2", cfg.t2},
                               {"t3", cfg.t3}};
            audit["tables"] = {{"c12", table_json(r.table12)},
                               {"c23", table_json(r.table23)},
                               {"c13", table_json(r.table13)}};
            audit["c12"] = r.c12;
            audit["c23"] = r.c23;
            audit["c13"] = r.c13;
            audit["k3"] = r.k3;
            man.config("gamma", kk.gamma);
            man.output_file(kk.out, audit.dump(2) + "\n");
            man.emit();
            return 0;
        }

        if (*cmd_scan) {
            ManifestWriter man("k3-scan");
            man.config("J", sc.J);
            man.config("gamma_min", sc.gmin);
            man.config("gamma_max", sc.gmax);
            man.config("gamma_steps", sc.steps);
            man.config("seed", sc.seed);
            man.config("starts", sc.starts);
            man.m["seed"] = sc.seed;
            const double t_max = sc.t_max > 0 ? sc.t_max : 50.0 / sc.J;
            OptimizerSettings settings;
            settings.seed = sc.seed;
            settings.n_starts = sc.starts;
            settings.jobs = jobs;
            const auto gammas = linspace(sc.gmin, sc.gmax, sc.steps);
            const auto scan_rows = gamma_scan(gammas, SearchSpace::full(t_max), settings, sc.J);
            std::vector<std::vector<double>> rows;
            for (const auto& r : scan_rows)
                rows.push_back({r.gamma, r.k3_max, r.theta, r.phi, r.theta_m, r.phi_m,
                                r.t2, r.t3});
            man.output_file(sc.out,
                            csv_render("gamma,k3_max,theta,phi,theta_m,phi_m,t2,t3", rows));
            man.emit();
            return 0;
        }

        if (*cmd_fixed) {
            ManifestWriter man("fixed-scan");
            man.config("J", fx.J);
            man.config("gamma", fx.gamma);
            man.config("seed", fx.seed);
            man.config("grid_theta", fx.n_theta);
            man.config("grid_phi", fx.n_phi);
            man.m["seed"] = fx.seed;
            OptimizerSettings settings;
            settings.seed = fx.seed;
            settings.jobs = jobs;
            const FixedScanResult res = fixed_measurement_scan(
                PTParams(fx.J, fx.gamma), settings, fx.n_theta, fx.n_phi, 0.5 * pi,
                0.5 * pi, fx.t_max);
            std::vector<std::vector<double>> rows;
            for (const auto& r : res.rows) rows.push_back({r.theta, r.phi, r.k3});
            man.output_file(fx.out, csv_render("theta,phi,k3", rows));
            man.m["k3_max"] = res.k3_max;
            man.m["theta_star"] = res.theta;
            man.m["phi_star"] = res.phi;
            man.emit();
            return 0;
        }

        if (*cmd_lb) {
            ManifestWriter man("lindblad");
            man.config("gamma1", lb.gamma1);
            man.config("t_end", lb.t_end);
            man.config("dt_out", lb.dt_out);
            man.config("check", lb.check);
            const LindbladParams p(1.0, lb.gamma1);
            const Density3 rho0 = [&] {
                if (lb.check == "parametric")
                    return b1_density(0.5, maybe_rad(lb.theta, degrees),
                                      maybe_rad(lb.phi, degrees));
                Density3 m;
                m(0, 0) = 0.5;
                m(1, 1) = 0.5;
                m(0, 1) = cplx(0.0, -0.5);
                m(1, 0) = cplx(0.0, 0.5);
                return m;
            }();
            std::vector<double> times;
            const int n = static_cast<int>(std::floor(lb.t_end / lb.dt_out + 1e-9));
            for (int i = 0; i <= n; ++i) times.push_back(i * lb.dt_out);
            std::vector<Density3> traj;
            traj.push_back(rho0);
            {
                std::vector<double> tail(times.begin() + 1, times.end());
                const auto rest = integrate_sampled(rho0, tail, lb.tol, p);
                traj.insert(traj.end(), rest.begin(), rest.end());
            }
            man.output_file(lb.out, density3_csv(times, traj));

            double max_dev = 0;
            if (lb.check == "e15") {
                for (std::size_t i = 0; i < times.size(); ++i)
                    max_dev = std::max(
                        max_dev, frobenius_distance(traj[i], analytic_e15(times[i], lb.gamma1)));
                man.m["check_max_deviation"] = max_dev;
            } else if (lb.check == "parametric") {
                for (std::size_t i = 0; i < times.size(); ++i) {
                    const ParametricForm3 f =
                        analytic_parametric(times[i], 0.5 * lb.gamma1,
                                            maybe_rad(lb.theta, degrees),
                                            maybe_rad(lb.phi, degrees));
                    max_dev = std::max(max_dev,
                                       frobenius_distance(
                                           traj[i], b1_density(f.r3, f.theta3, f.phi3)));
                }
                man.m["check_max_deviation"] = max_dev;
            } else if (lb.check == "equivalence") {
                std::vector<double> sweep_times;
                for (int i = 1; i <= 10; ++i) sweep_times.push_back(lb.t_end * i / 10.0);
                const EquivalenceReport rep =
                    equivalence_sweep({lb.gamma1}, 8, 8, sweep_times, lb.tol);
                max_dev = rep.max_deviation;
                json jrep;
                jrep["grid"] = {{"n_theta", rep.n_theta},
                                {"n_phi", rep.n_phi},
                                {"gamma1", lb.gamma1},
                                {"times", rep.times}};
                jrep["max_deviation"] = rep.max_deviation;
                jrep["argmax"] = {{"theta", rep.arg_theta},
                                  {"phi", rep.arg_phi},
                                  {"gamma1", rep.arg_gamma1},
                                  {"t", rep.arg_t}};
                man.m["report"] = jrep;
            }
            man.emit();
            if (lb.check != "none" && max_dev > 1e-5) return 4;
            return 0;
        }

        if (*cmd_verify) {
            const auto results = run_all_criteria(jobs);
            bool all_pass = true;
            if (verify_json) {
                json out = json::array();
                for (const auto& r : results) {
                    json item;
                    item["id"] = r.id;
                    item["name"] = r.name;
                    item["pass"] = r.pass;
                    item["detail"] = r.detail;
                    out.push_back(item);
                    all_pass = all_pass && r.pass;
                }
                std::cout << out.dump(2) << std::endl;
            } else {
                for (const auto& r : results) {
                    std::printf("[%s] criterion %2d: %s (%s)\n", r.pass ? "PASS" : "FAIL",
                                r.id, r.name.c_str(), r.detail.c_str());
                    all_pass = all_pass && r.pass;
                }
            }
            return all_pass ? 0 : 1;
        }
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
