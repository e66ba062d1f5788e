#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptlgi/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string cli = PTLGI_CLI_PATH;

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
    const fs::path out = fs::temp_directory_path() / "ptlgi_cli_stdout.txt";
    const std::string cmd = cli + " " + args + " > " + out.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream f(out);
    std::stringstream ss;
    ss << f.rdbuf();
    return {WEXITSTATUS(status), ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& text,
                                           std::string* header = nullptr) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

fs::path work_dir() {
    const fs::path d = fs::temp_directory_path() / "ptlgi_cli_tests";
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("evolve: row count, header and the Hermitian speed column", "[cli]") {
    // default phi = 3pi/2 keeps the state in the S_x = 0 plane, where the
    // Hermitian-limit speed is exactly J
    const fs::path out = work_dir() / "traj.csv";
    const RunResult r = run_cli("evolve --gamma 0 --t-end 2 --dt-out 0.1 --theta 1.0 "
                                "--out " + out.string());
    REQUIRE(r.exit_code == 0);
    std::string header;
    const auto rows = parse_csv(slurp(out), &header);
    CHECK(header == "t,S_x,S_y,S_z,v,v1_sq,v2_sq,v3_sq");
    CHECK(rows.size() == 21u);  // floor(t_end/dt_out) + 1
    for (const auto& row : rows) CHECK(std::abs(row[4] - 1.0) < 1e-7);

    const json manifest = json::parse(r.stdout_text);
    CHECK(manifest["tool"] == "ptlgi");
    CHECK(manifest["outputs"][0]["path"] == out.string());
    CHECK(manifest["outputs"][0]["bytes"].get<std::size_t>() == slurp(out).size());
}

TEST_CASE("soe-scan matches the library extremes", "[cli]") {
    const fs::path out = work_dir() / "soe.csv";
    const RunResult r = run_cli(
        "soe-scan --gamma-min 1.0 --gamma-max 1.0 --gamma-steps 1 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    std::string header;
    const auto rows = parse_csv(slurp(out), &header);
    CHECK(header == "gamma,v_max,v_min");
    REQUIRE(rows.size() == 1u);
    const ptlgi::SpeedExtremes e = ptlgi::geodesic_extremes(ptlgi::PTParams(1.0, 1.0));
    CHECK(std::abs(rows[0][1] - e.v_max) < 1e-12);
    CHECK(std::abs(rows[0][2] - e.v_min) < 1e-12);

    // default grid exposes the kink at gamma = 2
    const fs::path out2 = work_dir() / "soe_kink.csv";
    REQUIRE(run_cli("soe-scan --gamma-min 0 --gamma-max 3 --gamma-steps 31 --out " +
                    out2.string())
                .exit_code == 0);
    const auto kink = parse_csv(slurp(out2));
    for (const auto& row : kink) {
        const double expect = std::max(0.0, 1.0 - 0.5 * row[0]);
        CHECK(std::abs(row[2] - expect) < 1e-8);
    }
}

TEST_CASE("k3 audit JSON is self-consistent", "[cli]") {
    const fs::path out = work_dir() / "k3.json";
    const RunResult r = run_cli(
        "k3 --gamma 1.5 --theta 1.0 --phi 4.712 --theta-m 1.5708 --phi-m 1.5708 "
        "--t2 1.0 --t3 2.5 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const json audit = json::parse(slurp(out));
    const double k3 = audit["k3"].get<double>();
    const double c12 = audit["c12"].get<double>();
    const double c23 = audit["c23"].get<double>();
    const double c13 = audit["c13"].get<double>();
    CHECK(std::abs(c12 + c23 - c13 - k3) < 1e-12);
    for (const char* key : {"c12", "c23", "c13"}) {
        const json& t = audit["tables"][key];
        const double sum = t["p_uu"].get<double>() + t["p_ud"].get<double>() +
                           t["p_du"].get<double>() + t["p_dd"].get<double>();
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("k3-scan is byte-identical under a repeated seed", "[cli]") {
    const fs::path out_a = work_dir() / "scan_a.csv";
    const fs::path out_b = work_dir() / "scan_b.csv";
    const std::string common =
        "k3-scan --gamma-min 0.5 --gamma-max 1.0 --gamma-steps 2 --starts 6 "
        "--seed 31415 --out ";
    REQUIRE(run_cli(common + out_a.string()).exit_code == 0);
    REQUIRE(run_cli(common + out_b.string()).exit_code == 0);
    const std::string a = slurp(out_a);
    const std::string b = slurp(out_b);
    CHECK(!a.empty());
    CHECK(a == b);
    std::string header;
    const auto rows = parse_csv(a, &header);
    CHECK(header == "gamma,k3_max,theta,phi,theta_m,phi_m,t2,t3");
    CHECK(rows.size() == 2u);
    for (const auto& row : rows) CHECK(row[1] > 1.5);
}

TEST_CASE("lindblad trajectory and closed-form gate", "[cli]") {
    const fs::path out = work_dir() / "lb.csv";
    const RunResult r = run_cli("lindblad --gamma1 6 --t-end 3 --dt-out 0.05 "
                                "--tol 1e-11 --check e15 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const json manifest = json::parse(r.stdout_text);
    CHECK(manifest["check_max_deviation"].get<double>() < 1e-7);

    // gamma1 = 0: unitary three-level evolution keeps rho_gg frozen
    const fs::path out0 = work_dir() / "lb0.csv";
    REQUIRE(run_cli("lindblad --gamma1 0 --t-end 2 --dt-out 0.1 --out " + out0.string())
                .exit_code == 0);
    const auto rows = parse_csv(slurp(out0));
    for (const auto& row : rows) CHECK(std::abs(row[17]) < 1e-9);  // re_gg

    // equivalence check emits a report and passes its gate
    const fs::path oute = work_dir() / "lbe.csv";
    const RunResult re = run_cli("lindblad --gamma1 6 --t-end 4 --dt-out 0.5 "
                                 "--check equivalence --out " + oute.string());
    REQUIRE(re.exit_code == 0);
    const json man = json::parse(re.stdout_text);
    CHECK(man["report"]["max_deviation"].get<double>() < 1e-6);
}

TEST_CASE("exit codes distinguish config and numeric failures", "[cli]") {
    // unknown option
    CHECK(run_cli("evolve --nonsense 1").exit_code == 2);
    // missing required seed
    CHECK(run_cli("k3-scan --out /tmp/x.csv").exit_code == 2);
    // invalid time ordering
    CHECK(run_cli("k3 --gamma 1 --theta 1 --phi 1 --theta-m 1 --phi-m 1 --t2 2 "
                  "--t3 1 --out /tmp/x.json")
              .exit_code == 2);
    // undersized heatmap grid
    CHECK(run_cli("fixed-scan --gamma 1 --seed 1 --grid-theta 10 --grid-phi 10 "
                  "--out /tmp/x.csv")
              .exit_code == 2);
    // conditional evolution beyond the double-precision noise floor
    const double theta_src = std::acos(std::sqrt(5.0) / 3.0);
    std::ostringstream cmd;
    cmd << "k3 --gamma 3 --theta " << theta_src << " --phi 4.71238898038469 --theta-m "
        << theta_src << " --phi-m 1.5707963267948966 --t2 0.5 --t3 8.5 --out /tmp/x.json";
    CHECK(run_cli(cmd.str()).exit_code == 3);
}

TEST_CASE("degrees flag converts angles at the boundary", "[cli]") {
    const fs::path out_rad = work_dir() / "rad.csv";
    const fs::path out_deg = work_dir() / "deg.csv";
    REQUIRE(run_cli("evolve --gamma 1.5 --theta 1.5707963267948966 --phi "
                    "4.71238898038469 --t-end 1 --dt-out 0.5 --out " +
                    out_rad.string())
                .exit_code == 0);
    REQUIRE(run_cli("--degrees evolve --gamma 1.5 --theta 90 --phi 270 --t-end 1 "
                    "--dt-out 0.5 --out " +
                    out_deg.string())
                .exit_code == 0);
    CHECK(slurp(out_rad) == slurp(out_deg));
}

TEST_CASE("library CSV schemas", "[cli]") {
    using namespace ptlgi;
    const PTParams p(1.0, 1.5);
    const BlochVector s0 = PureState2::from_angles(1.0, 4.7).bloch();
    const Trajectory traj = evolve_bloch_sampled(s0, 1.0, 0.5, 1e-9, p);
    const std::string tcsv = trajectory_csv(traj);
    CHECK(tcsv.rfind("t,S_x,S_y,S_z\n", 0) == 0);
    CHECK(std::count(tcsv.begin(), tcsv.end(), '\n') == 4);  // header + 3 rows
    CHECK(tcsv.find("\r") == std::string::npos);

    const std::string scsv = speed_csv(speed_along_trajectory(traj, p));
    CHECK(scsv.rfind("t,v,v1_sq,v2_sq,v3_sq\n", 0) == 0);

    const std::string ocsv = order_parameter_csv({{1.0, 1.5, 0.5}});
    CHECK(ocsv == "gamma,v_max,v_min\n1,1.5,0.5\n");

    // 12 significant digits in the rendering
    CHECK(format_double(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("config file with sections feeds subcommands", "[cli]") {
    const fs::path cfg = work_dir() / "run.ini";
    const fs::path out = work_dir() / "cfg_traj.csv";
    {
        std::ofstream f(cfg);
        f << "[evolve]\n"
          << "gamma=0.5\n"
          << "t-end=1.0\n"
          << "dt-out=0.5\n"
          << "out=" << out.string() << "\n";
    }
    CHECK(run_cli("--config " + cfg.string() + " evolve").exit_code == 0);
    CHECK(parse_csv(slurp(out)).size() == 3u);

    // unknown keys in the config file are rejected
    const fs::path bad = work_dir() / "bad.ini";
    {
        std::ofstream f(bad);
        f << "[evolve]\n"
          << "gamma=0.5\n"
          << "t-end=1.0\n"
          << "dt-out=0.5\n"
          << "bogus-key=1\n"
          << "out=" << out.string() << "\n";
    }
    CHECK(run_cli("--config " + bad.string() + " evolve").exit_code == 2);
}
