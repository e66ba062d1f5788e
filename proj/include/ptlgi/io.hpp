#pragma once

// CSV rendering (fixed header, LF endings, 12 significant digits) and the
// FNV-1a digest used by run manifests to fingerprint outputs.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ptlgi/common.hpp"
#include "ptlgi/lindblad3.hpp"
#include "ptlgi/speed.hpp"

namespace ptlgi {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string csv_render(const std::string& header,
                              const std::vector<std::vector<double>>& rows) {
    std::string out = header;
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Fixed schemas for the exported data sets.

inline std::string trajectory_csv(const Trajectory& traj) {
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.points.size());
    for (const auto& pt : traj.points) rows.push_back({pt.t, pt.s.x, pt.s.y, pt.s.z});
    return csv_render("t,S_x,S_y,S_z", rows);
}

inline std::string speed_csv(const std::vector<SpeedSample>& samples) {
    std::vector<std::vector<double>> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples)
        rows.push_back({s.t, s.v, s.v1_sq, s.v2_sq, s.v3_sq});
    return csv_render("t,v,v1_sq,v2_sq,v3_sq", rows);
}

inline std::string order_parameter_csv(const std::vector<OrderParamRow>& rows_in) {
    std::vector<std::vector<double>> rows;
    rows.reserve(rows_in.size());
    for (const auto& r : rows_in) rows.push_back({r.gamma, r.v_max, r.v_min});
    return csv_render("gamma,v_max,v_min", rows);
}

inline std::string density3_csv(const std::vector<double>& times,
                                const std::vector<Density3>& states) {
    std::vector<std::vector<double>> rows;
    rows.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> row{times[i]};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                row.push_back(states[i](a, b).real());
                row.push_back(states[i](a, b).imag());
            }
        rows.push_back(row);
    }
    return csv_render(
        "t,re_ff,im_ff,re_fe,im_fe,re_fg,im_fg,re_ef,im_ef,re_ee,im_ee,re_eg,im_eg,"
        "re_gf,im_gf,re_ge,im_ge,re_gg,im_gg",
        rows);
}

}  // namespace ptlgi
