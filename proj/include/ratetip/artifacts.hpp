// CSV artifact writers and the run manifest. Every artifact embeds its
// provenance: the config hash, solver tolerances, and grid in a sidecar
// manifest JSON, plus a comment header in the CSV itself. Doubles are
// printed with %.17g so re-parsing round-trips bit-exactly.

#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratetip/basins.hpp"
#include "ratetip/ode.hpp"
#include "ratetip/sweep.hpp"
#include "ratetip/tipping.hpp"

namespace ratetip {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// FNV-1a 64-bit over raw bytes, as a fixed-width hex string.
inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// CSV serialisation
// ---------------------------------------------------------------------------

inline std::string basin_map_csv(const BasinMap& map) {
    std::string out;
    out += "# p1_r=" + format_double(map.p1_r) + " p1_m=" + format_double(map.p1_m) + "\n";
    out += "r,m,mask,member\n";
    for (std::size_t ir = 0; ir < map.rs.size(); ++ir)
        for (std::size_t im = 0; im < map.ms.size(); ++im) {
            const std::size_t k = map.index(ir, im);
            out += format_double(map.rs[ir]) + "," + format_double(map.ms[im]) + "," +
                   std::to_string(int(map.mask[k])) + "," + std::to_string(int(map.member[k])) +
                   "\n";
        }
    return out;
}

inline std::string diagram_csv_header(const TippingDiagram& d) {
    std::string out;
    out += "# model=" + d.model_name + " shape=" + shift_shape_name(d.shape) +
           " target=" + shift_target_name(d.target) + " base=" + format_double(d.base) +
           " p1_r=" + format_double(d.p1_r) + " p1_m=" + format_double(d.p1_m) +
           " delta_rel=" + format_double(d.delta_rel) + " horizon=" + format_double(d.horizon) +
           " c=" + format_double(d.shift_c) + " tau=" + format_double(d.shift_tau) + "\n";
    out += "delta,eps,rdot_max,class\n";
    return out;
}

inline std::string diagram_cell_row(const TippingDiagram& d, std::size_t flat) {
    const std::size_t id = flat / d.epsilons.size();
    const std::size_t ie = flat % d.epsilons.size();
    const double delta = d.deltas[id], eps = d.epsilons[ie];
    return format_double(delta) + "," + format_double(eps) + "," +
           format_double(0.5 * delta * eps) + "," + tip_class_name(d.cells[flat]) + "\n";
}

inline std::string diagram_csv(const TippingDiagram& d) {
    std::string out = diagram_csv_header(d);
    for (std::size_t k = 0; k < d.cells.size(); ++k) out += diagram_cell_row(d, k);
    return out;
}

inline std::string transitions_csv(const TippingDiagram& d) {
    std::string out = "delta,eps_crossing,index\n";
    for (const auto& t : d.transitions)
        out += format_double(t.delta) + "," + format_double(t.eps) + "," +
               std::to_string(t.index) + "\n";
    return out;
}

inline std::string partition_csv(const ReturnPartition& p) {
    std::string out = "delta,eps,region\n";
    for (std::size_t id = 0; id < p.deltas.size(); ++id)
        for (std::size_t ie = 0; ie < p.epsilons.size(); ++ie) {
            const ReturnRegion r = p.cells[p.index(id, ie)];
            if (r == ReturnRegion::undecided) continue; // recorded in the manifest count
            out += format_double(p.deltas[id]) + "," + format_double(p.epsilons[ie]) + "," +
                   return_region_name(r) + "\n";
        }
    return out;
}

/// Parse a diagram checkpoint written by diagram_csv: returns the number of
/// complete data rows and the verbatim prefix they occupy (header included).
/// A trailing partial line is discarded.
struct CheckpointState {
    std::size_t rows = 0;
    std::string content;
};

inline CheckpointState load_checkpoint(const std::filesystem::path& path,
                                       const std::string& expected_header) {
    CheckpointState st;
    if (!std::filesystem::exists(path)) return st;
    const std::string text = read_file(path);
    if (text.compare(0, expected_header.size(), expected_header) != 0)
        throw std::runtime_error("checkpoint header mismatch in " + path.string());
    std::size_t pos = expected_header.size();
    std::size_t keep = pos;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) break; // partial row, drop
        ++st.rows;
        keep = nl + 1;
        pos = nl + 1;
    }
    st.content = text.substr(0, keep);
    return st;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct ManifestInfo {
    std::string command;
    std::string config_hash;
    nlohmann::json extra;
};

inline void write_manifest(const std::filesystem::path& path, const ManifestInfo& info,
                           const IntegratorConfig& cfg, double wall_time_s,
                           bool completed = true) {
    nlohmann::json j;
    j["command"] = info.command;
    j["config_hash"] = info.config_hash;
    j["solver"] = {{"abs_tol", cfg.abs_tol},
                   {"rel_tol", cfg.rel_tol},
                   {"h_init", cfg.h_init},
                   {"max_steps", cfg.max_steps}};
    j["wall_time_s"] = wall_time_s;
    j["completed"] = completed;
    if (!info.extra.is_null()) j["params"] = info.extra;
    atomic_write_file(path, j.dump(2) + "\n");
}

inline nlohmann::json read_manifest(const std::filesystem::path& path) {
    return nlohmann::json::parse(read_file(path));
}

} // namespace ratetip
