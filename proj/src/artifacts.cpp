#include "svput/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace svput {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string content_hash_hex(std::string_view bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string surface_csv(const SolveResult& result) {
    const Grid& g = result.grid;
    std::string out = "s,y,theta,u,payoff,residual\n";
    out.reserve(out.size() + result.surfaces.size() * g.n_nodes() * 48);
    for (const Surface& slice : result.surfaces) {
        for (std::size_t j = 0; j < g.ny1(); ++j) {
            for (std::size_t i = 0; i < g.ns1(); ++i) {
                const std::size_t row = g.index(i, j);
                out += format_double(g.s_nodes[i]);
                out += ',';
                out += format_double(g.y_nodes[j]);
                out += ',';
                out += format_double(slice.theta);
                out += ',';
                out += format_double(slice.values[row]);
                out += ',';
                out += format_double(slice.payoff[i]);
                out += ',';
                out += format_double(slice.residual.empty() ? 0.0 : slice.residual[row]);
                out += '\n';
            }
        }
    }
    return out;
}

std::string boundary_csv(const FreeBoundary& fb) {
    std::string out = "y,theta,h,g\n";
    for (std::size_t k = 0; k < fb.theta.size(); ++k) {
        for (std::size_t j = 0; j < fb.y.size(); ++j) {
            out += format_double(fb.y[j]);
            out += ',';
            out += format_double(fb.theta[k]);
            out += ',';
            out += format_double(fb.h_at(j, k));
            out += ',';
            out += format_double(fb.g[fb.index(j, k)]);
            out += '\n';
        }
    }
    return out;
}

std::string histogram_csv(const std::vector<std::size_t>& counts, double t0, double dt) {
    std::string out = "step,t,count\n";
    for (std::size_t k = 0; k < counts.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += format_double(t0 + dt * static_cast<double>(k));
        out += ',';
        out += std::to_string(counts[k]);
        out += '\n';
    }
    return out;
}

nlohmann::json grid_json(const Grid& grid) {
    return {{"s_min", grid.s_min},     {"s_max", grid.s_max},   {"y_max", grid.y_max},
            {"n_s", grid.n_s},         {"n_y", grid.n_y},       {"n_theta", grid.n_theta},
            {"ds", grid.ds},           {"dy", grid.dy},         {"dtheta", grid.dtheta},
            {"T_horizon", grid.T_horizon}};
}

nlohmann::json mc_estimate_json(const MCEstimate& est) {
    const char* method = est.method == MCEstimate::Method::LSMC      ? "lsmc"
                         : est.method == MCEstimate::Method::Policy  ? "policy"
                                                                     : "european";
    return {{"value", est.value},     {"std_error", est.std_error},
            {"n_paths", est.n_paths}, {"n_steps", est.n_steps},
            {"method", method},       {"seed", est.seed}};
}

nlohmann::json structure_report_json(const StructureReport& rep) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"checks", checks}, {"all_passed", rep.all_passed()}};
}

nlohmann::json finalize_artifact(nlohmann::json body, const nlohmann::json& config_echo,
                                 double wallclock_seconds) {
    body["config"] = config_echo;
    body["content_hash"] = content_hash_hex(body.dump());
    body["timing"] = {{"wallclock_seconds", wallclock_seconds}};
    return body;
}

nlohmann::json without_timing(nlohmann::json artifact) {
    artifact.erase("timing");
    return artifact;
}

void write_text_file(const std::string& path, std::string_view content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw config_error("artifacts: cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void write_csv_with_sidecar(const std::string& path, std::string_view csv,
                            const nlohmann::json& config_echo, nlohmann::json context) {
    write_text_file(path, csv);
    context["config"] = config_echo;
    context["content_hash"] = content_hash_hex(csv);
    write_text_file(path + ".meta.json", context.dump(2) + "\n");
}

} // namespace svput
