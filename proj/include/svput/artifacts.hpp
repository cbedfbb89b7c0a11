#pragma once

#include "svput/free_boundary.hpp"
#include "svput/mc.hpp"
#include "svput/solver.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace svput {

/// Shortest-round-trip-safe formatting used in every CSV cell, so repeated
/// runs produce byte-identical artifacts.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string content_hash_hex(std::string_view bytes);

/// Long-format surface dump, header "s,y,theta,u,payoff,residual".
std::string surface_csv(const SolveResult& result);

/// Long-format boundary dump, header "y,theta,h,g".
std::string boundary_csv(const FreeBoundary& fb);

/// Exercise-step histogram, header "step,t,count".
std::string histogram_csv(const std::vector<std::size_t>& counts, double t0, double dt);

nlohmann::json grid_json(const Grid& grid);
nlohmann::json mc_estimate_json(const MCEstimate& est);
nlohmann::json structure_report_json(const StructureReport& rep);

/// Attaches the config echo and content hash to a JSON artifact body. The
/// hash covers body+config only; the timing block is added afterwards and is
/// excluded, so re-runs of the same config hash identically.
nlohmann::json finalize_artifact(nlohmann::json body, const nlohmann::json& config_echo,
                                 double wallclock_seconds);

/// Strips the volatile timing block (for byte comparisons across runs).
nlohmann::json without_timing(nlohmann::json artifact);

void write_text_file(const std::string& path, std::string_view content);

/// Writes a CSV plus its metadata sidecar <path>.meta.json carrying the
/// config echo, the CSV content hash and any context the caller adds.
void write_csv_with_sidecar(const std::string& path, std::string_view csv,
                            const nlohmann::json& config_echo, nlohmann::json context);

} // namespace svput
