#pragma once

#include "svput/solver.hpp"

#include <string>
#include <vector>

namespace svput {

/// Exercise boundary h(y, theta) = max{ s : u(s,y,theta) = K - e^s } sampled
/// on the positive-theta slices and positive-y rows of a solve (the boundary
/// is defined on y > 0, theta > 0 only; at y = 0 the Dirichlet datum keeps
/// the whole line in contact). g = e^h is the boundary in price units; a
/// column with no contact carries h = -inf, g = 0 ("never exercise").
struct FreeBoundary {
    std::vector<double> y;     ///< y rows, y_nodes[1..n_y]
    std::vector<double> theta; ///< theta slices, theta_nodes[1..n_theta]
    std::vector<double> h;     ///< h[(k-1)*y.size() + (j-1)]
    std::vector<double> g;     ///< exp(h), 0 at sentinels
    double tol_used = 0.0;
    double ds = 0.0;
    double ln_strike = 0.0;
    double T = 0.0; ///< horizon the extraction came from (t = T - theta)

    std::size_t index(std::size_t jy, std::size_t kth) const { return kth * y.size() + jy; }
    double h_at(std::size_t jy, std::size_t kth) const { return h[index(jy, kth)]; }

    /// Bilinear interpolation of g in (y, t) with clamping to the sampled
    /// rectangle; sentinel columns contribute threshold 0.
    double g_at(double yq, double tq) const;
};

/// Extracts the boundary from a solved result. contact_tol <= 0 picks the
/// default: 10 * epsilon * K for penalty results, 1e-8 * K for PSOR. Throws
/// truncation_suspicious when contact reaches the s_max node.
FreeBoundary extract(const SolveResult& result, double contact_tol = 0.0);

struct StructureCheck {
    std::string name;
    bool passed = false;
    std::string detail; ///< first violating cell when failed
};

struct StructureReport {
    std::vector<StructureCheck> checks;
    bool all_passed() const;
    const StructureCheck* find(const std::string& name) const;
};

/// Executable counterparts of the boundary structure results:
/// (a) nonincreasing in theta within ds, (b) nonincreasing in y within ds,
/// (c) h < ln K, (d) adjacent jumps <= max_jump_factor * ds (continuity
/// proxy), (e) h at the first positive theta within 2 ds of ln K.
StructureReport check_structure(const FreeBoundary& fb, double max_jump_factor = 5.0);

/// Stationary (perpetual) boundary h0(y), approximated by marching the
/// time-dependent problem to horizon_factor * T and reading the last slice.
/// Stationarity is verified against the boundary one T earlier; throws
/// horizon_too_short when it still moves by more than 2 ds.
std::vector<double> perpetual_boundary(const SVModel& model, const Grid& grid,
                                       const SolveConfig& config, double horizon_factor);

} // namespace svput
