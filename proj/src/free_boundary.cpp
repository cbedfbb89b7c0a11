#include "svput/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace svput {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string cell(std::size_t jy, std::size_t kth, double y, double theta) {
    std::ostringstream os;
    os << "(j=" << jy << ", k=" << kth << ", y=" << y << ", theta=" << theta << ")";
    return os.str();
}

} // namespace

double FreeBoundary::g_at(double yq, double tq) const {
    const double thq = std::clamp(T - tq, theta.front(), theta.back());
    const double yc = std::clamp(yq, y.front(), y.back());

    const auto bracket = [](const std::vector<double>& grid, double q) -> std::size_t {
        const auto ub = std::upper_bound(grid.begin(), grid.end(), q);
        const std::ptrdiff_t idx = ub - grid.begin() - 1;
        return static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(grid.size()) - 2));
    };
    const std::size_t k = theta.size() >= 2 ? bracket(theta, thq) : 0;
    const std::size_t j = y.size() >= 2 ? bracket(y, yc) : 0;
    const std::size_t k1 = std::min(k + 1, theta.size() - 1);
    const std::size_t j1 = std::min(j + 1, y.size() - 1);

    const double wk = theta[k1] > theta[k] ? (thq - theta[k]) / (theta[k1] - theta[k]) : 0.0;
    const double wj = y[j1] > y[j] ? (yc - y[j]) / (y[j1] - y[j]) : 0.0;

    const double g00 = g[index(j, k)];
    const double g10 = g[index(j1, k)];
    const double g01 = g[index(j, k1)];
    const double g11 = g[index(j1, k1)];
    return (1.0 - wj) * (1.0 - wk) * g00 + wj * (1.0 - wk) * g10 + (1.0 - wj) * wk * g01 +
           wj * wk * g11;
}

FreeBoundary extract(const SolveResult& result, double contact_tol) {
    const Grid& grid = result.grid;
    if (grid.n_theta == 0)
        throw parameter_error("extract: result has no positive-theta slices");
    if (contact_tol <= 0.0) {
        contact_tol = result.method == SolveMethod::Penalty
                          ? 10.0 * result.epsilon_used * result.strike
                          : 1e-8 * result.strike;
    }

    FreeBoundary fb;
    fb.tol_used = contact_tol;
    fb.ds = grid.ds;
    fb.ln_strike = grid.ln_strike;
    fb.T = grid.T_horizon;
    fb.y.assign(grid.y_nodes.begin() + 1, grid.y_nodes.end());
    fb.theta.assign(grid.theta_nodes.begin() + 1, grid.theta_nodes.end());
    fb.h.assign(fb.y.size() * fb.theta.size(), kNegInf);
    fb.g.assign(fb.h.size(), 0.0);

    // contact is measured against the raw intrinsic value K - e^s (not its
    // positive part): past the strike that gap grows like e^s - K, which keeps
    // the far field out of the coincidence set even though u is small there
    const std::size_t ns = grid.n_s;
    std::vector<double> intrinsic(grid.ns1());
    for (std::size_t i = 0; i <= ns; ++i)
        intrinsic[i] = result.strike - std::exp(grid.s_nodes[i]);

    for (std::size_t k = 1; k <= grid.n_theta; ++k) {
        const Surface& slice = result.surfaces[k];
        for (std::size_t j = 1; j <= grid.n_y; ++j) {
            // largest contacted node, scanning from the far end
            std::size_t ic = ns + 1; // sentinel: none
            for (std::size_t ii = ns + 1; ii-- > 0;) {
                const double gap = slice.values[grid.index(ii, j)] - intrinsic[ii];
                if (gap <= contact_tol) {
                    ic = ii;
                    break;
                }
            }
            const std::size_t cellidx = fb.index(j - 1, k - 1);
            if (ic == ns + 1) continue; // empty coincidence column
            if (ic == ns)
                throw truncation_suspicious(
                    "extract: exercise region touches s_max at y=" +
                    std::to_string(grid.y_nodes[j]) + ", theta=" +
                    std::to_string(grid.theta_nodes[k]) +
                    "; enlarge the truncated domain");

            // refine by interpolating the contact gap across [s_ic, s_ic+1]
            const double gap0 = slice.values[grid.index(ic, j)] - intrinsic[ic];
            const double gap1 = slice.values[grid.index(ic + 1, j)] - intrinsic[ic + 1];
            double hval = grid.s_nodes[ic];
            if (gap1 > gap0)
                hval += grid.ds * std::clamp((contact_tol - gap0) / (gap1 - gap0), 0.0, 1.0);
            fb.h[cellidx] = hval;
            fb.g[cellidx] = std::exp(hval);
        }
    }
    return fb;
}

bool StructureReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const StructureCheck& c) { return c.passed; });
}

const StructureCheck* StructureReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

StructureReport check_structure(const FreeBoundary& fb, double max_jump_factor) {
    StructureReport rep;
    const std::size_t ny = fb.y.size(), nk = fb.theta.size();
    const double ds = fb.ds;

    StructureCheck mono_theta{"monotone_theta", true, ""};
    StructureCheck mono_y{"monotone_y", true, ""};
    StructureCheck below_strike{"below_ln_strike", true, ""};
    StructureCheck jumps{"jump_bound", true, ""};
    StructureCheck start_at_strike{"start_near_ln_strike", true, ""};

    for (std::size_t k = 0; k < nk; ++k) {
        for (std::size_t j = 0; j < ny; ++j) {
            const double h = fb.h_at(j, k);
            const bool fin = std::isfinite(h);

            if (fin && !(h < fb.ln_strike) && below_strike.passed) {
                below_strike.passed = false;
                below_strike.detail = "h >= ln K at " + cell(j, k, fb.y[j], fb.theta[k]);
            }
            if (k + 1 < nk) {
                const double hn = fb.h_at(j, k + 1);
                // decreasing in theta within one spacing; a column may only
                // empty out (go to -inf), never fill back in
                const bool ok = (hn <= h + ds) || (!fin && !std::isfinite(hn));
                if (!ok && mono_theta.passed) {
                    mono_theta.passed = false;
                    mono_theta.detail =
                        "h increases in theta at " + cell(j, k + 1, fb.y[j], fb.theta[k + 1]);
                }
                if (fin && std::isfinite(hn) && std::abs(hn - h) > max_jump_factor * ds &&
                    jumps.passed) {
                    jumps.passed = false;
                    jumps.detail = "theta-jump " + std::to_string(std::abs(hn - h)) + " at " +
                                   cell(j, k + 1, fb.y[j], fb.theta[k + 1]);
                }
            }
            if (j + 1 < ny) {
                const double hn = fb.h_at(j + 1, k);
                const bool ok = (hn <= h + ds) || (!fin && !std::isfinite(hn));
                if (!ok && mono_y.passed) {
                    mono_y.passed = false;
                    mono_y.detail =
                        "h increases in y at " + cell(j + 1, k, fb.y[j + 1], fb.theta[k]);
                }
                if (fin && std::isfinite(hn) && std::abs(hn - h) > max_jump_factor * ds &&
                    jumps.passed) {
                    jumps.passed = false;
                    jumps.detail = "y-jump " + std::to_string(std::abs(hn - h)) + " at " +
                                   cell(j + 1, k, fb.y[j + 1], fb.theta[k]);
                }
            }
        }
    }

    for (std::size_t j = 0; j < ny; ++j) {
        const double h0 = fb.h_at(j, 0);
        if (!(std::isfinite(h0) && std::abs(h0 - fb.ln_strike) <= 2.0 * ds)) {
            start_at_strike.passed = false;
            start_at_strike.detail =
                "h(y, first theta) not within 2 ds of ln K at " + cell(j, 0, fb.y[j], fb.theta[0]);
            break;
        }
    }

    rep.checks = {mono_theta, mono_y, below_strike, jumps, start_at_strike};
    return rep;
}

std::vector<double> perpetual_boundary(const SVModel& model, const Grid& grid,
                                       const SolveConfig& config, double horizon_factor) {
    if (!(horizon_factor >= 4.0))
        throw parameter_error("perpetual_boundary: horizon_factor must be >= 4");
    if (grid.n_theta == 0) throw parameter_error("perpetual_boundary: grid has no time steps");

    // march to T' = horizon_factor * T with the same spatial lattice and step
    const std::size_t n_theta_long = static_cast<std::size_t>(
        std::ceil(horizon_factor * static_cast<double>(grid.n_theta)));
    const double s_half_width = 0.5 * (grid.s_max - grid.s_min);
    const double horizon = grid.dtheta * static_cast<double>(n_theta_long);
    Grid long_grid = build_grid_horizon(model, s_half_width, grid.y_max, grid.n_s, grid.n_y,
                                        n_theta_long, horizon);

    const SolveResult result = config.method == SolveMethod::Psor
                                   ? psor_solve(model, long_grid, config)
                                   : solve(model, long_grid, config);
    const FreeBoundary fb = extract(result);

    // stationarity: the boundary must not have moved over the last T of horizon
    const double theta_probe = horizon * (1.0 - 1.0 / horizon_factor);
    std::size_t k_probe = 0;
    for (std::size_t k = 0; k < fb.theta.size(); ++k)
        if (fb.theta[k] <= theta_probe) k_probe = k;
    const std::size_t k_last = fb.theta.size() - 1;

    double worst = 0.0;
    for (std::size_t j = 0; j < fb.y.size(); ++j) {
        const double a = fb.h_at(j, k_probe), b = fb.h_at(j, k_last);
        if (std::isfinite(a) != std::isfinite(b)) {
            worst = std::numeric_limits<double>::infinity();
            break;
        }
        if (std::isfinite(a)) worst = std::max(worst, std::abs(a - b));
    }
    if (!(worst <= 2.0 * grid.ds))
        throw horizon_too_short(
            "perpetual_boundary: boundary still moves by " + std::to_string(worst) +
            " over the last T of the horizon; increase horizon_factor above " +
            std::to_string(horizon_factor));

    std::vector<double> h0(fb.y.size());
    for (std::size_t j = 0; j < fb.y.size(); ++j) h0[j] = fb.h_at(j, k_last);
    return h0;
}

} // namespace svput
