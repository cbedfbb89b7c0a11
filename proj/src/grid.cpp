#include "svput/grid.hpp"

#include <algorithm>
#include <cmath>

namespace svput {

namespace {

Grid build_impl(const SVModel& model, double s_half_width, double y_max, std::size_t n_s,
                std::size_t n_y, std::size_t n_theta, double horizon) {
    if (n_s < 3 || n_y < 3)
        throw config_error("grid: spatial cell counts n_s and n_y must be >= 3");
    if (!(s_half_width > 0.0)) throw config_error("grid: s_half_width must be > 0");
    if (!(y_max > 0.0)) throw config_error("grid: y_max must be > 0");
    if (!(horizon > 0.0)) throw config_error("grid: time horizon must be > 0");

    Grid g;
    g.ln_strike = std::log(model.K);
    g.n_s = n_s;
    g.n_y = n_y;
    g.n_theta = n_theta;
    g.y_max = y_max;
    g.T_horizon = horizon;

    g.ds = 2.0 * s_half_width / static_cast<double>(n_s);
    double s0 = g.ln_strike - s_half_width;
    // Shift by half a cell when the strike would land on a node (even n_s).
    const double frac = s_half_width / g.ds - std::floor(s_half_width / g.ds);
    if (std::min(frac, 1.0 - frac) * g.ds < 1e-9) s0 += 0.5 * g.ds;
    g.s_min = s0;
    g.s_max = s0 + 2.0 * s_half_width;
    if (!(g.s_min < g.ln_strike && g.ln_strike < g.s_max))
        throw config_error("grid: strike must lie strictly inside [s_min, s_max]");

    g.s_nodes.resize(n_s + 1);
    for (std::size_t i = 0; i <= n_s; ++i)
        g.s_nodes[i] = g.s_min + g.ds * static_cast<double>(i);
    g.s_nodes.back() = g.s_max;

    g.dy = y_max / static_cast<double>(n_y);
    g.y_nodes.resize(n_y + 1);
    for (std::size_t j = 0; j <= n_y; ++j) g.y_nodes[j] = g.dy * static_cast<double>(j);
    g.y_nodes[0] = 0.0;
    g.y_nodes.back() = y_max;

    g.theta_nodes.resize(n_theta + 1);
    if (n_theta == 0) {
        g.dtheta = 0.0;
        g.theta_nodes[0] = 0.0;
    } else {
        g.dtheta = horizon / static_cast<double>(n_theta);
        for (std::size_t k = 0; k <= n_theta; ++k)
            g.theta_nodes[k] = g.dtheta * static_cast<double>(k);
        g.theta_nodes.back() = horizon;
    }
    return g;
}

} // namespace

Grid build_grid(const SVModel& model, double s_half_width, double y_max, std::size_t n_s,
                std::size_t n_y, std::size_t n_theta) {
    model.validate_params();
    return build_impl(model, s_half_width, y_max, n_s, n_y, n_theta, model.T);
}

Grid build_grid_horizon(const SVModel& model, double s_half_width, double y_max,
                        std::size_t n_s, std::size_t n_y, std::size_t n_theta,
                        double T_horizon) {
    model.validate_params();
    return build_impl(model, s_half_width, y_max, n_s, n_y, n_theta, T_horizon);
}

std::pair<double, double> to_physical(double s, double theta, double T) {
    return {std::exp(s), T - theta};
}

std::pair<double, double> from_physical(double x, double t, double T) {
    if (!(x > 0.0)) throw parameter_error("from_physical: x must be > 0");
    return {std::log(x), T - t};
}

std::vector<double> payoff_vector(const Grid& grid, double strike) {
    std::vector<double> p(grid.ns1());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = std::max(strike - std::exp(grid.s_nodes[i]), 0.0);
    return p;
}

double bilinear_at(const Grid& grid, const std::vector<double>& values, double s, double y) {
    if (s < grid.s_min || s > grid.s_max || y < 0.0 || y > grid.y_max)
        throw parameter_error("bilinear_at: query point outside the grid");
    const double fi = (s - grid.s_min) / grid.ds;
    const double fj = y / grid.dy;
    std::size_t i = std::min(static_cast<std::size_t>(fi), grid.n_s - 1);
    std::size_t j = std::min(static_cast<std::size_t>(fj), grid.n_y - 1);
    const double wi = fi - static_cast<double>(i);
    const double wj = fj - static_cast<double>(j);
    const double v00 = values[grid.index(i, j)];
    const double v10 = values[grid.index(i + 1, j)];
    const double v01 = values[grid.index(i, j + 1)];
    const double v11 = values[grid.index(i + 1, j + 1)];
    return (1.0 - wi) * (1.0 - wj) * v00 + wi * (1.0 - wj) * v10 + (1.0 - wi) * wj * v01 +
           wi * wj * v11;
}

} // namespace svput
