#pragma once

#include "svput/errors.hpp"
#include "svput/model.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace svput {

/// Uniform lattice on the truncated box [s_min, s_max] x [0, y_max] x [0, T_horizon]
/// in transformed variables s = ln x, theta = T - t. n_s/n_y/n_theta count
/// cells; node arrays have one more entry. The strike log ln K always sits
/// strictly between two s-nodes (the payoff kink is a low-regularity line,
/// keeping it off nodes reduces discretization noise).
struct Grid {
    double s_min = 0.0;
    double s_max = 0.0;
    double y_max = 0.0;
    std::size_t n_s = 0;
    std::size_t n_y = 0;
    std::size_t n_theta = 0;
    double ds = 0.0;
    double dy = 0.0;
    double dtheta = 0.0; ///< 0 when n_theta == 0
    double T_horizon = 0.0;
    double ln_strike = 0.0;
    std::vector<double> s_nodes;     ///< size n_s + 1
    std::vector<double> y_nodes;     ///< size n_y + 1, y_nodes[0] == 0
    std::vector<double> theta_nodes; ///< size n_theta + 1

    std::size_t ns1() const { return n_s + 1; }
    std::size_t ny1() const { return n_y + 1; }
    std::size_t n_nodes() const { return ns1() * ny1(); }
    std::size_t index(std::size_t i, std::size_t j) const { return j * ns1() + i; }
};

/// Builds the lattice; spatial cell counts must be >= 3, n_theta may be 0
/// (no time march). s_min/s_max are placed at ln K -+ s_half_width and the
/// whole s-line is shifted by ds/2 when ln K would land on a node.
Grid build_grid(const SVModel& model, double s_half_width, double y_max, std::size_t n_s,
                std::size_t n_y, std::size_t n_theta);

/// Same, but marching to an explicit horizon instead of model.T (used for the
/// long-horizon stationary boundary).
Grid build_grid_horizon(const SVModel& model, double s_half_width, double y_max,
                        std::size_t n_s, std::size_t n_y, std::size_t n_theta,
                        double T_horizon);

/// (s, theta) -> (x, t): x = e^s, t = T - theta.
std::pair<double, double> to_physical(double s, double theta, double T);

/// (x, t) -> (s, theta): s = ln x, theta = T - t.
std::pair<double, double> from_physical(double x, double t, double T);

/// One theta-slice of the discrete solution, with the sharp payoff and the
/// complementarity residual field measured against the unpenalized operator.
struct Surface {
    std::vector<double> values;   ///< u[i,j] flattened as j*ns1+i
    std::vector<double> payoff;   ///< (K - e^{s_i})^+, indexed by i only
    std::vector<double> residual; ///< per-node min(du/dtheta - L u, u - payoff); 0 on slice 0
    double theta = 0.0;
    double epsilon = 0.0; ///< penalty epsilon the slice was produced with (0 for PSOR)

    double& at(const Grid& g, std::size_t i, std::size_t j) { return values[g.index(i, j)]; }
    double at(const Grid& g, std::size_t i, std::size_t j) const {
        return values[g.index(i, j)];
    }
};

/// Sharp payoff vector (K - e^{s_i})^+ over the s-nodes.
std::vector<double> payoff_vector(const Grid& grid, double strike);

/// Bilinear interpolation of a slice at interior query points.
double bilinear_at(const Grid& grid, const std::vector<double>& values, double s, double y);

} // namespace svput
