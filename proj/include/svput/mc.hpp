#pragma once

#include "svput/free_boundary.hpp"
#include "svput/model.hpp"

#include <cstdint>
#include <vector>

namespace svput {

/// Simulated paths of (X, Y), step-major: X[k * n_paths + p] is path p at
/// time t0 + k dt. Positivity of X is structural (log-Euler); Y is kept
/// nonnegative by the full-truncation scheme.
struct PathBundle {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double x0 = 0.0, y0 = 0.0;
    double t0 = 0.0, T = 0.0, dt = 0.0;
    std::uint64_t seed = 0;
    bool antithetic = false;
    std::vector<double> X; ///< (n_steps+1) * n_paths
    std::vector<double> Y; ///< (n_steps+1) * n_paths
    /// First step index with Y = 0, or -1 when the path never touches zero.
    std::vector<std::int64_t> hit_nu;

    double x_at(std::size_t k, std::size_t p) const { return X[k * n_paths + p]; }
    double y_at(std::size_t k, std::size_t p) const { return Y[k * n_paths + p]; }
    double time_at(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
};

struct MCEstimate {
    enum class Method { LSMC, Policy, European };
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    Method method = Method::European;
    std::uint64_t seed = 0;
};

/// Correlated Euler simulation: log-Euler for X (positivity by construction)
/// and full-truncation Euler for Y (coefficients at max(Y,0), then clipped at
/// 0). Bitwise reproducible for a given seed, independent of thread count:
/// paths are partitioned into fixed blocks, each with its own derived
/// generator stream. With antithetic=true, odd paths negate the draws of
/// their even partner.
PathBundle simulate(const SVModel& model, double x0, double y0, double t0,
                    std::size_t n_paths, std::size_t n_steps, std::uint64_t seed,
                    bool antithetic = false);

/// Longstaff-Schwartz lower-bound estimate of the optimal-stopping value.
/// Continuation values are regressed on a polynomial basis in (X, Y, XY) up
/// to basis_degree over in-the-money paths of the first half; the fitted rule
/// is valued out-of-sample on the second half. Exercise at the valuation
/// point itself is allowed (value >= immediate payoff, with zero standard
/// error when immediate exercise wins). A step with some but fewer than 50
/// in-the-money regression paths throws regression_degenerate; a step with
/// none is skipped (no exercise decision is needed there).
MCEstimate lsmc_value(const PathBundle& paths, const SVModel& model, int basis_degree);

/// Values the stopping rule "exercise at the first time X <= g(Y, t)" given
/// by a PDE-extracted boundary (bilinear in (y, t), sentinel columns never
/// exercise), stopping at T otherwise.
MCEstimate policy_value(const PathBundle& paths, const FreeBoundary& fb, const SVModel& model,
                        std::vector<std::size_t>* stop_histogram = nullptr);

/// Mean discounted terminal payoff e^{-r(T-t0)} (K - X_T)^+.
MCEstimate european_value(const PathBundle& paths, const SVModel& model);

struct DegenerateCheckRow {
    double x0 = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    double target = 0.0; ///< (K - x0)^+
    double gap = 0.0;    ///< |value - target|
    bool within_3se = false;
};

/// Behavior at the degenerate boundary: for a variance process started at
/// y0 = 0 and absorbed there, the optimal-stopping value must equal the
/// immediate payoff (K - x0)^+; for small y0 > 0 the same gap gauges the
/// thickness of the boundary layer under the Dirichlet datum.
std::vector<DegenerateCheckRow> degenerate_boundary_check(const SVModel& model,
                                                          const std::vector<double>& x0_list,
                                                          double t0, std::size_t n_paths,
                                                          double y0 = 0.0,
                                                          std::size_t n_steps = 50,
                                                          std::uint64_t seed = 20240601);

} // namespace svput
