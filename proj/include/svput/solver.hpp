#pragma once

#include "svput/grid.hpp"
#include "svput/model.hpp"
#include "svput/penalty.hpp"
#include "svput/stencil.hpp"

#include <span>
#include <utility>
#include <vector>

namespace svput {

enum class LinearSolverKind {
    BandedLU,   ///< sparse direct LU on the 9-point system
    BiCGStabILU ///< BiCGStab preconditioned with incomplete LU
};

enum class SolveMethod { Penalty, Psor };

struct SolveConfig {
    double epsilon = 1e-3;
    /// Optional continuation ladder; when non-empty, the solve re-marches at
    /// each epsilon in order, warm-starting Newton from the previous solution,
    /// and the final entry is the reported solution.
    std::vector<double> epsilon_schedule;
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    /// Time weighting in [1/2, 1]; 1 = fully implicit, 1/2 = Crank-Nicolson.
    double theta_scheme = 0.5;
    /// Fully implicit startup steps before switching to theta_scheme, damping
    /// the payoff-kink oscillations.
    int rannacher_steps = 5;
    LinearSolverKind linear_solver = LinearSolverKind::BandedLU;
    SolveMethod method = SolveMethod::Penalty;
    /// Downgrades the nonnegative-Fichera rejection to a recorded warning.
    bool permissive_fichera = false;

    double psor_omega = 1.5;
    double psor_tol = 1e-10;
    int psor_max_iter = 20000;

    /// Obstacle-contact tolerance handed to boundary extraction; <= 0 keeps
    /// the extraction default (10 eps K penalty / 1e-8 K PSOR).
    double contact_tol = 0.0;

    void validate() const;
};

struct SolveResult {
    Grid grid;
    SolveMethod method = SolveMethod::Penalty;
    double strike = 0.0;
    double epsilon_used = 0.0; ///< final epsilon (0 for PSOR)
    std::vector<Surface> surfaces;       ///< n_theta + 1 slices
    std::vector<int> iterations_per_step; ///< Newton iterations (penalty) or PSOR sweeps
    /// Per-slice max over interior nodes of |min(du/dtheta - L u, u - payoff)|
    /// with the unpenalized operator and the sharp payoff.
    std::vector<double> complementarity_residual;
    /// (epsilon, max residual over slices) per continuation stage.
    std::vector<std::pair<double, double>> schedule_residuals;
    double wallclock_seconds = 0.0;
    std::optional<std::string> fichera_warning;

    double max_complementarity_residual() const;
    /// Bilinear value on the last slice (t = 0 when the horizon is T).
    double value_at(double x, double y) const;
};

/// One implicit theta-step of the penalized problem: solves
/// (I - theta_w dtheta L) u_new + dtheta beta(u_new - pi_payoff) = explicit part
/// by damped Newton on the penalty nonlinearity. Throws step_failure on
/// non-convergence (carrying the last residual).
Surface step(const Surface& u_prev, const Grid& grid, const OperatorStencil& stencil,
             const SolveConfig& config, const PenaltyParams& penalty, double dtheta,
             double theta_w);

/// Marches the penalized problem from the smoothed-payoff initial slice,
/// running the epsilon continuation when a schedule is configured. A failed
/// step is retried once as two half-steps before aborting.
SolveResult solve(const SVModel& model, const Grid& grid, const SolveConfig& config);

/// Independent oracle: per-step linear complementarity problem with the sharp
/// payoff obstacle and unpenalized operator, solved by projected SOR.
SolveResult psor_solve(const SVModel& model, const Grid& grid, const SolveConfig& config);

// --- single-step entry points (oracle verification and tests) ---

/// Implicit-step system right-hand side: interior rows
/// u_old + explicit_coef * (L u_old), Dirichlet rows the datum, Neumann rows 0.
std::vector<double> build_step_rhs(const OperatorStencil& st, double explicit_coef,
                                   std::span<const double> u_old,
                                   std::span<const double> datum_s);

/// Unconstrained implicit step: solves (I - step_coef L) u = rhs directly.
std::vector<double> linear_step(const OperatorStencil& st, double step_coef,
                                std::span<const double> rhs);

/// Projected SOR on min((I - step_coef L) u - rhs, u - psi) = 0; u carries the
/// warm start in and the solution out. Returns the sweep count; throws
/// oracle_failure at max_iter.
int psor_step(const OperatorStencil& st, double step_coef, std::span<const double> rhs,
              std::span<const double> psi, std::span<const double> datum_s, double omega,
              double tol, int max_iter, std::span<double> u);

/// Per-node LCP residual min((I - step_coef L) u - rhs, u - psi).
std::vector<double> lcp_step_residual(const OperatorStencil& st, double step_coef,
                                      std::span<const double> rhs, std::span<const double> psi,
                                      std::span<const double> u);

} // namespace svput
