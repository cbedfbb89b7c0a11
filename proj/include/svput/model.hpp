#pragma once

#include "svput/errors.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace svput {

/// Stochastic-volatility model for the pair
///   dX = X (r dt + sigma(Y) dW),   dY = mu(Y) dt + b(Y) dB,   corr(W,B) = rho.
///
/// Coefficient functions come with analytic first derivatives: sigma' enters
/// the monotonicity assumption checks and b' enters the Fichera limit, where
/// numerical differentiation near y=0 is ill-conditioned.
/// Immutable after construction; all operations on it are pure.
struct SVModel {
    double r = 0.0;   ///< risk-free rate
    double rho = 0.0; ///< correlation, in [-1, 1]
    double K = 1.0;   ///< strike
    double T = 1.0;   ///< maturity

    std::function<double(double)> mu;
    std::function<double(double)> sigma;
    std::function<double(double)> b;
    std::function<double(double)> dmu;
    std::function<double(double)> dsigma;
    std::function<double(double)> db;

    /// Analytic value of lim_{y->0} b(y) b'(y), when known in closed form.
    /// fichera_classify uses it instead of the sample ladder if present.
    std::optional<double> bb_prime_limit;

    std::string label;

    /// Checks the scalar parameter domain (not the A1/A2 function assumptions).
    void validate_params() const;
};

/// Heston: sigma(y) = sqrt(y), b(y) = xi sqrt(y), mu(y) = kappa (m - y).
SVModel heston_model(double kappa, double m, double xi, double rho, double r, double K,
                     double T);

/// Test model absorbed at y=0: sigma(y) = sqrt(y), b(y) = xi sqrt(y),
/// mu(y) = -kappa y. Started at y0 = 0 the variance never leaves zero, so
/// the stock grows deterministically at rate r.
SVModel absorbed_model(double kappa, double xi, double rho, double r, double K, double T);

enum class FicheraCase {
    F1_imposeBoundary, ///< F < 0: Dirichlet datum must be imposed at y=0
    F2_noBoundary      ///< F >= 0: no datum may be imposed (rejected, not solved)
};

/// Classification of the degenerate boundary y=0 via
/// F = mu(0) - lim_{y->0} b(y) b'(y).
struct FicheraReport {
    double F_value = 0.0;
    double limit_estimate = 0.0;
    FicheraCase boundary_case = FicheraCase::F2_noBoundary;
    /// (y, b(y) b'(y)) ladder used for the limit; empty when the analytic
    /// override supplied the value.
    std::vector<std::pair<double, double>> samples;
};

/// Computes the Fichera function at y=0. The limit of b b' is taken on the
/// geometric ladder y = 1e-4 * 2^{-k}, k = 0..levels-1, with one-step
/// Richardson extrapolation; throws classification_uncertain_error when the
/// extrapolated sequence still moves by more than 1e-3 (relative) at the
/// smallest sample.
FicheraReport fichera_classify(const SVModel& model, int levels = 20);

/// One clause of the A1/A2 validation report.
struct AssumptionClause {
    std::string name;
    bool passed = false;
    bool informational = false; ///< recorded but not counted against all_passed()
    double witness_y = 0.0;     ///< sample at which the clause decided
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionClause> clauses;
    /// The classical assumption set requires mu(0) = 0, which excludes Heston
    /// (mu(0) = kappa m > 0). This implementation checks the relaxed clause
    /// mu(0) >= 0 and records here that the relaxation was applied.
    bool mu0_relaxed = false;

    bool all_passed() const;
    const AssumptionClause* find(const std::string& name) const;
};

/// Sampling-based check of the standing assumptions: a report, not a proof.
/// y_samples must be nonempty, positive and sorted ascending.
AssumptionReport validate_assumptions(const SVModel& model, std::span<const double> y_samples);

/// Convenience geometric+linear default ladder on (0, y_max].
std::vector<double> default_y_samples(double y_max);

/// Builds a model from a JSON document {"model": "heston", "kappa": ..., ...}.
/// Custom models are code-registered by name via register_model.
SVModel model_from_json(const nlohmann::json& doc);

using ModelFactory = std::function<SVModel(const nlohmann::json&)>;
void register_model(const std::string& name, ModelFactory factory);

} // namespace svput
