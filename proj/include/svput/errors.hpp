#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace svput {

/// Base class for all library errors. `code()` is a stable, module-qualified
/// identifier suitable for CLI exit-code mapping and log grepping.
class error : public std::runtime_error {
public:
    error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// A constructor argument is outside its mathematical domain.
class parameter_error : public error {
public:
    explicit parameter_error(const std::string& what)
        : error("model.parameter_domain", what) {}
};

/// The Fichera limit sequence did not settle; carries the sample ladder.
class classification_uncertain_error : public error {
public:
    classification_uncertain_error(const std::string& what,
                                   std::vector<std::pair<double, double>> samples)
        : error("model.classification_uncertain", what), samples_(std::move(samples)) {}
    const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

private:
    std::vector<std::pair<double, double>> samples_;
};

/// Grid or run configuration is inconsistent.
class config_error : public error {
public:
    explicit config_error(const std::string& what) : error("config.invalid", what) {}
};

/// Nonnegative Fichera function at y=0: the model class this solver handles
/// requires imposing the Dirichlet datum there, so strict mode refuses.
class degenerate_boundary_unsupported : public error {
public:
    explicit degenerate_boundary_unsupported(const std::string& what)
        : error("solver.degenerate_boundary_unsupported", what) {}
};

/// Newton failed to converge within the iteration budget; carries the last
/// max-norm residual.
class step_failure : public error {
public:
    step_failure(const std::string& what, double last_residual)
        : error("solver.step_failure", what), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_ = 0.0;
};

/// Projected SOR exceeded its iteration cap.
class oracle_failure : public error {
public:
    explicit oracle_failure(const std::string& what) : error("solver.oracle_failure", what) {}
};

/// Exercise region touches the truncation boundary s_max.
class truncation_suspicious : public error {
public:
    explicit truncation_suspicious(const std::string& what)
        : error("free_boundary.truncation_suspicious", what) {}
};

/// Long-horizon boundary has not gone stationary yet.
class horizon_too_short : public error {
public:
    explicit horizon_too_short(const std::string& what)
        : error("free_boundary.horizon_too_short", what) {}
};

/// Too few in-the-money paths to fit a continuation regression.
class regression_degenerate : public error {
public:
    explicit regression_degenerate(const std::string& what)
        : error("mc.regression_degenerate", what) {}
};

} // namespace svput
