#include "svput/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

/// Leftover "--a.b.c value" tokens become dotted-path leaf overrides.
void apply_extra_overrides(nlohmann::json& doc, const std::vector<std::string>& extras) {
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& tok = extras[i];
        if (tok.rfind("--", 0) != 0 || tok.find('.') == std::string::npos)
            throw svput::config_error("cli: unrecognized argument '" + tok + "'");
        std::string key = tok.substr(2);
        std::string value;
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else {
            if (i + 1 >= extras.size())
                throw svput::config_error("cli: override '" + tok + "' is missing a value");
            value = extras[++i];
        }
        svput::apply_override(doc, key, value);
    }
}

int dispatch(const std::string& cmd, const std::string& config_path,
             const std::vector<std::string>& extras, const std::string& axis, int levels) {
    nlohmann::json doc = svput::load_json_file(config_path);
    apply_extra_overrides(doc, extras);
    const svput::RunConfig cfg = svput::parse_run_config(doc);

    svput::CommandResult result;
    if (cmd == "price")
        result = svput::cmd_price(cfg);
    else if (cmd == "boundary")
        result = svput::cmd_boundary(cfg);
    else if (cmd == "verify")
        result = svput::cmd_verify(cfg);
    else
        result = svput::cmd_converge(cfg, svput::parse_axis(axis), levels);

    std::cout << result.summary.dump(2) << "\n";
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"American put pricing under stochastic volatility: penalty-method PDE "
                 "solver, exercise-boundary extraction and Monte Carlo cross-checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string axis = "grid";
    int levels = 3;

    CLI::App* price = app.add_subcommand("price", "solve and report the spot price");
    CLI::App* boundary =
        app.add_subcommand("boundary", "extract the exercise boundary and check its structure");
    CLI::App* verify =
        app.add_subcommand("verify", "cross-check the PDE price against Monte Carlo");
    CLI::App* converge =
        app.add_subcommand("converge", "refinement study along one axis");

    for (CLI::App* sub : {price, boundary, verify, converge}) {
        sub->add_option("--config", config_path, "run configuration JSON")->required();
        sub->allow_extras(); // dotted-path leaf overrides, e.g. --solver.epsilon 1e-4
    }
    converge->add_option("--axis", axis, "epsilon|grid|domain|paths");
    converge->add_option("--levels", levels, "refinement levels (default 3)");

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        return dispatch(sub->get_name(), config_path, sub->remaining(), axis, levels);
    } catch (const svput::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const svput::error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
