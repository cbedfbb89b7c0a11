#pragma once

#include "svput/grid.hpp"
#include "svput/model.hpp"
#include "svput/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace svput {

/// Full run description, parsed strictly from one JSON document: unknown or
/// missing required keys fail before any computation, naming the offending
/// dotted path.
struct RunConfig {
    nlohmann::json raw; ///< the parsed document, echoed into every artifact

    SVModel model;
    nlohmann::json model_json;

    double s_half_width = 4.0;
    double y_max = 0.0;
    std::size_t n_s = 0, n_y = 0, n_theta = 0;

    SolveConfig solver;

    struct McBlock {
        std::size_t n_paths = 100000;
        std::size_t n_steps = 250;
        std::uint64_t seed = 42;
        int basis_degree = 2;
        bool antithetic = false;
    } mc;

    double x0 = 0.0, y0 = 0.0;

    struct OutputBlock {
        std::string directory = ".";
        std::vector<std::string> formats = {"csv", "json"};
        bool want(const std::string& f) const;
    } output;

    Grid make_grid() const { return build_grid(model, s_half_width, y_max, n_s, n_y, n_theta); }
};

RunConfig parse_run_config(const nlohmann::json& doc);

nlohmann::json load_json_file(const std::string& path);

/// Applies a dotted-path leaf override ("solver.epsilon" = "1e-4") onto the
/// document; the value is parsed as JSON when possible, else kept as string.
void apply_override(nlohmann::json& doc, const std::string& dotted_path,
                    const std::string& value);

} // namespace svput
