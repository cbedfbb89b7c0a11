#include "svput/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace svput {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw config_error("config: " + path + ": " + what);
}

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "must be a JSON object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> known) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(known.begin(), known.end(),
                         [&](const char* k) { return it.key() == k; }))
            fail(path + "." + it.key(), "unknown key");
    }
}

double get_number(const json& j, const std::string& path, const char* key, bool required,
                  double fallback = 0.0) {
    if (!j.contains(key)) {
        if (required) fail(path + "." + key, "missing required key");
        return fallback;
    }
    if (!j.at(key).is_number()) fail(path + "." + key, "must be a number");
    return j.at(key).get<double>();
}

std::size_t get_count(const json& j, const std::string& path, const char* key, bool required,
                      std::size_t fallback = 0) {
    if (!j.contains(key)) {
        if (required) fail(path + "." + key, "missing required key");
        return fallback;
    }
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer())
        fail(path + "." + key, "must be a nonnegative integer");
    const auto v = j.at(key).get<std::int64_t>();
    if (v < 0) fail(path + "." + key, "must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

bool get_bool(const json& j, const std::string& path, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) fail(path + "." + key, "must be a boolean");
    return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) fail(path + "." + key, "must be a string");
    return j.at(key).get<std::string>();
}

} // namespace

bool RunConfig::OutputBlock::want(const std::string& f) const {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
}

RunConfig parse_run_config(const nlohmann::json& doc) {
    expect_object(doc, "<root>");
    reject_unknown(doc, "<root>", {"model", "grid", "solver", "mc", "spot", "output"});

    RunConfig cfg;
    cfg.raw = doc;

    if (!doc.contains("model")) fail("model", "missing required block");
    cfg.model_json = doc.at("model");
    cfg.model = model_from_json(cfg.model_json);

    if (!doc.contains("grid")) fail("grid", "missing required block");
    {
        const json& g = doc.at("grid");
        expect_object(g, "grid");
        reject_unknown(g, "grid", {"s_half_width", "y_max", "n_s", "n_y", "n_theta"});
        cfg.s_half_width = get_number(g, "grid", "s_half_width", false, 4.0);
        cfg.n_s = get_count(g, "grid", "n_s", true);
        cfg.n_y = get_count(g, "grid", "n_y", true);
        cfg.n_theta = get_count(g, "grid", "n_theta", true);
        if (g.contains("y_max")) {
            cfg.y_max = get_number(g, "grid", "y_max", true);
        } else {
            // default truncation height: 4x the long-run variance for
            // mean-reverting models, at least 1
            const std::string name = cfg.model_json.value("model", "");
            if (name == "heston")
                cfg.y_max = std::max(4.0 * cfg.model_json.at("m").get<double>(), 1.0);
            else if (name == "absorbed")
                cfg.y_max = 1.0;
            else
                fail("grid.y_max", "missing required key (no default for model '" + name + "')");
        }
    }

    {
        const json g = doc.value("solver", json::object());
        expect_object(g, "solver");
        reject_unknown(g, "solver",
                       {"method", "epsilon", "epsilon_schedule", "newton_tol",
                        "newton_max_iter", "theta_scheme", "rannacher_steps", "linear_solver",
                        "permissive_fichera", "psor_omega", "psor_tol", "psor_max_iter",
                        "contact_tol"});
        SolveConfig& sc = cfg.solver;
        const std::string method = get_string(g, "solver", "method", "penalty");
        if (method == "penalty")
            sc.method = SolveMethod::Penalty;
        else if (method == "psor")
            sc.method = SolveMethod::Psor;
        else
            fail("solver.method", "must be 'penalty' or 'psor'");
        sc.epsilon = get_number(g, "solver", "epsilon", false, sc.epsilon);
        if (g.contains("epsilon_schedule")) {
            if (!g.at("epsilon_schedule").is_array())
                fail("solver.epsilon_schedule", "must be an array of numbers");
            for (const auto& v : g.at("epsilon_schedule")) {
                if (!v.is_number()) fail("solver.epsilon_schedule", "must be an array of numbers");
                sc.epsilon_schedule.push_back(v.get<double>());
            }
        }
        sc.newton_tol = get_number(g, "solver", "newton_tol", false, sc.newton_tol);
        sc.newton_max_iter = static_cast<int>(
            get_count(g, "solver", "newton_max_iter", false,
                      static_cast<std::size_t>(sc.newton_max_iter)));
        sc.theta_scheme = get_number(g, "solver", "theta_scheme", false, sc.theta_scheme);
        sc.rannacher_steps = static_cast<int>(
            get_count(g, "solver", "rannacher_steps", false,
                      static_cast<std::size_t>(sc.rannacher_steps)));
        const std::string ls = get_string(g, "solver", "linear_solver", "banded-lu");
        if (ls == "banded-lu")
            sc.linear_solver = LinearSolverKind::BandedLU;
        else if (ls == "bicgstab-ilu")
            sc.linear_solver = LinearSolverKind::BiCGStabILU;
        else
            fail("solver.linear_solver", "must be 'banded-lu' or 'bicgstab-ilu'");
        sc.permissive_fichera = get_bool(g, "solver", "permissive_fichera", false);
        sc.psor_omega = get_number(g, "solver", "psor_omega", false, sc.psor_omega);
        sc.psor_tol = get_number(g, "solver", "psor_tol", false, sc.psor_tol);
        sc.psor_max_iter = static_cast<int>(get_count(
            g, "solver", "psor_max_iter", false, static_cast<std::size_t>(sc.psor_max_iter)));
        sc.contact_tol = get_number(g, "solver", "contact_tol", false, sc.contact_tol);
        sc.validate();
    }

    {
        const json g = doc.value("mc", json::object());
        expect_object(g, "mc");
        reject_unknown(g, "mc", {"n_paths", "n_steps", "seed", "basis_degree", "antithetic"});
        cfg.mc.n_paths = get_count(g, "mc", "n_paths", false, cfg.mc.n_paths);
        cfg.mc.n_steps = get_count(g, "mc", "n_steps", false, cfg.mc.n_steps);
        cfg.mc.seed = get_count(g, "mc", "seed", false, cfg.mc.seed);
        cfg.mc.basis_degree =
            static_cast<int>(get_count(g, "mc", "basis_degree", false, 2));
        cfg.mc.antithetic = get_bool(g, "mc", "antithetic", false);
        if (cfg.mc.basis_degree != 2 && cfg.mc.basis_degree != 3)
            fail("mc.basis_degree", "must be 2 or 3");
        if (cfg.mc.n_paths < 1 || cfg.mc.n_steps < 1)
            fail("mc", "n_paths and n_steps must be >= 1");
    }

    if (!doc.contains("spot")) fail("spot", "missing required block");
    {
        const json& g = doc.at("spot");
        expect_object(g, "spot");
        reject_unknown(g, "spot", {"x0", "y0"});
        cfg.x0 = get_number(g, "spot", "x0", true);
        cfg.y0 = get_number(g, "spot", "y0", true);
        if (!(cfg.x0 > 0.0)) fail("spot.x0", "must be > 0");
        if (!(cfg.y0 >= 0.0)) fail("spot.y0", "must be >= 0");
    }

    {
        const json g = doc.value("output", json::object());
        expect_object(g, "output");
        reject_unknown(g, "output", {"directory", "formats"});
        const char* env_dir = std::getenv("SVPUT_OUTPUT_DIR");
        cfg.output.directory =
            get_string(g, "output", "directory", env_dir ? env_dir : ".");
        if (g.contains("formats")) {
            if (!g.at("formats").is_array()) fail("output.formats", "must be an array");
            cfg.output.formats.clear();
            for (const auto& v : g.at("formats")) {
                if (!v.is_string()) fail("output.formats", "entries must be strings");
                const std::string f = v.get<std::string>();
                if (f != "csv" && f != "json") fail("output.formats", "unknown format '" + f + "'");
                cfg.output.formats.push_back(f);
            }
        }
    }

    return cfg;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return doc;
}

void apply_override(nlohmann::json& doc, const std::string& dotted_path,
                    const std::string& value) {
    std::vector<std::string> parts;
    std::stringstream ss(dotted_path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw config_error("config: bad override path '" + dotted_path + "'");
        parts.push_back(part);
    }
    if (parts.empty()) throw config_error("config: empty override path");

    nlohmann::json* node = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) throw config_error("config: override path '" + dotted_path +
                                                   "' crosses a non-object");
        node = &(*node)[parts[i]];
    }
    nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value; // plain string
    (*node)[parts.back()] = parsed;
}

} // namespace svput
