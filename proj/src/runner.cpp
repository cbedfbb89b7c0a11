#include "svput/runner.hpp"

#include "svput/artifacts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <sstream>

namespace svput {

namespace {

using nlohmann::json;

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

json error_summary(const error& e) {
    return {{"error", e.what()}, {"error_code", e.code()}};
}

int exit_code_for(const error& e) {
    if (dynamic_cast<const degenerate_boundary_unsupported*>(&e)) return 2;
    if (dynamic_cast<const step_failure*>(&e) || dynamic_cast<const oracle_failure*>(&e))
        return 3;
    return 3;
}

SolveResult run_solve(const RunConfig& cfg, const Grid& grid) {
    return cfg.solver.method == SolveMethod::Psor ? psor_solve(cfg.model, grid, cfg.solver)
                                                  : solve(cfg.model, grid, cfg.solver);
}

json newton_stats_json(const SolveResult& res) {
    int total = 0, worst = 0;
    for (int it : res.iterations_per_step) {
        total += it;
        worst = std::max(worst, it);
    }
    return {{"total_iterations", total},
            {"max_iterations_per_step", worst},
            {"steps", res.iterations_per_step.size()}};
}

json solve_summary_body(const RunConfig& cfg, const SolveResult& res) {
    json schedule = json::array();
    for (auto [eps, r] : res.schedule_residuals)
        schedule.push_back({{"epsilon", eps}, {"max_residual", r}});
    json body = {{"model", cfg.model.label},
                 {"method", cfg.solver.method == SolveMethod::Psor ? "psor" : "penalty"},
                 {"grid", grid_json(res.grid)},
                 {"epsilon_used", res.epsilon_used},
                 {"max_complementarity_residual", res.max_complementarity_residual()},
                 {"residual_per_slice", res.complementarity_residual},
                 {"schedule_residuals", schedule},
                 {"newton_stats", newton_stats_json(res)}};
    if (res.fichera_warning) body["fichera_warning"] = *res.fichera_warning;
    return body;
}

} // namespace

ConvergeAxis parse_axis(const std::string& name) {
    if (name == "epsilon") return ConvergeAxis::Epsilon;
    if (name == "grid") return ConvergeAxis::Grid;
    if (name == "domain") return ConvergeAxis::Domain;
    if (name == "paths") return ConvergeAxis::Paths;
    throw config_error("converge: unknown axis '" + name +
                       "' (expected epsilon|grid|domain|paths)");
}

CommandResult cmd_price(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    try {
        const FicheraReport fr = fichera_classify(cfg.model);
        if (fr.boundary_case == FicheraCase::F2_noBoundary && !cfg.solver.permissive_fichera) {
            json body = {{"error", "model falls in case (F2): Fichera function F = " +
                                       format_double(fr.F_value) +
                                       " >= 0 at y=0, no boundary datum may be imposed"},
                         {"error_code", "solver.degenerate_boundary_unsupported"},
                         {"fichera", {{"F_value", fr.F_value},
                                      {"limit_estimate", fr.limit_estimate},
                                      {"case", "F2"}}}};
            return {2, finalize_artifact(std::move(body), cfg.raw, elapsed())};
        }

        const Grid grid = cfg.make_grid();
        const SolveResult res = run_solve(cfg, grid);
        const double price = res.value_at(cfg.x0, cfg.y0);

        bool boundary_touch = false;
        if (grid.n_theta > 0) {
            try {
                (void)extract(res, cfg.solver.contact_tol);
            } catch (const truncation_suspicious&) {
                boundary_touch = true;
            }
        }

        json body = solve_summary_body(cfg, res);
        body["price"] = price;
        body["spot"] = {{"x0", cfg.x0}, {"y0", cfg.y0}};
        body["fichera"] = {{"F_value", fr.F_value},
                           {"limit_estimate", fr.limit_estimate},
                           {"case", fr.boundary_case == FicheraCase::F1_imposeBoundary ? "F1"
                                                                                       : "F2"}};
        body["boundary_touches_truncation"] = boundary_touch;
        const json summary = finalize_artifact(std::move(body), cfg.raw, elapsed());

        if (cfg.output.want("csv"))
            write_csv_with_sidecar(join_path(cfg.output.directory, "surface.csv"),
                                   surface_csv(res), cfg.raw,
                                   {{"grid", grid_json(grid)},
                                    {"epsilon", res.epsilon_used},
                                    {"model", cfg.model.label}});
        if (cfg.output.want("json"))
            write_text_file(join_path(cfg.output.directory, "price_summary.json"),
                            summary.dump(2) + "\n");
        return {0, summary};
    } catch (const config_error&) {
        throw; // configuration problems surface to the caller (exit 1)
    } catch (const error& e) {
        return {exit_code_for(e), finalize_artifact(error_summary(e), cfg.raw, elapsed())};
    }
}

CommandResult cmd_boundary(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    try {
        const Grid grid = cfg.make_grid();
        const SolveResult res = run_solve(cfg, grid);
        const FreeBoundary fb = extract(res, cfg.solver.contact_tol);
        const StructureReport rep = check_structure(fb);

        json body = solve_summary_body(cfg, res);
        body["structure"] = structure_report_json(rep);
        body["contact_tol"] = fb.tol_used;
        const json summary = finalize_artifact(std::move(body), cfg.raw, elapsed());

        if (cfg.output.want("csv"))
            write_csv_with_sidecar(join_path(cfg.output.directory, "boundary.csv"),
                                   boundary_csv(fb), cfg.raw,
                                   {{"contact_tol", fb.tol_used},
                                    {"model", cfg.model.label},
                                    {"grid", grid_json(grid)}});
        if (cfg.output.want("json"))
            write_text_file(join_path(cfg.output.directory, "structure_report.json"),
                            summary.dump(2) + "\n");
        return {rep.all_passed() ? 0 : 4, summary};
    } catch (const config_error&) {
        throw; // configuration problems surface to the caller (exit 1)
    } catch (const error& e) {
        return {exit_code_for(e), finalize_artifact(error_summary(e), cfg.raw, elapsed())};
    }
}

CommandResult cmd_verify(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    try {
        const Grid grid = cfg.make_grid();
        const SolveResult res = run_solve(cfg, grid);
        const double pde_price = res.value_at(cfg.x0, cfg.y0);
        const FreeBoundary fb = extract(res, cfg.solver.contact_tol);

        const PathBundle paths = simulate(cfg.model, cfg.x0, cfg.y0, 0.0, cfg.mc.n_paths,
                                          cfg.mc.n_steps, cfg.mc.seed, cfg.mc.antithetic);
        const MCEstimate lsmc = lsmc_value(paths, cfg.model, cfg.mc.basis_degree);
        std::vector<std::size_t> hist;
        const MCEstimate policy = policy_value(paths, fb, cfg.model, &hist);
        const MCEstimate european = european_value(paths, cfg.model);

        const double K = cfg.model.K;
        const double pde_lsmc_tol = std::max(3.0 * lsmc.std_error, 0.01 * K);
        const bool pde_vs_lsmc = std::abs(pde_price - lsmc.value) <= pde_lsmc_tol;
        const bool policy_near_optimal = policy.value >= lsmc.value - 3.0 * lsmc.std_error;
        const bool chain_eur_policy =
            european.value <= policy.value + 3.0 * std::max(european.std_error, policy.std_error);
        const bool chain_policy_lsmc =
            policy.value <= lsmc.value + 3.0 * std::max(policy.std_error, lsmc.std_error);
        const bool pde_above_bounds =
            pde_price >= lsmc.value - 3.0 * lsmc.std_error &&
            pde_price >= policy.value - 3.0 * policy.std_error &&
            pde_price >= european.value - 3.0 * european.std_error;
        const bool ok = pde_vs_lsmc && policy_near_optimal && chain_eur_policy &&
                        chain_policy_lsmc && pde_above_bounds;

        json body = solve_summary_body(cfg, res);
        body["pde_price"] = pde_price;
        body["spot"] = {{"x0", cfg.x0}, {"y0", cfg.y0}};
        body["estimates"] = {{"lsmc", mc_estimate_json(lsmc)},
                             {"policy", mc_estimate_json(policy)},
                             {"european", mc_estimate_json(european)}};
        body["checks"] = {{"pde_vs_lsmc",
                           {{"passed", pde_vs_lsmc},
                            {"deviation", std::abs(pde_price - lsmc.value)},
                            {"tolerance", pde_lsmc_tol}}},
                          {"policy_near_optimal", {{"passed", policy_near_optimal}}},
                          {"ordering_european_le_policy", {{"passed", chain_eur_policy}}},
                          {"ordering_policy_le_lsmc", {{"passed", chain_policy_lsmc}}},
                          {"pde_above_mc_lower_bounds", {{"passed", pde_above_bounds}}}};
        body["all_passed"] = ok;
        const json summary = finalize_artifact(std::move(body), cfg.raw, elapsed());

        if (cfg.output.want("json")) {
            const auto wrap = [&](const MCEstimate& est) {
                return finalize_artifact(mc_estimate_json(est), cfg.raw, elapsed());
            };
            write_text_file(join_path(cfg.output.directory, "mc_lsmc.json"),
                            wrap(lsmc).dump(2) + "\n");
            write_text_file(join_path(cfg.output.directory, "mc_policy.json"),
                            wrap(policy).dump(2) + "\n");
            write_text_file(join_path(cfg.output.directory, "mc_european.json"),
                            wrap(european).dump(2) + "\n");
            write_text_file(join_path(cfg.output.directory, "verify_summary.json"),
                            summary.dump(2) + "\n");
        }
        if (cfg.output.want("csv"))
            write_csv_with_sidecar(join_path(cfg.output.directory, "exercise_histogram.csv"),
                                   histogram_csv(hist, paths.t0, paths.dt), cfg.raw,
                                   {{"model", cfg.model.label}});
        return {ok ? 0 : 4, summary};
    } catch (const config_error&) {
        throw; // configuration problems surface to the caller (exit 1)
    } catch (const error& e) {
        return {exit_code_for(e), finalize_artifact(error_summary(e), cfg.raw, elapsed())};
    }
}

CommandResult cmd_converge(const RunConfig& cfg, ConvergeAxis axis, int levels) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if (levels < 2) throw config_error("converge: need at least 2 levels");

    struct Leg {
        double param = 0.0;
        double value = 0.0;
        double aux = 0.0;
    };

    const auto run_leg = [&](int level) -> Leg {
        RunConfig leg = cfg;
        Leg out;
        switch (axis) {
        case ConvergeAxis::Epsilon: {
            leg.solver.epsilon_schedule.clear();
            leg.solver.epsilon = cfg.solver.epsilon * std::pow(0.5, level);
            out.param = leg.solver.epsilon;
            const Grid grid = leg.make_grid();
            const SolveResult res = solve(leg.model, grid, leg.solver);
            out.value = res.value_at(leg.x0, leg.y0);
            out.aux = res.max_complementarity_residual();
            return out;
        }
        case ConvergeAxis::Grid: {
            const std::size_t f = std::size_t{1} << level;
            leg.n_s = cfg.n_s * f;
            leg.n_y = cfg.n_y * f;
            leg.n_theta = cfg.n_theta * f;
            out.param = static_cast<double>(leg.n_s);
            const Grid grid = leg.make_grid();
            const SolveResult res = run_solve(leg, grid);
            out.value = res.value_at(leg.x0, leg.y0);
            out.aux = res.max_complementarity_residual();
            return out;
        }
        case ConvergeAxis::Domain: {
            // widen the box at fixed spacing: counts scale with the widths
            const std::size_t f = std::size_t{1} << level;
            leg.s_half_width = cfg.s_half_width * static_cast<double>(f);
            leg.y_max = cfg.y_max * static_cast<double>(f);
            leg.n_s = cfg.n_s * f;
            leg.n_y = cfg.n_y * f;
            out.param = leg.s_half_width;
            const Grid grid = leg.make_grid();
            const SolveResult res = run_solve(leg, grid);
            out.value = res.value_at(leg.x0, leg.y0);
            out.aux = res.max_complementarity_residual();
            return out;
        }
        case ConvergeAxis::Paths:
        default: {
            std::size_t n = cfg.mc.n_paths;
            for (int l = 0; l < level; ++l) n *= 4;
            out.param = static_cast<double>(n);
            const PathBundle paths = simulate(cfg.model, cfg.x0, cfg.y0, 0.0, n,
                                              cfg.mc.n_steps, cfg.mc.seed, cfg.mc.antithetic);
            const MCEstimate est = lsmc_value(paths, cfg.model, cfg.mc.basis_degree);
            out.value = est.value;
            out.aux = est.std_error;
            return out;
        }
        }
    };

    try {
        // worker pool over the legs; keep at most two solves in flight so the
        // big-grid legs do not gang up on memory
        std::vector<Leg> legs(static_cast<std::size_t>(levels));
        std::vector<std::future<Leg>> inflight;
        for (int level = 0; level < levels; ++level) {
            inflight.push_back(std::async(std::launch::async, run_leg, level));
            if (inflight.size() == 2 || level == levels - 1) {
                for (std::size_t i = 0; i < inflight.size(); ++i)
                    legs[static_cast<std::size_t>(level) + 1 - inflight.size() + i] =
                        inflight[i].get();
                inflight.clear();
            }
        }

        const char* aux_name = axis == ConvergeAxis::Paths ? "std_error" : "max_residual";
        std::string csv = std::string("level,param,value,") + aux_name + ",abs_diff_prev\n";
        json rows = json::array();
        for (int level = 0; level < levels; ++level) {
            const Leg& l = legs[static_cast<std::size_t>(level)];
            const double diff =
                level == 0 ? std::nan("")
                           : std::abs(l.value - legs[static_cast<std::size_t>(level) - 1].value);
            csv += std::to_string(level) + ',' + format_double(l.param) + ',' +
                   format_double(l.value) + ',' + format_double(l.aux) + ',' +
                   (level == 0 ? "" : format_double(diff)) + '\n';
            json row = {{"level", level}, {"param", l.param}, {"value", l.value},
                        {aux_name, l.aux}};
            if (level > 0) row["abs_diff_prev"] = diff;
            rows.push_back(row);
        }

        const char* axis_name = axis == ConvergeAxis::Epsilon  ? "epsilon"
                                : axis == ConvergeAxis::Grid   ? "grid"
                                : axis == ConvergeAxis::Domain ? "domain"
                                                               : "paths";
        if (cfg.output.want("csv"))
            write_csv_with_sidecar(
                join_path(cfg.output.directory, std::string("converge_") + axis_name + ".csv"),
                csv, cfg.raw, {{"axis", axis_name}, {"levels", levels}});

        json body = {{"axis", axis_name}, {"levels", levels}, {"table", rows}};
        const json summary = finalize_artifact(std::move(body), cfg.raw, elapsed());
        if (cfg.output.want("json"))
            write_text_file(join_path(cfg.output.directory,
                                      std::string("converge_") + axis_name + "_summary.json"),
                            summary.dump(2) + "\n");
        return {0, summary};
    } catch (const config_error&) {
        throw; // configuration problems surface to the caller (exit 1)
    } catch (const error& e) {
        return {exit_code_for(e), finalize_artifact(error_summary(e), cfg.raw, elapsed())};
    }
}

} // namespace svput
