#include "svput/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace svput;

namespace {

const SVModel kModel = heston_model(2.0, 0.04, 0.5, -0.7, 0.05, 1.0, 0.5);

SolveConfig small_config(double eps = 1e-3) {
    SolveConfig cfg;
    cfg.epsilon = eps;
    return cfg;
}

} // namespace

TEST_CASE("one implicit step lifts the solution monotonically off the payoff") {
    const Grid g = build_grid(kModel, 4.0, 1.0, 21, 21, 10);
    const OperatorStencil st = assemble(g, kModel, 1e-3);
    const PenaltyParams pen(1e-3, kModel.r, kModel.K);

    Surface init;
    init.values.resize(g.n_nodes());
    for (std::size_t j = 0; j < g.ny1(); ++j)
        for (std::size_t i = 0; i < g.ns1(); ++i)
            init.values[g.index(i, j)] =
                pi_smooth(kModel.K - std::exp(g.s_nodes[i]), 1e-3);
    init.payoff = payoff_vector(g, kModel.K);
    init.theta = 0.0;

    const Surface next = step(init, g, st, small_config(), pen, g.dtheta, 1.0);
    CHECK(next.theta == doctest::Approx(g.dtheta));
    for (std::size_t row = 0; row < next.values.size(); ++row)
        CHECK(next.values[row] >= init.values[row] - 1e-8);

    // deep-ITM Dirichlet edge reproduces the datum exactly
    for (std::size_t j = 0; j < g.ny1(); ++j)
        CHECK(next.values[g.index(0, j)] ==
              pi_smooth(kModel.K - std::exp(g.s_nodes[0]), 1e-3));
}

TEST_CASE("zero-volatility far field stays at the penalty equilibrium scale") {
    SVModel m = absorbed_model(0.5, 0.4, 0.0, 0.05, 1.0, 0.5);
    m.sigma = [](double) { return 0.0; };
    m.dsigma = [](double) { return 0.0; };
    const double eps = 1e-3;
    const Grid g = build_grid(m, 4.0, 1.0, 21, 11, 10);
    const OperatorStencil st = assemble(g, m, eps);
    const PenaltyParams pen(eps, m.r, m.K);

    Surface init;
    init.values.assign(g.n_nodes(), 0.0);
    for (std::size_t j = 0; j < g.ny1(); ++j)
        for (std::size_t i = 0; i < g.ns1(); ++i)
            init.values[g.index(i, j)] = pi_smooth(m.K - std::exp(g.s_nodes[i]), eps);
    init.payoff = payoff_vector(g, m.K);
    init.theta = 0.0;

    const Surface next = step(init, g, st, small_config(eps), pen, g.dtheta, 1.0);
    for (std::size_t j = 1; j < g.ny1(); ++j)
        for (std::size_t i = 1; i < g.ns1(); ++i)
            if (g.s_nodes[i] > g.ln_strike + 1.0)
                CHECK(std::abs(next.values[g.index(i, j)]) <= 5.0 * eps);
}

TEST_CASE("solve with n_theta = 0 returns the smoothed initial slice only") {
    const Grid g = build_grid(kModel, 4.0, 1.0, 11, 5, 0);
    const SolveResult res = solve(kModel, g, small_config());
    CHECK(res.surfaces.size() == 1);
    for (std::size_t j = 0; j < g.ny1(); ++j)
        for (std::size_t i = 0; i < g.ns1(); ++i)
            CHECK(res.surfaces[0].values[g.index(i, j)] ==
                  doctest::Approx(pi_smooth(kModel.K - std::exp(g.s_nodes[i]), 1e-3)));
}

TEST_CASE("penalty solve satisfies the solution estimates up to the penalty scale") {
    const double eps = 1e-3;
    const Grid g = build_grid(kModel, 4.0, 1.0, 31, 15, 20);
    const SolveResult res = solve(kModel, g, small_config(eps));
    REQUIRE(res.surfaces.size() == g.n_theta + 1);

    // The penalized solution overshoots the obstacle by O(eps) in the contact
    // region (the penalty balances the obstacle-side drift there), so the
    // monotonicity sign checks hold with an O(eps) slack. The sharp-obstacle
    // PSOR solve below satisfies them with the tight slacks.
    const double K = kModel.K;
    const double mono_slack = 0.05 * eps * K;
    for (std::size_t k = 0; k <= g.n_theta; ++k) {
        const Surface& sl = res.surfaces[k];
        for (std::size_t j = 0; j < g.ny1(); ++j) {
            for (std::size_t i = 0; i < g.ns1(); ++i) {
                const double u = sl.values[g.index(i, j)];
                CHECK(u >= sl.payoff[i] - eps);       // lower estimate, eps slack
                CHECK(u <= K + 1.0 + 1e-8);           // upper estimate
                if (k > 0)
                    CHECK(u >= res.surfaces[k - 1].values[g.index(i, j)] - mono_slack);
                if (k > 0 && j > 0 && i > 0 && i < g.n_s && j < g.n_y)
                    CHECK(u > 0.0); // interior positivity for theta > 0
            }
            for (std::size_t i = 0; i + 1 < g.ns1(); ++i) {
                const double diff =
                    sl.values[g.index(i + 1, j)] - sl.values[g.index(i, j)];
                CHECK(diff <= 1e-6 * K);
                CHECK(diff >= -std::exp(g.s_nodes[i + 1]) * g.ds - 1e-6 * K);
            }
        }
        for (std::size_t j = 0; j + 1 < g.ny1(); ++j)
            for (std::size_t i = 0; i < g.ns1(); ++i)
                CHECK(sl.values[g.index(i, j + 1)] >=
                      sl.values[g.index(i, j)] - mono_slack);
    }
    CHECK(res.iterations_per_step.size() == g.n_theta);
}

TEST_CASE("sharp-obstacle psor solve satisfies the estimates at tight slack") {
    const Grid g = build_grid(kModel, 4.0, 1.0, 31, 15, 20);
    const SolveResult res = psor_solve(kModel, g, small_config());
    const double K = kModel.K;
    for (std::size_t k = 0; k <= g.n_theta; ++k) {
        const Surface& sl = res.surfaces[k];
        for (std::size_t j = 0; j < g.ny1(); ++j) {
            for (std::size_t i = 0; i < g.ns1(); ++i) {
                const double u = sl.values[g.index(i, j)];
                CHECK(u >= sl.payoff[i] - 1e-12); // sharp lower bound
                CHECK(u <= K + 1.0 + 1e-8);
                if (k > 0)
                    CHECK(u >= res.surfaces[k - 1].values[g.index(i, j)] - 1e-8);
            }
            for (std::size_t i = 0; i + 1 < g.ns1(); ++i) {
                const double diff =
                    sl.values[g.index(i + 1, j)] - sl.values[g.index(i, j)];
                CHECK(diff <= 1e-6 * K);
                CHECK(diff >= -std::exp(g.s_nodes[i + 1]) * g.ds - 1e-6 * K);
            }
        }
        for (std::size_t j = 0; j + 1 < g.ny1(); ++j)
            for (std::size_t i = 0; i < g.ns1(); ++i)
                CHECK(sl.values[g.index(i, j + 1)] >=
                      sl.values[g.index(i, j)] - 1e-6 * K);
    }
}

TEST_CASE("psor step with an inactive obstacle matches the unconstrained solve") {
    const Grid g = build_grid(kModel, 4.0, 1.0, 21, 11, 10);
    const OperatorStencil st = assemble(g, kModel, 0.0);
    const std::vector<double> payoff = payoff_vector(g, kModel.K);

    std::vector<double> u0(g.n_nodes());
    for (std::size_t j = 0; j < g.ny1(); ++j)
        for (std::size_t i = 0; i < g.ns1(); ++i) u0[g.index(i, j)] = payoff[i];

    const double coef = g.dtheta;
    const std::vector<double> rhs = build_step_rhs(st, 0.0, u0, payoff);
    const std::vector<double> unconstrained = linear_step(st, coef, rhs);

    std::vector<double> psi(g.n_nodes(), -1e9); // obstacle far below: LCP degenerates
    std::vector<double> u = u0;
    psor_step(st, coef, rhs, psi, payoff, 1.5, 1e-12, 20000, u);
    for (std::size_t row = 0; row < u.size(); ++row)
        CHECK(std::abs(u[row] - unconstrained[row]) <= 1e-9);
}

TEST_CASE("psor step drives the LCP residual to zero at every node") {
    const Grid g = build_grid(kModel, 4.0, 1.0, 21, 11, 10);
    const OperatorStencil st = assemble(g, kModel, 0.0);
    const std::vector<double> payoff = payoff_vector(g, kModel.K);
    std::vector<double> psi(g.n_nodes());
    std::vector<double> u0(g.n_nodes());
    for (std::size_t j = 0; j < g.ny1(); ++j)
        for (std::size_t i = 0; i < g.ns1(); ++i) {
            psi[g.index(i, j)] = payoff[i];
            u0[g.index(i, j)] = payoff[i];
        }
    const double coef = g.dtheta;
    const std::vector<double> rhs = build_step_rhs(st, 0.0, u0, payoff);
    std::vector<double> u = u0;
    psor_step(st, coef, rhs, psi, payoff, 1.5, 1e-12, 40000, u);

    bool some_contact = false, some_free = false;
    const std::vector<double> res = lcp_step_residual(st, coef, rhs, psi, u);
    for (std::size_t row = 0; row < res.size(); ++row) {
        CHECK(std::abs(res[row]) <= 1e-9);
        if (st.kind[row] == RowKind::Interior) {
            if (u[row] - psi[row] <= 1e-12) some_contact = true;
            if (u[row] - psi[row] > 1e-6) some_free = true;
        }
    }
    CHECK(some_contact); // the obstacle binds somewhere in the money
    CHECK(some_free);
}

TEST_CASE("psor cap raises oracle_failure") {
    const Grid g = build_grid(kModel, 4.0, 1.0, 21, 11, 10);
    const OperatorStencil st = assemble(g, kModel, 0.0);
    const std::vector<double> payoff = payoff_vector(g, kModel.K);
    std::vector<double> psi(g.n_nodes(), 0.0), u(g.n_nodes(), 0.0);
    const std::vector<double> rhs = build_step_rhs(st, 0.0, u, payoff);
    CHECK_THROWS_AS((void)psor_step(st, g.dtheta, rhs, psi, payoff, 1.5, 1e-16, 2, u),
                    oracle_failure);
}

TEST_CASE("penalty and psor solves agree on a matched grid") {
    SolveConfig pen_cfg = small_config();
    pen_cfg.epsilon_schedule = {1e-3, 3e-4, 1e-4};
    const Grid g = build_grid(kModel, 4.0, 1.0, 31, 15, 20);
    const SolveResult a = solve(kModel, g, pen_cfg);
    const SolveResult b = psor_solve(kModel, g, small_config());
    double worst = 0.0;
    for (std::size_t row = 0; row < a.surfaces.back().values.size(); ++row)
        worst = std::max(worst,
                         std::abs(a.surfaces.back().values[row] - b.surfaces.back().values[row]));
    CHECK(worst <= 5e-3 * kModel.K);
    CHECK(a.epsilon_used == doctest::Approx(1e-4));
    CHECK(a.schedule_residuals.size() == 3);
}

TEST_CASE("epsilon continuation must decrease") {
    SolveConfig cfg = small_config();
    cfg.epsilon_schedule = {1e-3, 1e-3};
    CHECK_THROWS_AS(cfg.validate(), config_error);
}

TEST_CASE("newton starvation raises step_failure after the half-step retry") {
    SolveConfig cfg = small_config();
    cfg.newton_max_iter = 1;
    cfg.newton_tol = 1e-14;
    const Grid g = build_grid(kModel, 4.0, 1.0, 15, 7, 5);
    CHECK_THROWS_AS((void)solve(kModel, g, cfg), step_failure);
    try {
        (void)solve(kModel, g, cfg);
    } catch (const step_failure& e) {
        CHECK(e.last_residual() > 0.0);
    }
}

TEST_CASE("bicgstab backend reproduces the direct solve") {
    const Grid g = build_grid(kModel, 4.0, 1.0, 21, 11, 10);
    SolveConfig lu_cfg = small_config();
    SolveConfig it_cfg = small_config();
    it_cfg.linear_solver = LinearSolverKind::BiCGStabILU;
    const double p1 = solve(kModel, g, lu_cfg).value_at(1.0, 0.04);
    const double p2 = solve(kModel, g, it_cfg).value_at(1.0, 0.04);
    CHECK(p1 == doctest::Approx(p2).epsilon(1e-7));
}

TEST_CASE("strict mode rejects F2 models at solve time") {
    const SVModel f2 = heston_model(2.0, 0.04, 0.3, -0.7, 0.05, 1.0, 0.5);
    const Grid g = build_grid(f2, 4.0, 1.0, 15, 7, 5);
    CHECK_THROWS_AS((void)solve(f2, g, small_config()), degenerate_boundary_unsupported);
    SolveConfig permissive = small_config();
    permissive.permissive_fichera = true;
    const SolveResult res = solve(f2, g, permissive);
    CHECK(res.fichera_warning.has_value());
}

TEST_CASE("complementarity residual falls along the epsilon schedule") {
    SolveConfig cfg = small_config();
    cfg.epsilon_schedule = {4e-3, 1e-3, 2.5e-4};
    const Grid g = build_grid(kModel, 4.0, 1.0, 31, 15, 20);
    const SolveResult res = solve(kModel, g, cfg);
    REQUIRE(res.schedule_residuals.size() == 3);
    CHECK(res.schedule_residuals.back().second < res.schedule_residuals.front().second);
}
