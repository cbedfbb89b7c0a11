#include "svput/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

namespace svput {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// System matrix of one implicit step: interior rows I - coef*L, boundary
/// rows the algebraic constraints. All 9 interior slots are inserted even
/// when zero so the pattern is independent of the coefficient values.
SpMat build_system(const OperatorStencil& st, double coef) {
    const std::size_t ns1 = st.ns1, ny1 = st.ny1, n = ns1 * ny1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * n);
    std::vector<std::pair<std::size_t, double>> entries;
    for (std::size_t j = 0; j < ny1; ++j) {
        for (std::size_t i = 0; i < ns1; ++i) {
            const std::size_t row = st.index(i, j);
            if (st.kind[row] == RowKind::Interior) {
                const auto& c = st.a[row];
                const auto add = [&](std::size_t col, double a_off, bool diag) {
                    trip.emplace_back(static_cast<int>(row), static_cast<int>(col),
                                      (diag ? 1.0 : 0.0) - coef * a_off);
                };
                add(row, c[OffC], true);
                add(row + 1, c[OffE], false);
                add(row - 1, c[OffW], false);
                add(row + ns1, c[OffN], false);
                add(row - ns1, c[OffS], false);
                add(row + ns1 + 1, c[OffNE], false);
                add(row + ns1 - 1, c[OffNW], false);
                add(row - ns1 + 1, c[OffSE], false);
                add(row - ns1 - 1, c[OffSW], false);
            } else {
                entries.clear();
                st.constraint_row(i, j, entries);
                for (const auto& [col, val] : entries)
                    trip.emplace_back(static_cast<int>(row), static_cast<int>(col), val);
            }
        }
    }
    SpMat S(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    S.setFromTriplets(trip.begin(), trip.end());
    S.makeCompressed();
    return S;
}

std::vector<std::ptrdiff_t> diagonal_positions(const SpMat& S) {
    std::vector<std::ptrdiff_t> pos(static_cast<std::size_t>(S.cols()), -1);
    for (Eigen::Index k = 0; k < S.outerSize(); ++k) {
        for (SpMat::InnerIterator it(S, k); it; ++it) {
            if (it.row() == it.col()) {
                pos[static_cast<std::size_t>(k)] = &it.value() - S.valuePtr();
                break;
            }
        }
    }
    return pos;
}

struct NewtonWorkspace {
    SpMat S;
    SpMat J;
    std::vector<std::ptrdiff_t> diag_pos;
    Eigen::SparseLU<SpMat> lu;
    bool analyzed = false;

    explicit NewtonWorkspace(const OperatorStencil& st, double coef)
        : S(build_system(st, coef)), J(S), diag_pos(diagonal_positions(S)) {}
};

Vec solve_linear(NewtonWorkspace& ws, LinearSolverKind kind, const Vec& rhs) {
    if (kind == LinearSolverKind::BandedLU) {
        if (!ws.analyzed) {
            ws.lu.analyzePattern(ws.J);
            ws.analyzed = true;
        }
        ws.lu.factorize(ws.J);
        if (ws.lu.info() != Eigen::Success)
            throw step_failure("linear solve: LU factorization failed", kInf);
        return ws.lu.solve(rhs);
    }
    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(1e-13);
    it.setMaxIterations(2000);
    it.compute(ws.J);
    Vec x = it.solve(rhs);
    if (it.info() != Eigen::Success)
        throw step_failure("linear solve: BiCGStab did not converge", kInf);
    return x;
}

/// Residual of the implicit penalized step at v. Returns +inf when the
/// penalty saturates or any entry is non-finite.
double eval_residual(const OperatorStencil& st, const NewtonWorkspace& ws, double dtheta,
                     const PenaltyParams& pen, const Vec& rhs,
                     const std::vector<double>& pen_obstacle, const Vec& v, Vec& F) {
    F.noalias() = ws.S * v;
    F -= rhs;
    double res = 0.0;
    for (std::size_t row = 0; row < st.kind.size(); ++row) {
        if (st.kind[row] == RowKind::Interior)
            F[static_cast<Eigen::Index>(row)] +=
                dtheta * beta(v[static_cast<Eigen::Index>(row)] - pen_obstacle[row], pen);
        const double f = F[static_cast<Eigen::Index>(row)];
        if (!std::isfinite(f)) return kInf;
        res = std::max(res, std::abs(f));
    }
    return res;
}

/// Damped Newton for one implicit step; returns the iteration count.
int newton_solve(const OperatorStencil& st, NewtonWorkspace& ws, const SolveConfig& cfg,
                 const PenaltyParams& pen, double dtheta, const Vec& rhs,
                 const std::vector<double>& pen_obstacle, Vec& u) {
    const std::size_t n = st.kind.size();
    Vec F(n), Ftrial(n), trial(n);
    double res = eval_residual(st, ws, dtheta, pen, rhs, pen_obstacle, u, F);
    if (!std::isfinite(res))
        throw step_failure("penalty saturated at the initial Newton iterate "
                           "(iterate far below the obstacle)",
                           res);
    for (int iter = 0; iter < cfg.newton_max_iter; ++iter) {
        if (res < cfg.newton_tol) return iter;

        ws.J = ws.S;
        double* vals = ws.J.valuePtr();
        for (std::size_t row = 0; row < n; ++row) {
            if (st.kind[row] != RowKind::Interior) continue;
            const double bp =
                beta_prime(u[static_cast<Eigen::Index>(row)] - pen_obstacle[row], pen);
            vals[ws.diag_pos[row]] += dtheta * (std::isfinite(bp) ? bp : 1e300);
        }
        Vec d = solve_linear(ws, cfg.linear_solver, Vec(-F));

        // line search: halve while the residual grows
        double lambda = 1.0;
        double trial_res = kInf;
        for (int ls = 0; ls < 9; ++ls) {
            trial = u + lambda * d;
            trial_res = eval_residual(st, ws, dtheta, pen, rhs, pen_obstacle, trial, Ftrial);
            if (trial_res <= res || ls == 8) break;
            lambda *= 0.5;
        }
        u.swap(trial);
        F.swap(Ftrial);
        res = trial_res;
        if (!std::isfinite(res))
            throw step_failure("penalty saturated during Newton iteration", res);
    }
    if (res < cfg.newton_tol) return cfg.newton_max_iter;
    throw step_failure("Newton did not converge within " +
                           std::to_string(cfg.newton_max_iter) + " iterations",
                       res);
}

double theta_weight(const SolveConfig& cfg, std::size_t k) {
    if (cfg.theta_scheme < 1.0 && static_cast<int>(k) <= cfg.rannacher_steps) return 1.0;
    return cfg.theta_scheme;
}

/// Per-node smoothed obstacle pi_eps(K - e^{s_i}) replicated over y-rows.
std::vector<double> smoothed_obstacle(const Grid& grid, double strike, double eps) {
    std::vector<double> p(grid.n_nodes());
    for (std::size_t j = 0; j < grid.ny1(); ++j)
        for (std::size_t i = 0; i < grid.ns1(); ++i)
            p[grid.index(i, j)] = pi_smooth(strike - std::exp(grid.s_nodes[i]), eps);
    return p;
}

void fill_residual_slice(const OperatorStencil& sharp, const Grid& grid,
                         const std::vector<double>& payoff, const Surface& prev, Surface& cur,
                         double dtheta, double& max_abs) {
    const std::size_t n = grid.n_nodes();
    std::vector<double> lu(n);
    sharp.apply_interior(cur.values, lu);
    cur.residual.assign(n, 0.0);
    max_abs = 0.0;
    for (std::size_t j = 0; j < grid.ny1(); ++j) {
        for (std::size_t i = 0; i < grid.ns1(); ++i) {
            const std::size_t row = grid.index(i, j);
            if (sharp.kind[row] != RowKind::Interior) continue;
            const double dudtheta = (cur.values[row] - prev.values[row]) / dtheta;
            const double rmin = std::min(dudtheta - lu[row], cur.values[row] - payoff[i]);
            cur.residual[row] = rmin;
            max_abs = std::max(max_abs, std::abs(rmin));
        }
    }
}

void enforce_dirichlet(const OperatorStencil& st, const std::vector<double>& datum_s,
                       std::vector<double>& u) {
    for (std::size_t j = 0; j < st.ny1; ++j) {
        for (std::size_t i = 0; i < st.ns1; ++i) {
            const std::size_t row = st.index(i, j);
            if (st.kind[row] == RowKind::DirichletY0)
                u[row] = datum_s[i];
            else if (st.kind[row] == RowKind::DirichletSMin)
                u[row] = datum_s[0];
        }
    }
}

SolveResult march_penalty(const SVModel& model, const Grid& grid, const SolveConfig& cfg,
                          double eps, const SolveResult* warm) {
    const FicheraPolicy policy =
        cfg.permissive_fichera ? FicheraPolicy::Permissive : FicheraPolicy::Strict;
    const OperatorStencil st = assemble(grid, model, eps, policy);
    const OperatorStencil sharp = assemble(grid, model, 0.0, policy);
    const PenaltyParams pen(eps, model.r, model.K);

    const std::size_t n = grid.n_nodes();
    const std::vector<double> payoff = payoff_vector(grid, model.K);
    const std::vector<double> pen_obstacle = smoothed_obstacle(grid, model.K, eps);
    std::vector<double> datum_s(grid.ns1());
    for (std::size_t i = 0; i < datum_s.size(); ++i)
        datum_s[i] = pi_smooth(model.K - std::exp(grid.s_nodes[i]), eps);

    SolveResult res;
    res.grid = grid;
    res.method = SolveMethod::Penalty;
    res.strike = model.K;
    res.epsilon_used = eps;
    res.fichera_warning = st.fichera_warning;
    res.surfaces.reserve(grid.n_theta + 1);

    Surface init;
    init.values.assign(pen_obstacle.begin(), pen_obstacle.end());
    init.payoff = payoff;
    init.residual.assign(n, 0.0);
    init.theta = 0.0;
    init.epsilon = eps;
    res.surfaces.push_back(std::move(init));
    res.complementarity_residual.push_back(0.0);

    std::map<double, std::unique_ptr<NewtonWorkspace>> workspaces;
    const auto workspace = [&](double coef) -> NewtonWorkspace& {
        auto it = workspaces.find(coef);
        if (it == workspaces.end())
            it = workspaces.emplace(coef, std::make_unique<NewtonWorkspace>(st, coef)).first;
        return *it->second;
    };

    const auto advance = [&](const std::vector<double>& u_old, double coef, double expl,
                             const std::vector<double>* guess, std::vector<double>& out,
                             double dtheta_eff) -> int {
        const std::vector<double> rhs_v = build_step_rhs(st, expl, u_old, datum_s);
        const Vec rhs = Eigen::Map<const Vec>(rhs_v.data(), static_cast<Eigen::Index>(n));
        Vec u = Eigen::Map<const Vec>((guess ? guess->data() : u_old.data()),
                                      static_cast<Eigen::Index>(n));
        const int iters =
            newton_solve(st, workspace(coef), cfg, pen, dtheta_eff, rhs, pen_obstacle, u);
        out.assign(u.data(), u.data() + n);
        enforce_dirichlet(st, datum_s, out);
        return iters;
    };

    for (std::size_t k = 1; k <= grid.n_theta; ++k) {
        const double tw = theta_weight(cfg, k);
        const double dtheta = grid.dtheta;
        const std::vector<double>& u_old = res.surfaces[k - 1].values;
        const std::vector<double>* guess =
            (warm && k < warm->surfaces.size()) ? &warm->surfaces[k].values : nullptr;

        std::vector<double> u_new;
        int iters = 0;
        try {
            iters = advance(u_old, tw * dtheta, (1.0 - tw) * dtheta, guess, u_new, dtheta);
        } catch (const step_failure&) {
            // one retry as two half-steps
            std::vector<double> u_half;
            iters = advance(u_old, tw * dtheta * 0.5, (1.0 - tw) * dtheta * 0.5, guess, u_half,
                            dtheta * 0.5);
            iters += advance(u_half, tw * dtheta * 0.5, (1.0 - tw) * dtheta * 0.5, guess, u_new,
                             dtheta * 0.5);
        }

        for (double v : u_new)
            if (!std::isfinite(v))
                throw step_failure("solve: non-finite value in slice " + std::to_string(k),
                                   std::numeric_limits<double>::infinity());

        Surface slice;
        slice.values = std::move(u_new);
        slice.payoff = payoff;
        slice.theta = grid.theta_nodes[k];
        slice.epsilon = eps;
        double max_abs = 0.0;
        fill_residual_slice(sharp, grid, payoff, res.surfaces[k - 1], slice, dtheta, max_abs);
        res.surfaces.push_back(std::move(slice));
        res.complementarity_residual.push_back(max_abs);
        res.iterations_per_step.push_back(iters);
    }
    return res;
}

SolveResult march_psor(const SVModel& model, const Grid& grid, const SolveConfig& cfg) {
    const FicheraPolicy policy =
        cfg.permissive_fichera ? FicheraPolicy::Permissive : FicheraPolicy::Strict;
    const OperatorStencil st = assemble(grid, model, 0.0, policy);

    const std::size_t n = grid.n_nodes();
    const std::vector<double> payoff = payoff_vector(grid, model.K);
    std::vector<double> psi(n);
    for (std::size_t j = 0; j < grid.ny1(); ++j)
        for (std::size_t i = 0; i < grid.ns1(); ++i) psi[grid.index(i, j)] = payoff[i];

    SolveResult res;
    res.grid = grid;
    res.method = SolveMethod::Psor;
    res.strike = model.K;
    res.epsilon_used = 0.0;
    res.fichera_warning = st.fichera_warning;

    Surface init;
    init.values = psi;
    init.payoff = payoff;
    init.residual.assign(n, 0.0);
    init.theta = 0.0;
    init.epsilon = 0.0;
    res.surfaces.push_back(std::move(init));
    res.complementarity_residual.push_back(0.0);

    for (std::size_t k = 1; k <= grid.n_theta; ++k) {
        const double tw = theta_weight(cfg, k);
        const double dtheta = grid.dtheta;
        const std::vector<double>& u_old = res.surfaces[k - 1].values;
        const std::vector<double> rhs =
            build_step_rhs(st, (1.0 - tw) * dtheta, u_old, payoff);

        std::vector<double> u = u_old;
        const int sweeps = psor_step(st, tw * dtheta, rhs, psi, payoff, cfg.psor_omega,
                                     cfg.psor_tol, cfg.psor_max_iter, u);
        for (double v : u)
            if (!std::isfinite(v))
                throw oracle_failure("psor_solve: non-finite value in slice " +
                                     std::to_string(k));

        Surface slice;
        slice.values = std::move(u);
        slice.payoff = payoff;
        slice.theta = grid.theta_nodes[k];
        slice.epsilon = 0.0;
        double max_abs = 0.0;
        fill_residual_slice(st, grid, payoff, res.surfaces[k - 1], slice, dtheta, max_abs);
        res.surfaces.push_back(std::move(slice));
        res.complementarity_residual.push_back(max_abs);
        res.iterations_per_step.push_back(sweeps);
    }
    return res;
}

} // namespace

void SolveConfig::validate() const {
    if (!(epsilon > 0.0)) throw config_error("solver: epsilon must be > 0");
    if (!(newton_tol > 0.0)) throw config_error("solver: newton_tol must be > 0");
    if (newton_max_iter < 1) throw config_error("solver: newton_max_iter must be >= 1");
    if (!(theta_scheme >= 0.5 && theta_scheme <= 1.0))
        throw config_error("solver: theta_scheme must be in [0.5, 1]");
    if (rannacher_steps < 0) throw config_error("solver: rannacher_steps must be >= 0");
    if (!(psor_omega > 0.0 && psor_omega < 2.0))
        throw config_error("solver: psor_omega must be in (0, 2)");
    if (!(psor_tol > 0.0)) throw config_error("solver: psor_tol must be > 0");
    if (psor_max_iter < 1) throw config_error("solver: psor_max_iter must be >= 1");
    for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
        if (!(epsilon_schedule[i] > 0.0))
            throw config_error("solver: epsilon_schedule entries must be > 0");
        if (i > 0 && !(epsilon_schedule[i] < epsilon_schedule[i - 1]))
            throw config_error("solver: epsilon_schedule must be strictly decreasing");
    }
}

double SolveResult::max_complementarity_residual() const {
    double m = 0.0;
    for (double v : complementarity_residual) m = std::max(m, v);
    return m;
}

double SolveResult::value_at(double x, double y) const {
    if (!(x > 0.0)) throw parameter_error("value_at: x must be > 0");
    return bilinear_at(grid, surfaces.back().values, std::log(x), y);
}

std::vector<double> build_step_rhs(const OperatorStencil& st, double explicit_coef,
                                   std::span<const double> u_old,
                                   std::span<const double> datum_s) {
    const std::size_t n = st.kind.size();
    std::vector<double> lu(n, 0.0);
    if (explicit_coef != 0.0) st.apply_interior(u_old, lu);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t j = 0; j < st.ny1; ++j) {
        for (std::size_t i = 0; i < st.ns1; ++i) {
            const std::size_t row = st.index(i, j);
            switch (st.kind[row]) {
            case RowKind::Interior:
                rhs[row] = u_old[row] + explicit_coef * lu[row];
                break;
            case RowKind::DirichletY0:
                rhs[row] = datum_s[i];
                break;
            case RowKind::DirichletSMin:
                rhs[row] = datum_s[0];
                break;
            default:
                rhs[row] = 0.0;
            }
        }
    }
    return rhs;
}

std::vector<double> linear_step(const OperatorStencil& st, double step_coef,
                                std::span<const double> rhs) {
    SpMat S = build_system(st, step_coef);
    Eigen::SparseLU<SpMat> lu;
    lu.compute(S);
    if (lu.info() != Eigen::Success)
        throw step_failure("linear_step: LU factorization failed", kInf);
    const Vec b = Eigen::Map<const Vec>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    Vec x = lu.solve(b);
    return std::vector<double>(x.data(), x.data() + x.size());
}

int psor_step(const OperatorStencil& st, double step_coef, std::span<const double> rhs,
              std::span<const double> psi, std::span<const double> datum_s, double omega,
              double tol, int max_iter, std::span<double> u) {
    const std::size_t ns1 = st.ns1, ny1 = st.ny1;
    const double c = step_coef;
    for (int it = 1; it <= max_iter; ++it) {
        double delta = 0.0;
        for (std::size_t j = 0; j < ny1; ++j) {
            for (std::size_t i = 0; i < ns1; ++i) {
                const std::size_t row = st.index(i, j);
                double unew;
                switch (st.kind[row]) {
                case RowKind::DirichletY0:
                    unew = std::max(psi[row], datum_s[i]);
                    break;
                case RowKind::DirichletSMin:
                    unew = std::max(psi[row], datum_s[0]);
                    break;
                case RowKind::NeumannSMax:
                    unew = std::max(psi[row], (4.0 * u[row - 1] - u[row - 2]) / 3.0);
                    break;
                case RowKind::NeumannYMax:
                    unew = std::max(psi[row], (4.0 * u[row - ns1] - u[row - 2 * ns1]) / 3.0);
                    break;
                case RowKind::NeumannCorner: {
                    const double cs = 1.0 / st.ds, cy = 1.0 / st.dy;
                    const double num = cs * (4.0 * u[row - 1] - u[row - 2]) +
                                       cy * (4.0 * u[row - ns1] - u[row - 2 * ns1]);
                    unew = std::max(psi[row], num / (3.0 * (cs + cy)));
                    break;
                }
                case RowKind::Interior:
                default: {
                    const auto& a = st.a[row];
                    const double diag = 1.0 - c * a[OffC];
                    const double off =
                        -c * (a[OffE] * u[row + 1] + a[OffW] * u[row - 1] +
                              a[OffN] * u[row + ns1] + a[OffS] * u[row - ns1] +
                              a[OffNE] * u[row + ns1 + 1] + a[OffNW] * u[row + ns1 - 1] +
                              a[OffSE] * u[row - ns1 + 1] + a[OffSW] * u[row - ns1 - 1]);
                    const double gs = (rhs[row] - off) / diag;
                    unew = std::max(psi[row], u[row] + omega * (gs - u[row]));
                    break;
                }
                }
                delta = std::max(delta, std::abs(unew - u[row]));
                u[row] = unew;
            }
        }
        if (delta <= tol) return it;
    }
    throw oracle_failure("psor_step: projected SOR exceeded " + std::to_string(max_iter) +
                         " sweeps");
}

std::vector<double> lcp_step_residual(const OperatorStencil& st, double step_coef,
                                      std::span<const double> rhs, std::span<const double> psi,
                                      std::span<const double> u) {
    const std::size_t n = st.kind.size();
    std::vector<double> lu(n);
    st.apply_interior(u, lu);
    std::vector<double> out(n, 0.0);
    std::vector<std::pair<std::size_t, double>> entries;
    for (std::size_t j = 0; j < st.ny1; ++j) {
        for (std::size_t i = 0; i < st.ns1; ++i) {
            const std::size_t row = st.index(i, j);
            double su;
            if (st.kind[row] == RowKind::Interior) {
                su = u[row] - step_coef * lu[row];
            } else {
                entries.clear();
                st.constraint_row(i, j, entries);
                su = 0.0;
                for (const auto& [col, val] : entries) su += val * u[col];
            }
            out[row] = std::min(su - rhs[row], u[row] - psi[row]);
        }
    }
    return out;
}

Surface step(const Surface& u_prev, const Grid& grid, const OperatorStencil& stencil,
             const SolveConfig& config, const PenaltyParams& penalty, double dtheta,
             double theta_w) {
    config.validate();
    if (!(dtheta > 0.0)) throw parameter_error("step: dtheta must be > 0");
    for (double v : u_prev.values)
        if (!std::isfinite(v)) throw parameter_error("step: u_prev contains non-finite values");

    const double strike = std::exp(grid.ln_strike);
    const std::size_t n = grid.n_nodes();
    const std::vector<double> pen_obstacle = smoothed_obstacle(grid, strike, penalty.epsilon);
    std::vector<double> datum_s(grid.ns1());
    for (std::size_t i = 0; i < datum_s.size(); ++i)
        datum_s[i] = pi_smooth(strike - std::exp(grid.s_nodes[i]), penalty.epsilon);

    const std::vector<double> rhs_v =
        build_step_rhs(stencil, (1.0 - theta_w) * dtheta, u_prev.values, datum_s);
    const Vec rhs = Eigen::Map<const Vec>(rhs_v.data(), static_cast<Eigen::Index>(n));
    Vec u = Eigen::Map<const Vec>(u_prev.values.data(), static_cast<Eigen::Index>(n));

    NewtonWorkspace ws(stencil, theta_w * dtheta);
    newton_solve(stencil, ws, config, penalty, dtheta, rhs, pen_obstacle, u);

    Surface out;
    out.values.assign(u.data(), u.data() + n);
    enforce_dirichlet(stencil, datum_s, out.values);
    out.payoff = payoff_vector(grid, strike);
    out.residual.assign(n, 0.0);
    out.theta = u_prev.theta + dtheta;
    out.epsilon = penalty.epsilon;
    return out;
}

SolveResult solve(const SVModel& model, const Grid& grid, const SolveConfig& config) {
    config.validate();
    model.validate_params();
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<double> schedule = config.epsilon_schedule;
    if (schedule.empty()) schedule.push_back(config.epsilon);

    SolveResult result;
    std::vector<std::pair<double, double>> schedule_residuals;
    for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
        const SolveResult* warm = stage == 0 ? nullptr : &result;
        SolveResult next = march_penalty(model, grid, config, schedule[stage], warm);
        schedule_residuals.emplace_back(schedule[stage], next.max_complementarity_residual());
        result = std::move(next);
    }
    result.schedule_residuals = std::move(schedule_residuals);
    result.wallclock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

SolveResult psor_solve(const SVModel& model, const Grid& grid, const SolveConfig& config) {
    config.validate();
    model.validate_params();
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult result = march_psor(model, grid, config);
    result.wallclock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

} // namespace svput
