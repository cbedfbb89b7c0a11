#include "svput/mc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <random>
#include <thread>

namespace svput {

namespace {

constexpr std::size_t kBlockSize = 16384; // even, so antithetic pairs never straddle blocks

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t block_seed(std::uint64_t master, std::uint64_t block) {
    std::uint64_t s = master ^ (0x51c64b3aa9d6a1f3ULL * (block + 1));
    return splitmix64(s);
}

/// Box-Muller pair from explicit uniforms; identical across platforms for a
/// given mt19937_64 stream, unlike std::normal_distribution.
struct NormalPair {
    double z1, z2;
};
inline NormalPair draw_pair(std::mt19937_64& rng) {
    const double u1 =
        1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53; // in (0, 1]
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53; // in [0, 1)
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

void parallel_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min<std::size_t>(hw, n_blocks);
    if (n_threads <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&]() {
            for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) fn(b);
        });
    }
    for (auto& th : pool) th.join();
}

struct MeanSE {
    double mean = 0.0, se = 0.0;
};

MeanSE mean_and_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / n;
    double q = 0.0;
    for (double x : v) q += (x - mean) * (x - mean);
    const double var = v.size() > 1 ? q / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

std::size_t basis_size(int degree) { return degree == 2 ? 6 : 10; }

void fill_basis(double x, double y, int degree, double* phi) {
    phi[0] = 1.0;
    phi[1] = x;
    phi[2] = y;
    phi[3] = x * x;
    phi[4] = x * y;
    phi[5] = y * y;
    if (degree == 3) {
        phi[6] = x * x * x;
        phi[7] = x * x * y;
        phi[8] = x * y * y;
        phi[9] = y * y * y;
    }
}

} // namespace

PathBundle simulate(const SVModel& model, double x0, double y0, double t0,
                    std::size_t n_paths, std::size_t n_steps, std::uint64_t seed,
                    bool antithetic) {
    model.validate_params();
    if (!(x0 > 0.0)) throw parameter_error("simulate: x0 must be > 0");
    if (!(y0 >= 0.0)) throw parameter_error("simulate: y0 must be >= 0");
    if (n_paths < 1 || n_steps < 1)
        throw parameter_error("simulate: n_paths and n_steps must be >= 1");
    if (!(t0 >= 0.0 && t0 < model.T)) throw parameter_error("simulate: need 0 <= t0 < T");

    PathBundle pb;
    pb.n_paths = n_paths;
    pb.n_steps = n_steps;
    pb.x0 = x0;
    pb.y0 = y0;
    pb.t0 = t0;
    pb.T = model.T;
    pb.dt = (model.T - t0) / static_cast<double>(n_steps);
    pb.seed = seed;
    pb.antithetic = antithetic;
    pb.X.resize((n_steps + 1) * n_paths);
    pb.Y.resize((n_steps + 1) * n_paths);
    pb.hit_nu.assign(n_paths, -1);

    const double dt = pb.dt;
    const double sqdt = std::sqrt(dt);
    const double rho = model.rho;
    const double rho_perp = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double r = model.r;

    const std::size_t n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;
    parallel_blocks(n_blocks, [&](std::size_t blk) {
        const std::size_t p_lo = blk * kBlockSize;
        const std::size_t p_hi = std::min(p_lo + kBlockSize, n_paths);
        const std::size_t width = p_hi - p_lo;
        std::mt19937_64 rng(block_seed(seed, blk));

        std::vector<double> xs(width, x0), ys(width, y0);
        for (std::size_t p = 0; p < width; ++p) {
            pb.X[p_lo + p] = x0;
            pb.Y[p_lo + p] = y0;
            if (y0 == 0.0) pb.hit_nu[p_lo + p] = 0;
        }

        std::vector<double> zw(width), zb(width);
        for (std::size_t k = 0; k < n_steps; ++k) {
            for (std::size_t p = 0; p < width; ++p) {
                if (antithetic && (p % 2 == 1)) {
                    zw[p] = -zw[p - 1];
                    zb[p] = -zb[p - 1];
                } else {
                    const NormalPair z = draw_pair(rng);
                    zw[p] = z.z1;
                    zb[p] = rho * z.z1 + rho_perp * z.z2;
                }
            }
            double* xrow = &pb.X[(k + 1) * n_paths + p_lo];
            double* yrow = &pb.Y[(k + 1) * n_paths + p_lo];
            for (std::size_t p = 0; p < width; ++p) {
                const double yc = std::max(ys[p], 0.0);
                const double sig = model.sigma(yc);
                const double bv = model.b(yc);
                const double muv = model.mu(yc);
                xs[p] *= std::exp((r - 0.5 * sig * sig) * dt + sig * sqdt * zw[p]);
                ys[p] = std::max(0.0, ys[p] + muv * dt + bv * sqdt * zb[p]);
                xrow[p] = xs[p];
                yrow[p] = ys[p];
                if (ys[p] == 0.0 && pb.hit_nu[p_lo + p] < 0)
                    pb.hit_nu[p_lo + p] = static_cast<std::int64_t>(k + 1);
            }
        }
    });
    return pb;
}

MCEstimate lsmc_value(const PathBundle& paths, const SVModel& model, int basis_degree) {
    if (basis_degree != 2 && basis_degree != 3)
        throw parameter_error("lsmc_value: basis_degree must be 2 or 3");
    if (paths.n_paths < 4) throw parameter_error("lsmc_value: too few paths");

    const std::size_t n = paths.n_paths;
    const std::size_t n_reg = n / 2;
    const std::size_t nb = basis_size(basis_degree);
    const double K = model.K;
    const double r = model.r;
    const double dt = paths.dt;

    // cash flow and stopping index per path, initialized at maturity
    std::vector<double> cf(n);
    std::vector<std::size_t> tau(n, paths.n_steps);
    for (std::size_t p = 0; p < n; ++p)
        cf[p] = std::max(K - paths.x_at(paths.n_steps, p), 0.0);

    Eigen::MatrixXd gram(nb, nb);
    Eigen::VectorXd rhsv(nb), coeffs(nb);
    std::vector<double> phi(nb);

    for (std::size_t k = paths.n_steps; k-- > 1;) {
        // in-the-money regression paths at step k
        std::size_t n_itm = 0;
        double y_scale_acc = 0.0;
        for (std::size_t p = 0; p < n_reg; ++p) {
            if (paths.x_at(k, p) < K) {
                ++n_itm;
                y_scale_acc += paths.y_at(k, p);
            }
        }
        if (n_itm == 0) continue; // exercise set empty, no decision needed
        if (n_itm < 50)
            throw regression_degenerate("lsmc_value: only " + std::to_string(n_itm) +
                                        " in-the-money regression paths at step " +
                                        std::to_string(k));

        const double y_scale = std::max(y_scale_acc / static_cast<double>(n_itm), 1e-12);
        gram.setZero();
        rhsv.setZero();
        for (std::size_t p = 0; p < n_reg; ++p) {
            const double x = paths.x_at(k, p);
            if (!(x < K)) continue;
            fill_basis(x / K, paths.y_at(k, p) / y_scale, basis_degree, phi.data());
            const double target =
                cf[p] * std::exp(-r * dt * static_cast<double>(tau[p] - k));
            for (std::size_t a = 0; a < nb; ++a) {
                rhsv[static_cast<Eigen::Index>(a)] += phi[a] * target;
                for (std::size_t b = 0; b <= a; ++b)
                    gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                        phi[a] * phi[b];
            }
        }
        gram = gram.selfadjointView<Eigen::Lower>();
        coeffs = gram.colPivHouseholderQr().solve(rhsv);

        // apply the fitted rule to all in-the-money paths (both halves)
        for (std::size_t p = 0; p < n; ++p) {
            const double x = paths.x_at(k, p);
            if (!(x < K)) continue;
            fill_basis(x / K, paths.y_at(k, p) / y_scale, basis_degree, phi.data());
            double cont = 0.0;
            for (std::size_t a = 0; a < nb; ++a)
                cont += phi[a] * coeffs[static_cast<Eigen::Index>(a)];
            const double payoff = K - x;
            if (payoff > cont) {
                cf[p] = payoff;
                tau[p] = k;
            }
        }
    }

    // out-of-sample valuation on the second half
    std::vector<double> disc(n - n_reg);
    for (std::size_t p = n_reg; p < n; ++p)
        disc[p - n_reg] = cf[p] * std::exp(-r * dt * static_cast<double>(tau[p]));
    const MeanSE ms = mean_and_se(disc);

    MCEstimate est;
    est.n_paths = paths.n_paths;
    est.n_steps = paths.n_steps;
    est.method = MCEstimate::Method::LSMC;
    est.seed = paths.seed;

    // exercising at the valuation point itself is admissible
    const double payoff0 = std::max(K - paths.x0, 0.0);
    if (payoff0 > ms.mean) {
        est.value = payoff0;
        est.std_error = 0.0;
    } else {
        est.value = ms.mean;
        est.std_error = ms.se;
    }
    return est;
}

MCEstimate policy_value(const PathBundle& paths, const FreeBoundary& fb, const SVModel& model,
                        std::vector<std::size_t>* stop_histogram) {
    const std::size_t n = paths.n_paths;
    const double K = model.K;
    const double r = model.r;
    std::vector<double> disc(n);
    std::vector<std::size_t> stops(n);

    const std::size_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
    parallel_blocks(n_blocks, [&](std::size_t blk) {
        const std::size_t p_lo = blk * kBlockSize;
        const std::size_t p_hi = std::min(p_lo + kBlockSize, n);
        for (std::size_t p = p_lo; p < p_hi; ++p) {
            std::size_t stop = paths.n_steps;
            for (std::size_t k = 0; k < paths.n_steps; ++k) {
                const double x = paths.x_at(k, p);
                if (x <= fb.g_at(paths.y_at(k, p), paths.time_at(k))) {
                    stop = k;
                    break;
                }
            }
            stops[p] = stop;
            const double t_stop = paths.time_at(stop);
            disc[p] = std::exp(-r * (t_stop - paths.t0)) *
                      std::max(K - paths.x_at(stop, p), 0.0);
        }
    });

    if (stop_histogram) {
        stop_histogram->assign(paths.n_steps + 1, 0);
        for (std::size_t s : stops) ++(*stop_histogram)[s];
    }

    const MeanSE ms = mean_and_se(disc);
    MCEstimate est;
    est.value = ms.mean;
    est.std_error = ms.se;
    est.n_paths = paths.n_paths;
    est.n_steps = paths.n_steps;
    est.method = MCEstimate::Method::Policy;
    est.seed = paths.seed;
    return est;
}

MCEstimate european_value(const PathBundle& paths, const SVModel& model) {
    const double df = std::exp(-model.r * (paths.T - paths.t0));
    std::vector<double> disc(paths.n_paths);
    for (std::size_t p = 0; p < paths.n_paths; ++p)
        disc[p] = df * std::max(model.K - paths.x_at(paths.n_steps, p), 0.0);
    const MeanSE ms = mean_and_se(disc);
    MCEstimate est;
    est.value = ms.mean;
    est.std_error = ms.se;
    est.n_paths = paths.n_paths;
    est.n_steps = paths.n_steps;
    est.method = MCEstimate::Method::European;
    est.seed = paths.seed;
    return est;
}

std::vector<DegenerateCheckRow> degenerate_boundary_check(const SVModel& model,
                                                          const std::vector<double>& x0_list,
                                                          double t0, std::size_t n_paths,
                                                          double y0, std::size_t n_steps,
                                                          std::uint64_t seed) {
    std::vector<DegenerateCheckRow> rows;
    rows.reserve(x0_list.size());
    for (double x0 : x0_list) {
        const PathBundle pb = simulate(model, x0, y0, t0, n_paths, n_steps, seed);
        const MCEstimate est = lsmc_value(pb, model, 2);
        DegenerateCheckRow row;
        row.x0 = x0;
        row.value = est.value;
        row.std_error = est.std_error;
        row.target = std::max(model.K - x0, 0.0);
        row.gap = std::abs(est.value - row.target);
        row.within_3se = row.gap <= 3.0 * est.std_error;
        rows.push_back(row);
    }
    return rows;
}

} // namespace svput
