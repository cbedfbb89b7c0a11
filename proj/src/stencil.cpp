#include "svput/stencil.hpp"

#include <cmath>

namespace svput {

OperatorStencil assemble(const Grid& grid, const SVModel& model, double epsilon,
                         FicheraPolicy policy) {
    if (epsilon < 0.0) throw parameter_error("assemble: epsilon must be >= 0");
    model.validate_params();

    OperatorStencil st;
    st.ns1 = grid.ns1();
    st.ny1 = grid.ny1();
    st.ds = grid.ds;
    st.dy = grid.dy;
    st.epsilon = epsilon;
    st.r = model.r;

    const FicheraReport fr = fichera_classify(model);
    if (fr.boundary_case == FicheraCase::F2_noBoundary) {
        const std::string msg =
            "Fichera function F = " + std::to_string(fr.F_value) +
            " >= 0 at y=0: no boundary datum may be imposed there; this solver "
            "handles only the negative-Fichera regime";
        if (policy == FicheraPolicy::Strict) throw degenerate_boundary_unsupported(msg);
        st.fichera_warning = msg;
    }

    const std::size_t n = st.ns1 * st.ny1;
    st.kind.assign(n, RowKind::Interior);
    st.a.assign(n, std::array<double, 9>{});

    const double ds = grid.ds, dy = grid.dy;
    const double inv_ds2 = 1.0 / (ds * ds);
    const double inv_dy2 = 1.0 / (dy * dy);
    const double inv_cross = 1.0 / (4.0 * ds * dy);

    for (std::size_t j = 0; j < st.ny1; ++j) {
        const double y = grid.y_nodes[j];
        const double sig = model.sigma(y);
        const double bb = model.b(y);
        const double c_ss = 0.5 * (sig * sig + epsilon);
        const double c_sy = model.rho * (sig * bb + epsilon);
        const double c_yy = 0.5 * (bb * bb + epsilon);
        const double c_s = model.r - 0.5 * sig * sig - 0.5 * epsilon;
        const double c_y = model.mu(y);

        for (std::size_t i = 0; i < st.ns1; ++i) {
            const std::size_t row = st.index(i, j);
            if (j == 0) {
                st.kind[row] = RowKind::DirichletY0;
                continue;
            }
            if (i == 0) {
                st.kind[row] = RowKind::DirichletSMin;
                continue;
            }
            const bool last_i = (i == st.ns1 - 1);
            const bool last_j = (j == st.ny1 - 1);
            if (last_i && last_j) {
                st.kind[row] = RowKind::NeumannCorner;
                continue;
            }
            if (last_i) {
                st.kind[row] = RowKind::NeumannSMax;
                continue;
            }
            if (last_j) {
                st.kind[row] = RowKind::NeumannYMax;
                continue;
            }

            auto& c = st.a[row];
            // second derivatives, centered
            c[OffE] += c_ss * inv_ds2;
            c[OffW] += c_ss * inv_ds2;
            c[OffC] -= 2.0 * c_ss * inv_ds2;
            c[OffN] += c_yy * inv_dy2;
            c[OffS] += c_yy * inv_dy2;
            c[OffC] -= 2.0 * c_yy * inv_dy2;
            // mixed derivative, 4-point centered cross
            c[OffNE] += c_sy * inv_cross;
            c[OffSW] += c_sy * inv_cross;
            c[OffNW] -= c_sy * inv_cross;
            c[OffSE] -= c_sy * inv_cross;
            // first derivatives, upwinded by coefficient sign
            if (c_s >= 0.0) {
                c[OffE] += c_s / ds;
                c[OffC] -= c_s / ds;
            } else {
                c[OffC] += c_s / ds;
                c[OffW] -= c_s / ds;
            }
            if (c_y >= 0.0) {
                c[OffN] += c_y / dy;
                c[OffC] -= c_y / dy;
            } else {
                c[OffC] += c_y / dy;
                c[OffS] -= c_y / dy;
            }
            // zeroth order
            c[OffC] -= model.r;
        }
    }
    return st;
}

void OperatorStencil::apply_interior(std::span<const double> u, std::span<double> out) const {
    for (std::size_t j = 0; j < ny1; ++j) {
        for (std::size_t i = 0; i < ns1; ++i) {
            const std::size_t row = index(i, j);
            if (kind[row] != RowKind::Interior) {
                out[row] = 0.0;
                continue;
            }
            const auto& c = a[row];
            out[row] = c[OffC] * u[row] + c[OffE] * u[row + 1] + c[OffW] * u[row - 1] +
                       c[OffN] * u[row + ns1] + c[OffS] * u[row - ns1] +
                       c[OffNE] * u[row + ns1 + 1] + c[OffNW] * u[row + ns1 - 1] +
                       c[OffSE] * u[row - ns1 + 1] + c[OffSW] * u[row - ns1 - 1];
        }
    }
}

void OperatorStencil::constraint_row(std::size_t i, std::size_t j,
                                     std::vector<std::pair<std::size_t, double>>& entries) const {
    const std::size_t row = index(i, j);
    switch (kind[row]) {
    case RowKind::Interior:
        return;
    case RowKind::DirichletY0:
    case RowKind::DirichletSMin:
        entries.emplace_back(row, 1.0);
        return;
    case RowKind::NeumannSMax: {
        const double c = 1.0 / (2.0 * ds);
        entries.emplace_back(row, 3.0 * c);
        entries.emplace_back(row - 1, -4.0 * c);
        entries.emplace_back(row - 2, 1.0 * c);
        return;
    }
    case RowKind::NeumannYMax: {
        const double c = 1.0 / (2.0 * dy);
        entries.emplace_back(row, 3.0 * c);
        entries.emplace_back(row - ns1, -4.0 * c);
        entries.emplace_back(row - 2 * ns1, 1.0 * c);
        return;
    }
    case RowKind::NeumannCorner: {
        // No guidance exists for the corner where both Neumann sides meet;
        // average the two one-sided forms.
        const double cs = 0.5 / (2.0 * ds);
        const double cy = 0.5 / (2.0 * dy);
        entries.emplace_back(row, 3.0 * cs + 3.0 * cy);
        entries.emplace_back(row - 1, -4.0 * cs);
        entries.emplace_back(row - 2, 1.0 * cs);
        entries.emplace_back(row - ns1, -4.0 * cy);
        entries.emplace_back(row - 2 * ns1, 1.0 * cy);
        return;
    }
    }
}

} // namespace svput
