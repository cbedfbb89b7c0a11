#pragma once

#include "svput/grid.hpp"
#include "svput/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace svput {

/// Row classification of the discrete operator on the truncated box.
enum class RowKind : std::uint8_t {
    Interior,      ///< 9-point discretization of L_s^eps
    DirichletY0,   ///< u = datum(K - e^s) at y = 0
    DirichletSMin, ///< u = datum(K - e^{s_min}) at s = s_min
    NeumannSMax,   ///< du/ds = 0 at s = s_max (one-sided second order)
    NeumannYMax,   ///< du/dy = 0 at y = y_max (one-sided second order)
    NeumannCorner  ///< average of both one-sided forms at (s_max, y_max)
};

/// Neighbor slots of the interior 9-point stencil (E/W step in s, N/S in y).
enum StencilSlot : int {
    OffC = 0,
    OffE = 1,
    OffW = 2,
    OffN = 3,
    OffS = 4,
    OffNE = 5,
    OffNW = 6,
    OffSE = 7,
    OffSW = 8
};

enum class FicheraPolicy { Strict, Permissive };

/// Discretization of L_s^eps u = 1/2 (sigma^2+eps) u_ss + rho (sigma b + eps) u_sy
/// + 1/2 (b^2+eps) u_yy + (r - 1/2 sigma^2 - 1/2 eps) u_s + mu u_y - r u,
/// with centered second differences, a 4-point centered cross stencil, and
/// first-order terms upwinded by coefficient sign (preserves the discrete
/// maximum principle as sigma and mu change sign across the box).
struct OperatorStencil {
    std::size_t ns1 = 0, ny1 = 0;
    double ds = 0.0, dy = 0.0;
    double epsilon = 0.0;
    double r = 0.0;
    std::vector<RowKind> kind;            ///< per node
    std::vector<std::array<double, 9>> a; ///< interior operator coefficients; zero rows elsewhere
    std::optional<std::string> fichera_warning; ///< set when a permissive assemble saw F >= 0

    std::size_t index(std::size_t i, std::size_t j) const { return j * ns1 + i; }

    /// out = L u at interior nodes, 0 at boundary rows.
    void apply_interior(std::span<const double> u, std::span<double> out) const;

    /// Coefficients of the algebraic constraint at a boundary row (identity
    /// for Dirichlet, one-sided difference for Neumann), appended to entries
    /// as (flat index, value) pairs. Interior rows yield nothing.
    void constraint_row(std::size_t i, std::size_t j,
                        std::vector<std::pair<std::size_t, double>>& entries) const;
};

/// Assembles the stencil; in strict mode a model with nonnegative Fichera
/// function is refused (that boundary regime needs no datum and is out of
/// scope), permissive mode records a warning and imposes the datum anyway.
OperatorStencil assemble(const Grid& grid, const SVModel& model, double epsilon,
                         FicheraPolicy policy = FicheraPolicy::Strict);

} // namespace svput
