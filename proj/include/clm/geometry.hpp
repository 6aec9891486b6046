#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "clm/util.hpp"

namespace clm {

/// The unit square (0,pi) x (0,pi); side length is fixed by the normalization
/// of the sine basis, so the type carries no data.
struct RectangleDomain {
    static constexpr double side = pi;
};

/// Ellipse {a*x1^2 + b*x1*x2 + c*x2^2 < 1}.
struct EllipseDomain {
    double a = 1.0;
    double b = 0.0;
    double c = 1.0;

    void validate() const {
        if (!(a > 0.0) || !(c > 0.0))
            throw std::invalid_argument("ellipse: need a > 0 and c > 0");
        // Reject near-degenerate forms too: aspect ratios beyond ~10^3 make
        // the bounding box, and the cut-cell stencils, meaningless.
        if (!(4.0 * a * c - b * b > 1e-6 * 4.0 * a * c))
            throw std::invalid_argument(
                "ellipse: need b^2 - 4ac < 0 with a safety margin (discriminant ~ 0, degenerate)");
    }

    double quadratic_form(double x, double y) const { return a * x * x + b * x * y + c * y * y; }

    /// Tight axis-aligned bounding half-widths, from the inverse of the form matrix.
    /// For {x^T M x < 1}, max |x_i| = sqrt((M^{-1})_ii).
    std::array<double, 2> half_widths() const {
        const double det = a * c - 0.25 * b * b;
        return {std::sqrt(c / det), std::sqrt(a / det)};
    }
};

/// Quadratic form of an ellipsoid {sum a_ij x_i x_j < 1} in R^3,
/// symmetric positive definite with unit trace.
struct EllipsoidForm {
    std::array<std::array<double, 3>, 3> a{};

    void validate() const {
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (a[i][j] != a[j][i])
                    throw std::invalid_argument("ellipsoid form: matrix must be symmetric");
        const double tr = a[0][0] + a[1][1] + a[2][2];
        if (std::abs(tr - 1.0) > 1e-12)
            throw std::invalid_argument("ellipsoid form: trace must equal 1");
        // positive definiteness via leading principal minors
        const double m1 = a[0][0];
        const double m2 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        const double m3 = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                          a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                          a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        if (!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0))
            throw std::invalid_argument("ellipsoid form: matrix must be positive definite");
    }
};

/// Periodic box surrogate for whole space, 1/2/3 dimensions.
struct PeriodicBox {
    int dim = 2;
    double length = 2.0 * pi;  // period, same on every axis
    int n = 64;                // grid points per axis

    void validate() const {
        if (dim < 1 || dim > 3) throw std::invalid_argument("periodic box: dim must be 1, 2 or 3");
        if (n < 8 || n % 2 != 0) throw std::invalid_argument("periodic box: n must be even and >= 8");
        if (!(length > 0.0)) throw std::invalid_argument("periodic box: length must be positive");
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(n);
        return s;
    }
    double spacing() const { return length / n; }
};

/// Uniform node-centered grid over the bounding box of an ellipse, with an
/// interior mask and fractional arm lengths to the curved boundary.
///
/// Interior nodes are indexed twice: by (i,j) on the full n x n grid and by a
/// compact index used for linear algebra. Arm fractions are relative to the
/// grid spacing and equal 1 when the neighbor on that side is interior.
struct MaskedGrid {
    EllipseDomain domain;
    int n = 0;
    double hx = 0.0, hy = 0.0;
    double x0 = 0.0, y0 = 0.0;  // coordinates of node (0,0)

    std::vector<std::uint8_t> interior;  // n*n, row-major (i slow = x, j fast = y)
    std::vector<int> compact;            // n*n -> compact index or -1
    std::vector<int> node_of;            // compact -> i*n + j

    // per compact node: arm fractions {x-, x+, y-, y+} in (0,1]
    std::vector<std::array<double, 4>> frac;
    // per compact node: compact index of neighbor on each side, -1 if the arm
    // ends on the boundary
    std::vector<std::array<int, 4>> neighbor;

    std::size_t interior_count() const { return node_of.size(); }
    double x_of(int i) const { return x0 + hx * i; }
    double y_of(int j) const { return y0 + hy * j; }
    int node_i(int compact_idx) const { return node_of[compact_idx] / n; }
    int node_j(int compact_idx) const { return node_of[compact_idx] % n; }

    /// True when every node within Chebyshev radius `depth` is interior;
    /// used to restrict error measurement to the bulk, away from cut cells.
    bool is_bulk(int compact_idx, int depth = 3) const {
        const int i = node_i(compact_idx), j = node_j(compact_idx);
        if (i < depth || j < depth || i >= n - depth || j >= n - depth) return false;
        for (int di = -depth; di <= depth; ++di)
            for (int dj = -depth; dj <= depth; ++dj)
                if (!interior[(i + di) * n + (j + dj)]) return false;
        return true;
    }
};

namespace detail {

/// Fraction s in (0,1] with q(x + s*h*e_axis) = 1, for an interior node x
/// whose neighbor at distance h along `axis` (direction `sgn`) is exterior.
inline double arm_fraction(const EllipseDomain& d, double x, double y, int axis, int sgn,
                           double h) {
    const double step = sgn * h;
    double A, B;
    if (axis == 0) {
        A = d.a * step * step;
        B = step * (2.0 * d.a * x + d.b * y);
    } else {
        A = d.c * step * step;
        B = step * (d.b * x + 2.0 * d.c * y);
    }
    const double C = d.quadratic_form(x, y) - 1.0;  // < 0 inside
    const double disc = B * B - 4.0 * A * C;
    const double s = (-B + std::sqrt(disc)) / (2.0 * A);
    return std::min(s, 1.0);
}

}  // namespace detail

/// Discretizes an ellipse on the tight bounding box with n nodes per axis.
/// Nodes closer to the boundary than 1e-6 of the spacing are merged into the
/// boundary to keep the cut-cell stencils well conditioned.
inline MaskedGrid build_masked_grid(const EllipseDomain& domain, int n) {
    domain.validate();
    if (n < 16) throw std::invalid_argument("build_masked_grid: need n >= 16");

    MaskedGrid g;
    g.domain = domain;
    g.n = n;
    const auto hw = domain.half_widths();
    g.x0 = -hw[0];
    g.y0 = -hw[1];
    g.hx = 2.0 * hw[0] / (n - 1);
    g.hy = 2.0 * hw[1] / (n - 1);

    g.interior.assign(static_cast<std::size_t>(n) * n, 0);
    // Box-edge nodes touch the ellipse only at tangency points (q = 1), so they
    // are never interior; skipping them also guards roundoff at the tangency.
    for (int i = 1; i < n - 1; ++i)
        for (int j = 1; j < n - 1; ++j)
            if (domain.quadratic_form(g.x_of(i), g.y_of(j)) < 1.0) g.interior[i * n + j] = 1;

    // Demote interior nodes with a degenerate arm; repeat until stable since a
    // demotion shortens its neighbors' arms.
    const double cutoff = 1e-6;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 1; i < n - 1; ++i) {
            for (int j = 1; j < n - 1; ++j) {
                if (!g.interior[i * n + j]) continue;
                const double x = g.x_of(i), y = g.y_of(j);
                const int nb[4] = {(i - 1) * n + j, (i + 1) * n + j, i * n + (j - 1), i * n + (j + 1)};
                const int axis[4] = {0, 0, 1, 1};
                const int sgn[4] = {-1, +1, -1, +1};
                const double h[4] = {g.hx, g.hx, g.hy, g.hy};
                for (int s = 0; s < 4; ++s) {
                    if (g.interior[nb[s]]) continue;
                    if (detail::arm_fraction(domain, x, y, axis[s], sgn[s], h[s]) < cutoff) {
                        g.interior[i * n + j] = 0;
                        changed = true;
                        break;
                    }
                }
            }
        }
    }

    g.compact.assign(static_cast<std::size_t>(n) * n, -1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (g.interior[i * n + j]) {
                g.compact[i * n + j] = static_cast<int>(g.node_of.size());
                g.node_of.push_back(i * n + j);
            }

    g.frac.resize(g.interior_count());
    g.neighbor.resize(g.interior_count());
    for (std::size_t u = 0; u < g.interior_count(); ++u) {
        const int i = g.node_i(static_cast<int>(u)), j = g.node_j(static_cast<int>(u));
        const double x = g.x_of(i), y = g.y_of(j);
        const int nb[4] = {(i - 1) * n + j, (i + 1) * n + j, i * n + (j - 1), i * n + (j + 1)};
        const int axis[4] = {0, 0, 1, 1};
        const int sgn[4] = {-1, +1, -1, +1};
        const double h[4] = {g.hx, g.hx, g.hy, g.hy};
        for (int s = 0; s < 4; ++s) {
            if (g.interior[nb[s]]) {
                g.frac[u][s] = 1.0;
                g.neighbor[u][s] = g.compact[nb[s]];
            } else {
                g.frac[u][s] = detail::arm_fraction(domain, x, y, axis[s], sgn[s], h[s]);
                g.neighbor[u][s] = -1;
            }
        }
    }
    return g;
}

}  // namespace clm
