#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "clm/cg.hpp"
#include "clm/geometry.hpp"
#include "clm/spectral.hpp"
#include "clm/util.hpp"

namespace clm {

/// Field on the interior nodes of a MaskedGrid, in compact index order.
using BoundedField = std::vector<double>;

/// Discrete L2 norm with the piecewise-constant node weight hx*hy.
inline double bounded_l2(const MaskedGrid& g, const BoundedField& v) {
    return std::sqrt(g.hx * g.hy * dot(v, v));
}

namespace detail {

/// 5-point Dirichlet Laplacian with fractional arms, symmetric variant:
/// at a cut arm the exterior value is linearly extrapolated through the zero
/// boundary value, which keeps the interior-interior couplings at 1/h^2 and
/// makes -L symmetric positive definite.
struct DirichletLaplacian {
    const MaskedGrid& g;
    std::vector<double> diag;  // of A = -L

    explicit DirichletLaplacian(const MaskedGrid& grid) : g(grid) {
        const double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy);
        diag.resize(g.interior_count());
        for (std::size_t u = 0; u < g.interior_count(); ++u) {
            const auto& f = g.frac[u];
            double d = 0.0;
            d += ihx2 * (2.0 + cut_term(f[0]) + cut_term(f[1]));
            d += ihy2 * (2.0 + cut_term(f[2]) + cut_term(f[3]));
            diag[u] = d;
        }
    }

    static double cut_term(double theta) { return theta < 1.0 ? 1.0 / theta - 1.0 : 0.0; }

    // y = A x with A = -L (SPD)
    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy);
        const std::size_t m = g.interior_count();
        y.resize(m);
        for (std::size_t u = 0; u < m; ++u) {
            const auto& nb = g.neighbor[u];
            double s = diag[u] * x[u];
            if (nb[0] >= 0) s -= ihx2 * x[nb[0]];
            if (nb[1] >= 0) s -= ihx2 * x[nb[1]];
            if (nb[2] >= 0) s -= ihy2 * x[nb[2]];
            if (nb[3] >= 0) s -= ihy2 * x[nb[3]];
            y[u] = s;
        }
    }
};

}  // namespace detail

/// Solves the Dirichlet problem (Laplacian phi) = rhs on the masked ellipse
/// grid, phi -> 0 at the curved boundary. `tol` is the absolute residual
/// target in the discrete L2 norm. Throws SolveError when the Jacobi-
/// preconditioned CG exhausts its 50*n iteration budget.
inline BoundedField poisson_dirichlet(const MaskedGrid& g, const BoundedField& rhs, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("poisson_dirichlet: tol must be positive");
    if (rhs.size() != g.interior_count())
        throw std::invalid_argument("poisson_dirichlet: rhs size does not match grid");

    detail::DirichletLaplacian A(g);
    std::vector<double> b(rhs.size());
    for (std::size_t u = 0; u < rhs.size(); ++u) b[u] = -rhs[u];  // solve (-L)phi = -rhs

    CgOptions opt;
    // CG tracks the plain 2-norm of its recurrence residual; aim a factor
    // below the quadrature-weighted target to leave room for recurrence
    // drift, then verify the true residual after the solve.
    opt.abs_tol = 0.25 * tol / std::sqrt(g.hx * g.hy);
    opt.rel_tol = 0.0;
    opt.max_iter = 50 * g.n;

    BoundedField phi;
    CgResult cg;
    try {
        cg = conjugate_gradient(
            [&A](const std::vector<double>& x, std::vector<double>& y) { A.apply(x, y); },
            [&A](const std::vector<double>& r, std::vector<double>& z) {
                z.resize(r.size());
                for (std::size_t u = 0; u < r.size(); ++u) z[u] = r[u] / A.diag[u];
            },
            b, phi, opt);
    } catch (const SolveError& e) {
        throw SolveError("poisson_dirichlet: no convergence",
                         e.residual * std::sqrt(g.hx * g.hy), e.iterations);
    }
    // The CG recurrence residual can drift below the attainable floor; verify
    // the tolerance against the true residual before accepting.
    std::vector<double> r(b.size());
    A.apply(phi, r);
    for (std::size_t u = 0; u < r.size(); ++u) r[u] -= b[u];
    const double true_res = bounded_l2(g, r);
    if (true_res > tol)
        throw SolveError("poisson_dirichlet: tolerance not attainable", true_res, cg.iterations);
    return phi;
}

namespace detail {

/// First derivative along one axis at an interior node. Central in the bulk;
/// at a cut arm the boundary crossing supplies a zero sample at distance
/// theta*h (3-point nonuniform formula, exact for quadratics).
inline double d1(const MaskedGrid& g, const BoundedField& phi, int u, int axis) {
    const int sm = axis == 0 ? 0 : 2, sp = sm + 1;
    const double h = axis == 0 ? g.hx : g.hy;
    const int nm = g.neighbor[u][sm], np = g.neighbor[u][sp];
    const double tm = g.frac[u][sm], tp = g.frac[u][sp];
    const double vm = nm >= 0 ? phi[nm] : 0.0;
    const double vp = np >= 0 ? phi[np] : 0.0;
    const double sm_len = tm * h, sp_len = tp * h;
    // f'(0) from the parabola through (-sm_len, vm), (0, v0), (sp_len, vp)
    return (-sp_len / (sm_len * (sm_len + sp_len))) * vm +
           ((sp_len - sm_len) / (sm_len * sp_len)) * phi[u] +
           (sm_len / (sp_len * (sm_len + sp_len))) * vp;
}

/// Second derivative along one axis, same stencil family as d1.
inline double d2(const MaskedGrid& g, const BoundedField& phi, int u, int axis) {
    const int sm = axis == 0 ? 0 : 2, sp = sm + 1;
    const double h = axis == 0 ? g.hx : g.hy;
    const int nm = g.neighbor[u][sm], np = g.neighbor[u][sp];
    const double vm = nm >= 0 ? phi[nm] : 0.0;
    const double vp = np >= 0 ? phi[np] : 0.0;
    const double sm_len = g.frac[u][sm] * h, sp_len = g.frac[u][sp] * h;
    return 2.0 * (vm / (sm_len * (sm_len + sp_len)) - phi[u] / (sm_len * sp_len) +
                  vp / (sp_len * (sm_len + sp_len)));
}

}  // namespace detail

/// Z_ij w = d_ij (Laplacian^{-1} w) on the ellipse: Dirichlet solve followed
/// by finite differencing of the potential. The mixed derivative uses the
/// 4-point cross stencil in the bulk and nested one-sided first differences
/// where a diagonal neighbor is missing; accuracy near the boundary is first
/// order, second order in the bulk.
inline BoundedField apply_Z_bounded(ZIndex z, const MaskedGrid& g, const BoundedField& w,
                                    double tol = 1e-10) {
    z.validate(2);
    // tol scales with the data; the absolute floor of the solve grows like
    // eps/h^2, so fixed tighter targets become unattainable on fine grids
    const BoundedField phi = poisson_dirichlet(g, w, tol * std::max(1.0, bounded_l2(g, w)));
    const std::size_t m = g.interior_count();
    BoundedField out(m);

    if (z.i == z.j) {
        const int axis = z.i - 1;
        for (std::size_t u = 0; u < m; ++u)
            out[u] = detail::d2(g, phi, static_cast<int>(u), axis);
        return out;
    }

    // mixed d12: cross stencil needs the four diagonal neighbors
    const int n = g.n;
    std::vector<double> dphi_y(m);
    for (std::size_t u = 0; u < m; ++u) dphi_y[u] = detail::d1(g, phi, static_cast<int>(u), 1);
    for (std::size_t u = 0; u < m; ++u) {
        const int i = g.node_i(static_cast<int>(u)), j = g.node_j(static_cast<int>(u));
        auto cidx = [&](int ii, int jj) -> int {
            if (ii < 0 || jj < 0 || ii >= n || jj >= n) return -1;
            return g.compact[ii * n + jj];
        };
        const int pp = cidx(i + 1, j + 1), pm = cidx(i + 1, j - 1);
        const int mp = cidx(i - 1, j + 1), mm = cidx(i - 1, j - 1);
        if (pp >= 0 && pm >= 0 && mp >= 0 && mm >= 0) {
            out[u] = (phi[pp] - phi[pm] - phi[mp] + phi[mm]) / (4.0 * g.hx * g.hy);
        } else {
            // one-sided x-difference of the y-derivative
            const int xm = g.neighbor[u][0], xp = g.neighbor[u][1];
            if (xm >= 0 && xp >= 0)
                out[u] = (dphi_y[xp] - dphi_y[xm]) / (2.0 * g.hx);
            else if (xp >= 0)
                out[u] = (dphi_y[xp] - dphi_y[u]) / g.hx;
            else if (xm >= 0)
                out[u] = (dphi_y[u] - dphi_y[xm]) / g.hx;
            else
                out[u] = 0.0;  // isolated sliver column
        }
    }
    return out;
}

/// Exact image of the constant 1 under Z_ij on the ellipse, from the
/// closed-form potential (a x1^2 + b x1 x2 + c x2^2 - 1) / (2(a+c)).
inline double z_constant_ellipse(ZIndex z, const EllipseDomain& d) {
    z.validate(2);
    if (z.i == 1 && z.j == 1) return d.a / (d.a + d.c);
    if (z.i == 2 && z.j == 2) return d.c / (d.a + d.c);
    return d.b / (2.0 * (d.a + d.c));
}

}  // namespace clm
