#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "clm/elliptic.hpp"
#include "clm/geometry.hpp"
#include "clm/spectral.hpp"
#include "clm/util.hpp"

namespace clm {

// ---------------------------------------------------------------------------
// Right-hand sides for the model hierarchy
//
//   model1        w_t = Z_11 w . w           (scalar, 2D)
//   model1prime   w_t = Z_12 w . w           (scalar, 2D)
//   system32      w_t = M(w) w               (2-component, 2D), M symmetric
//   zero_order_3d w_t = (grad u) w           (3-component, 3D torus)
//   perturbed     w_t = [diff] Lap w - [conv] u.grad w + Z_11 w . w  (2D torus)
//   clm1d         th_t = H(th) th            (1D torus)
//
// Scalar 2D models run on three routes: rectangle sine basis, periodic
// Fourier basis, and the bounded ellipse grid. On the ellipse the field is
// split into its mean and fluctuation: the constant part has the exact
// closed-form image under Z_ij, the fluctuation goes through the numerical
// Dirichlet solve. Constants therefore map to constants to machine
// precision, matching the analytic self-similar solutions.
// ---------------------------------------------------------------------------

/// Multi-component field over a shared grid; components stored separately.
struct VectorField {
    std::vector<std::vector<double>> comps;

    void validate() const {
        for (const auto& c : comps)
            if (c.size() != comps.front().size())
                throw std::invalid_argument("VectorField: inconsistent component shapes");
    }
};

// --- scalar zero-order models, per route -----------------------------------

/// Rectangle sine route. Diagonal index pairs only (Z_12 leaves the basis).
/// The quadratic term is the plain collocation product.
inline std::vector<double> rhs_zero_order_2d(ZIndex z, const std::vector<double>& w, int n) {
    const std::vector<double> zw = sine_synthesize(apply_Z_sine(z, sine_analyze(w, n)));
    std::vector<double> out(w.size());
    for (std::size_t u = 0; u < w.size(); ++u) out[u] = zw[u] * w[u];
    return out;
}

/// Periodic route with dealiased product.
inline std::vector<double> rhs_zero_order_2d(ZIndex z, const std::vector<double>& w,
                                             const PeriodicBox& box, bool dealias = true) {
    z.validate(box.dim);
    const FourierField wh = fourier_analyze(w, box);
    const FourierField zh = apply_Z_periodic(z, wh);
    if (dealias) return dealiased_product(zh, wh);
    const std::vector<double> zw = fourier_synthesize(zh);
    std::vector<double> out(w.size());
    for (std::size_t u = 0; u < w.size(); ++u) out[u] = zw[u] * w[u];
    return out;
}

/// Z_ij on the ellipse with the mean split off through its closed-form image.
inline BoundedField apply_Z_ellipse(ZIndex z, const MaskedGrid& g, const BoundedField& w) {
    const double wbar = mean(w);
    BoundedField fluct(w.size());
    for (std::size_t u = 0; u < w.size(); ++u) fluct[u] = w[u] - wbar;
    const double zc = wbar * z_constant_ellipse(z, g.domain);
    if (sup_norm(fluct) == 0.0) return BoundedField(w.size(), zc);
    BoundedField out = apply_Z_bounded(z, g, fluct);
    for (double& v : out) v += zc;
    return out;
}

/// Bounded ellipse route, pointwise product.
inline BoundedField rhs_zero_order_2d(ZIndex z, const MaskedGrid& g, const BoundedField& w) {
    const BoundedField zw = apply_Z_ellipse(z, g, w);
    BoundedField out(w.size());
    for (std::size_t u = 0; u < w.size(); ++u) out[u] = zw[u] * w[u];
    return out;
}

// --- the 2x2 symmetric system -----------------------------------------------

namespace detail {

/// rhs of the system: [[w1 + Z11 w1, w1/2], [w1/2, w1 + Z11 w1]] (w1, w2)^T,
/// given Z11 w1 and a pointwise product rule.
inline VectorField system32_assemble(const std::vector<double>& w1, const std::vector<double>& w2,
                                     const std::vector<double>& z11w1) {
    VectorField out;
    out.comps.assign(2, std::vector<double>(w1.size()));
    for (std::size_t u = 0; u < w1.size(); ++u) {
        const double diag = w1[u] + z11w1[u];
        const double off = 0.5 * w1[u];
        out.comps[0][u] = diag * w1[u] + off * w2[u];
        out.comps[1][u] = off * w1[u] + diag * w2[u];
    }
    return out;
}

}  // namespace detail

/// System route on the ellipse.
inline VectorField rhs_system32(const VectorField& w, const MaskedGrid& g) {
    w.validate();
    if (w.comps.size() != 2) throw std::invalid_argument("rhs_system32: need 2 components");
    return detail::system32_assemble(w.comps[0], w.comps[1],
                                     apply_Z_ellipse({1, 1}, g, w.comps[0]));
}

/// System route on the rectangle.
inline VectorField rhs_system32(const VectorField& w, int n) {
    w.validate();
    if (w.comps.size() != 2) throw std::invalid_argument("rhs_system32: need 2 components");
    return detail::system32_assemble(
        w.comps[0], w.comps[1],
        sine_synthesize(apply_Z_sine({1, 1}, sine_analyze(w.comps[0], n))));
}

// --- Biot-Savart and the perturbed scalar models ----------------------------

namespace detail {

/// u = (-d2, d1) Laplacian^{-1} w with the mean mode gauged to zero.
inline VectorField biot_savart_2d_gauged(const std::vector<double>& w, const PeriodicBox& box) {
    const FourierField psi = inverse_laplacian_periodic(fourier_analyze(w, box));
    VectorField u;
    u.comps.resize(2);
    FourierField d2 = derivative_periodic(psi, 2);
    for (auto& v : d2.c) v = -v;
    u.comps[0] = fourier_synthesize(d2);
    u.comps[1] = fourier_synthesize(derivative_periodic(psi, 1));
    return u;
}

}  // namespace detail

/// 2D Biot-Savart velocity u = (-d2 Lap^{-1} w, d1 Lap^{-1} w) on the torus.
/// Requires a mean-free w; curl u = w and div u = 0 hold spectrally.
inline VectorField biot_savart_2d(const std::vector<double>& w, const PeriodicBox& box) {
    if (box.dim != 2) throw std::invalid_argument("biot_savart_2d: box must be 2D");
    const double m = mean(w);
    if (std::abs(m) > 1e-10 * std::max(1.0, sup_norm(w)))
        throw std::invalid_argument("biot_savart_2d: field has nonzero mean (gauge violation)");
    return detail::biot_savart_2d_gauged(w, box);
}

struct PerturbationFlags {
    bool convection = false;
    bool diffusion = false;
};

namespace detail {

/// u . grad w from the spectrum of w; u is the gauged Biot-Savart velocity.
inline std::vector<double> convection_from_spectrum(const FourierField& wh, bool dealias) {
    const PeriodicBox& box = wh.box;
    const FourierField psi = inverse_laplacian_periodic(wh);
    FourierField u1h = derivative_periodic(psi, 2);
    for (auto& v : u1h.c) v = -v;
    const FourierField u2h = derivative_periodic(psi, 1);
    const FourierField wxh = derivative_periodic(wh, 1);
    const FourierField wyh = derivative_periodic(wh, 2);
    if (dealias) {
        std::vector<double> out = dealiased_product(u1h, wxh);
        const std::vector<double> t2 = dealiased_product(u2h, wyh);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += t2[i];
        return out;
    }
    const std::vector<double> u1 = fourier_synthesize(u1h);
    const std::vector<double> u2 = fourier_synthesize(u2h);
    const std::vector<double> wx = fourier_synthesize(wxh);
    const std::vector<double> wy = fourier_synthesize(wyh);
    std::vector<double> out(u1.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = u1[i] * wx[i] + u2[i] * wy[i];
    return out;
}

}  // namespace detail

/// Convection term u . grad w with u the gauged Biot-Savart velocity.
inline std::vector<double> convection_term_2d(const std::vector<double>& w, const PeriodicBox& box,
                                              bool dealias = true) {
    return detail::convection_from_spectrum(fourier_analyze(w, box), dealias);
}

/// w_t = [diffusion] Lap w - [convection] u.grad w + Z_11 w . w on the 2D
/// torus. With both flags off this is the plain zero-order model.
inline std::vector<double> rhs_perturbed(PerturbationFlags flags, const std::vector<double>& w,
                                         const PeriodicBox& box, bool dealias = true) {
    if (box.dim != 2) throw std::invalid_argument("rhs_perturbed: box must be 2D");
    const FourierField wh = fourier_analyze(w, box);
    const FourierField zh = apply_Z_periodic(ZIndex{1, 1}, wh);
    std::vector<double> out;
    if (dealias) {
        out = dealiased_product(zh, wh);
    } else {
        out = fourier_synthesize(zh);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= w[i];
    }
    if (flags.convection) {
        const std::vector<double> conv = detail::convection_from_spectrum(wh, dealias);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= conv[i];
    }
    if (flags.diffusion) {
        FourierField lh = wh;
        const double kappa0 = 2.0 * pi / box.length;
        detail::for_each_mode(lh, [&](const std::array<int, 3>& k, std::complex<double>& v) {
            double kk = 0.0;
            for (int d = 0; d < box.dim; ++d) kk += double(k[d]) * k[d];
            v *= -kappa0 * kappa0 * kk;
        });
        const std::vector<double> lap = fourier_synthesize(lh);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += lap[i];
    }
    return out;
}

// --- 3D: velocity reconstruction, grad u, zero-order model ------------------

/// Result of the 3D Biot-Savart reconstruction. The curl mismatch vanishes
/// exactly when div w = 0; it is reported rather than thrown so callers can
/// decide what a nonzero value means for them.
struct ReconstructionResult {
    VectorField u;
    double div_u_norm = 0.0;       // sup |div u| on the grid (spectral identity, ~0)
    double curl_mismatch = 0.0;    // sup |curl u - w| on the grid
};

namespace detail {

/// uhat = i (k x what) / |k|^2, the divergence-free field with curl u = w for
/// mean-free divergence-free w. Zero modes are gauged to zero.
inline std::array<FourierField, 3> velocity_hat_3d(const std::array<FourierField, 3>& wh) {
    const PeriodicBox& box = wh[0].box;
    const double kappa0 = 2.0 * pi / box.length;
    std::array<FourierField, 3> uh{FourierField(box), FourierField(box), FourierField(box)};
    const int n = box.n;
    std::array<int, 3> k{};
    for (std::size_t idx = 0; idx < wh[0].c.size(); ++idx) {
        std::size_t rem = idx;
        for (int d = 2; d >= 0; --d) {
            const int pos = static_cast<int>(rem % n);
            rem /= n;
            k[d] = pos <= n / 2 ? pos : pos - n;
        }
        double kk = 0.0;
        bool nyq = false;
        for (int d = 0; d < 3; ++d) {
            kk += double(k[d]) * k[d];
            if (std::abs(k[d]) == n / 2) nyq = true;
        }
        if (kk == 0.0 || nyq) continue;  // gauge + keep odd multipliers real-safe
        const std::complex<double> i_over(0.0, 1.0 / (kappa0 * kk));
        uh[0].c[idx] = i_over * (double(k[1]) * wh[2].c[idx] - double(k[2]) * wh[1].c[idx]);
        uh[1].c[idx] = i_over * (double(k[2]) * wh[0].c[idx] - double(k[0]) * wh[2].c[idx]);
        uh[2].c[idx] = i_over * (double(k[0]) * wh[1].c[idx] - double(k[1]) * wh[0].c[idx]);
    }
    return uh;
}

inline std::array<FourierField, 3> analyze_3(const VectorField& w, const PeriodicBox& box) {
    return {fourier_analyze(w.comps[0], box), fourier_analyze(w.comps[1], box),
            fourier_analyze(w.comps[2], box)};
}

}  // namespace detail

/// u = curl (-Lap)^{-1} w on the 3D torus, with div-u and curl-u residuals.
inline ReconstructionResult velocity_from_vorticity_3d(const VectorField& w,
                                                       const PeriodicBox& box) {
    if (box.dim != 3 || w.comps.size() != 3)
        throw std::invalid_argument("velocity_from_vorticity_3d: need a 3-component field on a 3D box");
    w.validate();
    const auto wh = detail::analyze_3(w, box);
    const auto uh = detail::velocity_hat_3d(wh);

    ReconstructionResult res;
    res.u.comps.resize(3);
    for (int i = 0; i < 3; ++i) res.u.comps[i] = fourier_synthesize(uh[i]);

    // div u = sum_i d_i u_i ; curl u should recover w when div w = 0
    FourierField div(box);
    for (int i = 0; i < 3; ++i) {
        const FourierField di = derivative_periodic(uh[i], i + 1);
        for (std::size_t idx = 0; idx < div.c.size(); ++idx) div.c[idx] += di.c[idx];
    }
    res.div_u_norm = sup_norm(fourier_synthesize(div));

    const std::array<std::array<int, 2>, 3> pairs{{{2, 3}, {3, 1}, {1, 2}}};
    double mismatch = 0.0;
    for (int i = 0; i < 3; ++i) {
        const FourierField a = derivative_periodic(uh[pairs[i][1] - 1], pairs[i][0]);
        const FourierField b = derivative_periodic(uh[pairs[i][0] - 1], pairs[i][1]);
        std::vector<double> curl_i(box.size());
        FourierField tmp(box);
        for (std::size_t idx = 0; idx < tmp.c.size(); ++idx) tmp.c[idx] = a.c[idx] - b.c[idx];
        curl_i = fourier_synthesize(tmp);
        for (std::size_t idx = 0; idx < curl_i.size(); ++idx)
            mismatch = std::max(mismatch, std::abs(curl_i[idx] - w.comps[i][idx]));
    }
    res.curl_mismatch = mismatch;
    return res;
}

/// Nine entries of grad u, (grad u)_{mi} = d_m u_i, assembled from Z_jm
/// multipliers with the orientation fixed by curl u = w; the trace vanishes
/// spectrally. Entry (m,i) lives at entries[(m-1)*3 + (i-1)].
struct GradU {
    std::array<std::vector<double>, 9> entries;
    const std::vector<double>& at(int m, int i) const { return entries[(m - 1) * 3 + (i - 1)]; }
};

inline GradU grad_u_3d(const VectorField& w, const PeriodicBox& box) {
    if (box.dim != 3 || w.comps.size() != 3)
        throw std::invalid_argument("grad_u_3d: need a 3-component field on a 3D box");
    w.validate();
    const auto wh = detail::analyze_3(w, box);
    const auto uh = detail::velocity_hat_3d(wh);
    GradU g;
    for (int m = 1; m <= 3; ++m)
        for (int i = 1; i <= 3; ++i)
            g.entries[(m - 1) * 3 + (i - 1)] = fourier_synthesize(derivative_periodic(uh[i - 1], m));
    return g;
}

/// w_t = (grad u) w: the matrix-vector product with dealiased entries.
inline VectorField rhs_zero_order_3d(const VectorField& w, const PeriodicBox& box,
                                     bool dealias = true) {
    const GradU g = grad_u_3d(w, box);
    VectorField out;
    out.comps.assign(3, std::vector<double>(box.size(), 0.0));
    for (int m = 1; m <= 3; ++m)
        for (int i = 1; i <= 3; ++i) {
            if (dealias) {
                const std::vector<double> t = dealiased_product(g.at(m, i), w.comps[i - 1], box);
                for (std::size_t u = 0; u < t.size(); ++u) out.comps[m - 1][u] += t[u];
            } else {
                for (std::size_t u = 0; u < box.size(); ++u)
                    out.comps[m - 1][u] += g.at(m, i)[u] * w.comps[i - 1][u];
            }
        }
    return out;
}

// --- algebraic skew-symmetry of the zero-order term -------------------------

namespace detail {

/// Generalized Kronecker sign: +1/-1 for even/odd arrangements of (1,2,3).
inline int kronecker_sign(int i, int j, int l) {
    if (i == j || j == l || i == l) return 0;
    const bool even = (i == 1 && j == 2 && l == 3) || (i == 2 && j == 3 && l == 1) ||
                      (i == 3 && j == 1 && l == 2);
    return even ? 1 : -1;
}

}  // namespace detail

/// The zero-order term evaluated on a constant vector c over the ellipsoid
/// {a_ij x_i x_j < 1}: sum over (i,j,l) of delta^i_{jl} a_{jm} c_l c_i.
/// Identically zero: the contraction pairs an antisymmetric symbol with the
/// symmetric tensor c_l c_i.
inline std::array<double, 3> skew_symmetry_residual(const EllipsoidForm& A,
                                                    const std::array<double, 3>& c) {
    A.validate();
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int m = 1; m <= 3; ++m) {
        double s = 0.0;
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= 3; ++j)
                for (int l = 1; l <= 3; ++l) {
                    const int sgn = detail::kronecker_sign(i, j, l);
                    if (sgn != 0) s += sgn * A.a[j - 1][m - 1] * c[l - 1] * c[i - 1];
                }
        out[m - 1] = s;
    }
    return out;
}

// --- the 1D ancestor ---------------------------------------------------------

/// th_t = H(th) th on the 1D torus, dealiased.
inline std::vector<double> rhs_clm(const std::vector<double>& theta, const PeriodicBox& box,
                                   bool dealias = true) {
    if (box.dim != 1) throw std::invalid_argument("rhs_clm: box must be 1D");
    const FourierField th = fourier_analyze(theta, box);
    const FourierField hh = hilbert_1d(th);
    if (dealias) return dealiased_product(hh, th);
    const std::vector<double> h = fourier_synthesize(hh);
    std::vector<double> out(theta.size());
    for (std::size_t u = 0; u < theta.size(); ++u) out[u] = h[u] * theta[u];
    return out;
}

}  // namespace clm
