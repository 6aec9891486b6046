#pragma once

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "clm/fft.hpp"
#include "clm/geometry.hpp"
#include "clm/util.hpp"

namespace clm {

/// Index pair (i,j) of the operator Z_ij = d_ij Laplacian^{-1}, axes 1-based.
struct ZIndex {
    int i = 1;
    int j = 1;
    void validate(int dim) const {
        if (i < 1 || i > dim || j < 1 || j > dim)
            throw std::invalid_argument("ZIndex: axis out of range for dimension " +
                                        std::to_string(dim));
    }
    bool diagonal() const { return i == j; }
};

// ---------------------------------------------------------------------------
// Sine basis on the rectangle (0,pi)^2
//
// w(x) = sum_{k1,k2 >= 1} lambda_k sin(k1 x1) sin(k2 x2), collocated on the
// interior grid x_i = i*pi/(n+1), i = 1..n. The DST-I is its own inverse up
// to scaling, so analysis and synthesis share one kernel.
// ---------------------------------------------------------------------------

struct SineField {
    int n = 0;                   // modes (and interior nodes) per axis
    std::vector<double> coeffs;  // lambda at (k1,k2) -> [(k1-1)*n + (k2-1)]

    SineField() = default;
    explicit SineField(int modes) : n(modes), coeffs(static_cast<std::size_t>(modes) * modes, 0.0) {}
    double& at(int k1, int k2) { return coeffs[static_cast<std::size_t>(k1 - 1) * n + (k2 - 1)]; }
    double at(int k1, int k2) const {
        return coeffs[static_cast<std::size_t>(k1 - 1) * n + (k2 - 1)];
    }
};

inline double rectangle_spacing(int n) { return pi / (n + 1); }

/// x-coordinate of interior node index i (0-based storage, nodes at 1..n).
inline double rectangle_node(int n, int i) { return pi * (i + 1) / (n + 1); }

inline SineField sine_analyze(const std::vector<double>& grid, int n) {
    if (grid.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("sine_analyze: grid size mismatch");
    SineField f(n);
    fft::dst2_raw(grid.data(), f.coeffs.data(), n);
    const double scale = 1.0 / ((n + 1.0) * (n + 1.0));
    for (double& c : f.coeffs) c *= scale;
    return f;
}

inline std::vector<double> sine_synthesize(const SineField& f) {
    std::vector<double> grid(f.coeffs.size());
    fft::dst2_raw(f.coeffs.data(), grid.data(), f.n);
    for (double& v : grid) v *= 0.25;
    return grid;
}

/// Z_ii on the sine basis: multiply lambda_k by k_i^2 / (k1^2 + k2^2).
/// The mixed pair maps sines to cosines and leaves the basis.
inline SineField apply_Z_sine(ZIndex z, const SineField& w) {
    z.validate(2);
    if (!z.diagonal())
        throw std::invalid_argument(
            "apply_Z_sine: Z_12 leaves the sine basis; use the periodic or bounded-grid route");
    SineField out(w.n);
    for (int k1 = 1; k1 <= w.n; ++k1)
        for (int k2 = 1; k2 <= w.n; ++k2) {
            const double kk = z.i == 1 ? double(k1) * k1 : double(k2) * k2;
            const double mult = kk / (double(k1) * k1 + double(k2) * k2);
            out.at(k1, k2) = w.at(k1, k2) * mult;
        }
    return out;
}

/// L2(0,pi)^2 inner product via Parseval: <f,g> = (pi^2/4) sum lambda*mu.
inline double sine_inner(const SineField& f, const SineField& g) {
    return 0.25 * pi * pi * dot(f.coeffs, g.coeffs);
}

/// Grid quadrature inner product, h^2 * sum f*g; agrees with sine_inner
/// exactly (discrete orthogonality of the sine basis).
inline double rectangle_grid_inner(const std::vector<double>& f, const std::vector<double>& g,
                                   int n) {
    const double h = rectangle_spacing(n);
    return h * h * dot(f, g);
}

// ---------------------------------------------------------------------------
// Fourier basis on the periodic box
//
// w(x) = sum_k what(k) exp(i kappa . x), kappa = (2 pi / L) k, stored as the
// full complex spectrum in FFTW index order. Real fields keep conjugate
// symmetry because every multiplier applied here preserves it.
// ---------------------------------------------------------------------------

struct FourierField {
    PeriodicBox box;
    std::vector<std::complex<double>> c;

    FourierField() = default;
    explicit FourierField(const PeriodicBox& b) : box(b), c(b.size(), {0.0, 0.0}) {}

    /// Signed integer wavenumber of a flat index position along one axis.
    int k_of(int idx) const { return idx <= box.n / 2 ? idx : idx - box.n; }
};

namespace detail {

template <class Fn>
void for_each_mode(FourierField& f, Fn&& fn) {
    const int n = f.box.n, dim = f.box.dim;
    std::array<int, 3> k{0, 0, 0};
    for (std::size_t idx = 0; idx < f.c.size(); ++idx) {
        std::size_t rem = idx;
        for (int d = dim - 1; d >= 0; --d) {
            const int pos = static_cast<int>(rem % n);
            rem /= n;
            k[d] = pos <= n / 2 ? pos : pos - n;
        }
        fn(k, f.c[idx]);
    }
}

}  // namespace detail

inline FourierField fourier_analyze(const std::vector<double>& grid, const PeriodicBox& box) {
    box.validate();
    if (grid.size() != box.size()) throw std::invalid_argument("fourier_analyze: grid size mismatch");
    FourierField f(box);
    std::vector<std::complex<double>> in(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) in[i] = grid[i];
    std::array<int, 3> dims{box.n, box.n, box.n};
    fft::dft_raw(box.dim, dims.data(), in.data(), f.c.data(), -1);
    const double scale = 1.0 / static_cast<double>(box.size());
    for (auto& v : f.c) v *= scale;
    return f;
}

inline std::vector<double> fourier_synthesize(const FourierField& f) {
    std::vector<std::complex<double>> out(f.c.size());
    std::array<int, 3> dims{f.box.n, f.box.n, f.box.n};
    fft::dft_raw(f.box.dim, dims.data(), f.c.data(), out.data(), +1);
    std::vector<double> grid(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) grid[i] = out[i].real();
    return grid;
}

/// Z_ij on the torus: multiply what(k) by k_i k_j / |k|^2; the zero mode is
/// annihilated (mean-free gauge for Laplacian^{-1}).
inline FourierField apply_Z_periodic(ZIndex z, const FourierField& w) {
    z.validate(w.box.dim);
    FourierField out = w;
    detail::for_each_mode(out, [&](const std::array<int, 3>& k, std::complex<double>& v) {
        double kk = 0.0;
        for (int d = 0; d < out.box.dim; ++d) kk += double(k[d]) * k[d];
        if (kk == 0.0) {
            v = 0.0;
        } else {
            v *= double(k[z.i - 1]) * double(k[z.j - 1]) / kk;
        }
    });
    return out;
}

/// Hilbert transform on the 1D torus: multiplier -i*sgn(k), zero mode and
/// Nyquist mode annihilated (the latter keeps the field real).
inline FourierField hilbert_1d(const FourierField& w) {
    if (w.box.dim != 1) throw std::invalid_argument("hilbert_1d: field must be one-dimensional");
    FourierField out = w;
    detail::for_each_mode(out, [&](const std::array<int, 3>& k, std::complex<double>& v) {
        if (k[0] == 0 || k[0] == out.box.n / 2) {
            v = 0.0;
        } else {
            const double s = k[0] > 0 ? 1.0 : -1.0;
            v *= std::complex<double>(0.0, -s);
        }
    });
    return out;
}

/// Spectral partial derivative along `axis` (1-based). The Nyquist mode is
/// zeroed: an odd multiplier there would break conjugate symmetry.
inline FourierField derivative_periodic(const FourierField& w, int axis) {
    if (axis < 1 || axis > w.box.dim) throw std::invalid_argument("derivative_periodic: bad axis");
    FourierField out = w;
    const double kappa0 = 2.0 * pi / out.box.length;
    detail::for_each_mode(out, [&](const std::array<int, 3>& k, std::complex<double>& v) {
        const int ka = k[axis - 1];
        if (std::abs(ka) == out.box.n / 2) {
            v = 0.0;
        } else {
            v *= std::complex<double>(0.0, kappa0 * ka);
        }
    });
    return out;
}

/// Laplacian^{-1} with zero-mean gauge (zero mode -> 0).
inline FourierField inverse_laplacian_periodic(const FourierField& w) {
    FourierField out = w;
    const double kappa0 = 2.0 * pi / out.box.length;
    detail::for_each_mode(out, [&](const std::array<int, 3>& k, std::complex<double>& v) {
        double kk = 0.0;
        for (int d = 0; d < out.box.dim; ++d) kk += double(k[d]) * k[d];
        if (kk == 0.0) {
            v = 0.0;
        } else {
            v /= -(kappa0 * kappa0 * kk);
        }
    });
    return out;
}

/// Heat semigroup multiplier exp(-|kappa|^2 s) (s >= 0 decays, the exact
/// propagator used by the integrating-factor integrator).
inline FourierField heat_propagate(const FourierField& w, double s) {
    FourierField out = w;
    const double kappa0 = 2.0 * pi / out.box.length;
    detail::for_each_mode(out, [&](const std::array<int, 3>& k, std::complex<double>& v) {
        double kk = 0.0;
        for (int d = 0; d < out.box.dim; ++d) kk += double(k[d]) * k[d];
        v *= std::exp(-kappa0 * kappa0 * kk * s);
    });
    return out;
}

/// Largest retained integer mode of the 2/3 rule: 3*kc <= n-1 guarantees that
/// quadratic products of kc-band-limited fields alias only outside the band.
inline int dealias_cutoff(int n) { return (n - 1) / 3; }

inline void truncate_two_thirds(FourierField& f) {
    const int kc = dealias_cutoff(f.box.n);
    detail::for_each_mode(f, [&](const std::array<int, 3>& k, std::complex<double>& v) {
        for (int d = 0; d < f.box.dim; ++d)
            if (std::abs(k[d]) > kc) {
                v = 0.0;
                return;
            }
    });
}

/// Pointwise product in grid space with 2/3-rule truncation of both inputs
/// and of the output spectrum; exact on retained modes for quadratic terms.
inline std::vector<double> dealiased_product(const std::vector<double>& f,
                                             const std::vector<double>& g,
                                             const PeriodicBox& box) {
    if (f.size() != g.size() || f.size() != box.size())
        throw std::invalid_argument("dealiased_product: shape mismatch");
    FourierField fh = fourier_analyze(f, box);
    FourierField gh = fourier_analyze(g, box);
    truncate_two_thirds(fh);
    truncate_two_thirds(gh);
    std::vector<double> fg = fourier_synthesize(fh);
    const std::vector<double> gg = fourier_synthesize(gh);
    for (std::size_t i = 0; i < fg.size(); ++i) fg[i] *= gg[i];
    FourierField ph = fourier_analyze(fg, box);
    truncate_two_thirds(ph);
    return fourier_synthesize(ph);
}

/// Dealiased product of two fields already in spectral form; saves the
/// analysis transforms when the caller holds the spectra anyway.
inline std::vector<double> dealiased_product(const FourierField& f, const FourierField& g) {
    FourierField fh = f, gh = g;
    truncate_two_thirds(fh);
    truncate_two_thirds(gh);
    std::vector<double> fg = fourier_synthesize(fh);
    const std::vector<double> gg = fourier_synthesize(gh);
    for (std::size_t i = 0; i < fg.size(); ++i) fg[i] *= gg[i];
    FourierField ph = fourier_analyze(fg, f.box);
    truncate_two_thirds(ph);
    return fourier_synthesize(ph);
}

/// L2 inner product over the box via Parseval: L^d sum what conj(ghat).
inline double fourier_inner(const FourierField& f, const FourierField& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.c.size(); ++i)
        s += f.c[i].real() * g.c[i].real() + f.c[i].imag() * g.c[i].imag();
    double vol = 1.0;
    for (int d = 0; d < f.box.dim; ++d) vol *= f.box.length;
    return vol * s;
}

/// Grid quadrature inner product, (L/n)^d * sum f*g.
inline double periodic_grid_inner(const std::vector<double>& f, const std::vector<double>& g,
                                  const PeriodicBox& box) {
    double w = 1.0;
    for (int d = 0; d < box.dim; ++d) w *= box.spacing();
    return w * dot(f, g);
}

/// Samples fn(x) on the box grid; fn receives a 3-vector with unused axes 0.
template <class Fn>
std::vector<double> sample_grid(const PeriodicBox& box, Fn&& fn) {
    std::vector<double> grid(box.size());
    const int n = box.n;
    const double h = box.spacing();
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        std::size_t rem = idx;
        for (int d = box.dim - 1; d >= 0; --d) {
            x[d] = h * static_cast<double>(rem % n);
            rem /= n;
        }
        grid[idx] = fn(x);
    }
    return grid;
}

/// Samples fn(x1,x2) on the rectangle interior grid.
template <class Fn>
std::vector<double> sample_rectangle(int n, Fn&& fn) {
    std::vector<double> grid(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            grid[static_cast<std::size_t>(i) * n + j] = fn(rectangle_node(n, i), rectangle_node(n, j));
    return grid;
}

}  // namespace clm
