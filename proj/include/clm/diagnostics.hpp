#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "clm/elliptic.hpp"
#include "clm/spectral.hpp"
#include "clm/util.hpp"

namespace clm {

/// Value of the quadratic form <Z_ij w, w> together with the route it was
/// computed on and the L2 norm of w.
struct FormReport {
    double value = 0.0;
    std::string basis;  // "sine", "periodic" or "bounded"
    double field_norm = 0.0;
};

/// Rectangle route, evaluated in coefficient space (Parseval).
inline FormReport quadratic_form(ZIndex z, const SineField& w) {
    const SineField zw = apply_Z_sine(z, w);
    return {sine_inner(zw, w), "sine", std::sqrt(sine_inner(w, w))};
}

/// Torus route, evaluated in coefficient space.
inline FormReport quadratic_form(ZIndex z, const FourierField& w) {
    const FourierField zw = apply_Z_periodic(z, w);
    return {fourier_inner(zw, w), "periodic", std::sqrt(fourier_inner(w, w))};
}

/// Bounded route, node quadrature with weight hx*hy.
inline FormReport quadratic_form(ZIndex z, const MaskedGrid& g, const BoundedField& w) {
    const BoundedField zw = apply_Z_bounded(z, g, w);
    return {g.hx * g.hy * dot(zw, w), "bounded", bounded_l2(g, w)};
}

/// Least-squares slope of log(e) against log(h). Expects at least three
/// samples with strictly decreasing h and positive errors.
inline double convergence_order(const std::vector<std::pair<double, double>>& errors) {
    if (errors.size() < 3)
        throw std::invalid_argument("convergence_order: need at least 3 samples");
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i].second > 0.0))
            throw std::invalid_argument("convergence_order: errors must be positive");
        if (i > 0 && !(errors[i].first < errors[i - 1].first))
            throw std::invalid_argument("convergence_order: h must be strictly decreasing");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(errors.size());
    for (const auto& [h, e] : errors) {
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace clm
