#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "clm/cg.hpp"
#include "clm/spectral.hpp"
#include "clm/util.hpp"

namespace clm {

// Steady-state construction on the rectangle: find w vanishing on a
// prescribed node set E with (Z_11 + alpha Z_22) w = 1 on the complement.
// The restricted operator P L P (P = extension by zero over E) inherits
// positive definiteness from the multiplier bounds, so plain CG applies.

/// Node mask on the rectangle collocation grid; true marks membership in E.
struct VanishingSet {
    int n = 0;
    std::vector<std::uint8_t> mask;  // n*n, row-major as the grid

    void validate() const {
        if (mask.size() != static_cast<std::size_t>(n) * n)
            throw std::invalid_argument("VanishingSet: mask size mismatch");
        for (auto m : mask)
            if (!m) return;
        throw std::invalid_argument("VanishingSet: complement of E must be nonempty");
    }
};

struct RestrictedProblem {
    double alpha = 1.0;
    VanishingSet E;
    double tol = 1e-10;   // CG relative residual target
    int max_iter = 10000;

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("RestrictedProblem: alpha must be positive");
        if (!(tol > 0.0)) throw std::invalid_argument("RestrictedProblem: tol must be positive");
        E.validate();
    }
};

/// L_alpha = Z_11 + alpha Z_22 on the sine basis: multiplier
/// (k1^2 + alpha k2^2) / (k1^2 + k2^2).
inline SineField apply_L(double alpha, const SineField& w) {
    if (!(alpha > 0.0)) throw std::invalid_argument("apply_L: alpha must be positive");
    SineField out(w.n);
    for (int k1 = 1; k1 <= w.n; ++k1)
        for (int k2 = 1; k2 <= w.n; ++k2) {
            const double kk1 = double(k1) * k1, kk2 = double(k2) * k2;
            const double mult = (kk1 + alpha * kk2) / (kk1 + kk2);  // exactly 1 at alpha = 1
            out.at(k1, k2) = w.at(k1, k2) * mult;
        }
    return out;
}

/// Grid-space application of L_alpha: analyze, multiply, synthesize.
inline std::vector<double> apply_L_grid(double alpha, const std::vector<double>& w, int n) {
    return sine_synthesize(apply_L(alpha, sine_analyze(w, n)));
}

struct SteadyCertificate {
    bool converged = false;
    int cg_iterations = 0;
    double cg_residual = 0.0;       // final relative CG residual
    double off_E_residual = 0.0;    // ||L_alpha w - 1|| on the complement, discrete L2
    double on_E_max = 0.0;          // max |w| over E (zero by construction)
    std::vector<double> residual_history;
};

struct SteadySolution {
    std::vector<double> w;  // full grid values, identically zero on E
    SteadyCertificate certificate;
};

/// Solves the restricted problem by CG on P L_alpha P against b = P 1.
/// The returned w is exactly zero on E; the certificate reports the
/// independently recomputed off-E residual.
inline SteadySolution solve_restricted(const RestrictedProblem& p) {
    p.validate();
    const int n = p.E.n;
    const std::size_t total = static_cast<std::size_t>(n) * n;

    auto project = [&](std::vector<double>& v) {
        for (std::size_t u = 0; u < total; ++u)
            if (p.E.mask[u]) v[u] = 0.0;
    };

    std::vector<double> b(total, 1.0);
    project(b);

    CgOptions opt;
    opt.rel_tol = p.tol;
    opt.max_iter = p.max_iter;
    opt.record_history = true;
    opt.throw_on_fail = false;

    SteadySolution sol;
    CgResult cg = conjugate_gradient(
        [&](const std::vector<double>& x, std::vector<double>& y) {
            y = apply_L_grid(p.alpha, x, n);
            project(y);
        },
        [](const std::vector<double>& r, std::vector<double>& z) { z = r; },
        b, sol.w, opt);
    project(sol.w);  // exact zeros on E regardless of CG roundoff

    if (!cg.converged)
        throw SolveError("solve_restricted: CG stagnated", cg.residual, cg.iterations);

    auto& cert = sol.certificate;
    cert.converged = cg.converged;
    cert.cg_iterations = cg.iterations;
    cert.cg_residual = cg.residual / l2_norm(b);
    cert.residual_history = std::move(cg.history);

    // independent residual: fresh application of L_alpha to the embedded w
    const std::vector<double> lw = apply_L_grid(p.alpha, sol.w, n);
    const double h = rectangle_spacing(n);
    double ss = 0.0;
    for (std::size_t u = 0; u < total; ++u) {
        if (p.E.mask[u]) {
            cert.on_E_max = std::max(cert.on_E_max, std::abs(sol.w[u]));
        } else {
            ss += sq(lw[u] - 1.0);
        }
    }
    cert.off_E_residual = std::sqrt(h * h * ss);
    return sol;
}

/// Minimal Rayleigh quotient <L_alpha w, w>/<w, w> over seeded random
/// coefficient fields; bounded below by min(1, alpha) on the sine spectrum.
inline double coercivity_check(double alpha, int trials, int n = 64,
                               std::uint64_t seed = 0x5eed) {
    if (!(alpha > 0.0)) throw std::invalid_argument("coercivity_check: alpha must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst = std::numeric_limits<double>::infinity();
    SineField w(n);
    for (int t = 0; t < trials; ++t) {
        for (double& c : w.coeffs) c = uni(rng);
        double num = 0.0, den = 0.0;
        for (int k1 = 1; k1 <= n; ++k1)
            for (int k2 = 1; k2 <= n; ++k2) {
                const double kk1 = double(k1) * k1, kk2 = double(k2) * k2;
                const double lam = w.at(k1, k2);
                num += (kk1 + alpha * kk2) / (kk1 + kk2) * lam * lam;
                den += lam * lam;
            }
        worst = std::min(worst, num / den);
    }
    return worst;
}

}  // namespace clm
