#pragma once

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "clm/diagnostics.hpp"
#include "clm/dynamics.hpp"
#include "clm/elliptic.hpp"
#include "clm/models.hpp"
#include "clm/steady.hpp"
#include "clm/util.hpp"

namespace clm::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}
inline std::string fmt2(const char* f, double a, double b) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), f, a, b);
    return buf;
}

}  // namespace detail

// --- criterion 1: constant operator value on the ellipse ---------------------

inline std::vector<CheckResult> check_ellipse_constant() {
    const EllipseDomain dom{2.0, 0.0, 1.0};
    const double exact = dom.a / (dom.a + dom.c);  // 2/3
    std::vector<std::pair<double, double>> errors;
    double rel_at_finest = 0.0;
    for (int n : {64, 128, 256}) {
        const MaskedGrid g = build_masked_grid(dom, n);
        const BoundedField one(g.interior_count(), 1.0);
        const BoundedField z11 = apply_Z_bounded({1, 1}, g, one, 1e-10);
        double sum = 0.0;
        long cnt = 0;
        for (std::size_t u = 0; u < g.interior_count(); ++u) {
            if (!g.is_bulk(static_cast<int>(u), 3)) continue;
            sum += z11[u];
            ++cnt;
        }
        const double err = std::abs(sum / cnt - exact);
        errors.push_back({g.hx, err});
        rel_at_finest = err / exact;
    }
    const double order = convergence_order(errors);
    std::vector<CheckResult> out;
    out.push_back({"ellipse(2,0,1) bulk mean of Z11*1 = 2/3 (rel <= 1e-3, n=256)",
                   rel_at_finest <= 1e-3, detail::fmt("rel err %.3e", rel_at_finest)});
    out.push_back({"ellipse constant-operator convergence order >= 1.8 (n=64,128,256)",
                   order >= 1.8, detail::fmt("observed order %.3f", order)});
    return out;
}

// --- criteria 2 and 3: self-similar blow-up benchmarks -----------------------

inline std::vector<CheckResult> check_blowup_disk() {
    ModelSpec m;
    m.variant = ModelVariant::Model1;
    m.domain_kind = DomainKind::Ellipse;
    m.ellipse = {1.0, 0.0, 1.0};
    m.ellipse_n = 32;
    m.finalize();
    SimConfig cfg;
    cfg.dt0 = 1e-3;
    cfg.t_end = 2.0;
    const SimResult r = run_simulation(m, std::vector<double>(m.state_size(), 2.0), cfg);
    std::vector<CheckResult> out;
    const auto& rep = r.report;
    out.push_back({"disk Model-1 benchmark detects blow-up", rep.detected, rep.diagnostics});
    out.push_back({"disk T_hat in [0.99, 1.01]", rep.detected && rep.t_hat >= 0.99 && rep.t_hat <= 1.01,
                   detail::fmt("T_hat %.6f", rep.t_hat)});
    out.push_back({"disk exponent in [0.95, 1.05]",
                   rep.detected && rep.exponent_hat >= 0.95 && rep.exponent_hat <= 1.05,
                   detail::fmt("exponent %.6f", rep.exponent_hat)});

    // (T_hat - t) * w constant in time over the final growth decade
    double smax = 0.0;
    for (const auto& s : r.series.samples) smax = std::max(smax, s.sup);
    double lo = 1e300, hi = 0.0;
    for (const auto& s : r.series.samples) {
        if (s.sup < 0.1 * smax) continue;
        const double v = (rep.t_hat - s.t) * s.sup;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double time_spread = (hi - lo) / lo;
    out.push_back({"disk (T_hat - t)*w constant in time to 1%", time_spread <= 0.01,
                   detail::fmt("spread %.3e", time_spread)});

    const auto& last = r.snapshots.back().data;
    const double mu = mean(last);
    double sd = 0.0;
    for (double v : last) sd += sq(v - mu);
    sd = std::sqrt(sd / static_cast<double>(last.size()));
    out.push_back({"disk w constant in space to 1% at last sample", sd <= 0.01 * std::abs(mu),
                   detail::fmt("spatial std/mean %.3e", sd / std::abs(mu))});
    return out;
}

inline std::vector<CheckResult> check_blowup_ellipse_prime() {
    ModelSpec m;
    m.variant = ModelVariant::Model1Prime;
    m.domain_kind = DomainKind::Ellipse;
    m.ellipse = {1.0, 1.0, 1.0};
    m.ellipse_n = 32;
    m.finalize();
    SimConfig cfg;
    cfg.dt0 = 1e-3;
    cfg.t_end = 2.0;
    const SimResult r = run_simulation(m, std::vector<double>(m.state_size(), 4.0), cfg);
    std::vector<CheckResult> out;
    out.push_back({"ellipse(1,1,1) Model-1' T_hat in [0.99, 1.01]",
                   r.report.detected && r.report.t_hat >= 0.99 && r.report.t_hat <= 1.01,
                   detail::fmt("T_hat %.6f", r.report.t_hat)});
    return out;
}

// --- criterion 4: exact sine multipliers --------------------------------------

inline std::vector<CheckResult> check_multipliers() {
    std::vector<CheckResult> out;
    const int n = 48;
    SineField e11(n), e34(n);
    e11.at(1, 1) = 1.0;
    e34.at(3, 4) = 1.0;
    const double f11 = apply_Z_sine({1, 1}, e11).at(1, 1);
    const double f34 = apply_Z_sine({1, 1}, e34).at(3, 4);
    out.push_back({"Z11 multiplier at (1,1) equals 1/2", std::abs(f11 - 0.5) <= 1e-15,
                   detail::fmt("factor %.17f", f11)});
    out.push_back({"Z11 multiplier at (3,4) equals 9/25", std::abs(f34 - 0.36) <= 1e-15,
                   detail::fmt("factor %.17f", f34)});

    std::mt19937_64 rng(20240811);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    SineField w(n);
    for (double& c : w.coeffs) c = uni(rng);
    const SineField z1 = apply_Z_sine({1, 1}, w), z2 = apply_Z_sine({2, 2}, w);
    double dev = 0.0;
    for (std::size_t i = 0; i < w.coeffs.size(); ++i)
        dev = std::max(dev, std::abs(z1.coeffs[i] + z2.coeffs[i] - w.coeffs[i]));
    out.push_back({"(Z11 + Z22) = identity to 1e-12", dev <= 1e-12, detail::fmt("max dev %.3e", dev)});
    return out;
}

// --- criterion 5: sign properties ---------------------------------------------

inline std::vector<CheckResult> check_forms() {
    std::vector<CheckResult> out;
    const int n = 48;
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst = 1e300;
    SineField w(n);
    for (int t = 0; t < 1000; ++t) {
        for (double& c : w.coeffs) c = uni(rng);
        double num = 0.0, den = 0.0;
        for (int k1 = 1; k1 <= n; ++k1)
            for (int k2 = 1; k2 <= n; ++k2) {
                const double lam = w.at(k1, k2);
                num += double(k1) * k1 / (double(k1) * k1 + double(k2) * k2) * lam * lam;
                den += lam * lam;
            }
        worst = std::min(worst, num / den);
    }
    out.push_back({"min <Z11 w, w>/|w|^2 >= -1e-10 over 1000 rectangle fields", worst >= -1e-10,
                   detail::fmt("min quotient %.3e", worst)});

    PeriodicBox box{2, 2.0 * pi, 32};
    const auto plus = sample_grid(box, [](const std::array<double, 3>& x) {
        return std::cos(x[0] + x[1]);
    });
    const auto minus = sample_grid(box, [](const std::array<double, 3>& x) {
        return std::cos(x[0] - x[1]);
    });
    const double qp = quadratic_form({1, 2}, fourier_analyze(plus, box)).value;
    const double qm = quadratic_form({1, 2}, fourier_analyze(minus, box)).value;
    out.push_back({"<Z12 w, w> attains both signs (cosine witnesses)", qp > 0.0 && qm < 0.0,
                   detail::fmt2("cos(x1+x2): %+.4f, cos(x1-x2): %+.4f", qp, qm)});
    return out;
}

// --- criterion 6: the steady restricted solve ---------------------------------

inline std::vector<CheckResult> check_steady() {
    std::vector<CheckResult> out;
    const int n = 64;
    std::mt19937_64 rng(987654321);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    double worst_indicator = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        VanishingSet E;
        E.n = n;
        E.mask.resize(static_cast<std::size_t>(n) * n);
        const double fill = 0.2 + 0.6 * uni(rng);
        for (auto& b : E.mask) b = uni(rng) < fill ? 1 : 0;
        E.mask[0] = 0;  // keep the complement nonempty
        const SteadySolution sol = solve_restricted({1.0, E, 1e-10, 10000});
        for (std::size_t u = 0; u < sol.w.size(); ++u) {
            const double want = E.mask[u] ? 0.0 : 1.0;
            worst_indicator = std::max(worst_indicator, std::abs(sol.w[u] - want));
        }
    }
    out.push_back({"alpha=1: solution matches the indicator oracle to 1e-6 (20 masks)",
                   worst_indicator <= 1e-6, detail::fmt("max dev %.3e", worst_indicator)});

    VanishingSet half;
    half.n = n;
    half.mask.assign(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n / 2; ++i)
        for (int j = 0; j < n; ++j) half.mask[static_cast<std::size_t>(i) * n + j] = 1;
    const SteadySolution sol = solve_restricted({0.5, half, 1e-12, 10000});
    out.push_back({"alpha=0.5, E = half domain: w|_E = 0 exactly",
                   sol.certificate.on_E_max == 0.0,
                   detail::fmt("max |w| on E = %.3e", sol.certificate.on_E_max)});
    out.push_back({"alpha=0.5, E = half domain: off-E residual <= 1e-8",
                   sol.certificate.off_E_residual <= 1e-8,
                   detail::fmt("residual %.3e", sol.certificate.off_E_residual)});

    bool coercive = true;
    std::string cd;
    for (double alpha : {0.25, 0.5, 1.0, 4.0}) {
        const double q = coercivity_check(alpha, 1000, 48, 0xc0e5);
        const double bound = std::min(1.0, alpha) - 1e-10;
        coercive = coercive && q >= bound;
        cd += detail::fmt2("a=%.2f: %.6f ", alpha, q);
    }
    out.push_back({"coercivity quotients >= min(1, alpha) - 1e-10 (1000 trials)", coercive, cd});
    return out;
}

// --- criterion 7: algebraic skew-symmetry --------------------------------------

inline std::vector<CheckResult> check_skew() {
    std::mt19937_64 rng(31415926);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        // random SPD with unit trace: G^T G normalized
        double g[3][3];
        for (auto& row : g)
            for (double& v : row) v = uni(rng);
        EllipsoidForm A;
        double tr = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += g[k][i] * g[k][j];
                A.a[i][j] = s + (i == j ? 1e-3 : 0.0);
            }
        for (int i = 0; i < 3; ++i) tr += A.a[i][i];
        for (auto& row : A.a)
            for (double& v : row) v /= tr;
        const std::array<double, 3> c{uni(rng), uni(rng), uni(rng)};
        const auto res = skew_symmetry_residual(A, c);
        for (double v : res) worst = std::max(worst, std::abs(v));
    }
    return {{"skew-symmetry residual <= 1e-14 over 1000 random (A, c)", worst <= 1e-14,
             detail::fmt("max |residual| %.3e", worst)}};
}

// --- criterion 8: 3D reconstruction --------------------------------------------

inline std::vector<CheckResult> check_reconstruction() {
    std::vector<CheckResult> out;
    PeriodicBox box{3, 2.0 * pi, 32};
    // w = curl u0 for u0 = (sin x3, sin x1, sin x2)
    VectorField w;
    w.comps.resize(3);
    w.comps[0] = sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[1]); });
    w.comps[1] = sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[2]); });
    w.comps[2] = sample_grid(box, [](const std::array<double, 3>& x) { return std::cos(x[0]); });
    const ReconstructionResult rec = velocity_from_vorticity_3d(w, box);
    out.push_back({"div-free vorticity: ||div u|| <= 1e-12", rec.div_u_norm <= 1e-12,
                   detail::fmt("div %.3e", rec.div_u_norm)});
    out.push_back({"div-free vorticity: ||curl u - w|| <= 1e-10", rec.curl_mismatch <= 1e-10,
                   detail::fmt("mismatch %.3e", rec.curl_mismatch)});

    VectorField grad;
    grad.comps.resize(3);
    grad.comps[0] = sample_grid(box, [](const std::array<double, 3>& x) { return -std::sin(x[0]); });
    grad.comps[1] = std::vector<double>(box.size(), 0.0);
    grad.comps[2] = std::vector<double>(box.size(), 0.0);
    const ReconstructionResult bad = velocity_from_vorticity_3d(grad, box);
    out.push_back({"gradient-field vorticity: mismatch > 0.1 is reported", bad.curl_mismatch > 0.1,
                   detail::fmt("mismatch %.3e", bad.curl_mismatch)});
    return out;
}

// --- criterion 9: integrator order ----------------------------------------------

inline std::vector<CheckResult> check_integrator() {
    std::vector<CheckResult> out;
    ModelSpec m;
    m.variant = ModelVariant::Model1;
    m.domain_kind = DomainKind::Ellipse;
    m.ellipse = {1.0, 0.0, 1.0};
    m.ellipse_n = 32;
    m.finalize();
    const std::vector<double> w0(m.state_size(), 2.0);
    auto err_at = [&](double dt) {
        SimConfig c;
        c.dt0 = dt;
        c.t_end = 0.5;
        c.blowup_threshold = 1e18;
        c.growth_cap = 1e18;
        const SimResult r = run_simulation(m, w0, c);
        return std::abs(r.series.samples.back().sup - 4.0);  // exact: 2/(1-t), t=1/2
    };
    const double e1 = err_at(0.02), e2 = err_at(0.01);
    const double order = std::log2(e1 / e2);
    out.push_back({"Richardson order 4.0 +/- 0.2 on the exact Riccati benchmark",
                   order >= 3.8 && order <= 4.2,
                   detail::fmt2("e(dt)=%.3e, observed order %.3f", e1, order)});

    // integrating factor exact on a pure heat mode
    PeriodicBox box{2, 2.0 * pi, 32};
    const auto mode = sample_grid(box, [](const std::array<double, 3>& x) {
        return std::cos(x[0] + x[1]);
    });
    auto zero_rhs = [](const std::vector<double>& u) { return std::vector<double>(u.size(), 0.0); };
    auto prop = [&](const std::vector<double>& u, double s) {
        return fourier_synthesize(heat_propagate(fourier_analyze(u, box), s));
    };
    const std::vector<double> after = ifrk4_step(mode, 0.1, zero_rhs, prop);
    const double decay = std::exp(-2.0 * 0.1);  // |k|^2 = 2
    double dev = 0.0;
    for (std::size_t i = 0; i < mode.size(); ++i)
        dev = std::max(dev, std::abs(after[i] - decay * mode[i]));
    out.push_back({"integrating-factor propagator exact on heat mode to 1e-6", dev <= 1e-6,
                   detail::fmt("max dev %.3e", dev)});
    return out;
}

// --- criterion 10: grid-refinement stability of the perturbed models ------------

inline std::vector<CheckResult> check_refinement() {
    std::vector<CheckResult> out;
    struct Case {
        const char* name;
        bool convection, diffusion;
    };
    const Case cases[] = {{"convection", true, false},
                          {"diffusion", false, true},
                          {"convection+diffusion", true, true}};
    for (const Case& c : cases) {
        double sup_at[2];
        int idx = 0;
        for (int n : {128, 256}) {
            ModelSpec m;
            m.variant = ModelVariant::Perturbed;
            m.domain_kind = DomainKind::Torus;
            m.box = {2, 2.0 * pi, n};
            m.flags = {c.convection, c.diffusion};
            m.finalize();
            const auto w0 = sample_grid(m.box, [](const std::array<double, 3>& x) {
                return 0.2 * std::cos(x[0]) + 0.1 * std::sin(x[1]) +
                       0.05 * std::cos(x[0] + x[1]);
            });
            SimConfig cfg;
            cfg.dt0 = 2.5e-3;
            cfg.t_end = 0.1;
            cfg.integrator = c.diffusion ? Integrator::IFRK4 : Integrator::RK4;
            const SimResult r = run_simulation(m, w0, cfg);
            sup_at[idx++] = r.series.samples.back().sup;
        }
        const double change = std::abs(sup_at[1] - sup_at[0]) / sup_at[0];
        out.push_back({std::string("sup at t=0.1 stable to 1% under n=128 -> 256 (") + c.name + ")",
                       change <= 0.01, detail::fmt2("sup %.8f, change %.3e", sup_at[1], change)});
    }
    return out;
}

// --- suite registry ---------------------------------------------------------------

inline std::vector<std::string> suite_names() {
    return {"multipliers", "ellipse", "blowup", "steady", "forms", "reconstruction", "skew",
            "refinement"};
}

inline std::vector<CheckResult> run_suite(const std::string& name) {
    if (name == "multipliers") return check_multipliers();
    if (name == "ellipse") return check_ellipse_constant();
    if (name == "blowup") {
        auto out = check_blowup_disk();
        auto b = check_blowup_ellipse_prime();
        out.insert(out.end(), b.begin(), b.end());
        auto c = check_integrator();
        out.insert(out.end(), c.begin(), c.end());
        return out;
    }
    if (name == "steady") return check_steady();
    if (name == "forms") return check_forms();
    if (name == "reconstruction") return check_reconstruction();
    if (name == "skew") return check_skew();
    if (name == "refinement") return check_refinement();
    std::string valid;
    for (const auto& s : suite_names()) valid += s + " ";
    throw std::invalid_argument("unknown suite '" + name + "'; valid suites: " + valid);
}

}  // namespace clm::verify
