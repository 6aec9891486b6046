#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "clm/model_spec.hpp"
#include "clm/util.hpp"

namespace clm {

enum class Integrator { RK4, IFRK4 };

struct SimConfig {
    double dt0 = 1e-3;
    double t_end = 1.0;
    Integrator integrator = Integrator::RK4;
    double blowup_threshold = 1e6;  // sup-norm cap triggering detection
    double min_dt = 1e-12;
    int output_every = 0;  // snapshot cadence in accepted steps, 0 = endpoints only
    bool dealias = true;
    double growth_cap = 1.25;  // max sup-norm growth factor per step before halving

    void validate() const {
        if (!(dt0 > 0.0)) throw std::invalid_argument("SimConfig: dt0 must be positive");
        if (!(t_end > 0.0)) throw std::invalid_argument("SimConfig: t_end must be positive");
        if (!(blowup_threshold > 1.0))
            throw std::invalid_argument("SimConfig: blowup_threshold must exceed 1");
        if (!(min_dt > 0.0)) throw std::invalid_argument("SimConfig: min_dt must be positive");
        if (!(growth_cap > 1.0)) throw std::invalid_argument("SimConfig: growth_cap must exceed 1");
    }
};

struct TimeSample {
    double t = 0.0;
    double sup = 0.0;
    double l2 = 0.0;
    double mean_value = 0.0;
};

struct TimeSeries {
    std::vector<TimeSample> samples;
};

/// Fit of the terminal growth against C / (T - t)^p.
struct BlowupReport {
    bool detected = false;
    double t_hat = std::numeric_limits<double>::quiet_NaN();         // from the log-log fit
    double t_hat_linear = std::numeric_limits<double>::quiet_NaN();  // from the 1/sup linear fit
    double exponent_hat = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = std::numeric_limits<double>::quiet_NaN();
    double last_t = 0.0;
    std::string diagnostics;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> data;
};

struct SimResult {
    TimeSeries series;
    std::vector<Snapshot> snapshots;
    BlowupReport report;
};

// --- one-step integrators ----------------------------------------------------

template <class Rhs>
std::vector<double> rk4_step(const std::vector<double>& u, double dt, const Rhs& rhs) {
    const std::size_t n = u.size();
    const std::vector<double> k1 = rhs(u);
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
    const std::vector<double> k2 = rhs(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
    const std::vector<double> k3 = rhs(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
    const std::vector<double> k4 = rhs(tmp);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

/// Integrating-factor RK4: the linear term is applied through its exact
/// propagator E(s) and classical RK4 advances the transformed variable.
/// With E = identity this reduces to rk4_step.
template <class Rhs, class Prop>
std::vector<double> ifrk4_step(const std::vector<double>& u, double dt, const Rhs& nonlinear,
                               const Prop& propagate) {
    const std::size_t n = u.size();
    const std::vector<double> k1 = nonlinear(u);

    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
    const std::vector<double> s1 = propagate(tmp, 0.5 * dt);
    const std::vector<double> k2 = nonlinear(s1);

    const std::vector<double> eu = propagate(u, 0.5 * dt);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = eu[i] + 0.5 * dt * k2[i];
    const std::vector<double> k3 = nonlinear(tmp);

    // E(E u + dt k3) = E2 u + dt E k3
    for (std::size_t i = 0; i < n; ++i) tmp[i] = eu[i] + dt * k3[i];
    const std::vector<double> k4 = nonlinear(propagate(tmp, 0.5 * dt));

    // u_{n+1} = E2 u + dt/6 (E2 k1 + 2 E (k2 + k3) + k4)
    std::vector<double> acc(n);
    for (std::size_t i = 0; i < n; ++i) acc[i] = u[i] + dt / 6.0 * k1[i];
    std::vector<double> out = propagate(acc, dt);
    std::vector<double> mid(n);
    for (std::size_t i = 0; i < n; ++i) mid[i] = dt / 6.0 * (2.0 * k2[i] + 2.0 * k3[i]);
    const std::vector<double> emid = propagate(mid, 0.5 * dt);
    for (std::size_t i = 0; i < n; ++i) out[i] += emid[i] + dt / 6.0 * k4[i];
    return out;
}

/// One update of `model` by dt. NaN/Inf in the result signals the caller's
/// blow-up escalation; this function does not throw on overflow.
inline std::vector<double> step(const ModelSpec& model, const std::vector<double>& state, double dt,
                                Integrator integrator = Integrator::RK4) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    auto rhs_full = [&](const std::vector<double>& u) { return model.rhs(u); };
    if (integrator == Integrator::IFRK4 && model.diffusive()) {
        auto nonlinear = [&](const std::vector<double>& u) { return model.rhs_nonlinear(u); };
        auto prop = [&](const std::vector<double>& u, double s) { return model.propagate(u, s); };
        return ifrk4_step(state, dt, nonlinear, prop);
    }
    return rk4_step(state, dt, rhs_full);
}

// --- blow-up fitting ----------------------------------------------------------

namespace detail {

struct LogFit {
    double slope = 0.0, intercept = 0.0, sse = 0.0;
};

/// LS fit of log(sup) against log(T - t) over the window.
inline LogFit log_fit(const std::vector<TimeSample>& w, double T) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(w.size());
    for (const auto& s : w) {
        const double x = std::log(T - s.t), y = std::log(s.sup);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    LogFit f;
    f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / m;
    for (const auto& s : w) {
        const double x = std::log(T - s.t), y = std::log(s.sup);
        f.sse += sq(y - (f.intercept + f.slope * x));
    }
    return f;
}

}  // namespace detail

/// Fits the 1/(T-t)^p law to the terminal decade of sup-norm growth.
/// The singular time from the reciprocal-linear fit seeds a golden-section
/// search minimizing the log-log residual, so the exponent is measured
/// rather than assumed.
inline BlowupReport fit_blowup(const TimeSeries& series) {
    BlowupReport rep;
    if (series.samples.empty()) {
        rep.diagnostics = "empty series";
        return rep;
    }
    rep.last_t = series.samples.back().t;
    const double s0 = series.samples.front().sup;
    double smax = 0.0;
    for (const auto& s : series.samples) smax = std::max(smax, s.sup);
    std::vector<TimeSample> window;
    for (const auto& s : series.samples)
        if (s.sup >= 0.1 * smax && s.sup > 0.0) window.push_back(s);
    if (smax * (1.0 + 1e-12) < 10.0 * s0 || window.size() < 10) {
        rep.diagnostics = "insufficient growth for a rate fit (max sup " + std::to_string(smax) +
                          ", initial " + std::to_string(s0) + ", window " +
                          std::to_string(window.size()) + " samples)";
        return rep;
    }

    // reciprocal-linear fit: 1/sup ~ intercept + slope * t
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(window.size());
        for (const auto& s : window) {
            const double y = 1.0 / s.sup;
            sx += s.t;
            sy += y;
            sxx += s.t * s.t;
            sxy += s.t * y;
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / m;
        if (slope < 0.0) rep.t_hat_linear = -intercept / slope;
    }

    // golden-section search for the log-log singular time
    const double t_last = window.back().t;
    const double span = std::max(t_last - window.front().t, 1e-300);
    double lo = t_last + 1e-12 * span, hi = t_last + 100.0 * span;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = detail::log_fit(window, x1).sse, f2 = detail::log_fit(window, x2).sse;
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = detail::log_fit(window, x1).sse;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = detail::log_fit(window, x2).sse;
        }
    }
    const double T = 0.5 * (lo + hi);
    const detail::LogFit fit = detail::log_fit(window, T);
    rep.detected = true;
    rep.t_hat = T;
    rep.exponent_hat = -fit.slope;
    rep.fit_residual = std::sqrt(fit.sse / static_cast<double>(window.size()));
    return rep;
}

// --- the driver ---------------------------------------------------------------

/// Integrates the model until t_end, the sup-norm threshold, or dt underflow.
/// On overflow or an over-cap growth step the step is retried at dt/2 (dt
/// never grows back). Deterministic: identical inputs give identical output.
inline SimResult run_simulation(ModelSpec model, std::vector<double> w0, const SimConfig& cfg) {
    cfg.validate();
    model.dealias = cfg.dealias;
    model.finalize();
    if (w0.size() != model.state_size())
        throw std::invalid_argument("run_simulation: initial data size mismatch");
    if (!all_finite(w0)) throw std::invalid_argument("run_simulation: initial data not finite");

    SimResult result;
    const double quad = model.node_weight();
    auto record = [&](double t, const std::vector<double>& u) {
        result.series.samples.push_back(
            {t, sup_norm(u), std::sqrt(quad * dot(u, u)), mean(u)});
    };

    double t = 0.0, dt = cfg.dt0;
    std::vector<double> u = std::move(w0);
    const double sup0 = sup_norm(u);
    record(t, u);
    if (cfg.output_every > 0) result.snapshots.push_back({t, u});

    bool threshold_hit = sup_norm(u) >= cfg.blowup_threshold;
    long step_count = 0;
    while (!threshold_hit && t < cfg.t_end * (1.0 - 1e-15)) {
        const double dt_eff = std::min(dt, cfg.t_end - t);
        std::vector<double> trial = step(model, u, dt_eff, cfg.integrator);
        const double sup_old = sup_norm(u);
        const double sup_new = all_finite(trial) ? sup_norm(trial)
                                                 : std::numeric_limits<double>::infinity();
        const bool reject = !std::isfinite(sup_new) ||
                            (sup_old > 1e-8 && sup_new > cfg.growth_cap * sup_old);
        if (reject) {
            dt *= 0.5;
            if (dt < cfg.min_dt) {
                if (sup_old >= 10.0 * std::max(sup0, 1e-300)) {
                    threshold_hit = true;  // dt underflow while growing
                    break;
                }
                throw SolveError("run_simulation: dt underflow without growth", sup_old,
                                 static_cast<int>(step_count));
            }
            continue;
        }
        t += dt_eff;
        u = std::move(trial);
        ++step_count;
        record(t, u);
        if (cfg.output_every > 0 && step_count % cfg.output_every == 0)
            result.snapshots.push_back({t, u});
        if (sup_new >= cfg.blowup_threshold) threshold_hit = true;
    }
    if (result.snapshots.empty() || result.snapshots.back().t != t)
        result.snapshots.push_back({t, u});

    if (threshold_hit) {
        result.report = fit_blowup(result.series);
        result.report.detected = true;
        if (result.report.diagnostics.empty() && !(result.report.t_hat > t))
            result.report.diagnostics = "fitted singular time does not exceed last sample";
    } else {
        result.report.detected = false;
        result.report.last_t = t;
        result.report.diagnostics = "no blow-up: threshold not reached by t_end";
    }
    return result;
}

}  // namespace clm
