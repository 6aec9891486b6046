#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "clm/dynamics.hpp"
#include "clm/io.hpp"
#include "clm/model_spec.hpp"
#include "clm/steady.hpp"

namespace clm::io {

// Translation between flat config files and the typed run description used
// by the CLI. Key layout:
//
//   model.name        model1 | model1prime | system32 | zero_order_3d |
//                     perturbed | clm1d
//   model.convection, model.diffusion      (perturbed only)
//   domain.kind       ellipse | rectangle | torus
//   domain.a/b/c, domain.n                 (ellipse)
//   domain.n                               (rectangle)
//   domain.dim, domain.n, domain.length    (torus)
//   init.kind         constant | modes | file
//   init.value        scalar, or comma list for multi-component models
//   init.modes        "cos(1,0)*0.5 + sin(1,1)*0.25"; sine(,) on rectangle
//   init.modes.K      per-component variant, K = 1..components
//   init.file         CLM2 snapshot path (init.file.K for components)
//   sim.dt0, sim.t_end, sim.integrator (rk4|ifrk4), sim.blowup_threshold,
//   sim.min_dt, sim.output_every, sim.dealias, sim.growth_cap
//   output.dir        run directory (default: $CLMLAB_OUT_ROOT/<stem> or
//                     runs/<stem>)
//   seed              echoed into randomized suites

struct RunConfig {
    ModelSpec model;
    SimConfig sim;
    std::vector<double> initial;
    std::string output_dir;
    std::uint64_t seed = 0;
    ConfigMap raw;
};

namespace detail {

struct ModeTerm {
    std::string kind;  // "cos", "sin", "sine"
    std::vector<int> k;
    double amplitude = 1.0;
};

inline std::vector<ModeTerm> parse_mode_list(const std::string& text, const std::string& where) {
    std::vector<ModeTerm> terms;
    std::size_t pos = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(where + ": bad mode list '" + text + "': " + msg);
    };
    while (pos < text.size()) {
        std::size_t next = text.find('+', pos);
        if (next == std::string::npos) next = text.size();
        std::string term = io::detail::trim(text.substr(pos, next - pos));
        pos = next + 1;
        if (term.empty()) continue;
        ModeTerm m;
        const auto open = term.find('(');
        const auto close = term.find(')');
        if (open == std::string::npos || close == std::string::npos || close < open)
            fail("expected name(k1,k2,...)");
        m.kind = io::detail::trim(term.substr(0, open));
        if (m.kind != "cos" && m.kind != "sin" && m.kind != "sine")
            fail("unknown mode kind '" + m.kind + "'");
        std::string ks = term.substr(open + 1, close - open - 1);
        std::size_t kpos = 0;
        while (kpos <= ks.size()) {
            std::size_t comma = ks.find(',', kpos);
            if (comma == std::string::npos) comma = ks.size();
            const std::string tok = io::detail::trim(ks.substr(kpos, comma - kpos));
            if (tok.empty()) fail("empty wavenumber");
            m.k.push_back(std::stoi(tok));
            kpos = comma + 1;
            if (comma == ks.size()) break;
        }
        std::string rest = io::detail::trim(term.substr(close + 1));
        if (!rest.empty()) {
            if (rest[0] != '*') fail("expected '*amplitude' after ')'");
            m.amplitude = std::stod(io::detail::trim(rest.substr(1)));
        }
        terms.push_back(std::move(m));
    }
    if (terms.empty()) fail("no terms");
    return terms;
}

inline std::vector<double> synthesize_modes(const ModelSpec& model,
                                            const std::vector<ModeTerm>& terms,
                                            const std::string& where) {
    if (model.domain_kind == DomainKind::Ellipse)
        throw std::runtime_error(where + ": mode initial data is not defined on the ellipse; "
                                         "use constant or file");
    if (model.domain_kind == DomainKind::Rectangle) {
        std::vector<double> grid(model.nodes(), 0.0);
        for (const auto& m : terms) {
            if (m.kind != "sine" || m.k.size() != 2)
                throw std::runtime_error(where + ": rectangle modes must be sine(k1,k2)");
            const auto add = sample_rectangle(model.rect_n, [&](double x, double y) {
                return m.amplitude * std::sin(m.k[0] * x) * std::sin(m.k[1] * y);
            });
            for (std::size_t i = 0; i < grid.size(); ++i) grid[i] += add[i];
        }
        return grid;
    }
    const PeriodicBox& box = model.box;
    std::vector<double> grid(box.size(), 0.0);
    const double kappa0 = 2.0 * pi / box.length;
    for (const auto& m : terms) {
        if (m.kind == "sine")
            throw std::runtime_error(where + ": sine(,) modes belong to the rectangle");
        if (static_cast<int>(m.k.size()) != box.dim)
            throw std::runtime_error(where + ": mode arity does not match torus dimension");
        const auto add = sample_grid(box, [&](const std::array<double, 3>& x) {
            double phase = 0.0;
            for (int d = 0; d < box.dim; ++d) phase += kappa0 * m.k[d] * x[d];
            return m.amplitude * (m.kind == "cos" ? std::cos(phase) : std::sin(phase));
        });
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] += add[i];
    }
    return grid;
}

inline std::vector<double> split_csv_doubles(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        const std::string tok = io::detail::trim(s.substr(pos, comma - pos));
        if (!tok.empty()) out.push_back(std::stod(tok));
        pos = comma + 1;
        if (comma == s.size()) break;
    }
    return out;
}

}  // namespace detail

inline ModelVariant parse_variant(const std::string& name, const std::string& where) {
    for (ModelVariant v : {ModelVariant::Model1, ModelVariant::Model1Prime, ModelVariant::System32,
                           ModelVariant::ZeroOrder3D, ModelVariant::Perturbed, ModelVariant::CLM1D})
        if (to_string(v) == name) return v;
    throw std::runtime_error(where + ": unknown model '" + name + "'");
}

inline RunConfig build_run_config(const ConfigMap& cfg) {
    RunConfig rc;
    rc.raw = cfg;
    ModelSpec& m = rc.model;
    m.variant = parse_variant(cfg.get("model.name"), cfg.source);
    m.flags.convection = cfg.get_bool_or("model.convection", false);
    m.flags.diffusion = cfg.get_bool_or("model.diffusion", false);

    const std::string dk = cfg.get_or("domain.kind",
                                      m.variant == ModelVariant::Model1 ||
                                              m.variant == ModelVariant::Model1Prime ||
                                              m.variant == ModelVariant::System32
                                          ? "ellipse"
                                          : "torus");
    if (dk == "ellipse") {
        m.domain_kind = DomainKind::Ellipse;
        m.ellipse = {cfg.get_double_or("domain.a", 1.0), cfg.get_double_or("domain.b", 0.0),
                     cfg.get_double_or("domain.c", 1.0)};
        m.ellipse.validate();
        m.ellipse_n = cfg.get_int_or("domain.n", 64);
    } else if (dk == "rectangle") {
        m.domain_kind = DomainKind::Rectangle;
        m.rect_n = cfg.get_int_or("domain.n", 128);
    } else if (dk == "torus") {
        m.domain_kind = DomainKind::Torus;
        m.box.dim = cfg.get_int_or("domain.dim", m.variant == ModelVariant::CLM1D       ? 1
                                                 : m.variant == ModelVariant::ZeroOrder3D ? 3
                                                                                          : 2);
        m.box.n = cfg.get_int_or("domain.n", 64);
        m.box.length = cfg.get_double_or("domain.length", 2.0 * pi);
    } else {
        throw std::runtime_error(cfg.source + ": unknown domain.kind '" + dk + "'");
    }

    SimConfig& s = rc.sim;
    s.dt0 = cfg.get_double_or("sim.dt0", 1e-3);
    s.t_end = cfg.get_double_or("sim.t_end", 1.0);
    const std::string integ = cfg.get_or("sim.integrator", "rk4");
    if (integ == "rk4")
        s.integrator = Integrator::RK4;
    else if (integ == "ifrk4")
        s.integrator = Integrator::IFRK4;
    else
        throw std::runtime_error(cfg.source + ": unknown sim.integrator '" + integ + "'");
    s.blowup_threshold = cfg.get_double_or("sim.blowup_threshold", 1e6);
    s.min_dt = cfg.get_double_or("sim.min_dt", 1e-12);
    s.output_every = cfg.get_int_or("sim.output_every", 0);
    s.dealias = cfg.get_bool_or("sim.dealias", true);
    s.growth_cap = cfg.get_double_or("sim.growth_cap", 1.25);
    s.validate();
    m.dealias = s.dealias;
    m.finalize();

    rc.seed = static_cast<std::uint64_t>(cfg.get_double_or("seed", 0.0));

    // initial data
    const std::size_t nodes = m.nodes();
    const int nc = m.components();
    const std::string ik = cfg.get_or("init.kind", "constant");
    if (ik == "constant") {
        std::vector<double> vals = detail::split_csv_doubles(cfg.get_or("init.value", "0"));
        if (vals.size() == 1 && nc > 1) vals.assign(nc, vals[0]);
        if (static_cast<int>(vals.size()) != nc)
            throw std::runtime_error(cfg.source + ": init.value needs " + std::to_string(nc) +
                                     " component value(s)");
        rc.initial.reserve(nodes * nc);
        for (int c = 0; c < nc; ++c) rc.initial.insert(rc.initial.end(), nodes, vals[c]);
    } else if (ik == "modes") {
        rc.initial.reserve(nodes * nc);
        for (int c = 1; c <= nc; ++c) {
            const std::string key = nc == 1 && cfg.has("init.modes")
                                        ? "init.modes"
                                        : "init.modes." + std::to_string(c);
            if (!cfg.has(key)) {
                rc.initial.insert(rc.initial.end(), nodes, 0.0);
                continue;
            }
            const auto terms = detail::parse_mode_list(cfg.get(key), cfg.source);
            const auto grid = detail::synthesize_modes(m, terms, cfg.source);
            rc.initial.insert(rc.initial.end(), grid.begin(), grid.end());
        }
        if (rc.initial.empty())
            throw std::runtime_error(cfg.source + ": init.kind=modes needs init.modes");
    } else if (ik == "file") {
        for (int c = 1; c <= nc; ++c) {
            const std::string key = nc == 1 && cfg.has("init.file")
                                        ? "init.file"
                                        : "init.file." + std::to_string(c);
            const std::string path = cfg.get(key);
            if (!std::filesystem::exists(path))
                throw std::runtime_error(cfg.source + ": init file does not exist: " + path);
            const SnapshotData snap = read_snapshot(path);
            if (snap.payload_kind != payload_f64)
                throw std::runtime_error(cfg.source + ": init file is not a field snapshot: " + path);
            if (snap.values.size() != nodes)
                throw std::runtime_error(cfg.source + ": init file has " +
                                         std::to_string(snap.values.size()) + " values, model needs " +
                                         std::to_string(nodes) + ": " + path);
            rc.initial.insert(rc.initial.end(), snap.values.begin(), snap.values.end());
        }
    } else {
        throw std::runtime_error(cfg.source + ": unknown init.kind '" + ik + "'");
    }

    // output directory
    rc.output_dir = cfg.get_or("output.dir", "");
    if (rc.output_dir.empty()) {
        std::string stem = std::filesystem::path(cfg.source).stem().string();
        if (stem.empty() || stem == "<memory>") stem = "run";
        const char* root = std::getenv("CLMLAB_OUT_ROOT");
        rc.output_dir = (std::filesystem::path(root ? root : "runs") / stem).string();
    }
    return rc;
}

/// Snapshot header describing the model's grid, for simulate outputs.
inline SnapshotHeader header_for(const ModelSpec& m) {
    SnapshotHeader h;
    switch (m.domain_kind) {
        case DomainKind::Rectangle:
            h.dim = 2;
            h.n.assign(2, static_cast<std::uint32_t>(m.rect_n));
            h.domain_tag = domain_rectangle;
            break;
        case DomainKind::Ellipse:
            h.dim = 2;
            h.n.assign(2, static_cast<std::uint32_t>(m.grid ? m.grid->n : m.ellipse_n));
            h.domain_tag = domain_ellipse;
            h.params = {m.ellipse.a, m.ellipse.b, m.ellipse.c};
            break;
        case DomainKind::Torus:
            h.dim = static_cast<std::uint32_t>(m.box.dim);
            h.n.assign(h.dim, static_cast<std::uint32_t>(m.box.n));
            h.domain_tag = domain_torus;
            h.params = {m.box.length};
            break;
    }
    return h;
}

/// Ellipse interior fields are stored on the full n x n grid with exterior
/// nodes zeroed, so snapshots stay row-major rectangular.
inline std::vector<double> embed_on_full_grid(const ModelSpec& m, const std::vector<double>& state,
                                              int component) {
    if (m.domain_kind != DomainKind::Ellipse) {
        const std::size_t nodes = m.nodes();
        return {state.begin() + component * nodes, state.begin() + (component + 1) * nodes};
    }
    const MaskedGrid& g = *m.grid;
    std::vector<double> full(static_cast<std::size_t>(g.n) * g.n, 0.0);
    const std::size_t nodes = g.interior_count();
    for (std::size_t u = 0; u < nodes; ++u)
        full[g.node_of[u]] = state[component * nodes + u];
    return full;
}

}  // namespace clm::io
