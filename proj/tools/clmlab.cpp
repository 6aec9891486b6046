// clmlab: config-driven driver for the nonlocal vorticity model laboratory.
//
// Subcommands:
//   simulate <config>   integrate a model; exit 0 = completed, 2 = blow-up
//                       detected (so sweep scripts can branch), 1 = error
//   steady <config>     solve the restricted steady problem on the rectangle
//   verify <suite>      run a named verification suite; exit 0 iff all pass
//   sweep <config>      run a parameter sweep of simulate, optionally parallel

#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "clm/dynamics.hpp"
#include "clm/io.hpp"
#include "clm/run_config.hpp"
#include "clm/steady.hpp"
#include "clm/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

clm::io::ConfigMap resolved_config(const clm::io::RunConfig& rc) {
    clm::io::ConfigMap out = rc.raw;
    const clm::ModelSpec& m = rc.model;
    out.kv["model.name"] = clm::to_string(m.variant);
    if (m.variant == clm::ModelVariant::Perturbed) {
        out.kv["model.convection"] = m.flags.convection ? "true" : "false";
        out.kv["model.diffusion"] = m.flags.diffusion ? "true" : "false";
    }
    switch (m.domain_kind) {
        case clm::DomainKind::Ellipse:
            out.kv["domain.kind"] = "ellipse";
            out.kv["domain.a"] = std::to_string(m.ellipse.a);
            out.kv["domain.b"] = std::to_string(m.ellipse.b);
            out.kv["domain.c"] = std::to_string(m.ellipse.c);
            out.kv["domain.n"] = std::to_string(m.ellipse_n);
            break;
        case clm::DomainKind::Rectangle:
            out.kv["domain.kind"] = "rectangle";
            out.kv["domain.n"] = std::to_string(m.rect_n);
            break;
        case clm::DomainKind::Torus:
            out.kv["domain.kind"] = "torus";
            out.kv["domain.dim"] = std::to_string(m.box.dim);
            out.kv["domain.n"] = std::to_string(m.box.n);
            out.kv["domain.length"] = std::to_string(m.box.length);
            break;
    }
    const clm::SimConfig& s = rc.sim;
    out.kv["sim.dt0"] = std::to_string(s.dt0);
    out.kv["sim.t_end"] = std::to_string(s.t_end);
    out.kv["sim.integrator"] = s.integrator == clm::Integrator::RK4 ? "rk4" : "ifrk4";
    out.kv["sim.blowup_threshold"] = std::to_string(s.blowup_threshold);
    out.kv["sim.min_dt"] = std::to_string(s.min_dt);
    out.kv["sim.output_every"] = std::to_string(s.output_every);
    out.kv["sim.dealias"] = s.dealias ? "true" : "false";
    out.kv["sim.growth_cap"] = std::to_string(s.growth_cap);
    out.kv["output.dir"] = rc.output_dir;
    out.kv["seed"] = std::to_string(rc.seed);
    return out;
}

json report_json(const clm::BlowupReport& rep) {
    return json{{"detected", rep.detected},
                {"t_hat", rep.t_hat},
                {"t_hat_linear", rep.t_hat_linear},
                {"exponent_hat", rep.exponent_hat},
                {"fit_residual", rep.fit_residual},
                {"last_t", rep.last_t},
                {"diagnostics", rep.diagnostics}};
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << j.dump(2) << "\n";
}

int run_one_simulation(const clm::io::RunConfig& rc, bool quiet) {
    const fs::path dir(rc.output_dir);
    fs::create_directories(dir);
    clm::io::write_config_echo((dir / "resolved.cfg").string(), resolved_config(rc));

    const clm::SimResult result = clm::run_simulation(rc.model, rc.initial, rc.sim);
    clm::io::write_time_series_csv((dir / "series.csv").string(), result.series);

    clm::ModelSpec finalized = rc.model;
    finalized.finalize();
    const clm::io::SnapshotHeader header = clm::io::header_for(finalized);
    char name[64];
    for (std::size_t s = 0; s < result.snapshots.size(); ++s) {
        for (int c = 0; c < finalized.components(); ++c) {
            std::snprintf(name, sizeof(name), "snap_%06zu_c%d.clm2", s, c + 1);
            clm::io::write_field_snapshot(
                (dir / name).string(), header,
                clm::io::embed_on_full_grid(finalized, result.snapshots[s].data, c));
        }
    }

    json j = report_json(result.report);
    j["model"] = clm::to_string(rc.model.variant);
    j["samples"] = result.series.samples.size();
    j["snapshots"] = result.snapshots.size();
    const int code = result.report.detected ? 2 : 0;
    j["exit_code"] = code;
    write_json_file(dir / "report.json", j);

    if (!quiet) {
        if (result.report.detected)
            std::cout << "blow-up detected: T_hat = " << result.report.t_hat
                      << ", exponent = " << result.report.exponent_hat << " (outputs in "
                      << dir.string() << ")\n";
        else
            std::cout << "run completed to t = " << result.report.last_t << " (outputs in "
                      << dir.string() << ")\n";
    }
    return code;
}

int cmd_simulate(const std::string& cfg_path) {
    const clm::io::RunConfig rc = clm::io::build_run_config(clm::io::parse_config_file(cfg_path));
    return run_one_simulation(rc, false);
}

clm::VanishingSet parse_mask(const std::string& spec, int n, const std::string& source) {
    clm::VanishingSet E;
    E.n = n;
    E.mask.assign(static_cast<std::size_t>(n) * n, 0);
    auto node = [&](int i, int j) -> std::uint8_t& {
        return E.mask[static_cast<std::size_t>(i) * n + j];
    };
    if (spec == "none") {
        // empty E: unconstrained solve
    } else if (spec == "left_half" || spec == "right_half") {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const bool left = clm::rectangle_node(n, i) < 0.5 * clm::pi;
                node(i, j) = (spec == "left_half") == left ? 1 : 0;
            }
    } else if (spec == "bottom_half" || spec == "top_half") {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const bool bottom = clm::rectangle_node(n, j) < 0.5 * clm::pi;
                node(i, j) = (spec == "bottom_half") == bottom ? 1 : 0;
            }
    } else if (spec.rfind("disk:", 0) == 0) {
        const auto v = clm::io::detail::split_csv_doubles(spec.substr(5));
        if (v.size() != 3) throw std::runtime_error(source + ": disk mask needs cx,cy,r");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double dx = clm::rectangle_node(n, i) - v[0];
                const double dy = clm::rectangle_node(n, j) - v[1];
                node(i, j) = dx * dx + dy * dy < v[2] * v[2] ? 1 : 0;
            }
    } else if (spec.rfind("file:", 0) == 0) {
        const std::string path = spec.substr(5);
        const clm::io::SnapshotData snap = clm::io::read_snapshot(path);
        if (snap.payload_kind != clm::io::payload_u8)
            throw std::runtime_error(source + ": mask file must hold a u8 payload: " + path);
        if (snap.mask.size() != E.mask.size())
            throw std::runtime_error(source + ": mask size mismatch in " + path);
        E.mask = snap.mask;
    } else {
        throw std::runtime_error(source + ": unknown steady.mask '" + spec + "'");
    }
    return E;
}

int cmd_steady(const std::string& cfg_path) {
    const clm::io::ConfigMap cfg = clm::io::parse_config_file(cfg_path);
    clm::RestrictedProblem p;
    p.alpha = cfg.get_double("steady.alpha");
    if (!(p.alpha > 0.0)) throw std::runtime_error(cfg.source + ": steady.alpha must be positive");
    const int n = cfg.get_int_or("steady.n", 128);
    p.tol = cfg.get_double_or("steady.tol", 1e-10);
    p.max_iter = cfg.get_int_or("steady.max_iter", 10000);
    p.E = parse_mask(cfg.get_or("steady.mask", "none"), n, cfg.source);

    const clm::SteadySolution sol = clm::solve_restricted(p);

    std::string outdir = cfg.get_or("output.dir", "");
    if (outdir.empty()) {
        const char* root = std::getenv("CLMLAB_OUT_ROOT");
        outdir = (fs::path(root ? root : "runs") / fs::path(cfg_path).stem()).string();
    }
    fs::create_directories(outdir);
    clm::io::write_config_echo((fs::path(outdir) / "resolved.cfg").string(), cfg);

    clm::io::SnapshotHeader h;
    h.dim = 2;
    h.n = {static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n)};
    h.domain_tag = clm::io::domain_rectangle;
    clm::io::write_field_snapshot((fs::path(outdir) / "solution.clm2").string(), h, sol.w);
    clm::io::write_mask_snapshot((fs::path(outdir) / "mask.clm2").string(), h, p.E.mask);

    json j{{"alpha", p.alpha},
           {"n", n},
           {"converged", sol.certificate.converged},
           {"cg_iterations", sol.certificate.cg_iterations},
           {"cg_relative_residual", sol.certificate.cg_residual},
           {"off_E_residual", sol.certificate.off_E_residual},
           {"on_E_max", sol.certificate.on_E_max}};

    // oracle cross-checks where a closed form exists
    if (p.alpha == 1.0) {
        double dev = 0.0;
        for (std::size_t u = 0; u < sol.w.size(); ++u)
            dev = std::max(dev, std::abs(sol.w[u] - (p.E.mask[u] ? 0.0 : 1.0)));
        j["indicator_oracle_max_dev"] = dev;
    }
    bool empty_mask = true;
    for (auto b : p.E.mask) empty_mask = empty_mask && !b;
    if (empty_mask) {
        // diagonal inversion of the multiplier in coefficient space
        clm::SineField one = clm::sine_analyze(std::vector<double>(sol.w.size(), 1.0), n);
        for (int k1 = 1; k1 <= n; ++k1)
            for (int k2 = 1; k2 <= n; ++k2) {
                const double kk1 = double(k1) * k1, kk2 = double(k2) * k2;
                one.at(k1, k2) *= (kk1 + kk2) / (kk1 + p.alpha * kk2);
            }
        const std::vector<double> oracle = clm::sine_synthesize(one);
        double dev = 0.0;
        for (std::size_t u = 0; u < sol.w.size(); ++u)
            dev = std::max(dev, std::abs(sol.w[u] - oracle[u]));
        j["diagonal_oracle_max_dev"] = dev;
    }
    write_json_file(fs::path(outdir) / "certificate.json", j);
    std::cout << "steady solve converged in " << sol.certificate.cg_iterations
              << " iterations, off-E residual " << sol.certificate.off_E_residual << " (outputs in "
              << outdir << ")\n";
    return 0;
}

int cmd_verify(const std::string& suite) {
    std::vector<std::string> to_run;
    if (suite == "all")
        to_run = clm::verify::suite_names();
    else
        to_run.push_back(suite);
    int failed = 0, total = 0;
    for (const auto& s : to_run) {
        const auto results = clm::verify::run_suite(s);  // throws on unknown suite
        for (const auto& r : results) {
            ++total;
            if (!r.pass) ++failed;
            std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
            if (!r.detail.empty()) std::cout << " -- " << r.detail;
            std::cout << "\n";
        }
    }
    std::cout << (total - failed) << "/" << total << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

int cmd_sweep(const std::string& cfg_path) {
    const clm::io::ConfigMap base = clm::io::parse_config_file(cfg_path);
    const std::string param = base.get("sweep.param");
    const std::string values_text = base.get("sweep.values");
    const int jobs = std::max(1, base.get_int_or("sweep.jobs", 2));

    std::vector<std::string> values;
    std::size_t pos = 0;
    while (pos <= values_text.size()) {
        std::size_t comma = values_text.find(',', pos);
        if (comma == std::string::npos) comma = values_text.size();
        const std::string tok = clm::io::detail::trim(values_text.substr(pos, comma - pos));
        if (!tok.empty()) values.push_back(tok);
        pos = comma + 1;
        if (comma == values_text.size()) break;
    }
    if (values.empty()) throw std::runtime_error(cfg_path + ": sweep.values is empty");

    std::string root = base.get_or("output.dir", "");
    if (root.empty()) {
        const char* env = std::getenv("CLMLAB_OUT_ROOT");
        root = (fs::path(env ? env : "runs") / fs::path(cfg_path).stem()).string();
    }
    fs::create_directories(root);

    struct Row {
        std::string value;
        std::string outcome;
        clm::BlowupReport report;
    };
    std::vector<Row> rows(values.size());
    std::atomic<std::size_t> next{0};
    std::atomic<int> errors{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            clm::io::ConfigMap cfg = base;
            cfg.kv.erase("sweep.param");
            cfg.kv.erase("sweep.values");
            cfg.kv.erase("sweep.jobs");
            cfg.kv[param] = values[i];
            std::string dirname = param + "=" + values[i];
            for (char& ch : dirname)
                if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-' &&
                    ch != '=' && ch != '_')
                    ch = '_';
            cfg.kv["output.dir"] = (fs::path(root) / dirname).string();
            rows[i].value = values[i];
            try {
                const clm::io::RunConfig rc = clm::io::build_run_config(cfg);
                const int code = run_one_simulation(rc, true);
                rows[i].outcome = code == 2 ? "blowup" : "completed";
                std::ifstream is(fs::path(cfg.kv["output.dir"]) / "report.json");
                if (is) {
                    json j;
                    is >> j;
                    auto num = [&](const char* key) {
                        return j.contains(key) && j[key].is_number() ? j[key].get<double>()
                                                                     : std::nan("");
                    };
                    rows[i].report.detected = j.value("detected", false);
                    rows[i].report.t_hat = num("t_hat");
                    rows[i].report.exponent_hat = num("exponent_hat");
                    rows[i].report.last_t = num("last_t");
                }
            } catch (const std::exception& e) {
                rows[i].outcome = std::string("error: ") + e.what();
                errors.fetch_add(1);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ofstream os(fs::path(root) / "summary.csv");
    os << "value,outcome,t_hat,exponent_hat,last_t\n";
    for (const auto& r : rows) {
        os << r.value << "," << r.outcome << "," << r.report.t_hat << "," << r.report.exponent_hat
           << "," << r.report.last_t << "\n";
        std::cout << param << " = " << r.value << ": " << r.outcome << "\n";
    }
    std::cout << "sweep summary in " << (fs::path(root) / "summary.csv").string() << "\n";
    return errors.load() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clmlab: a numerical laboratory for nonlocal vorticity models"};
    app.require_subcommand(1);

    std::string sim_cfg, steady_cfg, sweep_cfg, suite;
    CLI::App* sim = app.add_subcommand("simulate", "integrate a model from a config file");
    sim->add_option("config", sim_cfg, "path to a key = value config file")->required();
    CLI::App* steady = app.add_subcommand("steady", "solve the restricted steady problem");
    steady->add_option("config", steady_cfg, "path to a key = value config file")->required();
    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite, "suite name, or 'all'")->required();
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("config", sweep_cfg, "base config with sweep.param/sweep.values")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_cfg);
        if (steady->parsed()) return cmd_steady(steady_cfg);
        if (verify->parsed()) return cmd_verify(suite);
        if (sweep->parsed()) return cmd_sweep(sweep_cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
