// Command-line front end.
//
// Subcommands:
//
//   build    construct the global map, print a structural JSON report
//   verify   construct and audit; exit code 1 when any check fails
//   render   write an escape-time PNG and construction SVG diagrams
//   report   everything: build + verification + conjugation when configured
//
// All subcommands read one JSON configuration (-c).  Exit codes: 0 success,
// 1 verification failure, 2 configuration or usage error, 3 numerical
// failure inside the pipeline.  JSON output goes to -o or stdout; progress
// notes go to stderr so piped output stays clean.

#include "qcfold/config.hpp"
#include "qcfold/imaging.hpp"
#include "qcfold/report.hpp"
#include "qcfold/serialize.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

using namespace qcfold;

struct Args {
    std::string config_path;
    std::string cache_dir;
    std::string out_path;
    std::string png_path;
    std::string svg_cells_path;
    std::string svg_domain_path;
};

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

/// Build the map, going through the cache directory when one is given.
GlobalMap construct(const RunConfig& cfg, const std::string& cache_dir,
                    bool& cache_hit) {
    const Model m = cfg.make();
    RiemannOptions ro = cfg.options.riemann;
    ro.window = cfg.options.grid_window;
    cache_hit = false;

    if (cache_dir.empty())
        return build_global_map(m, cfg.options);

    const std::uint64_t key = riemann_cache_key(fnv1a(m.name), ro);
    const std::string path =
        (std::filesystem::path(cache_dir) / ("riemann-" + hash_hex(key) + ".qcfc"))
            .string();
    if (auto cached = load_riemann_map(key, path)) {
        cache_hit = true;
        return build_global_map(
            m, std::make_shared<const RiemannMap>(std::move(*cached)),
            cfg.options);
    }
    const RiemannMap built = build_riemann_map(m, ro);
    std::filesystem::create_directories(cache_dir);
    save_riemann_map(built, key, path);
    return build_global_map(m, std::make_shared<const RiemannMap>(built),
                            cfg.options);
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    write_file(out_path, j.dump(2) + "\n");
}

int run_build(const Args& a) {
    const RunConfig cfg = load_config_file(a.config_path);
    bool cache_hit = false;
    const auto t0 = std::chrono::steady_clock::now();
    const GlobalMap g = construct(cfg, a.cache_dir, cache_hit);
    json j = report_shell(cfg);
    j["build"] = describe_build(g);
    j["cache"] = {{"enabled", !a.cache_dir.empty()}, {"hit", cache_hit}};
    j["timings"] = {{"build_ms", ms_since(t0)}};
    emit(j, a.out_path);
    return 0;
}

int run_verify(const Args& a) {
    const RunConfig cfg = load_config_file(a.config_path);
    bool cache_hit = false;
    const auto t0 = std::chrono::steady_clock::now();
    const GlobalMap g = construct(cfg, a.cache_dir, cache_hit);
    const double build_ms = ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const VerifySummary v = run_verification(g, cfg.audit);
    json j = report_shell(cfg);
    j["build"] = describe_build(g);
    j["cache"] = {{"enabled", !a.cache_dir.empty()}, {"hit", cache_hit}};
    j["verify"] = json_of(v);
    j["timings"] = {{"build_ms", build_ms}, {"verify_ms", ms_since(t1)}};
    emit(j, a.out_path);
    if (!v.pass) {
        for (const std::string& f : v.failures)
            std::cerr << "verify: " << f << "\n";
        return 1;
    }
    return 0;
}

int run_render(const Args& a) {
    const RunConfig cfg = load_config_file(a.config_path);
    std::string png = a.png_path.empty() ? a.out_path : a.png_path;
    if (png.empty() && a.svg_cells_path.empty() && a.svg_domain_path.empty())
        throw ConfigError("render: no output requested "
                          "(use --png, --svg-cells, or --svg-domain)");

    const std::string hash = hash_hex(config_hash(cfg));
    json outputs = json::array();

    if (!png.empty()) {
        const Model m = cfg.make();
        const RenderSettings rs = cfg.render.value_or(RenderSettings{});
        const Image img = render_escape(m, rs.x0, rs.x1, rs.y0, rs.y1,
                                        rs.width, rs.height, rs.max_steps);
        const std::string bytes = png_encode(
            img, {{"Software", std::string(kToolName) + " " + kToolVersion},
                  {"config-hash", hash},
                  {"model", m.name}});
        write_file(png, bytes);
        outputs.push_back({{"kind", "png"},
                           {"path", png},
                           {"width", img.width},
                           {"height", img.height},
                           {"bytes", bytes.size()}});
    }

    if (!a.svg_cells_path.empty() || !a.svg_domain_path.empty()) {
        bool cache_hit = false;
        const GlobalMap g = construct(cfg, a.cache_dir, cache_hit);
        if (!a.svg_cells_path.empty()) {
            // One diagram per tract: tract index appended before the
            // extension when the model has more than one.
            for (std::size_t j = 0; j < g.bands.size(); ++j) {
                std::string path = a.svg_cells_path;
                if (g.bands.size() > 1) {
                    const auto dot = path.rfind('.');
                    const std::string tag = "-t" + std::to_string(j);
                    path = dot == std::string::npos
                               ? path + tag
                               : path.substr(0, dot) + tag + path.substr(dot);
                }
                write_file(path, svg_fold_cells(g.bands[j]));
                outputs.push_back(
                    {{"kind", "svg-cells"}, {"path", path}, {"tract", j}});
            }
        }
        if (!a.svg_domain_path.empty()) {
            write_file(a.svg_domain_path, svg_overview(g));
            outputs.push_back(
                {{"kind", "svg-domain"}, {"path", a.svg_domain_path}});
        }
    }

    json j = report_shell(cfg);
    j["outputs"] = outputs;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_report(const Args& a) {
    const RunConfig cfg = load_config_file(a.config_path);
    bool cache_hit = false;
    const auto t0 = std::chrono::steady_clock::now();
    const GlobalMap g = construct(cfg, a.cache_dir, cache_hit);
    const double build_ms = ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const VerifySummary v = run_verification(g, cfg.audit);
    const double verify_ms = ms_since(t1);

    json j = report_shell(cfg);
    j["build"] = describe_build(g);
    j["cache"] = {{"enabled", !a.cache_dir.empty()}, {"hit", cache_hit}};
    j["verify"] = json_of(v);
    j["timings"] = {{"build_ms", build_ms}, {"verify_ms", verify_ms}};

    if (cfg.conjugacy) {
        const auto t2 = std::chrono::steady_clock::now();
        const Model source = cfg.make();
        const Model target = make_model(cfg.conjugacy->target_kind,
                                        cfg.conjugacy->target_param);
        const ConjugacyReport c =
            audit_conjugacy(source, target, cfg.conjugacy->options);
        j["conjugacy"] = json_of(c);
        j["timings"]["conjugacy_ms"] = ms_since(t2);
    }

    emit(j, a.out_path);
    if (!v.pass) {
        for (const std::string& f : v.failures)
            std::cerr << "verify: " << f << "\n";
        return 1;
    }
    return 0;
}

void add_common(CLI::App* cmd, Args& a, bool with_out) {
    cmd->add_option("-c,--config", a.config_path, "JSON configuration file")
        ->required();
    cmd->add_option("--cache", a.cache_dir,
                    "cache directory for the uniformisation stage");
    if (with_out)
        cmd->add_option("-o,--out", a.out_path,
                        "write the JSON report here instead of stdout");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasiregular folding toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version",
                         std::string(kToolName) + " " + kToolVersion);

    Args a;
    int (*action)(const Args&) = nullptr;

    CLI::App* build = app.add_subcommand(
        "build", "construct the global map and report its structure");
    add_common(build, a, true);
    build->callback([&] { action = run_build; });

    CLI::App* verify = app.add_subcommand(
        "verify", "construct and audit the map; exit 1 on failed checks");
    add_common(verify, a, true);
    verify->callback([&] { action = run_verify; });

    CLI::App* render = app.add_subcommand(
        "render", "write an escape-time PNG and construction SVG diagrams");
    add_common(render, a, false);
    render->add_option("-o,--png", a.png_path, "escape-time raster (PNG)");
    render->add_option("--svg-cells", a.svg_cells_path,
                       "fold-cell diagram per tract (SVG)");
    render->add_option("--svg-domain", a.svg_domain_path,
                       "z-plane overview diagram (SVG)");
    render->callback([&] { action = run_render; });

    CLI::App* report = app.add_subcommand(
        "report", "full report: build, verification, and conjugation");
    add_common(report, a, true);
    report->callback([&] { action = run_report; });

    try {
        app.parse(argc, argv);
        return action(a);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
