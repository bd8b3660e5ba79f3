#pragma once

// Run configuration.
//
// Every front-end entry point consumes one JSON document that selects the
// model, the construction windows and the audit budgets.  Parsing is
// strict: unknown keys anywhere in the tree are rejected with the exact
// path that offended, wrong JSON types are rejected, and numeric ranges
// are checked up front so the pipeline only ever sees values it can
// handle.  A normalised echo of the configuration (defaults filled in,
// keys sorted) feeds a stable 64-bit hash that tags reports, rendered
// images and cache files, which is what makes reruns comparable.

#include "qcfold/dynamics.hpp"
#include "qcfold/model.hpp"
#include "qcfold/quasiregular.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>

namespace qcfold {

using json = nlohmann::json;

inline constexpr const char* kToolName = "qcfold";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Escape-time raster settings; used by the render front end.
struct RenderSettings {
    double x0 = 2.0, x1 = 8.0;   // real window
    double y0 = -3.0, y1 = 3.0;  // imaginary window
    int width = 480;
    int height = 320;
    int max_steps = 40;
};

// Pairing of the configured model with a second one of the same tract
// layout, to be connected through the pullback recursion.
struct ConjugacySettings {
    std::string target_kind;
    double target_param = 0.0;
    ConjugacyOptions options{};
};

// Acceptance limits for the verification front end.  The defaults encode
// the construction's contract: watertight seams at solver precision, a
// conformal exterior, uniformly bounded distortion inside the bands, and
// range bounded by e outside the covered part.
struct VerifyThresholds {
    double residual = 1e-6;       // wall / outer / seam / slit continuity
    double off_mu = 1e-6;         // conformality outside the tracts
    double deep_mu = 1e-6;        // conformality past the bands
    double band_margin = 1e-4;    // band sup|mu| must stay below 1 - margin
    double modulus_slack = 1e-9;  // |g| <= e + slack on walls and slits
};

// Sample budgets, seeds, and grading limits for the distortion / seam /
// range audits.
struct AuditSettings {
    std::uint64_t seed = 11;
    int off_samples = 300;
    int seam_samples = 64;
    int range_samples = 400;
    VerifyThresholds thresholds{};
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    std::string model_kind = "half_plane";
    double model_param = 2.0;
    GlobalMapOptions options{};
    AuditSettings audit{};
    std::optional<ConjugacySettings> conjugacy;
    std::optional<RenderSettings> render;

    Model make() const { return make_model(model_kind, model_param); }
};

namespace detail {

inline std::string join_path(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

/// Reject any key of j that is not in the allow list.  j must be an object.
inline void expect_keys(const json& j, const std::string& path,
                        std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        throw ConfigError("config: " + (path.empty() ? std::string("top level") : path) +
                          " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known)
            throw ConfigError("config: unknown key \"" +
                              join_path(path, it.key()) + "\"");
    }
}

inline double get_number(const json& j, const std::string& path,
                         const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number())
        throw ConfigError("config: " + join_path(path, key) + " must be a number");
    return v.get<double>();
}

inline long get_integer(const json& j, const std::string& path,
                        const char* key, long fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw ConfigError("config: " + join_path(path, key) + " must be an integer");
    return v.get<long>();
}

inline std::string get_string(const json& j, const std::string& path,
                              const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw ConfigError("config: " + join_path(path, key) +
                          " must be present and a string");
    return j.at(key).get<std::string>();
}

inline void check_range(bool ok, const std::string& path, const char* key,
                        const char* what) {
    if (!ok)
        throw ConfigError("config: " + join_path(path, key) + " " + what);
}

} // namespace detail

/// Parse and validate a configuration document.  Throws ConfigError on any
/// structural, type, or range problem; the message names the JSON path.
inline RunConfig parse_config(const json& j) {
    using detail::check_range;
    using detail::expect_keys;
    using detail::get_integer;
    using detail::get_number;
    using detail::get_string;

    expect_keys(j, "", {"schema_version", "model", "grid", "zero_net",
                        "riemann", "audit", "conjugacy", "render"});

    RunConfig cfg;
    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer())
        throw ConfigError("config: schema_version must be present and an integer");
    cfg.schema_version = j.at("schema_version").get<int>();
    if (cfg.schema_version != kSchemaVersion)
        throw ConfigError("config: unsupported schema_version " +
                          std::to_string(cfg.schema_version) + " (expected " +
                          std::to_string(kSchemaVersion) + ")");

    if (!j.contains("model"))
        throw ConfigError("config: model section is required");
    const json& jm = j.at("model");
    expect_keys(jm, "model", {"kind", "param"});
    cfg.model_kind = get_string(jm, "model", "kind");
    if (!jm.contains("param") || !jm.at("param").is_number())
        throw ConfigError("config: model.param must be present and a number");
    cfg.model_param = jm.at("param").get<double>();
    cfg.make();  // validates kind and parameter range

    if (j.contains("grid")) {
        const json& jg = j.at("grid");
        expect_keys(jg, "grid", {"window", "level_window"});
        cfg.options.grid_window =
            get_integer(jg, "grid", "window", cfg.options.grid_window);
        cfg.options.level_window =
            get_integer(jg, "grid", "level_window", cfg.options.level_window);
        check_range(cfg.options.grid_window >= 2, "grid", "window", "must be >= 2");
        check_range(cfg.options.level_window >= 1, "grid", "level_window",
                    "must be >= 1");
        check_range(cfg.options.level_window <= cfg.options.grid_window, "grid",
                    "level_window", "must not exceed grid.window");
    }

    if (j.contains("zero_net")) {
        const json& jz = j.at("zero_net");
        expect_keys(jz, "zero_net", {"separation", "spacing"});
        cfg.options.separation =
            get_number(jz, "zero_net", "separation", cfg.options.separation);
        cfg.options.spacing =
            get_integer(jz, "zero_net", "spacing", cfg.options.spacing);
        check_range(cfg.options.separation >= 0.0, "zero_net", "separation",
                    "must be >= 0");
        check_range(cfg.options.spacing >= 1, "zero_net", "spacing", "must be >= 1");
    }

    if (j.contains("riemann")) {
        const json& jr = j.at("riemann");
        expect_keys(jr, "riemann", {"resolution", "oversample", "y_max"});
        cfg.options.riemann.resolution = static_cast<int>(get_integer(
            jr, "riemann", "resolution", cfg.options.riemann.resolution));
        cfg.options.riemann.oversample = static_cast<int>(get_integer(
            jr, "riemann", "oversample", cfg.options.riemann.oversample));
        cfg.options.riemann.y_max =
            get_number(jr, "riemann", "y_max", cfg.options.riemann.y_max);
        check_range(cfg.options.riemann.resolution >= 16, "riemann", "resolution",
                    "must be >= 16");
        check_range(cfg.options.riemann.oversample >= 1, "riemann", "oversample",
                    "must be >= 1");
        check_range(cfg.options.riemann.y_max >= 0.0, "riemann", "y_max",
                    "must be >= 0");
    }

    if (j.contains("audit")) {
        const json& ja = j.at("audit");
        expect_keys(ja, "audit", {"seed", "off_samples", "seam_samples",
                                  "range_samples", "thresholds"});
        const long seed = get_integer(ja, "audit", "seed",
                                      static_cast<long>(cfg.audit.seed));
        check_range(seed >= 0, "audit", "seed", "must be >= 0");
        cfg.audit.seed = static_cast<std::uint64_t>(seed);
        cfg.audit.off_samples = static_cast<int>(
            get_integer(ja, "audit", "off_samples", cfg.audit.off_samples));
        cfg.audit.seam_samples = static_cast<int>(
            get_integer(ja, "audit", "seam_samples", cfg.audit.seam_samples));
        cfg.audit.range_samples = static_cast<int>(
            get_integer(ja, "audit", "range_samples", cfg.audit.range_samples));
        check_range(cfg.audit.off_samples >= 1, "audit", "off_samples",
                    "must be >= 1");
        check_range(cfg.audit.seam_samples >= 8, "audit", "seam_samples",
                    "must be >= 8");
        check_range(cfg.audit.range_samples >= 1, "audit", "range_samples",
                    "must be >= 1");
        if (ja.contains("thresholds")) {
            const json& jt = ja.at("thresholds");
            expect_keys(jt, "audit.thresholds",
                        {"residual", "off_mu", "deep_mu", "band_margin",
                         "modulus_slack"});
            VerifyThresholds& t = cfg.audit.thresholds;
            t.residual = get_number(jt, "audit.thresholds", "residual", t.residual);
            t.off_mu = get_number(jt, "audit.thresholds", "off_mu", t.off_mu);
            t.deep_mu = get_number(jt, "audit.thresholds", "deep_mu", t.deep_mu);
            t.band_margin =
                get_number(jt, "audit.thresholds", "band_margin", t.band_margin);
            t.modulus_slack = get_number(jt, "audit.thresholds", "modulus_slack",
                                         t.modulus_slack);
            check_range(t.residual > 0.0, "audit.thresholds", "residual",
                        "must be > 0");
            check_range(t.off_mu > 0.0, "audit.thresholds", "off_mu",
                        "must be > 0");
            check_range(t.deep_mu > 0.0, "audit.thresholds", "deep_mu",
                        "must be > 0");
            check_range(t.band_margin > 0.0 && t.band_margin < 1.0,
                        "audit.thresholds", "band_margin", "must be in (0, 1)");
            check_range(t.modulus_slack >= 0.0, "audit.thresholds",
                        "modulus_slack", "must be >= 0");
        }
    }

    if (j.contains("conjugacy")) {
        const json& jc = j.at("conjugacy");
        expect_keys(jc, "conjugacy", {"target", "depth", "samples", "seed"});
        if (!jc.contains("target"))
            throw ConfigError("config: conjugacy.target is required");
        const json& jt = jc.at("target");
        expect_keys(jt, "conjugacy.target", {"kind", "param"});
        ConjugacySettings cs;
        cs.target_kind = get_string(jt, "conjugacy.target", "kind");
        if (!jt.contains("param") || !jt.at("param").is_number())
            throw ConfigError(
                "config: conjugacy.target.param must be present and a number");
        cs.target_param = jt.at("param").get<double>();

        const Model source = cfg.make();
        const Model target = make_model(cs.target_kind, cs.target_param);
        if (!source.disjoint_type)
            throw ConfigError("config: conjugacy requires a disjoint-type model");
        if (!target.disjoint_type)
            throw ConfigError("config: conjugacy.target must be of disjoint type");
        if (target.tracts.size() != source.tracts.size())
            throw ConfigError(
                "config: conjugacy.target must have the same number of tracts");

        cs.options.depth = static_cast<int>(
            get_integer(jc, "conjugacy", "depth", cs.options.depth));
        cs.options.samples = static_cast<int>(
            get_integer(jc, "conjugacy", "samples", cs.options.samples));
        const long cseed = get_integer(jc, "conjugacy", "seed",
                                       static_cast<long>(cs.options.seed));
        check_range(cseed >= 0, "conjugacy", "seed", "must be >= 0");
        cs.options.seed = static_cast<std::uint64_t>(cseed);
        check_range(cs.options.depth >= 1 && cs.options.depth <= 60, "conjugacy",
                    "depth", "must be in [1, 60]");
        check_range(cs.options.samples >= 1, "conjugacy", "samples",
                    "must be >= 1");
        cfg.conjugacy = cs;
    }

    if (j.contains("render")) {
        const json& jr = j.at("render");
        expect_keys(jr, "render", {"box", "width", "height", "max_steps"});
        RenderSettings rs;
        if (jr.contains("box")) {
            const json& jb = jr.at("box");
            if (!jb.is_array() || jb.size() != 4)
                throw ConfigError(
                    "config: render.box must be an array [x0, x1, y0, y1]");
            for (const json& v : jb)
                if (!v.is_number())
                    throw ConfigError("config: render.box entries must be numbers");
            rs.x0 = jb[0].get<double>();
            rs.x1 = jb[1].get<double>();
            rs.y0 = jb[2].get<double>();
            rs.y1 = jb[3].get<double>();
        }
        rs.width = static_cast<int>(get_integer(jr, "render", "width", rs.width));
        rs.height = static_cast<int>(get_integer(jr, "render", "height", rs.height));
        rs.max_steps = static_cast<int>(
            get_integer(jr, "render", "max_steps", rs.max_steps));
        check_range(rs.x0 < rs.x1 && rs.y0 < rs.y1, "render", "box",
                    "must satisfy x0 < x1 and y0 < y1");
        check_range(rs.width >= 1 && rs.height >= 1, "render", "width",
                    "and height must be >= 1");
        check_range(static_cast<long>(rs.width) * rs.height <= (1l << 22),
                    "render", "width", "* height must not exceed 2^22 pixels");
        check_range(rs.max_steps >= 1 && rs.max_steps <= 10000, "render",
                    "max_steps", "must be in [1, 10000]");
        cfg.render = rs;
    }

    return cfg;
}

/// Normalised echo of a configuration: every default materialised, keys in
/// sorted order.  Two documents that parse to the same run produce the same
/// echo, which is the hashing base for provenance tags.
inline json normalized_config(const RunConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["model"] = {{"kind", cfg.model_kind}, {"param", cfg.model_param}};
    j["grid"] = {{"window", cfg.options.grid_window},
                 {"level_window", cfg.options.level_window}};
    j["zero_net"] = {{"separation", cfg.options.separation},
                     {"spacing", cfg.options.spacing}};
    j["riemann"] = {{"resolution", cfg.options.riemann.resolution},
                    {"oversample", cfg.options.riemann.oversample},
                    {"y_max", cfg.options.riemann.y_max}};
    j["audit"] = {{"seed", cfg.audit.seed},
                  {"off_samples", cfg.audit.off_samples},
                  {"seam_samples", cfg.audit.seam_samples},
                  {"range_samples", cfg.audit.range_samples},
                  {"thresholds",
                   {{"residual", cfg.audit.thresholds.residual},
                    {"off_mu", cfg.audit.thresholds.off_mu},
                    {"deep_mu", cfg.audit.thresholds.deep_mu},
                    {"band_margin", cfg.audit.thresholds.band_margin},
                    {"modulus_slack", cfg.audit.thresholds.modulus_slack}}}};
    if (cfg.conjugacy) {
        j["conjugacy"] = {{"target",
                           {{"kind", cfg.conjugacy->target_kind},
                            {"param", cfg.conjugacy->target_param}}},
                          {"depth", cfg.conjugacy->options.depth},
                          {"samples", cfg.conjugacy->options.samples},
                          {"seed", cfg.conjugacy->options.seed}};
    }
    if (cfg.render) {
        j["render"] = {{"box", {cfg.render->x0, cfg.render->x1, cfg.render->y0,
                                cfg.render->y1}},
                       {"width", cfg.render->width},
                       {"height", cfg.render->height},
                       {"max_steps", cfg.render->max_steps}};
    }
    return j;
}

inline std::uint64_t config_hash(const RunConfig& cfg) {
    return fnv1a(normalized_config(cfg).dump());
}

inline std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

/// Load and parse a configuration file.  JSON syntax errors surface as
/// ConfigError so the front end needs only one failure path for bad input.
inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    return parse_config(j);
}

} // namespace qcfold
