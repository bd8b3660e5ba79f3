#pragma once

// JSON reports.
//
// Every front end emits one JSON document built from the pieces here: a
// shell carrying tool and configuration provenance, a structural summary
// of the constructed map, and the audit results rendered field by field.
// Verification applies a fixed threshold set to the audits and returns
// the list of violated checks, so "did it pass" is a single boolean and
// the reasons are machine-readable strings next to the raw numbers.

#include "qcfold/config.hpp"
#include "qcfold/dynamics.hpp"
#include "qcfold/quasiregular.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace qcfold {

inline json json_of(const DistortionReport& r) {
    return {{"off_mu_max", r.off_mu_max},
            {"deep_mu_max", r.deep_mu_max},
            {"band_mu_max", r.band_mu_max},
            {"band_K_max", r.band_K_max},
            {"fold_K_max", r.fold_K_max},
            {"band_jac_min", r.band_jac_min},
            {"off_probes", r.off_probes},
            {"deep_probes", r.deep_probes},
            {"band_probes", r.band_probes}};
}

inline json json_of(const SeamReport& r) {
    return {{"wall_residual", r.wall_residual},
            {"outer_residual", r.outer_residual},
            {"slit_residual", r.slit_residual},
            {"seam_residual", r.seam_residual},
            {"deep_mismatch", r.deep_mismatch},
            {"slit_modulus_max", r.slit_modulus_max}};
}

inline json json_of(const RangeReport& r) {
    return {{"off_modulus_max", r.off_modulus_max},
            {"wall_modulus_max", r.wall_modulus_max},
            {"slit_modulus_max", r.slit_modulus_max},
            {"pass", r.pass}};
}

inline json json_of(const ConjugacyReport& r) {
    return {{"successive", r.successive},
            {"final_successive", r.final_successive},
            {"semiconjugacy", r.semiconjugacy},
            {"identity_residual", r.identity_residual},
            {"targets_match_tracts", r.targets_match_tracts},
            {"samples", r.samples},
            {"depth", r.depth}};
}

struct VerifySummary {
    DistortionReport distortion;
    SeamReport seams;
    RangeReport range;
    std::vector<std::string> failures;
    bool pass = false;
};

namespace detail {

inline void check_leq(std::vector<std::string>& out, const char* name,
                      double value, double limit) {
    if (!(value <= limit)) {
        std::ostringstream s;
        s.precision(6);
        s << std::scientific << name << " = " << value << " exceeds " << limit;
        out.push_back(s.str());
    }
}

} // namespace detail

/// Run all three audits and grade them against the thresholds carried by
/// the audit settings.
inline VerifySummary run_verification(const GlobalMap& g,
                                      const AuditSettings& audit = {}) {
    const VerifyThresholds& t = audit.thresholds;
    VerifySummary v;
    v.distortion = audit_distortion(g, audit.seed, audit.off_samples);
    v.seams = audit_seams(g, audit.seam_samples);
    v.range = audit_range(g, audit.seed + 2, audit.range_samples,
                          audit.seam_samples);

    using detail::check_leq;
    check_leq(v.failures, "wall_residual", v.seams.wall_residual, t.residual);
    check_leq(v.failures, "outer_residual", v.seams.outer_residual, t.residual);
    check_leq(v.failures, "slit_residual", v.seams.slit_residual, t.residual);
    check_leq(v.failures, "seam_residual", v.seams.seam_residual, t.residual);
    check_leq(v.failures, "deep_mismatch", v.seams.deep_mismatch, 0.0);
    check_leq(v.failures, "off_mu_max", v.distortion.off_mu_max, t.off_mu);
    check_leq(v.failures, "deep_mu_max", v.distortion.deep_mu_max, t.deep_mu);
    check_leq(v.failures, "band_mu_max", v.distortion.band_mu_max,
              1.0 - t.band_margin);
    if (!(v.distortion.band_jac_min > 0.0))
        v.failures.push_back("band_jac_min is not positive");
    check_leq(v.failures, "wall_modulus_max", v.range.wall_modulus_max,
              E_CONST + t.modulus_slack);
    check_leq(v.failures, "slit_modulus_max", v.range.slit_modulus_max,
              E_CONST + t.modulus_slack);
    if (!(v.range.off_modulus_max < 1.0))
        v.failures.push_back("off-tract values reached modulus e");
    v.pass = v.failures.empty();
    return v;
}

inline json json_of(const VerifySummary& v) {
    return {{"distortion", json_of(v.distortion)},
            {"seams", json_of(v.seams)},
            {"range", json_of(v.range)},
            {"failures", v.failures},
            {"pass", v.pass}};
}

/// Structural summary of a constructed map: sizes, windows and exact
/// distortion of every stage, without re-running any audit.
inline json describe_build(const GlobalMap& g) {
    json tracts = json::array();
    for (std::size_t j = 0; j < g.bands.size(); ++j) {
        const TractInterpolation& ti = g.bands[j];
        tracts.push_back(
            {{"label", g.model.tracts[j].label},
             {"level_endpoints", g.levels[j].endpoints.size()},
             {"slots", ti.slot_bounds.size() - 1},
             {"fold_cells", ti.fold.cells.size()},
             {"fold_distortion", ti.fold.max_dilatation()},
             {"wall", {ti.wall_lo(), ti.wall_hi()}},
             {"grid_assigned", ti.plan.assigned.size()},
             {"grid_surplus", ti.plan.surplus.size()}});
    }
    return {{"model",
             {{"name", g.model.name},
              {"kind", g.model.kind},
              {"param", g.model.param},
              {"disjoint_type", g.model.disjoint_type},
              {"tracts", g.model.tracts.size()}}},
            {"riemann",
             {{"resolution", g.map->options.resolution},
              {"window", g.map->options.window},
              {"oversample", g.map->options.oversample},
              {"boundary_samples", g.map->samples.size()},
              {"zipper_steps", g.map->steps.size()}}},
            {"product",
             {{"zeros", g.product.zeros.size()},
              {"tail_mass", g.product.tail_mass}}},
            {"tracts", tracts}};
}

/// Report skeleton shared by all front ends: generator identity, the
/// normalised configuration, and its hash.
inline json report_shell(const RunConfig& cfg) {
    return {{"generator", {{"name", kToolName}, {"version", kToolVersion}}},
            {"config", normalized_config(cfg)},
            {"config_hash", hash_hex(config_hash(cfg))}};
}

} // namespace qcfold
