// Tests for image output and JSON reporting: PNG structural validity and
// byte determinism, escape-time rendering, SVG diagrams, and the
// verification summary with its threshold grading.

#include "qcfold/config.hpp"
#include "qcfold/imaging.hpp"
#include "qcfold/report.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <zlib.h>

#include <string>
#include <vector>

using namespace qcfold;

namespace {

const GlobalMap& half_plane_map() {
    static const GlobalMap g = build_global_map(half_plane_model(2.0));
    return g;
}

std::uint32_t be32(const std::string& s, std::size_t pos) {
    return (static_cast<std::uint32_t>(static_cast<unsigned char>(s[pos])) << 24) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(s[pos + 1])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(s[pos + 2])) << 8) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(s[pos + 3]));
}

struct PngChunk {
    std::string type;
    std::string data;
};

// Walk the chunk list, recomputing every CRC along the way.
std::vector<PngChunk> walk_png(const std::string& bytes) {
    static const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    REQUIRE(bytes.size() >= 8);
    REQUIRE(std::equal(sig, sig + 8, bytes.begin()));
    std::vector<PngChunk> chunks;
    std::size_t pos = 8;
    while (pos + 12 <= bytes.size()) {
        const std::uint32_t len = be32(bytes, pos);
        REQUIRE(pos + 12 + len <= bytes.size());
        PngChunk c{bytes.substr(pos + 4, 4), bytes.substr(pos + 8, len)};
        const std::uint32_t stored = be32(bytes, pos + 8 + len);
        const std::string typedata = bytes.substr(pos + 4, 4 + len);
        const auto computed = static_cast<std::uint32_t>(
            crc32(0ul, reinterpret_cast<const Bytef*>(typedata.data()),
                  static_cast<uInt>(typedata.size())));
        REQUIRE(stored == computed);
        chunks.push_back(std::move(c));
        pos += 12 + len;
    }
    REQUIRE(pos == bytes.size());
    return chunks;
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

} // namespace

TEST_CASE("the png encoder emits a structurally valid file", "[imaging]") {
    Image img(7, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 7; ++x)
            img.put(x, y, static_cast<std::uint8_t>(36 * x),
                    static_cast<std::uint8_t>(50 * y), 200);

    const std::string bytes =
        png_encode(img, {{"Software", "demo"}, {"config-hash", "abc123"}});
    const auto chunks = walk_png(bytes);

    REQUIRE(chunks.size() == 5);
    CHECK(chunks[0].type == "IHDR");
    CHECK(chunks[1].type == "tEXt");
    CHECK(chunks[2].type == "tEXt");
    CHECK(chunks[3].type == "IDAT");
    CHECK(chunks[4].type == "IEND");

    CHECK(be32(chunks[0].data, 0) == 7);
    CHECK(be32(chunks[0].data, 4) == 5);
    CHECK(chunks[0].data[8] == 8);   // bit depth
    CHECK(chunks[0].data[9] == 2);   // truecolour
    CHECK(chunks[1].data == std::string("Software\0demo", 13));

    // The pixel stream inflates back to exactly the filtered scanlines.
    const uLong expected = (3ul * 7 + 1) * 5;
    std::string raw(expected, 'x');
    uLongf len = expected;
    REQUIRE(uncompress(reinterpret_cast<Bytef*>(raw.data()), &len,
                       reinterpret_cast<const Bytef*>(chunks[3].data.data()),
                       static_cast<uLong>(chunks[3].data.size())) == Z_OK);
    REQUIRE(len == expected);
    for (int y = 0; y < 5; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * (3 * 7 + 1);
        CHECK(raw[row] == 0);  // null filter on every line
        for (int k = 0; k < 21; ++k)
            CHECK(static_cast<std::uint8_t>(raw[row + 1 + k]) ==
                  img.rgb[static_cast<std::size_t>(y) * 21 + k]);
    }
}

TEST_CASE("png encoding is deterministic and validates input", "[imaging]") {
    const Model m = half_plane_model(2.0);
    const Image img = render_escape(m, 0.0, 8.0, -3.0, 3.0, 48, 32, 25);
    CHECK(png_encode(img) == png_encode(img));

    Image bad;
    CHECK_THROWS_AS(png_encode(bad), ConfigError);
    Image torn(4, 4);
    torn.rgb.pop_back();
    CHECK_THROWS_AS(png_encode(torn), ConfigError);
    Image ok(2, 2);
    CHECK_THROWS_AS(png_encode(ok, {{"", "empty keyword"}}), ConfigError);
    CHECK_THROWS_AS(png_encode(ok, {{std::string(80, 'k'), "long"}}),
                    ConfigError);
}

TEST_CASE("the escape render shows both escape and capture", "[imaging]") {
    const Model m = half_plane_model(2.0);
    const Image img = render_escape(m, 0.0, 8.0, -3.0, 3.0, 48, 32, 25);
    REQUIRE(img.width == 48);
    REQUIRE(img.height == 32);

    // Points left of the tract escape immediately (dark blue ramp bottom);
    // deep points survive to the cap (the fixed near-black colour).
    std::uint8_t r0, g0, b0, rc, gc, bc;
    escape_color(0, 25, r0, g0, b0);
    escape_color(25, 25, rc, gc, bc);
    auto has_pixel = [&](std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        for (std::size_t i = 0; i + 2 < img.rgb.size(); i += 3)
            if (img.rgb[i] == r && img.rgb[i + 1] == g && img.rgb[i + 2] == b)
                return true;
        return false;
    };
    CHECK(has_pixel(r0, g0, b0));
    CHECK(has_pixel(rc, gc, bc));

    CHECK_THROWS_AS(render_escape(m, 0.0, 8.0, -3.0, 3.0, 0, 32, 25),
                    ConfigError);
}

TEST_CASE("svg diagrams carry the construction geometry", "[imaging]") {
    const GlobalMap& g = half_plane_map();

    const std::string cells = svg_fold_cells(g.bands[0]);
    CHECK(cells.rfind("<svg", 0) == 0);
    CHECK(cells.find("</svg>") != std::string::npos);
    CHECK(count_of(cells, "<polygon") == g.bands[0].fold.cells.size());

    const std::string domain = svg_overview(g);
    CHECK(domain.rfind("<svg", 0) == 0);
    CHECK(count_of(domain, "<polyline") == 2 * g.model.tracts.size());
    CHECK(count_of(domain, "<circle") == g.product.zeros.size() + 1);
}

TEST_CASE("verification grades the audits against the contract",
          "[report]") {
    const GlobalMap& g = half_plane_map();

    const VerifySummary v = run_verification(g);
    CHECK(v.pass);
    CHECK(v.failures.empty());
    CHECK(v.distortion.band_probes > 100);
    CHECK(v.range.pass);

    // An impossible threshold set names the checks it breaks.
    AuditSettings strict;
    strict.thresholds.band_margin = 0.5;  // the fold needs k well above 1/2
    strict.thresholds.residual = 1e-16;   // below double rounding
    const VerifySummary w = run_verification(g, strict);
    CHECK_FALSE(w.pass);
    REQUIRE(w.failures.size() >= 2);
    bool saw_band = false, saw_seam = false;
    for (const std::string& f : w.failures) {
        if (f.find("band_mu_max") != std::string::npos) saw_band = true;
        if (f.find("residual") != std::string::npos) saw_seam = true;
    }
    CHECK(saw_band);
    CHECK(saw_seam);
}

TEST_CASE("reports assemble into one JSON document", "[report]") {
    const GlobalMap& g = half_plane_map();
    const RunConfig cfg = parse_config(json::parse(
        R"({"schema_version": 1, "model": {"kind": "half_plane", "param": 2.0}})"));

    json j = report_shell(cfg);
    CHECK(j["generator"]["name"] == "qcfold");
    CHECK(j["config"]["model"]["kind"] == "half_plane");
    CHECK(j["config_hash"].get<std::string>().size() == 16);

    j["build"] = describe_build(g);
    CHECK(j["build"]["model"]["disjoint_type"] == true);
    CHECK(j["build"]["product"]["zeros"] == g.product.zeros.size());
    REQUIRE(j["build"]["tracts"].size() == 1);
    CHECK(j["build"]["tracts"][0]["fold_cells"] == g.bands[0].fold.cells.size());
    CHECK(j["build"]["tracts"][0]["fold_distortion"].get<double>() > 1.0);

    const VerifySummary v = run_verification(g);
    j["verify"] = json_of(v);
    CHECK(j["verify"]["pass"] == true);
    CHECK(j["verify"]["distortion"]["band_mu_max"].get<double>() < 1.0);
    CHECK(j["verify"]["seams"]["deep_mismatch"].get<double>() == 0.0);
    CHECK(j["verify"]["range"]["pass"] == true);

    ConjugacyReport c;
    c.successive = {0.5, 0.1};
    c.final_successive = 0.1;
    c.semiconjugacy = 1e-12;
    c.identity_residual = 0.0;
    c.samples = 10;
    c.depth = 2;
    const json jc = json_of(c);
    CHECK(jc["successive"].size() == 2);
    CHECK(jc["targets_match_tracts"] == true);
}
