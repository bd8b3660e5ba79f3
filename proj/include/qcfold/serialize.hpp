#pragma once

// Binary cache for the uniformisation stage.
//
// Building the disk map is the only stage whose cost grows with the
// boundary resolution, so it is the one worth keeping between runs.  The
// format is a fixed-order dump of every field of RiemannMap behind a small
// header:
//
//   "QCFC"  | u32 version | u64 cache key | payload | u64 fnv(payload)
//
// The cache key mixes the model identity with the sampling options, so a
// stale file built for different settings is simply ignored and rebuilt.
// Values are stored in native byte order -- this is a per-machine cache,
// not an interchange format -- and the trailing checksum rejects
// truncated or corrupted files.  Loading never throws for cache misses;
// every failure path reports "no usable cache" and the caller rebuilds.

#include "qcfold/numeric.hpp"
#include "qcfold/riemann.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qcfold {

inline constexpr std::uint32_t kCacheVersion = 1;
inline constexpr char kCacheMagic[4] = {'Q', 'C', 'F', 'C'};

/// Key identifying one uniformisation build: the model hash combined with
/// every option that influences the sampling.
inline std::uint64_t riemann_cache_key(std::uint64_t model_hash,
                                       const RiemannOptions& o) {
    std::uint64_t h = model_hash;
    h = fnv1a(&o.resolution, sizeof o.resolution, h);
    h = fnv1a(&o.window, sizeof o.window, h);
    h = fnv1a(&o.oversample, sizeof o.oversample, h);
    h = fnv1a(&o.y_max, sizeof o.y_max, h);
    return h;
}

namespace detail {

struct ByteWriter {
    std::string out;

    void raw(const void* p, std::size_t n) {
        out.append(static_cast<const char*>(p), n);
    }
    void u8(std::uint8_t v) { raw(&v, 1); }
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void i64(std::int64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void c128(cplx v) { f64(v.real()); f64(v.imag()); }

    void vec_f64(const std::vector<double>& v) {
        u64(v.size());
        if (!v.empty()) raw(v.data(), v.size() * sizeof(double));
    }
    void vec_c128(const std::vector<cplx>& v) {
        u64(v.size());
        for (cplx z : v) c128(z);
    }
    void vec_u32(const std::vector<std::uint32_t>& v) {
        u64(v.size());
        if (!v.empty()) raw(v.data(), v.size() * sizeof(std::uint32_t));
    }
};

struct ByteReader {
    const std::string& in;
    std::size_t pos = 0;
    bool fail = false;

    explicit ByteReader(const std::string& s) : in(s) {}

    bool take(void* p, std::size_t n) {
        if (fail || in.size() - pos < n) { fail = true; return false; }
        std::memcpy(p, in.data() + pos, n);
        pos += n;
        return true;
    }
    std::uint8_t u8() { std::uint8_t v = 0; take(&v, 1); return v; }
    std::uint32_t u32() { std::uint32_t v = 0; take(&v, sizeof v); return v; }
    std::uint64_t u64() { std::uint64_t v = 0; take(&v, sizeof v); return v; }
    std::int64_t i64() { std::int64_t v = 0; take(&v, sizeof v); return v; }
    double f64() { double v = 0; take(&v, sizeof v); return v; }
    cplx c128() { const double re = f64(); return {re, f64()}; }

    // Element counts are validated against the remaining bytes before any
    // allocation, so a corrupted length cannot request absurd memory.
    std::size_t count(std::size_t elem_size) {
        const std::uint64_t n = u64();
        if (fail || n > (in.size() - pos) / elem_size) { fail = true; return 0; }
        return static_cast<std::size_t>(n);
    }
    std::vector<double> vec_f64() {
        const std::size_t n = count(sizeof(double));
        std::vector<double> v(n);
        if (n) take(v.data(), n * sizeof(double));
        return v;
    }
    std::vector<cplx> vec_c128() {
        const std::size_t n = count(2 * sizeof(double));
        std::vector<cplx> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = c128();
        return v;
    }
    std::vector<std::uint32_t> vec_u32() {
        const std::size_t n = count(sizeof(std::uint32_t));
        std::vector<std::uint32_t> v(n);
        if (n) take(v.data(), n * sizeof(std::uint32_t));
        return v;
    }
};

inline void write_riemann_payload(ByteWriter& w, const RiemannMap& m) {
    w.c128(m.z0);
    w.c128(m.p0);
    w.c128(m.p1);
    w.u64(m.steps.size());
    for (const ZipperStep& s : m.steps) {
        w.c128(s.a);
        w.f64(s.h);
        w.f64(s.c);
        w.f64(s.scale);
        w.u8(s.use_mobius ? 1 : 0);
    }
    w.f64(m.closing_a);
    w.u8(m.closing_finite ? 1 : 0);
    w.u8(m.close_left ? 1 : 0);
    w.c128(m.q);
    w.c128(m.rot);
    w.vec_c128(m.samples);
    w.vec_f64(m.sample_y);
    w.vec_u32(m.sample_tract);
    w.u32(static_cast<std::uint32_t>(m.options.resolution));
    w.i64(m.options.window);
    w.u32(static_cast<std::uint32_t>(m.options.oversample));
    w.f64(m.options.y_max);
    w.u64(m.model_hash);
    w.u64(m.table_y.size());
    for (const auto& t : m.table_y) w.vec_f64(t);
    w.u64(m.table_angle.size());
    for (const auto& t : m.table_angle) w.vec_f64(t);
}

inline RiemannMap read_riemann_payload(ByteReader& r) {
    RiemannMap m;
    m.z0 = r.c128();
    m.p0 = r.c128();
    m.p1 = r.c128();
    const std::size_t n_steps = r.count(4 * sizeof(double) + 1);
    m.steps.resize(n_steps);
    for (ZipperStep& s : m.steps) {
        s.a = r.c128();
        s.h = r.f64();
        s.c = r.f64();
        s.scale = r.f64();
        s.use_mobius = r.u8() != 0;
    }
    m.closing_a = r.f64();
    m.closing_finite = r.u8() != 0;
    m.close_left = r.u8() != 0;
    m.q = r.c128();
    m.rot = r.c128();
    m.samples = r.vec_c128();
    m.sample_y = r.vec_f64();
    m.sample_tract = r.vec_u32();
    m.options.resolution = static_cast<int>(r.u32());
    m.options.window = r.i64();
    m.options.oversample = static_cast<int>(r.u32());
    m.options.y_max = r.f64();
    m.model_hash = r.u64();
    const std::size_t ny = r.count(sizeof(std::uint64_t));
    m.table_y.resize(ny);
    for (auto& t : m.table_y) t = r.vec_f64();
    const std::size_t na = r.count(sizeof(std::uint64_t));
    m.table_angle.resize(na);
    for (auto& t : m.table_angle) t = r.vec_f64();
    return m;
}

} // namespace detail

/// Write the uniformisation to a cache file under the given key.  Throws
/// ConfigError when the file cannot be created.
inline void save_riemann_map(const RiemannMap& m, std::uint64_t key,
                             const std::string& path) {
    detail::ByteWriter payload;
    detail::write_riemann_payload(payload, m);

    detail::ByteWriter file;
    file.raw(kCacheMagic, 4);
    file.u32(kCacheVersion);
    file.u64(key);
    file.raw(payload.out.data(), payload.out.size());
    file.u64(fnv1a(payload.out));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cache: cannot write " + path);
    out.write(file.out.data(), static_cast<std::streamsize>(file.out.size()));
    if (!out) throw ConfigError("cache: short write to " + path);
}

/// Load a cached uniformisation.  Returns nothing when the file is absent,
/// carries a different key or version, fails its checksum, or is
/// structurally truncated -- every such case means "rebuild".
inline std::optional<RiemannMap> load_riemann_map(std::uint64_t expected_key,
                                                  const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();

    const std::size_t header = 4 + sizeof(std::uint32_t) + sizeof(std::uint64_t);
    const std::size_t footer = sizeof(std::uint64_t);
    if (data.size() < header + footer) return std::nullopt;
    if (std::memcmp(data.data(), kCacheMagic, 4) != 0) return std::nullopt;

    std::uint32_t version = 0;
    std::uint64_t key = 0;
    std::memcpy(&version, data.data() + 4, sizeof version);
    std::memcpy(&key, data.data() + 8, sizeof key);
    if (version != kCacheVersion || key != expected_key) return std::nullopt;

    const std::string payload = data.substr(header, data.size() - header - footer);
    std::uint64_t checksum = 0;
    std::memcpy(&checksum, data.data() + data.size() - footer, sizeof checksum);
    if (fnv1a(payload) != checksum) return std::nullopt;

    detail::ByteReader r(payload);
    RiemannMap m = detail::read_riemann_payload(r);
    if (r.fail || r.pos != payload.size()) return std::nullopt;
    if (m.sample_y.size() != m.samples.size() ||
        m.sample_tract.size() != m.samples.size() ||
        m.table_y.size() != m.table_angle.size())
        return std::nullopt;
    for (std::size_t j = 0; j < m.table_y.size(); ++j)
        if (m.table_y[j].size() != m.table_angle[j].size()) return std::nullopt;
    return m;
}

} // namespace qcfold
