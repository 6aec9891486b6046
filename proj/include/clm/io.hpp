#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "clm/dynamics.hpp"
#include "clm/util.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts are not supported");

namespace clm::io {

// ---------------------------------------------------------------------------
// CLM2 binary snapshot
//
//   magic "CLM2" | u32 version | u32 dim | u32 n[dim] | u32 domain_tag |
//   u32 nparams | f64 params[nparams] | u32 payload_kind | u64 count | payload
//
// domain_tag: 0 rectangle (no params), 1 ellipse (a,b,c), 2 torus (length).
// payload_kind: 0 = f64 field values, 1 = u8 mask. Row-major, little-endian;
// a written file reads back bit-exactly.
// ---------------------------------------------------------------------------

enum : std::uint32_t { domain_rectangle = 0, domain_ellipse = 1, domain_torus = 2 };
enum : std::uint32_t { payload_f64 = 0, payload_u8 = 1 };

struct SnapshotHeader {
    std::uint32_t version = 1;
    std::uint32_t dim = 2;
    std::vector<std::uint32_t> n;       // grid points per axis, dim entries
    std::uint32_t domain_tag = domain_rectangle;
    std::vector<double> params;
};

struct SnapshotData {
    SnapshotHeader header;
    std::uint32_t payload_kind = payload_f64;
    std::vector<double> values;       // payload_f64
    std::vector<std::uint8_t> mask;   // payload_u8
};

namespace detail {

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("snapshot: truncated file");
    return v;
}

inline void write_header(std::ostream& os, const SnapshotHeader& h) {
    os.write("CLM2", 4);
    put(os, h.version);
    put(os, h.dim);
    if (h.n.size() != h.dim) throw std::invalid_argument("snapshot header: n/dim mismatch");
    for (auto v : h.n) put(os, v);
    put(os, h.domain_tag);
    put(os, static_cast<std::uint32_t>(h.params.size()));
    for (double p : h.params) put(os, p);
}

inline SnapshotHeader read_header(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "CLM2", 4) != 0)
        throw std::runtime_error("snapshot: bad magic (not a CLM2 file)");
    SnapshotHeader h;
    h.version = get<std::uint32_t>(is);
    if (h.version != 1) throw std::runtime_error("snapshot: unsupported version");
    h.dim = get<std::uint32_t>(is);
    if (h.dim < 1 || h.dim > 3) throw std::runtime_error("snapshot: bad dimension");
    h.n.resize(h.dim);
    for (auto& v : h.n) v = get<std::uint32_t>(is);
    h.domain_tag = get<std::uint32_t>(is);
    const auto nparams = get<std::uint32_t>(is);
    if (nparams > 16) throw std::runtime_error("snapshot: implausible parameter count");
    h.params.resize(nparams);
    for (auto& p : h.params) p = get<double>(is);
    return h;
}

}  // namespace detail

inline void write_field_snapshot(const std::string& path, const SnapshotHeader& h,
                                 const std::vector<double>& values) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    detail::write_header(os, h);
    detail::put(os, static_cast<std::uint32_t>(payload_f64));
    detail::put(os, static_cast<std::uint64_t>(values.size()));
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline void write_mask_snapshot(const std::string& path, const SnapshotHeader& h,
                                const std::vector<std::uint8_t>& mask) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    detail::write_header(os, h);
    detail::put(os, static_cast<std::uint32_t>(payload_u8));
    detail::put(os, static_cast<std::uint64_t>(mask.size()));
    os.write(reinterpret_cast<const char*>(mask.data()),
             static_cast<std::streamsize>(mask.size()));
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline SnapshotData read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    SnapshotData d;
    d.header = detail::read_header(is);
    d.payload_kind = detail::get<std::uint32_t>(is);
    const auto count = detail::get<std::uint64_t>(is);
    if (d.payload_kind == payload_f64) {
        d.values.resize(count);
        is.read(reinterpret_cast<char*>(d.values.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
    } else if (d.payload_kind == payload_u8) {
        d.mask.resize(count);
        is.read(reinterpret_cast<char*>(d.mask.data()), static_cast<std::streamsize>(count));
    } else {
        throw std::runtime_error("snapshot: unknown payload kind");
    }
    if (!is) throw std::runtime_error("snapshot: truncated payload in " + path);
    return d;
}

// ---------------------------------------------------------------------------
// Time series CSV
// ---------------------------------------------------------------------------

inline void write_time_series_csv(const std::string& path, const TimeSeries& series) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "t,sup_norm,l2_norm,mean\n";
    char buf[196];
    for (const auto& s : series.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", s.t, s.sup, s.l2,
                      s.mean_value);
        os << buf;
    }
}

// ---------------------------------------------------------------------------
// Flat key-value configuration: "section.key = value", '#' comments
// ---------------------------------------------------------------------------

struct ConfigMap {
    std::string source;                       // file path or "<memory>"
    std::map<std::string, std::string> kv;    // resolved keys
    std::map<std::string, int> line_of;       // for error messages

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    std::string get(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error(source + ": missing required key '" + key + "'");
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& dflt) const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : it->second;
    }

    double get_double(const std::string& key) const { return parse_double(key, get(key)); }
    double get_double_or(const std::string& key, double dflt) const {
        return has(key) ? get_double(key) : dflt;
    }
    int get_int_or(const std::string& key, int dflt) const {
        if (!has(key)) return dflt;
        return static_cast<int>(parse_double(key, get(key)));
    }
    bool get_bool_or(const std::string& key, bool dflt) const {
        if (!has(key)) return dflt;
        const std::string v = get(key);
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw std::runtime_error(bad(key) + "expected a boolean, got '" + v + "'");
    }

  private:
    std::string bad(const std::string& key) const {
        auto it = line_of.find(key);
        const std::string where = it == line_of.end() ? "" : ":" + std::to_string(it->second);
        return source + where + ": key '" + key + "': ";
    }
    double parse_double(const std::string& key, const std::string& v) const {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing characters");
            return x;
        } catch (const std::exception&) {
            throw std::runtime_error(bad(key) + "expected a number, got '" + v + "'");
        }
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline ConfigMap parse_config_text(const std::string& text, const std::string& source) {
    ConfigMap cfg;
    cfg.source = source;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(source + ":" + std::to_string(lineno) +
                                     ": expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(source + ":" + std::to_string(lineno) + ": empty key");
        cfg.kv[key] = val;
        cfg.line_of[key] = lineno;
    }
    return cfg;
}

inline ConfigMap parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), path);
}

/// Writes the fully resolved key set, sorted, one per line.
inline void write_config_echo(const std::string& path, const ConfigMap& cfg) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& [k, v] : cfg.kv) os << k << " = " << v << "\n";
}

}  // namespace clm::io
