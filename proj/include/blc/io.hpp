#pragma once

// Text serialization: fields as CSV, meshes as OBJ/PLY, grid specs, and
// atomic file replacement.

#include "blc/error.hpp"
#include "blc/field.hpp"
#include "blc/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace blc {

/// Parses "min:max:h,min:max:h" (x1 axis first).
inline Grid parse_grid(const std::string& spec) {
    auto parse_axis = [](const std::string& part) {
        double v[3];
        std::size_t pos = 0;
        for (int k = 0; k < 3; ++k) {
            const std::size_t end = part.find(':', pos);
            if ((k < 2) == (end == std::string::npos)) {
                throw Error(ErrorKind::InvalidConfig, "axis spec must be min:max:h, got '" + part + "'");
            }
            const std::string tok = part.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
            try {
                std::size_t used = 0;
                v[k] = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw Error(ErrorKind::InvalidConfig, "bad number '" + tok + "' in grid spec");
            }
            pos = end + 1;
        }
        return Axis::span(v[0], v[1], v[2]);
    };
    const std::size_t comma = spec.find(',');
    if (comma == std::string::npos || spec.find(',', comma + 1) != std::string::npos) {
        throw Error(ErrorKind::InvalidConfig, "grid spec needs two comma-separated axes");
    }
    return {parse_axis(spec.substr(0, comma)), parse_axis(spec.substr(comma + 1))};
}

/// Writes through a temporary sibling file and renames it over the target.
template <class Writer>
void write_atomically(const std::filesystem::path& path, Writer&& write) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string());
        write(out);
        out.flush();
        if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot move output into place at " + path.string());
    }
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& out, const ScalarField& f) {
    out << "x1,x2,value,valid\n";
    const Grid& g = f.grid;
    for (std::size_t i = 0; i < g.x1.n; ++i) {
        for (std::size_t j = 0; j < g.x2.n; ++j) {
            const std::size_t k = g.index(i, j);
            out << format_double(g.x1.at(i)) << ',' << format_double(g.x2.at(j)) << ','
                << format_double(f.valid[k] ? f.values[k] : 0.0) << ',' << (f.valid[k] ? 1 : 0) << '\n';
        }
    }
}

inline void save_csv(const std::filesystem::path& path, const ScalarField& f) {
    write_atomically(path, [&](std::ostream& out) { write_csv(out, f); });
}

namespace detail {
/// Axis whose nodes reproduce the coordinates exactly when some nearby step does.
inline Axis recover_axis(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 2) return {xs.empty() ? 0.0 : xs[0], 1.0, n};
    auto reproduces = [&](double h) {
        for (std::size_t i = 0; i < n; ++i) {
            if (xs[0] + static_cast<double>(i) * h != xs[i]) return false;
        }
        return true;
    };
    const double mean = (xs[n - 1] - xs[0]) / static_cast<double>(n - 1);
    for (const double base : {xs[1] - xs[0], mean}) {
        double lo = base, hi = base;
        for (int step = 0; step < 64; ++step) {
            if (reproduces(lo)) return {xs[0], lo, n};
            if (reproduces(hi)) return {xs[0], hi, n};
            lo = std::nextafter(lo, 0.0);
            hi = std::nextafter(hi, 2 * hi);
        }
    }
    return {xs[0], mean, n};
}
}  // namespace detail

/// Reads a CSV written by write_csv; the grid is recovered from the coordinates.
inline ScalarField read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("x1,x2,value,valid", 0) != 0) {
        throw Error(ErrorKind::Io, "missing CSV header x1,x2,value,valid");
    }
    std::vector<double> x1s, x2s, vals;
    std::vector<std::uint8_t> ok;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c, d;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
            !std::getline(ss, d, ',')) {
            throw Error(ErrorKind::Io, "malformed CSV row: " + line);
        }
        try {
            x1s.push_back(std::stod(a));
            x2s.push_back(std::stod(b));
            vals.push_back(std::stod(c));
            ok.push_back(std::stoi(d) != 0 ? 1 : 0);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Io, "non-numeric CSV row: " + line);
        }
    }
    if (vals.empty()) throw Error(ErrorKind::Io, "CSV has no rows");
    std::size_t n2 = 1;
    while (n2 < x1s.size() && x1s[n2] == x1s[0]) ++n2;
    if (vals.size() % n2 != 0) throw Error(ErrorKind::Io, "CSV rows do not form a rectangular grid");
    const std::size_t n1 = vals.size() / n2;
    std::vector<double> a1(n1), a2(x2s.begin(), x2s.begin() + static_cast<std::ptrdiff_t>(n2));
    for (std::size_t i = 0; i < n1; ++i) a1[i] = x1s[i * n2];
    const Grid g{detail::recover_axis(a1), detail::recover_axis(a2)};
    ScalarField f(g, 0.0, false);
    f.values = std::move(vals);
    f.valid = std::move(ok);
    return f;
}

inline ScalarField load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return read_csv(in);
}

namespace detail {
/// Vertex numbering over valid nodes (row-major) and the triangles of fully valid cells.
struct Triangulation {
    std::vector<long> vertex_id;
    std::vector<std::array<long, 3>> faces;
    long vertices = 0;
};

inline Triangulation triangulate(const SurfaceMesh& m) {
    const Grid& g = m.grid;
    Triangulation t;
    t.vertex_id.assign(g.size(), -1);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (m.valid[k]) t.vertex_id[k] = t.vertices++;
    }
    for (std::size_t i = 0; i + 1 < g.x1.n; ++i) {
        for (std::size_t j = 0; j + 1 < g.x2.n; ++j) {
            const long a = t.vertex_id[g.index(i, j)], b = t.vertex_id[g.index(i + 1, j)];
            const long c = t.vertex_id[g.index(i + 1, j + 1)], d = t.vertex_id[g.index(i, j + 1)];
            if (a < 0 || b < 0 || c < 0 || d < 0) continue;
            t.faces.push_back({a, b, c});
            t.faces.push_back({a, c, d});
        }
    }
    return t;
}
}  // namespace detail

inline void write_obj(std::ostream& out, const SurfaceMesh& m) {
    const auto t = detail::triangulate(m);
    for (std::size_t k = 0; k < m.points.size(); ++k) {
        if (!m.valid[k]) continue;
        const Vec3& p = m.points[k];
        out << "v " << format_double(p[0]) << ' ' << format_double(p[1]) << ' ' << format_double(p[2]) << '\n';
    }
    for (const auto& f : t.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline void write_ply(std::ostream& out, const SurfaceMesh& m) {
    const auto t = detail::triangulate(m);
    out << "ply\nformat ascii 1.0\nelement vertex " << t.vertices
        << "\nproperty double x\nproperty double y\nproperty double z\nelement face " << t.faces.size()
        << "\nproperty list uchar int vertex_indices\nend_header\n";
    for (std::size_t k = 0; k < m.points.size(); ++k) {
        if (!m.valid[k]) continue;
        const Vec3& p = m.points[k];
        out << format_double(p[0]) << ' ' << format_double(p[1]) << ' ' << format_double(p[2]) << '\n';
    }
    for (const auto& f : t.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

inline void save_obj(const std::filesystem::path& path, const SurfaceMesh& m) {
    write_atomically(path, [&](std::ostream& out) { write_obj(out, m); });
}

inline void save_ply(const std::filesystem::path& path, const SurfaceMesh& m) {
    write_atomically(path, [&](std::ostream& out) { write_ply(out, m); });
}

}  // namespace blc
