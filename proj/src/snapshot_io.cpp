#include "twave/snapshot_io.hpp"

#include <cstdio>
#include <fstream>

#include "twave/errors.hpp"

namespace twave {

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ConfigError("cannot write " + tmp.string());
        }
        out << content;
        if (!out) {
            throw ConfigError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string snapshot_csv(const FieldPair& f, const Grid& grid) {
    std::string s = "x,u,w,ur,ul\n";
    s.reserve(static_cast<size_t>(f.size()) * 80);
    for (long i = 0; i < f.size(); ++i) {
        s += fmt(grid.x(i));
        s += ',';
        s += fmt(f.u(i));
        s += ',';
        s += fmt(f.w(i));
        s += ',';
        s += fmt(f.ur(i));
        s += ',';
        s += fmt(f.ul(i));
        s += '\n';
    }
    return s;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s, const Grid& grid) {
    atomic_write(path, snapshot_csv(s.f, grid));
}

}  // namespace twave
