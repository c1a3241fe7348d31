#include "anideg/io.hpp"

#include <cstdio>
#include <cstring>
#include <limits>
#include <fstream>
#include <sstream>

namespace anideg {

namespace {

constexpr char kMagic[5] = {'A', 'D', 'C', 'H', '1'};

template <typename T>
void put(std::string& buf, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf.append(raw, sizeof(T));  // x86-64: native order is little-endian
}

template <typename T>
T take(const std::string& buf, std::size_t& off) {
    if (off + sizeof(T) > buf.size()) throw MissingArtifact("snapshot file truncated");
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

} // namespace

void write_snapshot(const std::filesystem::path& path, const Field& field, double time) {
    const TorusGrid& g = field.grid();
    std::string buf;
    buf.reserve(32 + 8 * field.size());
    buf.append(kMagic, sizeof(kMagic));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.dim()));
    for (int i = 0; i < g.dim(); ++i) put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.extent(i)));
    for (int i = 0; i < g.dim(); ++i) {
        put<double>(buf, g.lower(i));
        put<double>(buf, g.upper(i));
    }
    put<double>(buf, time);
    for (std::size_t i = 0; i < field.size(); ++i) put<double>(buf, field[i]);
    atomic_write(path, buf);
}

SnapshotFile read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifact("cannot open snapshot file: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    const std::string buf = os.str();
    if (buf.size() < sizeof(kMagic) || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw MissingArtifact("bad snapshot magic in " + path.string());
    std::size_t off = sizeof(kMagic);
    const auto d = take<std::uint32_t>(buf, off);
    if (d < 1 || d > 3) throw MissingArtifact("snapshot dimension out of range");
    std::vector<int> n(d);
    for (auto& v : n) v = static_cast<int>(take<std::uint32_t>(buf, off));
    std::vector<double> a(d), b(d);
    for (std::uint32_t i = 0; i < d; ++i) {
        a[i] = take<double>(buf, off);
        b[i] = take<double>(buf, off);
    }
    SnapshotFile out;
    out.time = take<double>(buf, off);
    out.grid = std::make_shared<TorusGrid>(n, a, b);
    out.field = Field(out.grid);
    for (std::size_t i = 0; i < out.field.size(); ++i) out.field[i] = take<double>(buf, off);
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
    std::string out = "t,mass,energy,entropy,dissipation_cum,excess_L2,hess_sq_cum,dt,accepted\n";
    for (const auto& r : records) {
        out += format_double(r.t);
        out += ',';
        out += format_double(r.mass);
        out += ',';
        out += format_double(r.energy);
        out += ',';
        out += format_double(r.entropy);
        out += ',';
        out += format_double(r.dissipation_cum);
        out += ',';
        out += format_double(r.excess_l2);
        out += ',';
        out += format_double(r.hess_sq_cum);
        out += ',';
        out += format_double(r.dt);
        out += ',';
        out += r.accepted ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::vector<DiagnosticsRecord> parse_diagnostics_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw MissingArtifact("diagnostics CSV is empty");
    std::vector<DiagnosticsRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9) throw MissingArtifact("diagnostics CSV row with wrong column count");
        DiagnosticsRecord r;
        r.t = std::stod(cells[0]);
        r.mass = std::stod(cells[1]);
        r.energy = std::stod(cells[2]);
        r.entropy = std::stod(cells[3]);
        r.dissipation_cum = std::stod(cells[4]);
        r.excess_l2 = std::stod(cells[5]);
        r.hess_sq_cum = std::stod(cells[6]);
        r.dt = std::stod(cells[7]);
        r.accepted = cells[8] == "1";
        r.psi2_grad_cum = std::numeric_limits<double>::quiet_NaN();  // not serialized
        out.push_back(r);
    }
    return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw MissingArtifact("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw MissingArtifact("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace anideg
