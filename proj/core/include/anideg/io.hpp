#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "anideg/trajectory.hpp"

namespace anideg {

/// Snapshot file layout (bit-exact): magic "ADCH1", then little-endian
/// u32 d, u32 N_i per axis, f64 a_i,b_i per axis, f64 time, then
/// prod(N_i) f64 values row-major.
void write_snapshot(const std::filesystem::path& path, const Field& field, double time);

struct SnapshotFile {
    GridPtr grid;
    Field field;
    double time = 0.0;
};

SnapshotFile read_snapshot(const std::filesystem::path& path);

/// Shortest round-trippable decimal form (printf %.17g).
std::string format_double(double v);

/// Diagnostics CSV, columns exactly:
///   t,mass,energy,entropy,dissipation_cum,excess_L2,hess_sq_cum,dt,accepted
std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> parse_diagnostics_csv(const std::string& text);

/// Write-temp-then-rename so the file only ever appears complete.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& text);

} // namespace anideg
