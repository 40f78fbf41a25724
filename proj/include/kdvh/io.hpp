#pragma once

#include "kdvh/common.hpp"
#include "kdvh/spectral.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace kdvh::io {

/// Writes to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// One header line, then one row per index; all columns must share a length.
std::string csv(const std::vector<std::string>& header, const std::vector<const Field*>& columns);

constexpr char kCheckpointMagic[4] = {'K', 'D', 'V', 'H'};
constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary snapshot: "KDVH", u32 version, u32 m, f64 eps, f64 Lx, u64 N, f64 t,
/// then N f64 values of u. Everything little-endian.
std::string encode_checkpoint(const SpectralState& s);
SpectralState decode_checkpoint(const std::string& bytes);

void write_checkpoint(const std::filesystem::path& path, const SpectralState& s);
SpectralState read_checkpoint(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace kdvh::io
