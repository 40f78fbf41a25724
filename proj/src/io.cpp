#include "kdvh/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace kdvh::io {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ConfigError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv(const std::vector<std::string>& header, const std::vector<const Field*>& columns) {
  if (header.size() != columns.size()) throw ConfigError("csv header/column count mismatch");
  const Eigen::Index rows = columns.empty() ? 0 : columns.front()->size();
  for (const Field* c : columns) {
    if (c->size() != rows) throw ConfigError("csv columns differ in length");
  }
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  out += '\n';
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out += ',';
      out += format_double((*columns[j])[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

template <typename T>
void put(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> raw;
  std::memcpy(raw.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.append(raw.data(), raw.size());
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ConfigError("checkpoint truncated");
  std::array<char, sizeof(T)> raw;
  std::memcpy(raw.data(), in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  pos += sizeof(T);
  T v;
  std::memcpy(&v, raw.data(), sizeof(T));
  return v;
}

}  // namespace

std::string encode_checkpoint(const SpectralState& s) {
  std::string out(kCheckpointMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.flow.m));
  put<double>(out, s.flow.eps);
  put<double>(out, s.Lx);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(s.u.size()));
  put<double>(out, s.t);
  for (Eigen::Index i = 0; i < s.u.size(); ++i) put<double>(out, s.u[i]);
  return out;
}

SpectralState decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw ConfigError("not a KDVH checkpoint");
  }
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) {
    throw ConfigError("unsupported checkpoint version " + std::to_string(version));
  }
  const int m = static_cast<int>(get<std::uint32_t>(bytes, pos));
  const double eps = get<double>(bytes, pos);
  const double Lx = get<double>(bytes, pos);
  const auto n = get<std::uint64_t>(bytes, pos);
  const double t = get<double>(bytes, pos);
  if (bytes.size() != pos + n * sizeof(double)) throw ConfigError("checkpoint size mismatch");
  Field u(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i) u[static_cast<Eigen::Index>(i)] = get<double>(bytes, pos);
  SpectralState s = init_state(std::move(u), FlowParams(m, eps), Lx);
  s.t = t;
  return s;
}

void write_checkpoint(const fs::path& path, const SpectralState& s) {
  write_atomic(path, encode_checkpoint(s));
}

SpectralState read_checkpoint(const fs::path& path) { return decode_checkpoint(read_file(path)); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace kdvh::io
