#include "helilab/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace helilab {

namespace {

constexpr char kMagic[4] = {'H', 'L', 'L', '1'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <typename T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("snapshot truncated");
  return to_little(v);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Vector3Field& u, double t, double b) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open snapshot for writing: " + path.string());
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kSnapshotVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(u.grid().n()));
  put<double>(os, u.grid().length());
  put<double>(os, t);
  put<double>(os, b);
  for (const auto& c : u.components())
    for (double v : c.values()) put<double>(os, v);
  if (!os) throw std::runtime_error("failed writing snapshot: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not an HLL1 snapshot: " + path.string());
  const auto version = get<std::uint32_t>(is);
  if (version != kSnapshotVersion) throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
  const auto n = get<std::uint32_t>(is);
  const double L = get<double>(is);
  const double t = get<double>(is);
  const double b = get<double>(is);
  auto grid = SpectralGrid::create(static_cast<int>(n), L);
  Vector3Field u(grid);
  for (int c = 0; c < 3; ++c)
    for (double& v : u[c].values()) v = get<double>(is);
  return {std::move(u), t, b};
}

}  // namespace helilab
