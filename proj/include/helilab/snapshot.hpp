#pragma once

// Binary field snapshot ("HLL1"):
//   char[4] magic "HLL1" | u32 version | u32 n | f64 L | f64 t | f64 b
//   followed by 3 n^2 f64 values, component-major then row-major.
// Everything little-endian.

#include <cstdint>
#include <filesystem>

#include "helilab/fields.hpp"

namespace helilab {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  Vector3Field u;
  double t;
  double b;
};

void write_snapshot(const std::filesystem::path& path, const Vector3Field& u, double t, double b);
/// Throws std::runtime_error on bad magic, unknown version or truncated data.
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace helilab
