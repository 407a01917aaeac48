// State snapshots: a small versioned binary format.
//
// Layout (all multi-byte values little-endian):
//   bytes 0..7   magic "EMLSNP01"
//   u32          lattice points per axis
//   f64          box length, sound parameter d, state time
//   f64 arrays   n, v1, v2, v3, E1, E2, E3, B1, B2, B3,
//                each n^3 values in row-major order, last index fastest
// Semantics of the grid (centered coordinates, frequency window) are fixed by
// the library, so the header pins everything needed to reconstruct the state.
#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>

#include "eml/state.hpp"

namespace eml {
namespace detail {

constexpr char kSnapshotMagic[8] = {'E', 'M', 'L', 'S', 'N', 'P', '0', '1'};

inline void put_u64(std::ostream& os, std::uint64_t x) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xff);
  os.write(b, 8);
}
inline void put_u32(std::ostream& os, std::uint32_t x) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xff);
  os.write(b, 4);
}
inline void put_f64(std::ostream& os, double x) { put_u64(os, std::bit_cast<std::uint64_t>(x)); }

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return x;
}
inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return x;
}
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

inline void put_field(std::ostream& os, const RealField& f) {
  for (double x : f.a) put_f64(os, x);
}
inline void get_field(std::istream& is, RealField& f) {
  for (double& x : f.a) x = get_f64(is);
}

}  // namespace detail

inline void write_snapshot(const PlasmaState& s, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("write_snapshot: cannot open " + path);
  os.write(detail::kSnapshotMagic, 8);
  detail::put_u32(os, static_cast<std::uint32_t>(s.grid.n()));
  detail::put_f64(os, s.grid.length());
  detail::put_f64(os, s.d);
  detail::put_f64(os, s.time);
  detail::put_field(os, s.n);
  for (int c = 0; c < 3; ++c) detail::put_field(os, s.v[c]);
  for (int c = 0; c < 3; ++c) detail::put_field(os, s.E[c]);
  for (int c = 0; c < 3; ++c) detail::put_field(os, s.B[c]);
  if (!os) throw IoError("write_snapshot: short write to " + path);
}

inline PlasmaState read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("read_snapshot: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || !std::equal(magic, magic + 8, detail::kSnapshotMagic))
    throw IoError("read_snapshot: " + path + " is not a state snapshot (bad magic)");
  std::uint32_t n = detail::get_u32(is);
  double length = detail::get_f64(is);
  double d = detail::get_f64(is);
  double time = detail::get_f64(is);
  if (!is) throw IoError("read_snapshot: truncated header in " + path);
  Grid g(static_cast<int>(n), length);
  PlasmaState s(g, d);
  s.time = time;
  detail::get_field(is, s.n);
  for (int c = 0; c < 3; ++c) detail::get_field(is, s.v[c]);
  for (int c = 0; c < 3; ++c) detail::get_field(is, s.E[c]);
  for (int c = 0; c < 3; ++c) detail::get_field(is, s.B[c]);
  if (!is) throw IoError("read_snapshot: truncated field data in " + path);
  return s;
}

}  // namespace eml
