#pragma once

// Serialization: full-precision numeric formatting, CSV tables, the binary
// field snapshot format and its CSV export.
//
// Snapshot layout (little-endian):
//   magic "NLSF" | u16 version | u8 endian tag (1 = LE) | u16 tag length |
//   convention tag bytes | u32 d | u32 M | (2M+1)^d interleaved f64 pairs
//   (re, im) in lexicographic mode order.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/lattice.hpp"

namespace nlslab {

static_assert(std::endian::native == std::endian::little,
              "snapshot writer assumes a little-endian host");

// 17 significant digits: round-trippable doubles, stable golden files.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_row(std::span<const double> values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_full(values[i]);
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_string() const {
    std::string out;
    for (size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ',';
      out += columns[i];
    }
    out += '\n';
    for (const auto& r : rows) {
      out += csv_row(r);
      out += '\n';
    }
    return out;
  }
};

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(body.data(), std::streamsize(body.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline constexpr std::uint16_t kSnapshotVersion = 1;

inline void write_field_snapshot(const std::string& path, const FourierField& u) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const char magic[4] = {'N', 'L', 'S', 'F'};
  f.write(magic, 4);
  const std::uint16_t ver = kSnapshotVersion;
  f.write(reinterpret_cast<const char*>(&ver), 2);
  const std::uint8_t endian = 1;
  f.write(reinterpret_cast<const char*>(&endian), 1);
  const std::string tag = kLatticeConvention;
  const std::uint16_t tlen = std::uint16_t(tag.size());
  f.write(reinterpret_cast<const char*>(&tlen), 2);
  f.write(tag.data(), tlen);
  const std::uint32_t d = std::uint32_t(u.spec.d), M = std::uint32_t(u.spec.M);
  f.write(reinterpret_cast<const char*>(&d), 4);
  f.write(reinterpret_cast<const char*>(&M), 4);
  for (const cplx& c : u.coeffs) {
    const double re = c.real(), im = c.imag();
    f.write(reinterpret_cast<const char*>(&re), 8);
    f.write(reinterpret_cast<const char*>(&im), 8);
  }
  if (!f) throw std::runtime_error("short write: " + path);
}

inline FourierField read_field_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "NLSF", 4) != 0)
    throw std::runtime_error("not a field snapshot: " + path);
  std::uint16_t ver = 0;
  f.read(reinterpret_cast<char*>(&ver), 2);
  if (ver != kSnapshotVersion)
    throw std::runtime_error("unsupported snapshot version in " + path);
  std::uint8_t endian = 0;
  f.read(reinterpret_cast<char*>(&endian), 1);
  if (endian != 1) throw std::runtime_error("snapshot is not little-endian");
  std::uint16_t tlen = 0;
  f.read(reinterpret_cast<char*>(&tlen), 2);
  std::string tag(tlen, '\0');
  f.read(tag.data(), tlen);
  std::uint32_t d = 0, M = 0;
  f.read(reinterpret_cast<char*>(&d), 4);
  f.read(reinterpret_cast<char*>(&M), 4);
  if (!f) throw std::runtime_error("truncated snapshot header: " + path);
  const LatticeSpec spec{int(d), int(M)};
  FourierField u(spec);
  for (cplx& c : u.coeffs) {
    double re = 0.0, im = 0.0;
    f.read(reinterpret_cast<char*>(&re), 8);
    f.read(reinterpret_cast<char*>(&im), 8);
    c = {re, im};
  }
  if (!f) throw std::runtime_error("truncated snapshot payload: " + path);
  return u;
}

// CSV of |uhat(n)| per mode for inspection: n_1,...,n_d,abs,re,im.
inline std::string field_magnitude_csv(const FourierField& u) {
  std::string out;
  for (int i = 0; i < u.spec.d; ++i) out += "n" + std::to_string(i + 1) + ",";
  out += "abs,re,im\n";
  for_each_mode(u.spec, [&](std::int64_t idx, std::span<const int> n) {
    for (int i = 0; i < u.spec.d; ++i)
      out += std::to_string(n[i]) + ",";
    const cplx c = u.coeffs[size_t(idx)];
    out += format_full(std::abs(c)) + "," + format_full(c.real()) + "," +
           format_full(c.imag()) + "\n";
  });
  return out;
}

}  // namespace nlslab
