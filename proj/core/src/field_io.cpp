#include "pcma/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "pcma/errors.hpp"

namespace pcma {

namespace {

constexpr std::size_t kHeaderSize = 64;
constexpr char kMagic[4] = {'P', 'C', 'M', 'A'};

void require_little_endian() {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big,
                "mixed-endian hosts unsupported");
  if constexpr (std::endian::native != std::endian::little) {
    fail(ErrorCode::IoError, "snapshot files are little-endian; this host is not");
  }
}

template <typename T>
void put(std::vector<char>& buf, std::size_t off, T v) {
  std::memcpy(buf.data() + off, &v, sizeof(T));
}

template <typename T>
T get(const std::vector<char>& buf, std::size_t off) {
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  return v;
}

}  // namespace

void save_field(const ScalarField& f, const std::string& path) {
  require_little_endian();
  const Grid& g = *f.grid;
  for (int i = 0; i < g.real_dim(); ++i)
    require(g.domain.center.c[i] == 0.0, ErrorCode::IoError,
            "only origin-centered domains serialize");

  std::vector<char> header(kHeaderSize, 0);
  std::memcpy(header.data(), kMagic, 4);
  put<uint32_t>(header, 4, kFieldFormatVersion);
  put<uint32_t>(header, 8, static_cast<uint32_t>(g.n()));
  for (int i = 0; i < 4; ++i)
    put<uint32_t>(header, 12 + 4 * static_cast<std::size_t>(i),
                  i < g.real_dim() ? static_cast<uint32_t>(g.resolution) : 1u);
  put<double>(header, 28, g.h);
  put<double>(header, 36, f.time);
  put<double>(header, 44, f.m_cap);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(f.values.size())));
  if (!out) fail(ErrorCode::IoError, "short write to " + path);
}

ScalarField load_field(const std::string& path) {
  require_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);

  std::vector<char> header(kHeaderSize);
  in.read(header.data(), static_cast<std::streamsize>(kHeaderSize));
  if (in.gcount() != static_cast<std::streamsize>(kHeaderSize))
    fail(ErrorCode::TruncatedFile, path + ": header is shorter than 64 bytes");
  if (std::memcmp(header.data(), kMagic, 4) != 0)
    fail(ErrorCode::BadMagic, path + " is not a snapshot file");
  const auto version = get<uint32_t>(header, 4);
  if (version != kFieldFormatVersion)
    fail(ErrorCode::VersionMismatch,
         path + ": format version " + std::to_string(version) + ", expected " +
             std::to_string(kFieldFormatVersion));

  const auto n = get<uint32_t>(header, 8);
  require(n == 1 || n == 2, ErrorCode::TruncatedFile, path + ": bad complex dimension");
  uint32_t dims[4];
  for (int i = 0; i < 4; ++i) dims[i] = get<uint32_t>(header, 12 + 4 * static_cast<std::size_t>(i));
  const int real_dim = 2 * static_cast<int>(n);
  for (int i = 0; i < 4; ++i) {
    if (i < real_dim)
      require(dims[i] == dims[0], ErrorCode::TruncatedFile, path + ": anisotropic grid");
    else
      require(dims[i] == 1, ErrorCode::TruncatedFile, path + ": trailing axis not 1");
  }
  const double h = get<double>(header, 28);
  require(h > 0, ErrorCode::TruncatedFile, path + ": nonpositive spacing");

  DomainSpec dom;
  dom.n = static_cast<int>(n);
  dom.radius = 0.5 * h * (dims[0] - 1);
  dom.center = n == 1 ? make_point1(0, 0) : make_point2(0, 0, 0, 0);
  GridPtr grid = build_grid(dom, static_cast<int>(dims[0]));
  require(std::abs(grid->h - h) <= 1e-12 * h, ErrorCode::TruncatedFile,
          path + ": inconsistent spacing");

  ScalarField f = make_field(grid, get<double>(header, 36), get<double>(header, 44));
  const std::size_t bytes = sizeof(double) * static_cast<std::size_t>(grid->total_nodes);
  in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(bytes));
  if (in.gcount() != static_cast<std::streamsize>(bytes))
    fail(ErrorCode::TruncatedFile, path + ": value block is short");
  recompute_floor_flags(f);
  require_finite(f, path.c_str());
  return f;
}

}  // namespace pcma
