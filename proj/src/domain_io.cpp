#include <cstring>
#include <fstream>

#include "binary_io.hpp"
#include "hemo/geometry/sampling.hpp"

namespace hemo::geometry {

namespace {
constexpr char kMagic[8] = {'H', 'E', 'M', 'O', 'V', 'O', 'X', '\0'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_domain(const std::filesystem::path& path, const LatticeDomain& d) {
  using io::put_le;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, kVersion);
  for (int a = 0; a < 3; ++a) put_le<std::int32_t>(os, d.dims()[a]);
  put_le<double>(os, d.dx());
  for (int a = 0; a < 3; ++a) put_le<double>(os, d.origin()[a]);
  for (int a = 0; a < 3; ++a) put_le<std::uint8_t>(os, d.periodic()[a] ? 1 : 0);

  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(d.boundaries().size()));
  for (const auto& b : d.boundaries()) {
    put_le<std::uint8_t>(os, static_cast<std::uint8_t>(b.kind));
    put_le<std::int32_t>(os, b.index);
    for (int a = 0; a < 3; ++a) put_le<double>(os, b.inward_normal[a]);
    for (int a = 0; a < 3; ++a) put_le<double>(os, b.point[a]);
    put_le<double>(os, b.radius);
  }

  std::vector<std::pair<std::uint8_t, std::uint32_t>> runs;
  for (std::size_t g = 0; g < d.site_count(); ++g) {
    const auto c = static_cast<std::uint8_t>(d.site_class(g));
    if (!runs.empty() && runs.back().first == c && runs.back().second < UINT32_MAX) {
      ++runs.back().second;
    } else {
      runs.emplace_back(c, 1);
    }
  }
  put_le<std::uint64_t>(os, runs.size());
  for (const auto& [c, n] : runs) {
    put_le<std::uint8_t>(os, c);
    put_le<std::uint32_t>(os, n);
  }
  for (std::size_t g = 0; g < d.site_count(); ++g) {
    if (!is_fluid(d.site_class(g))) continue;
    put_le<std::uint16_t>(os, d.wall_cuts(g));
    put_le<std::uint16_t>(os, d.iolet_cuts(g));
    put_le<std::int8_t>(os, static_cast<std::int8_t>(d.iolet_id(g)));
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

LatticeDomain read_domain(const std::filesystem::path& path) {
  using io::get_le;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path.string() + ": not a voxel domain file");
  }
  const auto version = get_le<std::uint32_t>(is);
  if (version != kVersion) {
    throw std::runtime_error(path.string() + ": unsupported version " + std::to_string(version));
  }
  Eigen::Vector3i dims;
  for (int a = 0; a < 3; ++a) dims[a] = get_le<std::int32_t>(is);
  const double dx = get_le<double>(is);
  Eigen::Vector3d origin;
  for (int a = 0; a < 3; ++a) origin[a] = get_le<double>(is);
  std::array<bool, 3> periodic{};
  for (int a = 0; a < 3; ++a) periodic[a] = get_le<std::uint8_t>(is) != 0;
  LatticeDomain d(dims, dx, origin, periodic);

  const auto nb = get_le<std::uint32_t>(is);
  if (nb > 127) throw std::runtime_error(path.string() + ": too many boundaries");
  for (std::uint32_t i = 0; i < nb; ++i) {
    BoundaryPlane b;
    const auto kind = get_le<std::uint8_t>(is);
    if (kind > 1) throw std::runtime_error(path.string() + ": bad boundary kind");
    b.kind = static_cast<BoundaryKind>(kind);
    b.index = get_le<std::int32_t>(is);
    for (int a = 0; a < 3; ++a) b.inward_normal[a] = get_le<double>(is);
    for (int a = 0; a < 3; ++a) b.point[a] = get_le<double>(is);
    b.radius = get_le<double>(is);
    d.boundaries().push_back(b);
  }

  const auto nruns = get_le<std::uint64_t>(is);
  std::size_t g = 0;
  for (std::uint64_t r = 0; r < nruns; ++r) {
    const auto c = get_le<std::uint8_t>(is);
    const auto n = get_le<std::uint32_t>(is);
    if (c > 4 || g + n > d.site_count()) {
      throw std::runtime_error(path.string() + ": corrupt site class table");
    }
    for (std::uint32_t i = 0; i < n; ++i) d.set_site_class(g++, static_cast<SiteClass>(c));
  }
  if (g != d.site_count()) throw std::runtime_error(path.string() + ": site count mismatch");
  for (g = 0; g < d.site_count(); ++g) {
    if (!is_fluid(d.site_class(g))) continue;
    const auto w = get_le<std::uint16_t>(is);
    const auto io = get_le<std::uint16_t>(is);
    const auto id = get_le<std::int8_t>(is);
    if (id >= static_cast<int>(nb)) throw std::runtime_error(path.string() + ": bad iolet id");
    d.set_links(g, w, io, id);
  }
  if (auto err = d.check_links()) throw std::runtime_error(path.string() + ": " + *err);
  return d;
}

}  // namespace hemo::geometry
