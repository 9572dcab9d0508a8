#include "hemo/geometry/mesh.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "binary_io.hpp"

namespace hemo::geometry {

Eigen::Vector3d SurfaceMesh::area_normal(int t) const {
  const Eigen::Vector3d a = vertex(t, 0), b = vertex(t, 1), c = vertex(t, 2);
  return (b - a).cross(c - a);
}

double SurfaceMesh::signed_volume() const {
  double v = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const int ti = static_cast<int>(t);
    v += vertex(ti, 0).dot(vertex(ti, 1).cross(vertex(ti, 2)));
  }
  return v / 6.0;
}

double SurfaceMesh::area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) s += 0.5 * area_normal(int(t)).norm();
  return s;
}

namespace {

struct Welder {
  std::map<std::array<double, 3>, int> index;
  SurfaceMesh& mesh;

  int add(const Eigen::Vector3d& p) {
    const std::array<double, 3> key{p.x(), p.y(), p.z()};
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(mesh.vertices.size()));
    if (inserted) mesh.vertices.push_back(p);
    return it->second;
  }

  void add_triangle(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    mesh.triangles.push_back({add(a), add(b), add(c)});
    mesh.cap_labels.push_back(-1);
  }
};

SurfaceMesh read_binary_stl(std::istream& is, std::uint32_t count, double scale) {
  SurfaceMesh mesh;
  Welder weld{{}, mesh};
  for (std::uint32_t t = 0; t < count; ++t) {
    for (int i = 0; i < 3; ++i) io::get_le<float>(is);
    Eigen::Vector3d v[3];
    for (auto& p : v) {
      for (int i = 0; i < 3; ++i) p[i] = scale * static_cast<double>(io::get_le<float>(is));
    }
    io::get_le<std::uint16_t>(is);
    weld.add_triangle(v[0], v[1], v[2]);
  }
  return mesh;
}

SurfaceMesh read_ascii_stl(std::istream& is, double scale) {
  SurfaceMesh mesh;
  Welder weld{{}, mesh};
  std::string word;
  std::vector<Eigen::Vector3d> loop;
  while (is >> word) {
    if (word == "vertex") {
      Eigen::Vector3d p;
      if (!(is >> p.x() >> p.y() >> p.z())) throw GeometryError("stl: malformed vertex line");
      loop.push_back(scale * p);
    } else if (word == "endloop") {
      if (loop.size() != 3) throw GeometryError("stl: facet does not have three vertices");
      weld.add_triangle(loop[0], loop[1], loop[2]);
      loop.clear();
    }
  }
  if (mesh.triangles.empty()) throw GeometryError("stl: no facets found");
  return mesh;
}

}  // namespace

SurfaceMesh read_stl(const std::filesystem::path& path, double scale) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw GeometryError("stl: cannot open " + path.string());
  const auto size = std::filesystem::file_size(path);
  if (size >= 84) {
    is.seekg(80);
    const auto count = io::get_le<std::uint32_t>(is);
    if (84 + 50ull * count == size) return read_binary_stl(is, count, scale);
  }
  is.clear();
  is.seekg(0);
  return read_ascii_stl(is, scale);
}

void write_stl_binary(const std::filesystem::path& path, const SurfaceMesh& mesh) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw GeometryError("stl: cannot write " + path.string());
  std::string header(80, ' ');
  header.replace(0, 17, "hemotbd binary stl");
  os.write(header.data(), 80);
  io::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(mesh.triangles.size()));
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Eigen::Vector3d n = mesh.area_normal(int(t)).normalized();
    for (int i = 0; i < 3; ++i) io::put_le<float>(os, static_cast<float>(n[i]));
    for (int c = 0; c < 3; ++c) {
      const Eigen::Vector3d v = mesh.vertex(int(t), c);
      for (int i = 0; i < 3; ++i) io::put_le<float>(os, static_cast<float>(v[i]));
    }
    io::put_le<std::uint16_t>(os, 0);
  }
}

void write_stl_ascii(const std::filesystem::path& path, const SurfaceMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw GeometryError("stl: cannot write " + path.string());
  os.precision(17);
  os << "solid hemotbd\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Eigen::Vector3d n = mesh.area_normal(int(t)).normalized();
    os << "  facet normal " << n.x() << ' ' << n.y() << ' ' << n.z() << "\n    outer loop\n";
    for (int c = 0; c < 3; ++c) {
      const Eigen::Vector3d v = mesh.vertex(int(t), c);
      os << "      vertex " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    }
    os << "    endloop\n  endfacet\n";
  }
  os << "endsolid hemotbd\n";
}

std::vector<CapPlane> parse_cap_sidecar(const std::string& text) {
  std::vector<CapPlane> planes;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    CapPlane p;
    std::string tag;
    if (kind == "inlet") {
      p.id.kind = BoundaryKind::Inlet;
    } else if (kind == "outlet") {
      p.id.kind = BoundaryKind::Outlet;
    } else {
      throw GeometryError("cap sidecar line " + std::to_string(lineno) +
                          ": expected 'inlet' or 'outlet'");
    }
    if (!(ls >> p.id.index >> tag) || tag != "plane:" ||
        !(ls >> p.normal.x() >> p.normal.y() >> p.normal.z() >> p.d >> p.tolerance)) {
      throw GeometryError("cap sidecar line " + std::to_string(lineno) +
                          ": expected '<kind> <index> plane: nx ny nz d tolerance'");
    }
    const double len = p.normal.norm();
    if (!(len > 0.0)) throw GeometryError("cap sidecar line " + std::to_string(lineno) +
                                          ": zero plane normal");
    p.normal /= len;
    p.d /= len;
    planes.push_back(p);
  }
  return planes;
}

std::vector<CapPlane> read_cap_sidecar(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw GeometryError("cap sidecar: cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_cap_sidecar(ss.str());
}

std::string format_cap_sidecar(const std::vector<CapPlane>& planes) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& p : planes) {
    os << (p.id.kind == BoundaryKind::Inlet ? "inlet " : "outlet ") << p.id.index
       << " plane: " << p.normal.x() << ' ' << p.normal.y() << ' ' << p.normal.z() << ' ' << p.d
       << ' ' << p.tolerance << '\n';
  }
  return os.str();
}

void apply_cap_labels(SurfaceMesh& mesh, const std::vector<CapPlane>& planes) {
  mesh.caps.clear();
  mesh.cap_labels.assign(mesh.triangles.size(), -1);
  for (const auto& p : planes) {
    const int label = static_cast<int>(mesh.caps.size());
    mesh.caps.push_back(p.id);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      bool on = true;
      for (int c = 0; c < 3 && on; ++c) {
        on = std::abs(p.normal.dot(mesh.vertex(int(t), c)) - p.d) <= p.tolerance;
      }
      if (on) {
        mesh.cap_labels[t] = label;
        ++hits;
      }
    }
    if (hits == 0) {
      throw GeometryError("cap sidecar: plane for " +
                          std::string(p.id.kind == BoundaryKind::Inlet ? "inlet " : "outlet ") +
                          std::to_string(p.id.index) + " matches no triangles");
    }
  }
}

std::optional<std::string> validate_mesh(const SurfaceMesh& mesh) {
  if (mesh.triangles.empty()) return "mesh has no triangles";
  Eigen::Vector3d lo = mesh.vertices.front(), hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double scale2 = (hi - lo).squaredNorm();

  std::map<std::pair<int, int>, int> directed;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] ||
        mesh.area_normal(int(t)).norm() <= 1e-14 * scale2) {
      return "degenerate triangle " + std::to_string(t);
    }
    for (int e = 0; e < 3; ++e) ++directed[{tri[e], tri[(e + 1) % 3]}];
  }
  for (const auto& [edge, n] : directed) {
    if (n != 1) return "edge used more than once in the same direction (inconsistent orientation)";
    if (!directed.count({edge.second, edge.first})) {
      return "open mesh: boundary edge (" + std::to_string(edge.first) + ", " +
             std::to_string(edge.second) + ")";
    }
  }
  if (!(mesh.signed_volume() > 0.0)) return "mesh normals point inwards (negative volume)";

  // Each cap must be a single patch.
  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      edge_tris[{std::min(a, b), std::max(a, b)}].push_back(int(t));
    }
  }
  for (std::size_t cap = 0; cap < mesh.caps.size(); ++cap) {
    std::vector<int> members;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      if (mesh.cap_labels[t] == int(cap)) members.push_back(int(t));
    }
    if (members.empty()) return "cap " + std::to_string(cap) + " has no triangles";
    std::set<int> seen{members.front()};
    std::vector<int> stack{members.front()};
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      const auto& tri = mesh.triangles[t];
      for (int e = 0; e < 3; ++e) {
        const int a = tri[e], b = tri[(e + 1) % 3];
        for (int u : edge_tris[{std::min(a, b), std::max(a, b)}]) {
          if (mesh.cap_labels[u] == int(cap) && seen.insert(u).second) stack.push_back(u);
        }
      }
    }
    if (seen.size() != members.size()) {
      return "cap " + std::to_string(cap) + " is not a single connected patch";
    }
  }
  return std::nullopt;
}

std::vector<BoundaryPlane> cap_boundaries(const SurfaceMesh& mesh) {
  std::vector<BoundaryPlane> out;
  for (std::size_t cap = 0; cap < mesh.caps.size(); ++cap) {
    Eigen::Vector3d n = Eigen::Vector3d::Zero(), c = Eigen::Vector3d::Zero();
    double area = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      if (mesh.cap_labels[t] != int(cap)) continue;
      const Eigen::Vector3d an = mesh.area_normal(int(t));
      const double a = 0.5 * an.norm();
      n += an;
      c += a * (mesh.vertex(int(t), 0) + mesh.vertex(int(t), 1) + mesh.vertex(int(t), 2)) / 3.0;
      area += a;
    }
    BoundaryPlane b;
    b.kind = mesh.caps[cap].kind;
    b.index = mesh.caps[cap].index;
    b.inward_normal = -n.normalized();
    b.point = c / area;
    double r = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      if (mesh.cap_labels[t] != int(cap)) continue;
      for (int k = 0; k < 3; ++k) r = std::max(r, (mesh.vertex(int(t), k) - b.point).norm());
    }
    b.radius = r;
    out.push_back(b);
  }
  return out;
}

SurfaceMesh make_box_mesh(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  SurfaceMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(),
                            (i & 4) ? hi.z() : lo.z());
  }
  // Quads listed counter-clockwise seen from outside.
  const int quads[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
  for (const auto& q : quads) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  m.cap_labels.assign(m.triangles.size(), -1);
  return m;
}

SurfaceMesh make_sphere_mesh(const Eigen::Vector3d& centre, double radius, int subdivisions) {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0},
                                    {0, -1, p}, {0, 1, p}, {0, -1, -p}, {0, 1, -p},
                                    {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (auto& x : v) x.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      return mid[key] = static_cast<int>(v.size()) - 1;
    };
    std::vector<std::array<int, 3>> g;
    for (const auto& t : f) {
      const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      g.push_back({t[0], ab, ca});
      g.push_back({t[1], bc, ab});
      g.push_back({t[2], ca, bc});
      g.push_back({ab, bc, ca});
    }
    f = std::move(g);
  }
  SurfaceMesh m;
  for (const auto& x : v) m.vertices.push_back(centre + radius * x);
  m.triangles = std::move(f);
  m.cap_labels.assign(m.triangles.size(), -1);
  return m;
}

SurfaceMesh make_cylinder_mesh(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double radius,
                               int segments) {
  const Eigen::Vector3d axis = (b - a).normalized();
  const Eigen::Vector3d u = axis.unitOrthogonal();
  const Eigen::Vector3d w = axis.cross(u);
  SurfaceMesh m;
  m.vertices.push_back(a);
  m.vertices.push_back(b);
  for (int s = 0; s < segments; ++s) {
    const double phi = 2.0 * std::numbers::pi * s / segments;
    const Eigen::Vector3d r = radius * (std::cos(phi) * u + std::sin(phi) * w);
    m.vertices.push_back(a + r);
    m.vertices.push_back(b + r);
  }
  m.caps = {{BoundaryKind::Inlet, 0}, {BoundaryKind::Outlet, 0}};
  auto ring_a = [](int s, int n) { return 2 + 2 * (s % n); };
  auto ring_b = [](int s, int n) { return 3 + 2 * (s % n); };
  for (int s = 0; s < segments; ++s) {
    const int a0 = ring_a(s, segments), a1 = ring_a(s + 1, segments);
    const int b0 = ring_b(s, segments), b1 = ring_b(s + 1, segments);
    m.triangles.push_back({a0, a1, b1});
    m.cap_labels.push_back(-1);
    m.triangles.push_back({a0, b1, b0});
    m.cap_labels.push_back(-1);
    m.triangles.push_back({0, a1, a0});
    m.cap_labels.push_back(0);
    m.triangles.push_back({1, b0, b1});
    m.cap_labels.push_back(1);
  }
  return m;
}

}  // namespace hemo::geometry
