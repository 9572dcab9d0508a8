#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "hemo/geometry/mesh.hpp"
#include "hemo/geometry/sampling.hpp"
#include "hemo/geometry/shapes.hpp"
#include "hemo/geometry/voxelize.hpp"

using namespace hemo;
using namespace hemo::geometry;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hemo_unit_geometry";
  std::filesystem::create_directories(dir);
  return dir / name;
}

double angle_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)) * 180.0 /
         std::numbers::pi;
}

std::size_t count_boundary_sites(const LatticeDomain& d, BoundaryKind kind, int index) {
  const int b = d.find_boundary(kind, index);
  std::size_t n = 0;
  for (std::size_t g = 0; g < d.site_count(); ++g) {
    if (d.iolet_cuts(g) != 0 && d.iolet_id(g) == b) ++n;
  }
  return n;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("mesh primitives are closed and outward") {
  const auto box = make_box_mesh({0, 0, 0}, {1, 2, 3});
  CHECK_FALSE(validate_mesh(box));
  CHECK(box.signed_volume() == doctest::Approx(6.0));
  CHECK(box.area() == doctest::Approx(22.0));

  const auto sphere = make_sphere_mesh({1, 1, 1}, 2.0, 4);
  CHECK_FALSE(validate_mesh(sphere));
  CHECK(sphere.signed_volume() == doctest::Approx(4.0 / 3.0 * std::numbers::pi * 8).epsilon(0.01));

  const auto cyl = make_cylinder_mesh({0, 0, 0}, {5, 0, 0}, 1.0, 64);
  CHECK_FALSE(validate_mesh(cyl));
  CHECK(cyl.caps.size() == 2);

  auto open = box;
  open.triangles.pop_back();
  open.cap_labels.pop_back();
  CHECK(validate_mesh(open).has_value());

  auto flipped = box;
  std::swap(flipped.triangles[0][1], flipped.triangles[0][2]);
  CHECK(validate_mesh(flipped).has_value());
}

TEST_CASE("STL round trip") {
  const auto mesh = make_sphere_mesh({0.1, -0.2, 0.3}, 0.5, 2);
  write_stl_binary(scratch("s.stl"), mesh);
  write_stl_ascii(scratch("s_ascii.stl"), mesh);
  for (const char* name : {"s.stl", "s_ascii.stl"}) {
    const auto back = read_stl(scratch(name));
    CHECK(back.triangle_count() == mesh.triangle_count());
    CHECK(back.vertices.size() == mesh.vertices.size());
    CHECK(back.signed_volume() == doctest::Approx(mesh.signed_volume()).epsilon(1e-6));
    CHECK_FALSE(validate_mesh(back));
  }
  const auto mm = read_stl(scratch("s.stl"), 1e-3);
  CHECK(mm.signed_volume() == doctest::Approx(mesh.signed_volume() * 1e-9).epsilon(1e-6));
  CHECK_THROWS_AS(read_stl(scratch("absent.stl")), std::exception);
}

TEST_CASE("cap sidecar") {
  const std::string text =
      "# caps\ninlet 0 plane: 1 0 0 0 1e-9\noutlet 0 plane: 1 0 0 5 1e-9  # far end\n";
  const auto planes = parse_cap_sidecar(text);
  REQUIRE(planes.size() == 2);
  CHECK(planes[1].id == CapId{BoundaryKind::Outlet, 0});
  CHECK(planes[1].d == 5.0);
  const auto again = parse_cap_sidecar(format_cap_sidecar(planes));
  CHECK(again[0].normal == planes[0].normal);
  CHECK(again[1].tolerance == planes[1].tolerance);
  CHECK_THROWS_AS(parse_cap_sidecar("wall 0 plane: 1 0 0 0 0"), GeometryError);
  CHECK_THROWS_AS(parse_cap_sidecar("inlet 0 1 0 0 0 0"), GeometryError);

  auto box = make_box_mesh({0, 0, 0}, {5, 1, 1});
  apply_cap_labels(box, planes);
  CHECK(cap_boundaries(box).size() == 2);
  CHECK_THROWS_AS(apply_cap_labels(box, parse_cap_sidecar("inlet 1 plane: 1 0 0 9 0")),
                  GeometryError);
}

TEST_CASE("cube voxelization against a point-in-box oracle") {
  const auto cube = make_box_mesh({0, 0, 0}, {10, 10, 10});
  // sites on the faces: the half-open rule takes one layer on each axis
  const auto on_faces = voxelize(cube, 1.0);
  CHECK(on_faces.fluid_count() >= 9u * 9u * 9u);
  CHECK(on_faces.fluid_count() <= 11u * 11u * 11u);
  // sites at cell centres: no ambiguity
  VoxelizeOptions opt;
  opt.anchor = Eigen::Vector3d::Constant(-0.5);
  const auto centred = voxelize(cube, 1.0, opt);
  std::size_t brute = 0;
  for (std::size_t g = 0; g < centred.site_count(); ++g) {
    const Eigen::Vector3d p = centred.position(g);
    const bool inside = (p.array() > 0.0).all() && (p.array() < 10.0).all();
    brute += inside;
    CHECK(is_fluid(centred.site_class(g)) == inside);
  }
  CHECK(brute == 1000);
  CHECK(centred.count(SiteClass::Wall) == 1000 - 8 * 8 * 8);
}

TEST_CASE("sphere volume") {
  const double R = 8.0;
  const auto sphere = make_sphere_mesh({0, 0, 0}, R, 5);
  VoxelizeOptions opt;
  opt.anchor = Eigen::Vector3d::Constant(0.5);
  const auto d = voxelize(sphere, 1.0, opt);
  const double exact = 4.0 / 3.0 * std::numbers::pi * R * R * R;
  CHECK(std::abs(d.fluid_count() / exact - 1.0) < 0.03);
  CHECK(fluid_components(d) == 1);
  CHECK(euler_characteristic(d) == 1);
  // every site agrees with the exposed inside test
  for (std::size_t g = 0; g < d.site_count(); g += 7) {
    CHECK(is_fluid(d.site_class(g)) == point_inside(sphere, d.position(g)));
  }
}

TEST_CASE("cylinder caps form discs of the right area") {
  const double R = 4.0;
  const auto cyl = make_cylinder_mesh({0, 0, 0}, {20, 0, 0}, R, 128);
  VoxelizeOptions opt;
  opt.anchor = Eigen::Vector3d(0.5, 0.5, 0.5);
  const auto d = voxelize(cyl, 1.0, opt);
  REQUIRE(d.boundaries().size() == 2);
  const double disc = std::numbers::pi * R * R;
  CHECK(std::abs(count_boundary_sites(d, BoundaryKind::Inlet, 0) / disc - 1.0) < 0.10);
  CHECK(std::abs(count_boundary_sites(d, BoundaryKind::Outlet, 0) / disc - 1.0) < 0.10);
  CHECK(d.count(SiteClass::Inlet) > 0);
  CHECK(d.count(SiteClass::Outlet) > 0);
  CHECK_FALSE(d.check_links());

  const auto implicit = generate_cylinder(20.0, R, 1.0);
  CHECK(std::abs(count_boundary_sites(implicit, BoundaryKind::Inlet, 0) / disc - 1.0) < 0.10);
  const double mesh_sites = d.fluid_count(), shape_sites = implicit.fluid_count();
  CHECK(std::abs(mesh_sites / shape_sites - 1.0) < 0.05);
}

TEST_CASE("channel layers and halfway wall") {
  const double dx = 1e-4;
  const auto d = generate_channel(30 * dx, 20 * dx, dx, dx);
  std::set<int> layers;
  double ymin = 1e9, ymax = -1e9;
  for (std::size_t g = 0; g < d.site_count(); ++g) {
    if (!is_fluid(d.site_class(g))) continue;
    layers.insert(d.coords(g).y());
    ymin = std::min(ymin, d.position(g).y());
    ymax = std::max(ymax, d.position(g).y());
  }
  CHECK(layers.size() == 20);
  CHECK(ymin == doctest::Approx(0.5 * dx));
  CHECK(ymax == doctest::Approx(19.5 * dx));
  CHECK(d.periodic()[2]);
  CHECK(d.dims().z() == 1);
  CHECK(d.fluid_count() == 30u * 20u);
  CHECK_FALSE(d.check_links());
}

TEST_CASE("too-small features are rejected") {
  CHECK_THROWS_AS(generate_channel(1e-3, 3e-4, 1e-4, 1e-4), GeometryError);
  CHECK_THROWS_AS(generate_channel(1e-3, 1e-3, 0.5e-4, 1e-4), GeometryError);
  CHECK_THROWS_AS(generate_cylinder(1e-3, 1.5e-4, 1e-4), GeometryError);
  BifurcationSpec tiny;
  tiny.daughter_radii[1] = 1e-4;
  CHECK_THROWS_AS(generate_bifurcation(tiny, 1e-4), GeometryError);
}

TEST_CASE("bifurcation topology") {
  const auto d = generate_bifurcation(BifurcationSpec{}, 1.25e-4);
  CHECK(d.inlet_count() == 1);
  CHECK(d.outlet_count() == 2);
  CHECK(count_boundary_sites(d, BoundaryKind::Outlet, 0) > 0);
  CHECK(count_boundary_sites(d, BoundaryKind::Outlet, 1) > 0);
  CHECK(reachable_from_inlets(d));
  CHECK(fluid_components(d) == 1);
  CHECK(euler_characteristic(d) == 1);
  CHECK_FALSE(d.check_links());
  // smaller daughter has the smaller outlet
  CHECK(count_boundary_sites(d, BoundaryKind::Outlet, 1) <
        count_boundary_sites(d, BoundaryKind::Outlet, 0));
}

TEST_CASE("euler characteristic of a ring") {
  LatticeDomain d({5, 5, 1}, 1.0, Eigen::Vector3d::Zero());
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const bool ring = (i == 1 || i == 3 || j == 1 || j == 3) && i >= 1 && i <= 3 && j >= 1 && j <= 3;
      d.set_site_class(d.index(i, j, 0), ring ? SiteClass::Fluid : SiteClass::Solid);
    }
  CHECK(euler_characteristic(d) == 0);
  CHECK(fluid_components(d) == 1);
}

TEST_CASE("unreachable fluid is removed") {
  auto a = make_cylinder_mesh({0, 0, 0}, {10, 0, 0}, 2.0, 32);
  const auto b = make_box_mesh({0, 6, -2}, {4, 10, 2});
  const int offset = static_cast<int>(a.vertices.size());
  a.vertices.insert(a.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (auto t : b.triangles) {
    a.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
    a.cap_labels.push_back(-1);
  }
  VoxelizeOptions opt;
  opt.anchor = Eigen::Vector3d::Constant(0.5);
  opt.remove_unreachable = false;
  auto d = voxelize(a, 1.0, opt);
  CHECK(fluid_components(d) == 2);
  CHECK_FALSE(reachable_from_inlets(d));
  CHECK(remove_unreachable(d) == 4u * 4u * 4u);
  CHECK(fluid_components(d) == 1);
  CHECK(reachable_from_inlets(d));
}

TEST_CASE("wall normals") {
  const double dx = 1e-4;
  SUBCASE("channel walls") {
    const auto d = generate_channel(20 * dx, 10 * dx, dx, dx);
    const auto lo = wall_normal(d, {10.5 * dx, 0.0, 0.0});
    CHECK((lo.unit_normal - Eigen::Vector3d(0, -1, 0)).norm() < 1e-6);
    const auto hi = wall_normal(d, {10.5 * dx, 10 * dx, 0.0});
    CHECK((hi.unit_normal - Eigen::Vector3d(0, 1, 0)).norm() < 1e-6);
    auto bare = d;
    bare.set_surface(nullptr);
    const auto ln = wall_normal(bare, {10.5 * dx, 0.0, 0.0});
    CHECK((ln.unit_normal - Eigen::Vector3d(0, -1, 0)).norm() < 1e-12);
    CHECK_THROWS_AS(wall_normal(d, {10.5 * dx, 5 * dx, 0.0}), GeometryError);
  }
  SUBCASE("cylinder wall is radial") {
    const double R = 8 * dx;
    const auto d = generate_cylinder(30 * dx, R, dx);
    for (int a = 0; a < 24; ++a) {
      const double th = 2 * std::numbers::pi * a / 24;
      const Eigen::Vector3d radial(0, std::cos(th), std::sin(th));
      const auto mid = nearest_wall_link(d, Eigen::Vector3d(15 * dx, 0, 0) + R * radial, 4 * dx);
      REQUIRE(mid);
      const auto w = wall_normal(d, *mid);
      const Eigen::Vector3d r(0, mid->y(), mid->z());
      CHECK(angle_deg(w.unit_normal, r) < 2.0);
      // lattice-only estimate is coarser but still outward
      CHECK(link_normal(d, w.site).dot(r.normalized()) > 0.7);
    }
  }
  SUBCASE("normal varies continuously across the carina") {
    const BifurcationSpec spec;
    const double h = 1.25e-4;
    const auto d = generate_bifurcation(spec, h);
    // scan the ridge between the daughters, which runs along z at the junction
    const auto shape = make_bifurcation_shape(spec);
    double x = spec.parent_length;
    while (shape->distance({x, 0, 0}) < 0) x += 0.01 * h;
    std::vector<Eigen::Vector3d> normals;
    for (int i = -6; i <= 6; ++i) {
      const double z = i * 0.1 * spec.daughter_radii[1];
      const auto mid = nearest_wall_link(d, {x, 0, z}, 4 * h);
      REQUIRE(mid);
      normals.push_back(wall_normal(d, *mid).unit_normal);
    }
    for (std::size_t i = 1; i < normals.size(); ++i) {
      CHECK(angle_deg(normals[i], normals[i - 1]) < 15.0);
    }
  }
}

TEST_CASE("nearest wall link") {
  const double dx = 1e-4;
  const auto d = generate_channel(20 * dx, 10 * dx, dx, dx);
  const auto mid = nearest_wall_link(d, {10.6 * dx, -1.3 * dx, 0}, 4 * dx);
  REQUIRE(mid);
  CHECK(mid->y() == doctest::Approx(0.0).epsilon(1e-12).scale(dx));
  CHECK_FALSE(nearest_wall_link(d, {10 * dx, 5 * dx, 0}, 2 * dx));
}

TEST_CASE("voxel dump round trip") {
  const auto d = generate_bifurcation(BifurcationSpec{}, 2e-4);
  write_domain(scratch("b.vox"), d);
  const auto back = read_domain(scratch("b.vox"));
  CHECK(back.dims() == d.dims());
  CHECK(back.dx() == d.dx());
  CHECK(back.origin() == d.origin());
  CHECK(back.boundaries().size() == d.boundaries().size());
  for (std::size_t b = 0; b < d.boundaries().size(); ++b) {
    CHECK(back.boundaries()[b].name() == d.boundaries()[b].name());
    CHECK(back.boundaries()[b].inward_normal == d.boundaries()[b].inward_normal);
  }
  for (std::size_t g = 0; g < d.site_count(); ++g) {
    REQUIRE(back.site_class(g) == d.site_class(g));
    REQUIRE(back.wall_cuts(g) == d.wall_cuts(g));
    REQUIRE(back.iolet_cuts(g) == d.iolet_cuts(g));
    REQUIRE(back.iolet_id(g) == d.iolet_id(g));
  }
  std::ofstream(scratch("junk.vox")) << "not a voxel file";
  CHECK_THROWS(read_domain(scratch("junk.vox")));
}

}  // TEST_SUITE
