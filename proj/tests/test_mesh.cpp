#include <catch2/catch_amalgamated.hpp>

#include <flipcert/mesh.hpp>

#include <set>

using namespace flipcert;
using namespace flipcert::geometry;
using namespace flipcert::mesh;

namespace {

Mat rows_of(std::initializer_list<std::initializer_list<double>> rs) {
  Mat m(rs.size(), rs.begin()->size());
  int i = 0;
  for (auto& r : rs) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

ConvexBody lifted_square() {
  return lift_of(
      ConvexBody::vertex_hull(rows_of({{1, 1}, {1, -1}, {-1, 1}, {-1, -1}})));
}

std::set<std::array<double, 3>> point_set3(const Mat& pts) {
  std::set<std::array<double, 3>> s;
  for (int i = 0; i < pts.rows(); ++i)
    s.insert({pts(i, 0), pts(i, 1), pts(i, 2)});
  return s;
}

Mesh mesh_from_points(Mat pts, std::vector<int> basis) {
  Mesh m;
  m.points = std::move(pts);
  m.basis_indices = std::move(basis);
  m.delta = 1.0;
  m.tau = compute_tau(m);
  return m;
}

}  // namespace

TEST_CASE("coarse mesh of the lifted square is just the five vertices") {
  ConvexBody body = lifted_square();
  Mesh m = build_mesh(body, 4.0);  // delta beyond the diameter
  CHECK(m.points.rows() == 5);
  CHECK(m.certificate == CoveringCert::Exact);
  CHECK(m.exact_bound <= 4.0);
}

TEST_CASE("mesh points lie in the body and contain a basis") {
  ConvexBody body = lifted_square();
  Mesh m = build_mesh(body, 0.5);
  for (int i = 0; i < m.points.rows(); ++i)
    CHECK(membership(body, m.points.row(i).transpose(), 1e-9));

  Mat basis(3, 3);
  for (int i = 0; i < 3; ++i) basis.row(i) = m.points.row(m.basis_indices[i]);
  Eigen::JacobiSVD<Mat> svd(basis);
  CHECK(svd.singularValues().minCoeff() > 1e-10);
}

TEST_CASE("nested refinement: halving delta only adds points") {
  ConvexBody body = lifted_square();
  Mesh coarse = build_mesh(body, 0.5);
  Mesh fine = build_mesh(body, 0.25);
  CHECK(fine.points.rows() > coarse.points.rows());
  auto cs = point_set3(coarse.points);
  auto fs = point_set3(fine.points);
  for (const auto& p : cs) CHECK(fs.count(p) == 1);

  ConvexBody disk = ConvexBody::lifted_ball(1.0, 3);
  Mesh dc = build_mesh(disk, 0.5);
  Mesh df = build_mesh(disk, 0.25);
  auto ds = point_set3(dc.points);
  auto dfs = point_set3(df.points);
  for (const auto& p : ds) CHECK(dfs.count(p) == 1);
}

TEST_CASE("mesh norm: definiteness, basis lower bound, homogeneity") {
  Mesh m = mesh_from_points(rows_of({{1, 0}, {0, 1}, {0.5, 0.5}}), {0, 1});
  CHECK(mesh_norm(m, Vec::Zero(2)) == 0.0);
  CHECK(mesh_norm(m, make_vec({3, -4})) >= 4.0);

  Rng rng(3u);
  std::normal_distribution<double> gauss(0, 1);
  for (int i = 0; i < 200; ++i) {
    Vec y = make_vec({gauss(rng), gauss(rng)});
    Vec z = make_vec({gauss(rng), gauss(rng)});
    CHECK(mesh_norm(m, 2.0 * y) == Catch::Approx(2.0 * mesh_norm(m, y)).margin(1e-12));
    CHECK(mesh_norm(m, y + z) <= mesh_norm(m, y) + mesh_norm(m, z) + 1e-12);
    if (y.norm() > 1e-9) CHECK(mesh_norm(m, y) > 0.0);
  }
}

TEST_CASE("tau formula against an exhaustive grid oracle") {
  // identity basis in R^2: tau = sqrt(2); grid-search the true constant
  Mesh m = mesh_from_points(rows_of({{1, 0}, {0, 1}}), {0, 1});
  CHECK(m.tau == Catch::Approx(std::sqrt(2.0)).margin(1e-12));

  double worst = 0.0;
  for (double x = -2; x <= 2; x += 0.005) {
    for (double y = -2; y <= 2; y += 0.005) {
      Vec v = make_vec({x, y});
      double f = mesh_norm(m, v);
      if (f <= 1.0) worst = std::max(worst, v.norm());
    }
  }
  CHECK(worst <= m.tau + 1e-9);
  CHECK(worst >= m.tau - 0.01);  // the bound is tight for this basis

  // scaling the basis by 1/2 doubles tau
  Mesh half = mesh_from_points(rows_of({{0.5, 0}, {0, 0.5}}), {0, 1});
  CHECK(half.tau == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("tau soundness on a shipped mesh") {
  ConvexBody disk = ConvexBody::lifted_ball(1.0, 3);
  Mesh m = build_mesh(disk, 0.25);
  Rng rng(9u);
  std::normal_distribution<double> gauss(0, 1);
  for (int i = 0; i < 10000; ++i) {
    Vec y(3);
    for (int j = 0; j < 3; ++j) y[j] = gauss(rng);
    double f = mesh_norm(m, y);
    if (f < 1e-12) continue;
    Vec scaled = y / f;  // mesh_norm(scaled) = 1
    CHECK(scaled.norm() <= m.tau + 1e-9);
  }
}

TEST_CASE("covering radius check: vertices of a simplex, valid meshes") {
  ConvexBody tri =
      ConvexBody::vertex_hull(rows_of({{0, 0}, {1, 0}, {0, 1}}));
  Mesh coarse = build_mesh(tri, 2.0);
  // sampled points of the simplex all near some mesh point
  double r = covering_radius_check(coarse, tri, 2000);
  CHECK(r <= 2.0);

  Mesh fine = build_mesh(tri, 0.1);
  CHECK(covering_radius_check(fine, tri, 5000) <= 0.1);

  ConvexBody disk = ConvexBody::lifted_ball(1.0, 3);
  Mesh dm = build_mesh(disk, 0.5);
  CHECK(dm.certificate == CoveringCert::Sampled);
  CHECK(dm.cert_worst_gap <= 0.5);
  CHECK(covering_radius_check(dm, disk, 20000) <= 0.5);
}

TEST_CASE("deleting a rim neighborhood breaks the covering and is detected") {
  ConvexBody disk = ConvexBody::lifted_ball(1.0, 3);
  Mesh m = build_mesh(disk, 0.3);
  // remove every point within 1.2*delta of one rim location
  Vec hole = make_vec({1.0, 1.0, 0.0});
  std::vector<int> keep;
  for (int i = 0; i < m.points.rows(); ++i)
    if ((m.points.row(i).transpose() - hole).norm() > 1.2 * m.delta)
      keep.push_back(i);
  Mesh broken = m;
  Mat pts(keep.size(), 3);
  for (size_t i = 0; i < keep.size(); ++i) pts.row(i) = m.points.row(keep[i]);
  broken.points = std::move(pts);
  broken.basis_indices.clear();
  broken.support_indices.clear();
  for (int i = 0; i < 3; ++i) broken.basis_indices.push_back(i);

  double r = covering_radius_check(broken, disk, 60000);
  CHECK(r > m.delta);
}

TEST_CASE("vertex mesh of a polytope records a sampled fineness") {
  ConvexBody body = lifted_square();
  Mesh m = extreme_point_mesh(body);
  CHECK(m.vertex_only);
  CHECK(m.points.rows() == 5);
  CHECK(m.delta > 0.3);  // far coarser than any refinement lattice
  CHECK(m.cert_worst_gap <= m.delta);
}

TEST_CASE("mesh export: csv rows and sidecar fields") {
  ConvexBody body = lifted_square();
  Mesh m = build_mesh(body, 1.0);
  std::ostringstream csv;
  write_mesh_csv(m, csv);
  int lines = 0;
  for (char c : csv.str())
    if (c == '\n') ++lines;
  CHECK(lines == m.points.rows());

  auto side = mesh_sidecar(m);
  CHECK(side["delta"] == 1.0);
  CHECK(side["tau"].get<double>() == Catch::Approx(m.tau));
  CHECK(side["certificate"]["kind"] == "exact");
}
