#include <catch2/catch_amalgamated.hpp>

#include <flipcert/sip.hpp>
#include <flipcert/theories.hpp>

#include "oracles.hpp"

using namespace flipcert;
using namespace flipcert::geometry;
using namespace flipcert::sip;

namespace {

ConvexBody classical_triangle() {
  Mat tri(3, 2);
  tri << 0, 0, 1, 0, 0, 1;
  return ConvexBody::vertex_hull(tri);
}

// brute force over the vertices of the closure of a polytopal set
double brute_sip_optimum(const ConvexBody& a, const Vec& objective) {
  ConvexBody b = gnrh_closure(a);
  auto verts = oracles::region_vertices(b.normals, b.offsets);
  return oracles::max_dot_over(verts, objective);
}

}  // namespace

TEST_CASE("discretized primal of the classical bit is the unit box") {
  ConvexBody tri = classical_triangle();
  mesh::Mesh m = mesh::extreme_point_mesh(tri);
  Cone a_star = dual_cone(tri);
  conesolver::ConeProgram p =
      build_discretized_primal(make_vec({0.5, 0.0}), m, a_star);

  // feasible region equals the closure, checked by a membership oracle
  ConvexBody closure = gnrh_closure(tri);
  Rng rng(2u);
  std::uniform_real_distribution<double> unif(-0.5, 1.5);
  for (int i = 0; i < 500; ++i) {
    Vec w = make_vec({unif(rng), unif(rng)});
    bool in_rows = (p.halfspace_normals * w - p.halfspace_offsets).maxCoeff() <=
                       1e-12 &&
                   (p.cone_normals * w).minCoeff() >= -1e-12;
    double gap = membership_gap(closure, w);
    if (gap > 1e-9 && gap < 1e-7) continue;  // boundary band
    CHECK(in_rows == (gap <= 1e-9));
  }
}

TEST_CASE("zero objective optimizes to zero") {
  ConvexBody tri = classical_triangle();
  mesh::Mesh m = mesh::extreme_point_mesh(tri);
  DiscretizedSolve s = solve_discretized(Vec::Zero(2), tri, m);
  REQUIRE(s.solution.status == conesolver::SolveStatus::Optimal);
  CHECK(s.solution.primal_value == 0.0);
}

TEST_CASE("classical-bit cheating program solves to one half, exactly") {
  ConvexBody tri = classical_triangle();
  mesh::Mesh m = mesh::extreme_point_mesh(tri);
  Vec a0 = make_vec({0.5, 0.0});
  DiscretizedSolve s = solve_discretized(a0, tri, m);
  REQUIRE(s.solution.status == conesolver::SolveStatus::Optimal);
  CHECK(s.solution.primal_value == Catch::Approx(0.5).margin(1e-12));
  // vertex mesh of a polytope: exact program, width-zero enclosure
  CHECK(s.enclosure.lower == s.enclosure.upper);
  CHECK(s.enclosure.p_delta == Catch::Approx(0.5).margin(1e-12));

  // halving the objective halves the optimum
  DiscretizedSolve half = solve_discretized(Vec(0.5 * a0), tri, m);
  CHECK(half.solution.primal_value ==
        Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("dual program: trivial and classical instances, weak duality") {
  ConvexBody tri = classical_triangle();
  mesh::Mesh m = mesh::extreme_point_mesh(tri);
  Cone a_star = dual_cone(tri);

  Vec zero = Vec::Zero(2);
  conesolver::ConeProgram p0 = build_discretized_primal(zero, m, a_star);
  conesolver::ConeProgram d0 = build_dual(p0, zero, m);
  auto s0 = conesolver::solve_cone_program(d0);
  REQUIRE(s0.status == conesolver::SolveStatus::Optimal);
  CHECK(-s0.primal_value == Catch::Approx(0.0).margin(1e-12));

  Vec a0 = make_vec({0.5, 0.0});
  conesolver::ConeProgram p = build_discretized_primal(a0, m, a_star);
  conesolver::ConeProgram d = build_dual(p, a0, m);
  auto sp = conesolver::solve_cone_program(p);
  auto sd = conesolver::solve_cone_program(d);
  REQUIRE(sp.status == conesolver::SolveStatus::Optimal);
  REQUIRE(sd.status == conesolver::SolveStatus::Optimal);
  // dual minimum equals primal maximum
  CHECK(-sd.primal_value == Catch::Approx(sp.primal_value).margin(1e-9));
  CHECK(-sd.primal_value >= sp.primal_value - 1e-7);
}

TEST_CASE("relaxation and sandwich against brute force on polytopes") {
  for (int n : {3, 4, 5}) {
    theories::TheorySpec t = theories::polygon(n);
    const auto& proto = t.reference_protocols.front();
    mesh::Mesh m = mesh::extreme_point_mesh(t.strategy_set);
    for (int b = 0; b < 2; ++b) {
      DiscretizedSolve s =
          solve_discretized(proto.alice_triple[b], t.strategy_set, m);
      REQUIRE(s.solution.status == conesolver::SolveStatus::Optimal);
      double pstar = brute_sip_optimum(t.strategy_set, proto.alice_triple[b]);
      CHECK(s.solution.primal_value >= pstar - 1e-8);  // relaxation
      CHECK(pstar >= s.enclosure.lower - 1e-8);        // sandwich
      CHECK(pstar <= s.enclosure.upper + 1e-8);
      CHECK(s.solution.gap <= 1e-7);
      CHECK(s.solution.comp_slack_residual <= 1e-7);
    }
  }
}

TEST_CASE("row modes produce the same optimum") {
  ConvexBody disk_lift = ConvexBody::lifted_ball(1.0, 3);
  mesh::Mesh m = mesh::build_mesh(disk_lift, 0.25);
  Vec a0 = make_vec({0.5, 0.5, 0.0});
  DiscretizedSolve all =
      solve_discretized(a0, disk_lift, m, RowsMode::AllMeshPoints);
  DiscretizedSolve sup =
      solve_discretized(a0, disk_lift, m, RowsMode::SupportOnly);
  REQUIRE(all.solution.status == conesolver::SolveStatus::Optimal);
  REQUIRE(sup.solution.status == conesolver::SolveStatus::Optimal);
  CHECK(all.solution.primal_value ==
        Catch::Approx(sup.solution.primal_value).margin(1e-9));
}

TEST_CASE("monotone refinement on the disk lift") {
  ConvexBody disk_lift = ConvexBody::lifted_ball(1.0, 3);
  Vec a0 = make_vec({0.5, 0.35, 0.2});  // off-lattice objective
  double prev = std::numeric_limits<double>::infinity();
  for (double delta : {0.5, 0.25, 0.125}) {
    mesh::Mesh m = mesh::build_mesh(disk_lift, delta);
    DiscretizedSolve s = solve_discretized(a0, disk_lift, m);
    REQUIRE(s.solution.status == conesolver::SolveStatus::Optimal);
    CHECK(s.solution.primal_value <= prev + 1e-9);
    prev = s.solution.primal_value;
  }
}

TEST_CASE("delta sweep: validation, consistency, and shrinking widths") {
  ConvexBody disk_lift = ConvexBody::lifted_ball(1.0, 3);
  Vec a0 = make_vec({0.5, 0.5, 0.0});

  CHECK_THROWS_AS(delta_sweep(a0, disk_lift, {0.25, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(delta_sweep(a0, disk_lift, {0.5, -0.1}),
                  std::invalid_argument);

  std::vector<double> deltas = {0.5, 0.25, 0.125, 0.0625};
  auto rows = delta_sweep(a0, disk_lift, deltas);
  REQUIRE(rows.size() == 4);
  for (size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].status == conesolver::SolveStatus::Optimal);
    if (i > 0) {
      CHECK(rows[i].p_delta <= rows[i - 1].p_delta + 1e-9);
      double w = rows[i].upper - rows[i].lower;
      double wprev = rows[i - 1].upper - rows[i - 1].lower;
      CHECK(w <= wprev + 1e-12);
      // linear shrink certificate via the pinned tau
      double tau = (rows[i].upper / rows[i].lower - 1.0) / rows[i].delta;
      CHECK(w <= tau * rows[i].delta * rows[i].p_delta + 1e-9);
    }
  }
  double w_first = rows.front().upper - rows.front().lower;
  double w_last = rows.back().upper - rows.back().lower;
  CHECK(w_last <= 0.5 * w_first);

  // one-element sweep equals a direct solve
  auto one = delta_sweep(a0, disk_lift, {0.25});
  mesh::Mesh m = mesh::build_mesh(disk_lift, 0.25);
  DiscretizedSolve s = solve_discretized(a0, disk_lift, m);
  CHECK(one.at(0).p_delta ==
        Catch::Approx(s.solution.primal_value).margin(1e-12));

  // polytopal sweep: constant column
  theories::TheorySpec box = theories::box_world();
  auto brows = delta_sweep(box.reference_protocols[0].alice_triple[0],
                           box.strategy_set, {0.5, 0.25});
  REQUIRE(brows.size() == 2);
  CHECK(brows[0].p_delta == Catch::Approx(brows[1].p_delta).margin(1e-9));

  std::ostringstream csv;
  write_sweep_csv(rows, csv);
  CHECK(csv.str().rfind("delta,p_delta,lower,upper,gap,status\n", 0) == 0);
}

TEST_CASE("dual weights reconstruct a feasible dual point") {
  theories::TheorySpec t = theories::polygon(5);
  const auto& proto = t.reference_protocols.front();
  mesh::Mesh m = mesh::extreme_point_mesh(t.strategy_set);
  DiscretizedSolve s =
      solve_discretized(proto.alice_triple[0], t.strategy_set, m);
  REQUIRE(s.solution.status == conesolver::SolveStatus::Optimal);

  // sum of weights equals the optimum; the weighted mesh combination minus
  // the objective lies in the cone generated by the strategy set
  double total = 0.0;
  Vec combo = Vec::Zero(3);
  for (auto& [idx, w] : s.solution.dual_weights) {
    CHECK(w >= 0.0);
    total += w;
    combo += w * m.points.row(idx).transpose();
  }
  CHECK(total == Catch::Approx(s.solution.primal_value).margin(1e-9));
  Vec slack = combo - proto.alice_triple[0];
  // membership in cone(vertices): solve tiny nonnegative fit
  conesolver::ConeProgram fit;
  const Mat& gens = t.strategy_set.points;
  const int k = static_cast<int>(gens.rows());
  fit.objective = Vec::Zero(k);
  Mat rows(6, k);
  rows.topRows(3) = gens.transpose();
  rows.bottomRows(3) = -gens.transpose();
  fit.halfspace_normals = rows;
  fit.halfspace_offsets = Vec(6);
  fit.halfspace_offsets.head(3) = slack;
  fit.halfspace_offsets.tail(3) = -slack;
  fit.cone_normals = Mat::Identity(k, k);
  auto fs = conesolver::solve_cone_program(fit);
  CHECK(fs.status == conesolver::SolveStatus::Optimal);
}
