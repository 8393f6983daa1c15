#include <catch2/catch_amalgamated.hpp>

#include <flipcert/conesolver.hpp>

#include "oracles.hpp"

#include <random>

using namespace flipcert;
using namespace flipcert::conesolver;

namespace {

ConeProgram tiny_interval() {
  // max x  s.t.  x <= 1,  x >= 0
  ConeProgram p;
  p.objective = make_vec({1.0});
  p.halfspace_normals = Mat::Ones(1, 1);
  p.halfspace_offsets = Vec::Ones(1);
  p.cone_normals = Mat::Ones(1, 1);
  return p;
}

struct RandomLp {
  ConeProgram program;
  oracles::IneqLP<oracles::Rat> exact;
};

// Bounded feasible LP with small integer data: full box rows plus a few
// random cuts, origin always feasible.
RandomLp random_bounded_lp(Rng& rng) {
  std::uniform_int_distribution<int> dim_dist(2, 6);
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> bound(1, 5);
  std::uniform_int_distribution<int> extra_rows(1, 6);
  std::uniform_int_distribution<int> obj(-5, 5);

  const int n = dim_dist(rng);
  const int extras = extra_rows(rng);
  const int m = 2 * n + extras;

  RandomLp out;
  out.program.objective = Vec::Zero(n);
  out.program.halfspace_normals = Mat::Zero(m, n);
  out.program.halfspace_offsets = Vec::Zero(m);
  out.program.cone_normals = Mat(0, n);
  out.exact.normals.assign(m, std::vector<oracles::Rat>(n, oracles::Rat(0)));
  out.exact.offsets.assign(m, oracles::Rat(0));
  out.exact.objective.assign(n, oracles::Rat(0));

  for (int i = 0; i < n; ++i) {
    int u = bound(rng), l = bound(rng);
    out.program.halfspace_normals(2 * i, i) = 1.0;
    out.program.halfspace_offsets(2 * i) = u;
    out.program.halfspace_normals(2 * i + 1, i) = -1.0;
    out.program.halfspace_offsets(2 * i + 1) = l;
    out.exact.normals[2 * i][i] = oracles::Rat(1);
    out.exact.offsets[2 * i] = oracles::Rat(u);
    out.exact.normals[2 * i + 1][i] = oracles::Rat(-1);
    out.exact.offsets[2 * i + 1] = oracles::Rat(l);
  }
  for (int r = 2 * n; r < m; ++r) {
    int off = bound(rng) + 2;
    out.program.halfspace_offsets(r) = off;
    out.exact.offsets[r] = oracles::Rat(off);
    for (int j = 0; j < n; ++j) {
      int c = coef(rng);
      out.program.halfspace_normals(r, j) = c;
      out.exact.normals[r][j] = oracles::Rat(c);
    }
  }
  for (int j = 0; j < n; ++j) {
    int c = obj(rng);
    out.program.objective[j] = c;
    out.exact.objective[j] = oracles::Rat(c);
  }
  return out;
}

}  // namespace

TEST_CASE("interval program: value, binding dual weight") {
  ConeProgram p = tiny_interval();
  ProgramSolution s = solve_cone_program(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(s.dual_weights.count(0) == 1);
  CHECK(s.dual_weights.at(0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(s.gap <= 1e-9);
  CHECK(s.comp_slack_residual <= 1e-7);
}

TEST_CASE("duplicated rows: terminates, value unchanged") {
  ConeProgram p;
  p.objective = make_vec({1.0, 1.0});
  p.halfspace_normals = Mat(3, 2);
  p.halfspace_normals << 1, 1, 1, 1, 1, 1;
  p.halfspace_offsets = Vec::Ones(3);
  p.cone_normals = Mat::Identity(2, 2);
  ProgramSolution s = solve_cone_program(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("zero objective over region containing 0 gives 0") {
  ConeProgram p = tiny_interval();
  p.objective = Vec::Zero(1);
  ProgramSolution s = solve_cone_program(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value == 0.0);
}

TEST_CASE("to_standard_form: slack counting and pull-back") {
  ConeProgram p;
  p.objective = make_vec({1.0, 2.0});
  p.halfspace_normals = Mat(3, 2);
  p.halfspace_normals << 1, 0, 0, 1, 1, 1;
  p.halfspace_offsets = make_vec({1.0, 1.0, 1.5});
  p.cone_normals = Mat(0, 2);

  StandardForm sf = to_standard_form(p);
  CHECK(sf.constraint_matrix.rows() == 3);
  CHECK(sf.constraint_matrix.cols() == 5);  // 2 vars + 3 slacks
  CHECK(sf.var_tags[0] == VarTag::Free);
  CHECK(sf.var_tags[2] == VarTag::Nonnegative);

  ProgramSolution via_sf = solve_lp(sf);
  REQUIRE(via_sf.status == SolveStatus::Optimal);
  Vec x = pull_back(sf, via_sf);
  // pulled-back point satisfies the original rows
  Vec resid = p.halfspace_normals * x - p.halfspace_offsets;
  CHECK(resid.maxCoeff() <= 1e-9);

  ProgramSolution direct = solve_cone_program(p);
  REQUIRE(direct.status == SolveStatus::Optimal);
  CHECK(via_sf.primal_value ==
        Catch::Approx(direct.primal_value).margin(1e-9));
}

TEST_CASE("infeasible program reports a certificate") {
  ConeProgram p;
  p.objective = make_vec({1.0});
  p.halfspace_normals = Mat(1, 1);
  p.halfspace_normals << 1;
  p.halfspace_offsets = make_vec({-1.0});  // x <= -1
  p.cone_normals = Mat::Ones(1, 1);        // x >= 0
  ProgramSolution s = solve_cone_program(p);
  CHECK(s.status == SolveStatus::Infeasible);
  CHECK(s.farkas.size() > 0);
}

TEST_CASE("unbounded direction reported as numerical failure with note") {
  ConeProgram p;
  p.objective = make_vec({1.0});
  p.halfspace_normals = Mat(1, 1);
  p.halfspace_normals << -1;  // -x <= 0
  p.halfspace_offsets = Vec::Zero(1);
  p.cone_normals = Mat(0, 1);
  ProgramSolution s = solve_cone_program(p);
  CHECK(s.status == SolveStatus::NumericalFailure);
  CHECK(s.note.find("unbounded") != std::string::npos);
}

TEST_CASE("100 random bounded LPs match the rational vertex oracle") {
  Rng rng(20240811u);
  for (int trial = 0; trial < 100; ++trial) {
    RandomLp lp = random_bounded_lp(rng);

    auto oracle = oracles::lp_vertex_oracle<oracles::Rat>(lp.exact);
    REQUIRE(oracle.found);

    ProgramSolution direct = solve_cone_program(lp.program);
    REQUIRE(direct.status == SolveStatus::Optimal);
    CHECK(direct.primal_value ==
          Catch::Approx(oracle.value.to_double()).margin(1e-8));

    // certificates on every solve
    CHECK(direct.gap <= 1e-9);
    CHECK(direct.primal_residual <= 1e-9);
    CHECK(direct.dual_residual <= 1e-9);
    CHECK(direct.comp_slack_residual <= 1e-7);
    CHECK(direct.dual_value >= direct.primal_value - 1e-9);

    // standard-form path agrees
    ProgramSolution via_sf = solve_lp(to_standard_form(lp.program));
    REQUIRE(via_sf.status == SolveStatus::Optimal);
    CHECK(via_sf.primal_value ==
          Catch::Approx(oracle.value.to_double()).margin(1e-8));
  }
}

TEST_CASE("determinism: identical inputs, bitwise-identical summaries") {
  Rng rng(7u);
  RandomLp lp = random_bounded_lp(rng);
  ProgramSolution a = solve_cone_program(lp.program);
  ProgramSolution b = solve_cone_program(lp.program);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(a.primal_value == b.primal_value);
  CHECK(a.dual_value == b.dual_value);
  CHECK(a.primal_point == b.primal_point);
  CHECK(a.row_duals == b.row_duals);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("objective scaling covariance") {
  Rng rng(99u);
  RandomLp lp = random_bounded_lp(rng);
  ProgramSolution base = solve_cone_program(lp.program);
  REQUIRE(base.status == SolveStatus::Optimal);
  ConeProgram scaled = lp.program;
  scaled.objective *= 3.5;
  ProgramSolution s = solve_cone_program(scaled);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.primal_value ==
        Catch::Approx(3.5 * base.primal_value).margin(1e-12));
  CHECK((s.primal_point - base.primal_point).norm() <= 1e-9);
}

TEST_CASE("standard form dump has the documented grammar") {
  ConeProgram p = tiny_interval();
  StandardForm sf = to_standard_form(p);
  std::string text = dump_standard_form(sf);
  CHECK(text.rfind("standardform 2 3", 0) == 0);
  CHECK(text.find("\ncost ") != std::string::npos);
  CHECK(text.find("\ntags F N N") != std::string::npos);
  CHECK(text.find("\nrow ") != std::string::npos);
}
