#pragma once

// Discretization of the semi-infinite cheating program into finite cone
// programs, the dual program, the certified sandwich enclosure, and
// convergence sweeps over a decreasing fineness schedule.
//
// The discretized primal maximizes <objective, W> subject to
//   <X, W> <= 1 for mesh points X  (polar rows) and
//   W in the dual-cone rows (cone rows, offset 0).
// For polytopal constraint sets the cone rows are the exact vertex normals
// and the enclosure constant is tau. For smooth sets the cone itself is
// discretized by the mesh; shifting a feasible point by tau*delta times the
// unit height functional restores exact feasibility, which certifies the
// enclosure with constant 2*tau. The enclosure stores whichever constant it
// was certified with.

#include <flipcert/conesolver.hpp>
#include <flipcert/geometry.hpp>
#include <flipcert/mesh.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace flipcert {
namespace sip {

struct SandwichEnclosure {
  double p_delta = 0.0;
  double lower = 0.0;  // p_delta / (1 + tau*delta)
  double upper = 0.0;  // p_delta
  double tau = 0.0;    // the certified enclosure constant
  double delta = 0.0;
};

inline SandwichEnclosure make_enclosure(double p_delta, double tau,
                                        double delta) {
  SandwichEnclosure e;
  e.p_delta = p_delta;
  e.tau = tau;
  e.delta = delta;
  e.lower = p_delta / (1.0 + tau * delta);
  e.upper = p_delta;
  return e;
}

enum class RowsMode { AllMeshPoints, SupportOnly };

// Finite relaxation of the cheating program over the given mesh. One
// offset-1 row per mesh point (or per support point, which generates the
// same feasible set), plus the cone rows of a_star.
inline conesolver::ConeProgram build_discretized_primal(
    const Vec& objective, const mesh::Mesh& m, const geometry::Cone& a_star,
    RowsMode mode = RowsMode::AllMeshPoints) {
  if (a_star.kind != geometry::ConeKind::HalfspaceNormals)
    throw std::invalid_argument(
        "build_discretized_primal: cone must be in halfspace-normal form");
  const int n = static_cast<int>(m.points.cols());
  if (objective.size() != n || a_star.vectors.cols() != n)
    throw std::invalid_argument("build_discretized_primal: dimension mismatch");

  conesolver::ConeProgram p;
  p.objective = objective;
  if (mode == RowsMode::AllMeshPoints) {
    p.halfspace_normals = m.points;
  } else {
    Mat rows(m.support_indices.size(), n);
    for (size_t i = 0; i < m.support_indices.size(); ++i)
      rows.row(i) = m.points.row(m.support_indices[i]);
    p.halfspace_normals = std::move(rows);
  }
  p.halfspace_offsets = Vec::Ones(p.halfspace_normals.rows());
  p.cone_normals = a_star.vectors;
  return p;
}

// Dual of the discretized program: minimize sum y_X subject to
// sum y_X X - objective in the cone generated by the primal's cone rows,
// y >= 0. Expressed as an equivalent maximization of -sum y. Desk scale:
// the nonnegativity rows are materialized densely.
inline conesolver::ConeProgram build_dual(const conesolver::ConeProgram& p,
                                          const Vec& objective,
                                          const mesh::Mesh& m) {
  (void)m;
  const int n = p.dim();
  const int R = p.num_halfspace_rows();
  const int C = p.num_cone_rows();
  if (R + C > 3000)
    throw std::invalid_argument("build_dual: instance above desk scale");

  conesolver::ConeProgram d;
  d.objective = Vec::Zero(R + C);
  d.objective.head(R).setConstant(-1.0);
  // equality sum y_X X - G mu = objective as two inequality blocks
  Mat eq(n, R + C);
  eq.leftCols(R) = p.halfspace_normals.transpose();
  eq.rightCols(C) = -p.cone_normals.transpose();
  d.halfspace_normals = Mat(2 * n, R + C);
  d.halfspace_normals.topRows(n) = eq;
  d.halfspace_normals.bottomRows(n) = -eq;
  d.halfspace_offsets = Vec(2 * n);
  d.halfspace_offsets.head(n) = objective;
  d.halfspace_offsets.tail(n) = -objective;
  d.cone_normals = Mat::Identity(R + C, R + C);
  return d;
}

struct DiscretizedSolve {
  conesolver::ProgramSolution solution;  // dual_weights keyed by mesh index
  SandwichEnclosure enclosure;
  RowsMode rows_mode = RowsMode::SupportOnly;
  bool cone_exact = false;  // cone rows are the exact dual cone
};

// Solve the discretized cheating program for one objective over the given
// constraint set and mesh. Returns the solution plus the sandwich enclosure
// bracketing the semi-infinite optimum.
inline DiscretizedSolve solve_discretized(const Vec& objective,
                                          const geometry::ConvexBody& body,
                                          const mesh::Mesh& m,
                                          RowsMode mode = RowsMode::SupportOnly) {
  DiscretizedSolve out;
  out.rows_mode = mode;

  geometry::Cone a_star;
  if (body.kind == geometry::BodyKind::VertexHull) {
    a_star = geometry::dual_cone(body);
    out.cone_exact = true;
  } else if (body.kind == geometry::BodyKind::HalfspaceIntersection) {
    a_star = geometry::dual_cone(
        geometry::ConvexBody::vertex_hull(geometry::extreme_points(body)));
    out.cone_exact = true;
  } else {
    // smooth set: the mesh support points double as cone rows
    Mat rows(m.support_indices.size(), m.points.cols());
    for (size_t i = 0; i < m.support_indices.size(); ++i)
      rows.row(i) = m.points.row(m.support_indices[i]);
    a_star = geometry::Cone::halfspace_normals(std::move(rows));
    out.cone_exact = false;
  }

  conesolver::ConeProgram p = build_discretized_primal(objective, m, a_star, mode);
  conesolver::ProgramSolution s = conesolver::solve_cone_program(p);

  if (s.status == conesolver::SolveStatus::Optimal) {
    // re-key dual weights from program rows to mesh point indices
    std::map<int, double> rekeyed;
    for (auto& [row, w] : s.dual_weights) {
      int mesh_idx = mode == RowsMode::SupportOnly ? m.support_indices[row] : row;
      rekeyed[mesh_idx] = w;
    }
    s.dual_weights = std::move(rekeyed);
    double tau_eff = out.cone_exact ? m.tau : 2.0 * m.tau;
    out.enclosure = make_enclosure(s.primal_value, tau_eff, m.delta);
    if (out.cone_exact && m.covers_extreme_points) {
      // exact rows and exact cone: the feasible region equals the closure
      // itself and the optimum is the semi-infinite value, width zero
      out.enclosure.lower = out.enclosure.upper;
    }
  }
  out.solution = std::move(s);
  return out;
}

struct SweepRow {
  double delta = 0.0;
  double p_delta = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double gap = 0.0;
  conesolver::SolveStatus status = conesolver::SolveStatus::NumericalFailure;
};

// Solve the discretized program along a strictly decreasing delta schedule
// with nested meshes. The basis (hence tau) is pinned from the coarsest
// mesh so the interval widths are monotone in delta. A solve failure aborts
// the sweep; the partial rows keep their failed status.
inline std::vector<SweepRow> delta_sweep(const Vec& objective,
                                         const geometry::ConvexBody& body,
                                         const std::vector<double>& deltas,
                                         RowsMode mode = RowsMode::SupportOnly) {
  if (deltas.empty()) throw std::invalid_argument("delta_sweep: empty schedule");
  for (size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] <= 0)
      throw std::invalid_argument("delta_sweep: deltas must be positive");
    if (i > 0 && deltas[i] >= deltas[i - 1])
      throw std::invalid_argument("delta_sweep: deltas must be strictly decreasing");
  }

  std::vector<SweepRow> rows;
  Mat pinned_basis;  // rows of the coarsest mesh's basis points
  double pinned_tau = 0.0;

  for (size_t k = 0; k < deltas.size(); ++k) {
    mesh::Mesh m = mesh::build_mesh(body, deltas[k]);
    if (k == 0) {
      pinned_basis = Mat(m.basis_indices.size(), m.points.cols());
      for (size_t i = 0; i < m.basis_indices.size(); ++i)
        pinned_basis.row(i) = m.points.row(m.basis_indices[i]);
      pinned_tau = m.tau;
    } else {
      // nested meshes contain the coarse basis points bitwise; reuse them
      std::vector<int> idx;
      for (int i = 0; i < pinned_basis.rows(); ++i) {
        int found = -1;
        for (int r = 0; r < m.points.rows() && found < 0; ++r) {
          bool same = true;
          for (int c = 0; c < m.points.cols() && same; ++c)
            same = m.points(r, c) == pinned_basis(i, c);
          if (same) found = r;
        }
        if (found < 0) break;
        idx.push_back(found);
      }
      if (static_cast<int>(idx.size()) == pinned_basis.rows()) {
        m.basis_indices = idx;
        m.tau = pinned_tau;
      }
    }

    DiscretizedSolve ds = solve_discretized(objective, body, m, mode);
    SweepRow row;
    row.delta = deltas[k];
    row.status = ds.solution.status;
    if (ds.solution.status == conesolver::SolveStatus::Optimal) {
      row.p_delta = ds.enclosure.p_delta;
      row.lower = ds.enclosure.lower;
      row.upper = ds.enclosure.upper;
      row.gap = ds.solution.gap;
    }
    rows.push_back(row);
    if (row.status != conesolver::SolveStatus::Optimal) break;  // abort, keep partial
  }
  return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "delta,p_delta,lower,upper,gap,status\n";
  for (const SweepRow& r : rows) {
    os << format_double(r.delta) << ',' << format_double(r.p_delta) << ','
       << format_double(r.lower) << ',' << format_double(r.upper) << ','
       << format_double(r.gap) << ',' << conesolver::to_string(r.status)
       << '\n';
  }
}

}  // namespace sip
}  // namespace flipcert
