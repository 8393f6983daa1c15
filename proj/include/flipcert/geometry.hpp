#pragma once

// Desk-scale convex bodies and cones: representations, membership, polarity,
// dual cones, closure of a strategy set under the no-restriction hypothesis,
// Chebyshev centers, extreme points, and sampling.
//
// Bodies are immutable after construction and all operations are pure.

#include <flipcert/conesolver.hpp>
#include <flipcert/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace flipcert {
namespace geometry {

enum class BodyKind {
  VertexHull,
  HalfspaceIntersection,
  Ball,
  LiftedBall,  // conv({0} u {1} x rB) in ambient dim d: {(t,y): 0<=t<=1, |y|<=r t}
  Bicone,      // {(t,y): 0<=t<=1, |y| <= 2*rho*min(t,1-t)}; equator radius rho
};

struct ConvexBody {
  BodyKind kind = BodyKind::VertexHull;
  int dim = 0;
  Mat points;   // VertexHull: one vertex per row
  Mat normals;  // HalfspaceIntersection: rows n with <n,x> <= offset
  Vec offsets;
  Vec center;  // Ball
  double radius = 0.0;  // Ball / LiftedBall base radius / Bicone equator radius

  static ConvexBody vertex_hull(Mat pts) {
    if (pts.rows() < 1) throw std::invalid_argument("vertex_hull: no points");
    if (!pts.allFinite())
      throw std::invalid_argument("vertex_hull: non-finite coordinate");
    ConvexBody b;
    b.kind = BodyKind::VertexHull;
    b.dim = static_cast<int>(pts.cols());
    b.points = std::move(pts);
    return b;
  }

  static ConvexBody halfspaces(Mat rows, Vec offs) {
    if (rows.rows() != offs.size())
      throw std::invalid_argument("halfspaces: row/offset mismatch");
    ConvexBody b;
    b.kind = BodyKind::HalfspaceIntersection;
    b.dim = static_cast<int>(rows.cols());
    b.normals = std::move(rows);
    b.offsets = std::move(offs);
    return b;
  }

  static ConvexBody ball(Vec c, double r) {
    if (r < 0) throw std::invalid_argument("ball: negative radius");
    ConvexBody b;
    b.kind = BodyKind::Ball;
    b.dim = static_cast<int>(c.size());
    b.center = std::move(c);
    b.radius = r;
    return b;
  }

  static ConvexBody lifted_ball(double r, int ambient_dim) {
    if (r <= 0 || ambient_dim < 2)
      throw std::invalid_argument("lifted_ball: bad parameters");
    ConvexBody b;
    b.kind = BodyKind::LiftedBall;
    b.dim = ambient_dim;
    b.radius = r;
    return b;
  }

  static ConvexBody bicone(double rho, int ambient_dim) {
    if (rho <= 0 || ambient_dim < 2)
      throw std::invalid_argument("bicone: bad parameters");
    ConvexBody b;
    b.kind = BodyKind::Bicone;
    b.dim = ambient_dim;
    b.radius = rho;
    return b;
  }
};

enum class ConeKind { Generators, HalfspaceNormals };

struct Cone {
  ConeKind kind = ConeKind::Generators;
  Mat vectors;  // one ray / one inward normal per row

  static Cone generators(Mat rays) { return Cone{ConeKind::Generators, std::move(rays)}; }
  static Cone halfspace_normals(Mat n) {
    return Cone{ConeKind::HalfspaceNormals, std::move(n)};
  }
};

// ---------------------------------------------------------------------------
// lifting

// Sub-strategy set over a state space: conv({0} u {1} x base).
inline ConvexBody lift_of(const ConvexBody& base) {
  if (base.kind == BodyKind::VertexHull) {
    const int k = static_cast<int>(base.points.rows());
    Mat pts = Mat::Zero(k + 1, base.dim + 1);
    for (int i = 0; i < k; ++i) {
      pts(i + 1, 0) = 1.0;
      pts.block(i + 1, 1, 1, base.dim) = base.points.row(i);
    }
    return ConvexBody::vertex_hull(std::move(pts));
  }
  if (base.kind == BodyKind::Ball) {
    if (base.center.cwiseAbs().maxCoeff() > 0)
      throw std::invalid_argument("lift_of: ball base must be centered");
    return ConvexBody::lifted_ball(base.radius, base.dim + 1);
  }
  throw std::invalid_argument("lift_of: unsupported base representation");
}

// ---------------------------------------------------------------------------
// support function and membership

inline double support(const ConvexBody& c, const Vec& w) {
  if (w.size() != c.dim) throw std::invalid_argument("support: dimension mismatch");
  switch (c.kind) {
    case BodyKind::VertexHull:
      return (c.points * w).maxCoeff();
    case BodyKind::Ball:
      return c.center.dot(w) + c.radius * w.norm();
    case BodyKind::LiftedBall:
      return std::max(0.0, w[0] + c.radius * w.tail(c.dim - 1).norm());
    case BodyKind::Bicone: {
      double s = w.tail(c.dim - 1).norm();
      return std::max({0.0, w[0], 0.5 * w[0] + c.radius * s});
    }
    case BodyKind::HalfspaceIntersection: {
      conesolver::ConeProgram p;
      p.objective = w;
      p.halfspace_normals = c.normals;
      p.halfspace_offsets = c.offsets;
      p.cone_normals = Mat(0, c.dim);
      conesolver::ProgramSolution s = conesolver::solve_cone_program(p);
      if (s.status != conesolver::SolveStatus::Optimal)
        throw std::runtime_error("support: LP failed (" + s.note + ")");
      return s.primal_value;
    }
  }
  throw std::logic_error("support: unreachable");
}

// Signed violation of membership, >= 0, zero inside. Halfspace and smooth
// bodies use per-surface signed violations; vertex hulls solve a small
// feasibility program whose optimum is the least componentwise deviation
// from the hull.
inline double membership_gap(const ConvexBody& c, const Vec& x) {
  if (x.size() != c.dim)
    throw std::invalid_argument("membership: dimension mismatch");
  switch (c.kind) {
    case BodyKind::HalfspaceIntersection: {
      double worst = 0.0;
      for (int i = 0; i < c.normals.rows(); ++i) {
        double nn = c.normals.row(i).norm();
        if (nn == 0) continue;
        worst = std::max(worst, (c.normals.row(i).dot(x) - c.offsets[i]) / nn);
      }
      return std::max(0.0, worst);
    }
    case BodyKind::Ball:
      return std::max(0.0, (x - c.center).norm() - c.radius);
    case BodyKind::LiftedBall: {
      double t = x[0];
      double s = x.tail(c.dim - 1).norm();
      double viol = std::max({-t, t - 1.0,
                              (s - c.radius * t) / std::sqrt(1.0 + c.radius * c.radius)});
      return std::max(0.0, viol);
    }
    case BodyKind::Bicone: {
      double t = x[0];
      double s = x.tail(c.dim - 1).norm();
      double den = std::sqrt(1.0 + 4.0 * c.radius * c.radius);
      double viol = std::max((s - 2.0 * c.radius * t) / den,
                             (s - 2.0 * c.radius * (1.0 - t)) / den);
      return std::max(0.0, viol);
    }
    case BodyKind::VertexHull: {
      // min t  s.t.  |x - P^T lam|_inf <= t, sum lam = 1, lam >= 0
      const int k = static_cast<int>(c.points.rows());
      const int n = c.dim;
      conesolver::ConeProgram p;
      p.objective = Vec::Zero(k + 1);
      p.objective[k] = -1.0;
      Mat rows(2 * n + 2, k + 1);
      Vec offs(2 * n + 2);
      for (int d = 0; d < n; ++d) {
        for (int i = 0; i < k; ++i) {
          rows(2 * d, i) = c.points(i, d);
          rows(2 * d + 1, i) = -c.points(i, d);
        }
        rows(2 * d, k) = -1.0;
        rows(2 * d + 1, k) = -1.0;
        offs[2 * d] = x[d];
        offs[2 * d + 1] = -x[d];
      }
      for (int i = 0; i < k; ++i) {
        rows(2 * n, i) = 1.0;
        rows(2 * n + 1, i) = -1.0;
      }
      rows(2 * n, k) = rows(2 * n + 1, k) = 0.0;
      offs[2 * n] = 1.0;
      offs[2 * n + 1] = -1.0;
      p.halfspace_normals = std::move(rows);
      p.halfspace_offsets = std::move(offs);
      p.cone_normals = Mat::Identity(k + 1, k + 1);
      conesolver::ProgramSolution s = conesolver::solve_cone_program(p);
      if (s.status != conesolver::SolveStatus::Optimal)
        throw std::runtime_error("membership: feasibility program failed");
      return std::max(0.0, -s.primal_value);
    }
  }
  throw std::logic_error("membership_gap: unreachable");
}

inline bool membership(const ConvexBody& c, const Vec& x, double tol) {
  if (tol <= 0) throw std::invalid_argument("membership: tol must be positive");
  return membership_gap(c, x) <= tol;
}

// ---------------------------------------------------------------------------
// polarity and dual cones

// Polar set {W : <W,Z> <= 1 for all Z in c}.
inline ConvexBody polar(const ConvexBody& c) {
  switch (c.kind) {
    case BodyKind::VertexHull: {
      if (!membership(c, Vec::Zero(c.dim), 1e-9))
        throw std::invalid_argument("polar: body must contain the origin");
      Vec ones = Vec::Ones(c.points.rows());
      return ConvexBody::halfspaces(c.points, ones);
    }
    case BodyKind::Ball: {
      if (c.center.cwiseAbs().maxCoeff() > 0 || c.radius <= 0)
        throw std::invalid_argument("polar: only centered balls supported");
      return ConvexBody::ball(Vec::Zero(c.dim), 1.0 / c.radius);
    }
    case BodyKind::HalfspaceIntersection: {
      // conv of n_i / o_i; requires the origin strictly inside
      const int m = static_cast<int>(c.normals.rows());
      Mat pts(m, c.dim);
      for (int i = 0; i < m; ++i) {
        if (c.offsets[i] <= 1e-12)
          throw std::invalid_argument(
              "polar: origin not interior, polar unbounded");
        pts.row(i) = c.normals.row(i) / c.offsets[i];
      }
      return ConvexBody::vertex_hull(std::move(pts));
    }
    default:
      throw std::invalid_argument("polar: unsupported representation");
  }
}

// Dual cone {W : <W,Z> >= 0 for all Z in c}.
inline Cone dual_cone(const ConvexBody& c) {
  if (c.kind != BodyKind::VertexHull)
    throw std::invalid_argument(
        "dual_cone: only polytopal bodies have a finite normal description");
  return Cone::halfspace_normals(c.points);
}

inline Cone dual_cone(const Cone& k) {
  // dual of {x : N x >= 0} is cone(N^T); dual of cone(G) is {x : G x >= 0}
  if (k.kind == ConeKind::Generators) return Cone::halfspace_normals(k.vectors);
  return Cone::generators(k.vectors);
}

// Extreme rays of {x : N x >= 0} (pointed, dim <= 4), unit-normalized.
inline Mat cone_rays(const Cone& k) {
  if (k.kind != ConeKind::HalfspaceNormals)
    throw std::invalid_argument("cone_rays: expected halfspace normals");
  const Mat& n = k.vectors;
  const int m = static_cast<int>(n.rows());
  const int d = static_cast<int>(n.cols());
  if (d > 4) throw std::invalid_argument("cone_rays: dimension above desk scale");
  std::vector<Vec> rays;
  std::vector<int> idx(d - 1);

  auto consider = [&](const Vec& r0) {
    Vec r = r0;
    double nn = r.norm();
    if (nn < 1e-12) return;
    r /= nn;
    for (int sgn = 0; sgn < 2; ++sgn, r = -r) {
      Vec vals = n * r;
      if (vals.minCoeff() < -1e-9) continue;
      // active set must have rank d-1 for an extreme ray
      std::vector<int> active;
      for (int i = 0; i < m; ++i)
        if (std::abs(vals[i]) <= 1e-9) active.push_back(i);
      Mat asub(active.size(), d);
      for (size_t i = 0; i < active.size(); ++i) asub.row(i) = n.row(active[i]);
      Eigen::FullPivLU<Mat> lu(asub);
      lu.setThreshold(1e-9);
      if (lu.rank() != d - 1) continue;
      bool dup = false;
      for (const Vec& q : rays)
        if ((q - r).norm() <= 1e-8) {
          dup = true;
          break;
        }
      if (!dup) rays.push_back(r);
    }
  };

  if (d == 1) {
    consider(Vec::Ones(1));
  } else {
    for (int i = 0; i < d - 1; ++i) idx[i] = i;
    if (m >= d - 1) {
      while (true) {
        Mat sub(d - 1, d);
        for (int i = 0; i < d - 1; ++i) sub.row(i) = n.row(idx[i]);
        Eigen::FullPivLU<Mat> lu(sub);
        lu.setThreshold(1e-9);
        if (lu.dimensionOfKernel() == 1) consider(lu.kernel().col(0));
        int t = d - 2;
        while (t >= 0 && idx[t] == m - (d - 1) + t) --t;
        if (t < 0) break;
        ++idx[t];
        for (int j = t + 1; j < d - 1; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
  }
  Mat out(rays.size(), d);
  for (size_t i = 0; i < rays.size(); ++i) out.row(i) = rays[i];
  return out;
}

// Closure of a strategy set under the generalized no-restriction hypothesis
// for the other party: dual_cone(a) intersect polar(a).
inline ConvexBody gnrh_closure(const ConvexBody& a) {
  if (a.kind == BodyKind::LiftedBall)
    return ConvexBody::bicone(0.5 / a.radius, a.dim);
  if (a.kind != BodyKind::VertexHull)
    throw std::invalid_argument("gnrh_closure: unsupported representation");
  const int k = static_cast<int>(a.points.rows());
  Mat rows(2 * k, a.dim);
  Vec offs(2 * k);
  rows.topRows(k) = -a.points;  // cone rows <v,W> >= 0
  offs.head(k).setZero();
  rows.bottomRows(k) = a.points;  // polar rows <v,W> <= 1
  offs.tail(k).setOnes();
  ConvexBody b = ConvexBody::halfspaces(std::move(rows), std::move(offs));
  for (int j = 0; j < a.dim; ++j) {
    for (double sgn : {1.0, -1.0}) {
      Vec dir = Vec::Zero(a.dim);
      dir[j] = sgn;
      conesolver::ConeProgram p;
      p.objective = dir;
      p.halfspace_normals = b.normals;
      p.halfspace_offsets = b.offsets;
      p.cone_normals = Mat(0, a.dim);
      conesolver::ProgramSolution s = conesolver::solve_cone_program(p);
      if (s.status != conesolver::SolveStatus::Optimal)
        throw std::invalid_argument(
            "gnrh_closure: unbounded result, degenerate strategy set");
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// interior points (Chebyshev centers)

inline Mat facet_enumeration(const ConvexBody& c);  // fwd

// Center of the largest inscribed ball. Deterministic.
inline Vec interior_point(const ConvexBody& c) {
  switch (c.kind) {
    case BodyKind::Ball:
      return c.center;
    case BodyKind::LiftedBall: {
      double s = std::sqrt(1.0 + c.radius * c.radius);
      double t0 = s / (s + c.radius);
      Vec x = Vec::Zero(c.dim);
      x[0] = t0;
      return x;
    }
    case BodyKind::Bicone: {
      Vec x = Vec::Zero(c.dim);
      x[0] = 0.5;
      return x;
    }
    case BodyKind::VertexHull: {
      Mat rows = facet_enumeration(c);
      ConvexBody h = ConvexBody::halfspaces(rows.leftCols(c.dim),
                                            rows.col(c.dim));
      return interior_point(h);
    }
    case BodyKind::HalfspaceIntersection: {
      // max rad  s.t.  <n_i,x> + |n_i| rad <= o_i, rad >= 0
      const int m = static_cast<int>(c.normals.rows());
      const int n = c.dim;
      conesolver::ConeProgram p;
      p.objective = Vec::Zero(n + 1);
      p.objective[n] = 1.0;
      p.halfspace_normals = Mat::Zero(m, n + 1);
      p.halfspace_normals.leftCols(n) = c.normals;
      for (int i = 0; i < m; ++i)
        p.halfspace_normals(i, n) = c.normals.row(i).norm();
      p.halfspace_offsets = c.offsets;
      p.cone_normals = Mat::Zero(1, n + 1);
      p.cone_normals(0, n) = 1.0;
      conesolver::ProgramSolution s = conesolver::solve_cone_program(p);
      if (s.status != conesolver::SolveStatus::Optimal)
        throw std::runtime_error("interior_point: Chebyshev program failed (" +
                                 s.note + ")");
      if (s.primal_value <= 1e-9)
        throw std::invalid_argument("interior_point: empty interior within tolerance");
      return s.primal_point.head(n);
    }
  }
  throw std::logic_error("interior_point: unreachable");
}

inline double chebyshev_radius(const ConvexBody& c) {
  switch (c.kind) {
    case BodyKind::Ball:
      return c.radius;
    case BodyKind::LiftedBall: {
      double s = std::sqrt(1.0 + c.radius * c.radius);
      return 1.0 - s / (s + c.radius);
    }
    case BodyKind::Bicone:
      return c.radius / std::sqrt(1.0 + 4.0 * c.radius * c.radius);
    case BodyKind::VertexHull: {
      Mat rows = facet_enumeration(c);
      ConvexBody h = ConvexBody::halfspaces(rows.leftCols(c.dim), rows.col(c.dim));
      return chebyshev_radius(h);
    }
    case BodyKind::HalfspaceIntersection: {
      Vec x = interior_point(c);
      double r = std::numeric_limits<double>::infinity();
      for (int i = 0; i < c.normals.rows(); ++i) {
        double nn = c.normals.row(i).norm();
        if (nn == 0) continue;
        r = std::min(r, (c.offsets[i] - c.normals.row(i).dot(x)) / nn);
      }
      return r;
    }
  }
  throw std::logic_error("chebyshev_radius: unreachable");
}

// ---------------------------------------------------------------------------
// extreme points and facets (polytopal, dim <= 4)

inline Mat dedup_rows(const Mat& rows, double tol) {
  std::vector<int> keep;
  for (int i = 0; i < rows.rows(); ++i) {
    bool dup = false;
    for (int j : keep)
      if ((rows.row(i) - rows.row(j)).norm() <= tol) {
        dup = true;
        break;
      }
    if (!dup) keep.push_back(i);
  }
  Mat out(keep.size(), rows.cols());
  for (size_t i = 0; i < keep.size(); ++i) out.row(i) = rows.row(keep[i]);
  return out;
}

// Minimal vertex list, deduplicated to 1e-8.
inline Mat extreme_points(const ConvexBody& c) {
  constexpr double kTol = 1e-8;
  if (c.kind == BodyKind::VertexHull) {
    Mat pts = dedup_rows(c.points, kTol);
    std::vector<int> keep;
    for (int i = 0; i < pts.rows(); ++i) {
      if (pts.rows() == 1) {
        keep.push_back(i);
        break;
      }
      Mat others(pts.rows() - 1, c.dim);
      int r = 0;
      for (int j = 0; j < pts.rows(); ++j)
        if (j != i) others.row(r++) = pts.row(j);
      if (!membership(ConvexBody::vertex_hull(others), pts.row(i).transpose(),
                      kTol))
        keep.push_back(i);
    }
    Mat out(keep.size(), c.dim);
    for (size_t i = 0; i < keep.size(); ++i) out.row(i) = pts.row(keep[i]);
    return out;
  }
  if (c.kind == BodyKind::HalfspaceIntersection) {
    if (c.dim > 4)
      throw std::invalid_argument("extreme_points: dimension above desk scale");
    const int m = static_cast<int>(c.normals.rows());
    const int d = c.dim;
    if (m < d) throw std::invalid_argument("extreme_points: unbounded region");
    std::vector<Vec> verts;
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    while (true) {
      Mat sub(d, d);
      Vec rhs(d);
      for (int i = 0; i < d; ++i) {
        sub.row(i) = c.normals.row(idx[i]);
        rhs[i] = c.offsets[idx[i]];
      }
      Eigen::FullPivLU<Mat> lu(sub);
      lu.setThreshold(1e-10);
      if (lu.isInvertible()) {
        Vec x = lu.solve(rhs);
        if ((c.normals * x - c.offsets).maxCoeff() <= 1e-9) {
          bool dup = false;
          for (const Vec& v : verts)
            if ((v - x).norm() <= kTol) {
              dup = true;
              break;
            }
          if (!dup) verts.push_back(x);
        }
      }
      int t = d - 1;
      while (t >= 0 && idx[t] == m - d + t) --t;
      if (t < 0) break;
      ++idx[t];
      for (int j = t + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
    Mat out(verts.size(), d);
    for (size_t i = 0; i < verts.size(); ++i) out.row(i) = verts[i];
    return out;
  }
  throw std::invalid_argument("extreme_points: non-polytopal representation");
}

// Facets of a full-dimensional vertex hull, dim <= 4.
// Returns rows [normal | offset] with unit normals.
inline Mat facet_enumeration(const ConvexBody& c) {
  if (c.kind != BodyKind::VertexHull)
    throw std::invalid_argument("facet_enumeration: expected vertex hull");
  if (c.dim > 4)
    throw std::invalid_argument("facet_enumeration: dimension above desk scale");
  Mat pts = dedup_rows(c.points, 1e-10);
  const int k = static_cast<int>(pts.rows());
  const int d = c.dim;
  if (k < d + 1)
    throw std::invalid_argument("facet_enumeration: body not full-dimensional");

  std::vector<Vec> rows;
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  while (true) {
    Mat diffs(d - 1, d);
    for (int i = 1; i < d; ++i) diffs.row(i - 1) = pts.row(idx[i]) - pts.row(idx[0]);
    Eigen::FullPivLU<Mat> lu(diffs);
    lu.setThreshold(1e-10);
    if (d == 1 || lu.dimensionOfKernel() == 1) {
      Vec n = d == 1 ? Vec::Ones(1) : Vec(lu.kernel().col(0));
      double nn = n.norm();
      if (nn > 1e-12) {
        n /= nn;
        double o = n.dot(pts.row(idx[0]));
        Vec vals = pts * n;
        for (int sgn = 0; sgn < 2; ++sgn, n = -n, o = -o, vals = -vals) {
          if ((vals.array() - o).maxCoeff() <= 1e-9) {
            Vec row(d + 1);
            row.head(d) = n;
            row[d] = o;
            bool dup = false;
            for (const Vec& q : rows)
              if ((q - row).norm() <= 1e-8) {
                dup = true;
                break;
              }
            if (!dup) rows.push_back(row);
          }
        }
      }
    }
    int t = d - 1;
    while (t >= 0 && idx[t] == k - d + t) --t;
    if (t < 0) break;
    ++idx[t];
    for (int j = t + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (rows.empty())
    throw std::invalid_argument("facet_enumeration: body not full-dimensional");
  Mat out(rows.size(), d + 1);
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = rows[i];
  return out;
}

// ---------------------------------------------------------------------------
// triangulation and sampling

struct Triangulation {
  Mat vertices;                        // deduplicated hull vertices
  std::vector<std::vector<int>> simplices;  // dim+1 indices each
};

namespace detail {

// Order the vertex indices of a planar convex polygon (embedded in R^3)
// by angle around its centroid.
inline std::vector<int> order_polygon(const Mat& pts, const std::vector<int>& ids,
                                      const Vec& normal) {
  Eigen::Vector3d n3(normal[0], normal[1], normal[2]);
  Eigen::Vector3d a = n3.unitOrthogonal();
  Eigen::Vector3d b = n3.normalized().cross(a);
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (int i : ids) centroid += pts.row(i).head<3>().transpose();
  centroid /= static_cast<double>(ids.size());
  std::vector<std::pair<double, int>> ang;
  for (int i : ids) {
    Eigen::Vector3d r = pts.row(i).head<3>().transpose() - centroid;
    ang.emplace_back(std::atan2(b.dot(r), a.dot(r)), i);
  }
  std::sort(ang.begin(), ang.end());
  std::vector<int> out;
  for (auto& p : ang) out.push_back(p.second);
  return out;
}

}  // namespace detail

// Triangulate a full-dimensional vertex hull, dim in {1,2,3}: fan from the
// first vertex over the facets that do not contain it.
inline Triangulation triangulate(const ConvexBody& c) {
  if (c.kind != BodyKind::VertexHull)
    throw std::invalid_argument("triangulate: expected vertex hull");
  Triangulation tri;
  tri.vertices = extreme_points(c);
  const int d = c.dim;
  const int k = static_cast<int>(tri.vertices.rows());
  if (d == 1) {
    int lo = 0, hi = 0;
    for (int i = 1; i < k; ++i) {
      if (tri.vertices(i, 0) < tri.vertices(lo, 0)) lo = i;
      if (tri.vertices(i, 0) > tri.vertices(hi, 0)) hi = i;
    }
    tri.simplices.push_back({lo, hi});
    return tri;
  }
  if (d == 2) {
    Vec centroid = tri.vertices.colwise().mean().transpose();
    std::vector<std::pair<double, int>> ang;
    for (int i = 0; i < k; ++i) {
      Vec r = tri.vertices.row(i).transpose() - centroid;
      ang.emplace_back(std::atan2(r[1], r[0]), i);
    }
    std::sort(ang.begin(), ang.end());
    for (int i = 1; i + 1 < k; ++i)
      tri.simplices.push_back({ang[0].second, ang[i].second, ang[i + 1].second});
    return tri;
  }
  if (d != 3) throw std::invalid_argument("triangulate: dim must be <= 3");

  Mat facets = facet_enumeration(ConvexBody::vertex_hull(tri.vertices));
  const int apex = 0;
  for (int f = 0; f < facets.rows(); ++f) {
    Vec n = facets.row(f).head(d);
    double o = facets(f, d);
    std::vector<int> on_facet;
    bool apex_on = false;
    for (int i = 0; i < k; ++i) {
      if (std::abs(n.dot(tri.vertices.row(i).transpose()) - o) <= 1e-9) {
        on_facet.push_back(i);
        if (i == apex) apex_on = true;
      }
    }
    if (apex_on || on_facet.size() < 3) continue;
    std::vector<int> ring = detail::order_polygon(tri.vertices, on_facet, n);
    for (size_t i = 1; i + 1 < ring.size(); ++i)
      tri.simplices.push_back({apex, ring[0], ring[i], ring[i + 1]});
  }
  if (tri.simplices.empty())
    throw std::invalid_argument("triangulate: degenerate hull");
  return tri;
}

inline double simplex_volume(const Mat& verts, const std::vector<int>& s) {
  const int d = static_cast<int>(verts.cols());
  Mat edges(d, d);
  for (int i = 0; i < d; ++i)
    edges.row(i) = verts.row(s[i + 1]) - verts.row(s[0]);
  double v = std::abs(edges.determinant());
  for (int i = 2; i <= d; ++i) v /= i;
  return v;
}

inline std::pair<Vec, Vec> bounding_box(const ConvexBody& c) {
  switch (c.kind) {
    case BodyKind::VertexHull:
      return {c.points.colwise().minCoeff().transpose(),
              c.points.colwise().maxCoeff().transpose()};
    case BodyKind::Ball:
      return {Vec(c.center.array() - c.radius), Vec(c.center.array() + c.radius)};
    case BodyKind::LiftedBall: {
      Vec lo = Vec::Constant(c.dim, -c.radius), hi = Vec::Constant(c.dim, c.radius);
      lo[0] = 0;
      hi[0] = 1;
      return {lo, hi};
    }
    case BodyKind::Bicone: {
      Vec lo = Vec::Constant(c.dim, -c.radius), hi = Vec::Constant(c.dim, c.radius);
      lo[0] = 0;
      hi[0] = 1;
      return {lo, hi};
    }
    case BodyKind::HalfspaceIntersection: {
      Vec lo(c.dim), hi(c.dim);
      for (int j = 0; j < c.dim; ++j) {
        Vec dir = Vec::Zero(c.dim);
        dir[j] = 1.0;
        hi[j] = support(c, dir);
        lo[j] = -support(c, Vec(-dir));
      }
      return {lo, hi};
    }
  }
  throw std::logic_error("bounding_box: unreachable");
}

// Well-spread samples from a body: exact (triangulation-based) for vertex
// hulls, closed-form for balls, rejection sampling otherwise.
inline std::vector<Vec> sample_points(const ConvexBody& c, int count, Rng& rng) {
  std::vector<Vec> out;
  out.reserve(count);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  if (c.kind == BodyKind::VertexHull) {
    Triangulation tri = triangulate(c);
    std::vector<double> cumvol;
    double total = 0;
    for (auto& s : tri.simplices) {
      total += simplex_volume(tri.vertices, s);
      cumvol.push_back(total);
    }
    const int d = c.dim;
    std::exponential_distribution<double> expo(1.0);
    for (int i = 0; i < count; ++i) {
      double u = unif(rng) * total;
      size_t si = std::lower_bound(cumvol.begin(), cumvol.end(), u) - cumvol.begin();
      if (si >= tri.simplices.size()) si = tri.simplices.size() - 1;
      // uniform barycentric weights
      Vec w(d + 1);
      double sum = 0;
      for (int j = 0; j <= d; ++j) {
        w[j] = expo(rng);
        sum += w[j];
      }
      Vec x = Vec::Zero(d);
      for (int j = 0; j <= d; ++j)
        x += (w[j] / sum) * tri.vertices.row(tri.simplices[si][j]).transpose();
      out.push_back(std::move(x));
    }
    return out;
  }
  if (c.kind == BodyKind::Ball) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
      Vec g(c.dim);
      for (int j = 0; j < c.dim; ++j) g[j] = gauss(rng);
      double nn = g.norm();
      if (nn < 1e-12) {
        --i;
        continue;
      }
      double r = c.radius * std::pow(unif(rng), 1.0 / c.dim);
      out.push_back(c.center + (r / nn) * g);
    }
    return out;
  }
  // rejection from the bounding box
  auto [lo, hi] = bounding_box(c);
  int guard = 0;
  while (static_cast<int>(out.size()) < count) {
    Vec x(c.dim);
    for (int j = 0; j < c.dim; ++j) x[j] = lo[j] + unif(rng) * (hi[j] - lo[j]);
    if (membership(c, x, 1e-12)) out.push_back(std::move(x));
    if (++guard > 1000 * count + 100000)
      throw std::runtime_error("sample_points: rejection sampling stalled");
  }
  return out;
}

}  // namespace geometry
}  // namespace flipcert
