#pragma once

// Discretization meshes over strategy sets: construction with covering
// certificates, the induced max-pairing norm, and the explicit
// norm-equivalence constant tau = sqrt(n) / sigma_min(basis rows).
//
// Polytope meshes are barycentric lattices over a triangulation with an
// arithmetic covering bound (certificate Exact). Smooth bodies use height/
// ring lattices and certify covering statistically (certificate Sampled).
// Lattice parameters are dyadic in delta, so halving delta refines a mesh
// in place: build_mesh(a, delta/2).points is a superset of
// build_mesh(a, delta).points, bitwise.

#include <flipcert/geometry.hpp>
#include <flipcert/linalg.hpp>

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace flipcert {
namespace mesh {

enum class CoveringCert { Exact, Sampled };

struct Mesh {
  Mat points;  // P x n
  double delta = 0.0;
  std::vector<int> basis_indices;  // n rows forming a basis of the space
  double tau = 0.0;
  CoveringCert certificate = CoveringCert::Exact;
  int cert_samples = 0;
  double cert_worst_gap = 0.0;
  double exact_bound = 0.0;           // certified covering bound when Exact
  std::vector<int> support_indices;   // extreme points of conv(points)
  bool vertex_only = false;           // extreme-point mesh of a polytope
  // true when the support rows contain every extreme point of the source
  // set, which makes the discretized feasible region exact for polytopes
  bool covers_extreme_points = false;
};

inline double mesh_norm(const Mesh& m, const Vec& y) {
  if (y.size() != m.points.cols())
    throw std::invalid_argument("mesh_norm: dimension mismatch");
  return (m.points * y).cwiseAbs().maxCoeff();
}

// tau = sqrt(n)/sigma_min of the basis rows; f(B) <= 1 then implies
// |B|_2 <= tau because |M B|_inf >= |M B|_2 / sqrt(n) >= sigma_min |B|_2 / sqrt(n).
inline double compute_tau(const Mesh& m) {
  const int n = static_cast<int>(m.points.cols());
  if (static_cast<int>(m.basis_indices.size()) != n)
    throw std::invalid_argument("compute_tau: basis must have n points");
  Mat basis(n, n);
  for (int i = 0; i < n; ++i) basis.row(i) = m.points.row(m.basis_indices[i]);
  Eigen::JacobiSVD<Mat> svd(basis);
  double smin = svd.singularValues().minCoeff();
  if (!(smin > 1e-10)) throw std::invalid_argument("compute_tau: singular basis");
  return std::sqrt(static_cast<double>(n)) / smin;
}

namespace detail {

inline std::uint64_t point_key(const double* p, int n) {
  // exact byte hash; lattice construction makes shared points bitwise equal
  std::uint64_t h = 1469598103934665603ull;
  for (int i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &p[i], 8);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

class PointSet {
 public:
  explicit PointSet(int dim) : dim_(dim) {}

  // canonicalize -0.0 so byte-exact dedup is stable
  static Vec canonical(Vec p) {
    for (int i = 0; i < p.size(); ++i)
      if (p[i] == 0.0) p[i] = 0.0;
    return p;
  }

  int insert(const Vec& raw) {
    Vec p = canonical(raw);
    std::uint64_t key = point_key(p.data(), dim_);
    auto range = map_.equal_range(key);
    for (auto it = range.first; it != range.second; ++it) {
      if (std::memcmp(points_[it->second].data(), p.data(), 8 * dim_) == 0)
        return it->second;
    }
    int idx = static_cast<int>(points_.size());
    points_.push_back(p);
    map_.emplace(key, idx);
    return idx;
  }

  int find(const Vec& raw) const {
    Vec p = canonical(raw);
    std::uint64_t key = point_key(p.data(), dim_);
    auto range = map_.equal_range(key);
    for (auto it = range.first; it != range.second; ++it)
      if (std::memcmp(points_[it->second].data(), p.data(), 8 * dim_) == 0)
        return it->second;
    return -1;
  }

  Mat to_matrix() const {
    Mat out(points_.size(), dim_);
    for (size_t i = 0; i < points_.size(); ++i) out.row(i) = points_[i];
    return out;
  }
  size_t size() const { return points_.size(); }

 private:
  int dim_;
  std::vector<Vec> points_;
  std::unordered_multimap<std::uint64_t, int> map_;
};

inline int dyadic_at_least(double x) {
  // smallest power of two >= max(x, 1)
  int e = 0;
  while ((1 << e) < x && e < 30) ++e;
  return 1 << e;
}

// Deterministic basis selection: column-pivoted QR over candidate rows.
inline std::vector<int> select_basis(const Mat& pts,
                                     const std::vector<int>& candidates) {
  const int n = static_cast<int>(pts.cols());
  Mat cols(n, candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i)
    cols.col(i) = pts.row(candidates[i]).transpose();
  Eigen::ColPivHouseholderQR<Mat> qr(cols);
  if (qr.rank() < n)
    throw std::invalid_argument("mesh basis: points do not span the space");
  std::vector<int> out(n);
  auto perm = qr.colsPermutation().indices();
  for (int i = 0; i < n; ++i) out[i] = candidates[perm[i]];
  return out;
}

}  // namespace detail

// Max distance from sampled body points to the nearest mesh point.
// Uses a uniform grid so large meshes stay cheap. Nearest-point ties break
// toward the lowest index.
inline double covering_radius_check(const Mesh& m,
                                    const geometry::ConvexBody& a, int samples,
                                    std::uint64_t seed = sampling_seed()) {
  if (samples < 1) throw std::invalid_argument("covering_radius_check: samples >= 1");
  const int n = static_cast<int>(m.points.cols());
  const double cell = std::max(m.delta, 1e-9);

  auto cell_of = [&](const Vec& p, int d) {
    return static_cast<long long>(std::floor(p[d] / cell));
  };
  auto pack = [&](const Vec& p) {
    std::uint64_t key = 0;
    for (int d = 0; d < n; ++d)
      key = key * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(
                cell_of(p, d) + (1ll << 20));
    return key;
  };
  std::unordered_multimap<std::uint64_t, int> grid;
  grid.reserve(m.points.rows());
  for (int i = 0; i < m.points.rows(); ++i)
    grid.emplace(pack(m.points.row(i).transpose()), i);

  auto nearest = [&](const Vec& x) {
    double best = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring < 64; ++ring) {
      // scan cells at Chebyshev distance <= ring
      std::vector<long long> base(n);
      for (int d = 0; d < n; ++d) base[d] = cell_of(x, d);
      std::vector<long long> off(n, -ring);
      bool any = false;
      while (true) {
        bool on_shell = ring == 0;
        for (int d = 0; d < n && !on_shell; ++d)
          if (std::llabs(off[d]) == ring) on_shell = true;
        if (on_shell) {
          Vec probe(n);
          std::uint64_t key = 0;
          for (int d = 0; d < n; ++d)
            key = key * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(
                      base[d] + off[d] + (1ll << 20));
          auto range = grid.equal_range(key);
          for (auto it = range.first; it != range.second; ++it) {
            double dist = (m.points.row(it->second).transpose() - x).norm();
            if (dist < best) best = dist;
            any = true;
          }
        }
        int d = 0;
        while (d < n && off[d] == ring) off[d++] = -ring;
        if (d == n) break;
        ++off[d];
      }
      // points in shells beyond `ring` are at distance > cell*ring
      if (any && best <= cell * ring) break;
      (void)any;
    }
    if (!std::isfinite(best)) {
      for (int i = 0; i < m.points.rows(); ++i)
        best = std::min(best, (m.points.row(i).transpose() - x).norm());
    }
    return best;
  };

  Rng rng(seed);
  double worst = 0.0;
  auto pts = geometry::sample_points(a, samples, rng);
  for (const Vec& x : pts) worst = std::max(worst, nearest(x));

  if (m.certificate == CoveringCert::Exact && m.exact_bound > 0)
    if (m.exact_bound > m.delta + 1e-12)
      throw std::runtime_error("covering_radius_check: exact bound exceeds delta");
  return worst;
}

// ---------------------------------------------------------------------------
// builders

namespace detail {

// Barycentric lattice T_M over each simplex of a triangulation. Every point
// of a simplex with diameter D lies within (d/(d+1)) * D / M of a lattice
// point, which certifies the covering bound arithmetically.
inline Mesh lattice_mesh(const geometry::ConvexBody& body, double delta) {
  const geometry::Triangulation tri = geometry::triangulate(body);
  const int d = static_cast<int>(tri.vertices.cols());

  double max_diam = 0.0;
  for (const auto& s : tri.simplices)
    for (size_t i = 0; i < s.size(); ++i)
      for (size_t j = i + 1; j < s.size(); ++j)
        max_diam = std::max(
            max_diam, (tri.vertices.row(s[i]) - tri.vertices.row(s[j])).norm());

  const double ratio = static_cast<double>(d) / (d + 1);
  const int M = dyadic_at_least(ratio * max_diam / delta);

  PointSet ps(d);
  // fixed global vertex order inside each simplex keeps shared-face lattice
  // points bitwise identical across simplices
  std::vector<std::vector<int>> sorted = tri.simplices;
  for (auto& s : sorted) std::sort(s.begin(), s.end());

  for (const auto& s : sorted) {
    // enumerate nonnegative integer weights summing to M
    std::vector<int> m(d + 1, 0);
    m[0] = M;
    while (true) {
      Vec p = Vec::Zero(d);
      for (int i = 0; i <= d; ++i)
        if (m[i] > 0)
          p += (static_cast<double>(m[i]) / M) *
               tri.vertices.row(s[i]).transpose();
      ps.insert(p);
      int j = d - 1;
      while (j >= 0 && m[j] == 0) --j;
      if (j < 0) break;
      --m[j];
      int tail = 1;
      for (int i = j + 1; i <= d; ++i) {
        tail += m[i];
        m[i] = 0;
      }
      m[j + 1] = tail;
    }
  }

  Mesh out;
  out.points = ps.to_matrix();
  out.delta = delta;
  out.certificate = CoveringCert::Exact;
  out.exact_bound = ratio * max_diam / M;
  // support rows: the hull vertices themselves
  for (int i = 0; i < tri.vertices.rows(); ++i) {
    int idx = ps.find(tri.vertices.row(i).transpose());
    if (idx < 0) throw std::logic_error("lattice_mesh: lost a hull vertex");
    out.support_indices.push_back(idx);
  }
  out.covers_extreme_points = true;
  out.basis_indices = select_basis(out.points, out.support_indices);
  out.tau = compute_tau(out);
  return out;
}

// Height/ring lattice for radially symmetric bodies in R^3 (or a disc in
// R^2): heights i/2^a, ring radii j/2^b clamped to the body's radius profile,
// 2^k angles per ring, plus the exact extreme rings. All parameters dyadic.
struct RingProfile {
  bool has_height = true;   // false for a plain disc
  double lipschitz = 1.0;   // of the radius profile
  std::function<double(double)> radius_at;  // R(t)
  // extreme structure: (height, radius, include_axis_point)
  std::vector<std::pair<double, double>> extreme_rings;
  std::vector<double> extreme_axis_heights;
};

inline Mesh ring_mesh(const RingProfile& prof, int ambient_dim, double delta,
                      const geometry::ConvexBody& body) {
  const double budget = 0.4 * delta;
  const int per_t = prof.has_height
                        ? dyadic_at_least(std::max(1.0, prof.lipschitz) / budget)
                        : 1;
  const int per_r = dyadic_at_least(1.0 / budget);
  const double dt = 1.0 / per_t;
  const double dr = 1.0 / per_r;

  PointSet ps(ambient_dim);
  auto add_ring = [&](double height, double radius) {
    int K = radius <= 0 ? 1
                        : dyadic_at_least(2.0 * M_PI * radius / budget);
    for (int l = 0; l < K; ++l) {
      double theta = 2.0 * M_PI * static_cast<double>(l) / K;
      Vec p = Vec::Zero(ambient_dim);
      int base = prof.has_height ? 1 : 0;
      if (prof.has_height) p[0] = height;
      p[base] = radius * std::cos(theta);
      p[base + 1] = radius * std::sin(theta);
      ps.insert(p);
    }
  };

  const int heights = prof.has_height ? per_t : 0;
  for (int i = 0; i <= heights; ++i) {
    double t = prof.has_height ? static_cast<double>(i) * dt : 0.0;
    double rmax = prof.radius_at(t);
    add_ring(t, 0.0);
    for (int j = 1; j * dr <= rmax + 1e-15; ++j) add_ring(t, j * dr);
  }

  Mesh out;
  out.delta = delta;
  out.certificate = CoveringCert::Sampled;

  std::vector<int> support;
  for (double h : prof.extreme_axis_heights) {
    Vec p = Vec::Zero(ambient_dim);
    if (prof.has_height) p[0] = h;
    support.push_back(ps.insert(p));
  }
  for (auto& [h, r] : prof.extreme_rings) {
    int K = dyadic_at_least(2.0 * M_PI * r / budget);
    for (int l = 0; l < K; ++l) {
      double theta = 2.0 * M_PI * static_cast<double>(l) / K;
      Vec p = Vec::Zero(ambient_dim);
      int base = prof.has_height ? 1 : 0;
      if (prof.has_height) p[0] = h;
      p[base] = r * std::cos(theta);
      p[base + 1] = r * std::sin(theta);
      support.push_back(ps.insert(p));
    }
  }

  out.points = ps.to_matrix();
  out.support_indices = std::move(support);
  out.basis_indices = select_basis(out.points, out.support_indices);
  out.tau = compute_tau(out);

  const int check_samples = 100000;
  out.cert_samples = check_samples;
  out.cert_worst_gap = covering_radius_check(out, body, check_samples);
  if (out.cert_worst_gap > delta)
    throw std::runtime_error("ring_mesh: sampled covering gap exceeds delta");
  return out;
}

}  // namespace detail

// Covering delta-mesh of a strategy set. Nested refinement: halving delta
// only adds points.
inline Mesh build_mesh(const geometry::ConvexBody& a, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("build_mesh: delta must be positive");
  using geometry::BodyKind;
  switch (a.kind) {
    case BodyKind::VertexHull:
      return detail::lattice_mesh(a, delta);
    case BodyKind::HalfspaceIntersection:
      return detail::lattice_mesh(
          geometry::ConvexBody::vertex_hull(geometry::extreme_points(a)), delta);
    case BodyKind::LiftedBall: {
      detail::RingProfile prof;
      prof.has_height = true;
      prof.lipschitz = a.radius;
      double r = a.radius;
      prof.radius_at = [r](double t) { return r * t; };
      prof.extreme_rings = {{1.0, r}};
      prof.extreme_axis_heights = {0.0, 1.0};
      return detail::ring_mesh(prof, a.dim, delta, a);
    }
    case BodyKind::Bicone: {
      detail::RingProfile prof;
      prof.has_height = true;
      prof.lipschitz = 2.0 * a.radius;
      double rho = a.radius;
      prof.radius_at = [rho](double t) {
        return 2.0 * rho * std::min(t, 1.0 - t);
      };
      prof.extreme_rings = {{0.5, rho}};
      prof.extreme_axis_heights = {0.0, 1.0};
      return detail::ring_mesh(prof, a.dim, delta, a);
    }
    case BodyKind::Ball: {
      if (a.dim != 2 || a.center.cwiseAbs().maxCoeff() > 0)
        throw std::invalid_argument(
            "build_mesh: only centered discs supported for ball sources");
      detail::RingProfile prof;
      prof.has_height = false;
      double r = a.radius;
      prof.radius_at = [r](double) { return r; };
      prof.extreme_rings = {{0.0, r}};
      return detail::ring_mesh(prof, a.dim, delta, a);
    }
  }
  throw std::logic_error("build_mesh: unreachable");
}

// Extreme-point mesh of a polytope: the constraint rows are exactly the
// vertices, and the recorded fineness is a sampled covering radius.
inline Mesh extreme_point_mesh(const geometry::ConvexBody& a,
                               int samples = 20000) {
  Mesh out;
  out.points = geometry::extreme_points(a);
  out.vertex_only = true;
  out.covers_extreme_points = true;
  out.certificate = CoveringCert::Sampled;
  for (int i = 0; i < out.points.rows(); ++i) out.support_indices.push_back(i);
  out.basis_indices = detail::select_basis(out.points, out.support_indices);
  out.tau = compute_tau(out);
  double diam = 1e-6;
  for (int i = 0; i < out.points.rows(); ++i)
    for (int j = i + 1; j < out.points.rows(); ++j)
      diam = std::max(diam, (out.points.row(i) - out.points.row(j)).norm());
  out.delta = diam;
  out.cert_samples = samples;
  out.cert_worst_gap = covering_radius_check(out, a, samples);
  out.delta = out.cert_worst_gap * (1.0 + 1e-6) + 1e-12;
  return out;
}

// ---------------------------------------------------------------------------
// export

inline void write_mesh_csv(const Mesh& m, std::ostream& os) {
  for (int i = 0; i < m.points.rows(); ++i) {
    for (int j = 0; j < m.points.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m.points(i, j));
    }
    os << '\n';
  }
}

inline nlohmann::ordered_json mesh_sidecar(const Mesh& m) {
  nlohmann::ordered_json j;
  j["delta"] = m.delta;
  j["tau"] = m.tau;
  if (m.certificate == CoveringCert::Exact) {
    j["certificate"] = {{"kind", "exact"}, {"bound", m.exact_bound}};
  } else {
    j["certificate"] = {{"kind", "sampled"},
                        {"samples", m.cert_samples},
                        {"worst_gap", m.cert_worst_gap}};
  }
  j["points"] = m.points.rows();
  j["vertex_only"] = m.vertex_only;
  return j;
}

inline void write_mesh_files(const Mesh& m, const std::string& csv_path,
                             const std::string& sidecar_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("write_mesh_files: cannot open " + csv_path);
  write_mesh_csv(m, csv);
  std::ofstream side(sidecar_path);
  if (!side)
    throw std::runtime_error("write_mesh_files: cannot open " + sidecar_path);
  side << mesh_sidecar(m).dump(2) << '\n';
}

}  // namespace mesh
}  // namespace flipcert
