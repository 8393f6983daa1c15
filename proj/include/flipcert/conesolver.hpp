#pragma once

// Finite linear/cone program solver with primal-dual certificates.
//
// Reference backend: dense revised simplex with Bland's anti-cycling rule.
// Basic columns are either signed unit vectors (slack/surplus/artificial) or
// structural; basis solves reduce to a core system on the rows not pinned by
// basic unit columns. Instances here have few structural variables, so the
// core stays small no matter how many rows the discretization produces.

#include <flipcert/linalg.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace flipcert {
namespace conesolver {

// maximize <objective,x> over
//   { x : halfspace_normals*x <= halfspace_offsets, cone_normals*x >= 0 }
struct ConeProgram {
  Vec objective;
  Mat halfspace_normals;  // r x n
  Vec halfspace_offsets;  // r
  Mat cone_normals;       // c x n, offsets all 0

  int dim() const { return static_cast<int>(objective.size()); }
  int num_halfspace_rows() const {
    return static_cast<int>(halfspace_normals.rows());
  }
  int num_cone_rows() const { return static_cast<int>(cone_normals.rows()); }
};

enum class VarTag : std::uint8_t { Free, Nonnegative };

// maximize cost.x subject to constraint_matrix*x = rhs and the per-variable
// sign tags. Produced losslessly from a ConeProgram by to_standard_form.
struct StandardForm {
  Vec cost;
  Mat constraint_matrix;  // m x N
  Vec rhs;                // m
  std::vector<VarTag> var_tags;

  // pull-back bookkeeping when reduced from a ConeProgram
  int num_original_vars = 0;
  int num_halfspace_rows = 0;
  int num_cone_rows = 0;
};

enum class SolveStatus { Optimal, Infeasible, NumericalFailure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    default: return "numerical_failure";
  }
}

struct ProgramSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Vec primal_point;   // cone path: the n-dim optimizer; standard path: full x
  double primal_value = 0.0;
  std::map<int, double> dual_weights;  // halfspace-row index -> y >= 0
  Vec row_duals;                       // duals for every row
  Vec cone_duals;                      // cone-row multipliers z >= 0
  double dual_value = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
  double comp_slack_residual = std::numeric_limits<double>::infinity();
  Vec farkas;  // infeasibility certificate when available
  std::string note;
  int iterations = 0;
};

namespace detail {

struct UnitCol {
  int row;
  double sign;  // +1 or -1
};

struct SimplexOutcome {
  SolveStatus status = SolveStatus::NumericalFailure;
  Vec x;  // all non-artificial variables
  Vec y;  // row duals
  double value = 0.0;
  Vec farkas;
  std::string note;
  int iterations = 0;
};

// Revised simplex over a column set of dense columns (the columns of
// `dense`) followed by signed unit columns. Maximization. Deterministic:
// Bland's rule picks the lowest eligible index on entry and on ties.
class Simplex {
 public:
  Simplex(const Mat& dense, std::vector<UnitCol> units, Vec cost,
          std::vector<VarTag> tags, Vec rhs)
      : dense_(dense),
        units_(std::move(units)),
        cost_(std::move(cost)),
        tags_(std::move(tags)),
        b_(std::move(rhs)) {
    m_ = static_cast<int>(b_.size());
    K_ = static_cast<int>(dense_.cols());
    U_ = static_cast<int>(units_.size());
    n_all_ = K_ + U_;
  }

  // Basis of unit variables, one per row, making the start primal feasible
  // when the implied values are nonnegative.
  void set_initial_basis(std::vector<int> basis) { init_basis_ = std::move(basis); }

  SimplexOutcome solve() {
    SimplexOutcome out;
    cost_scale_ = 1.0 + cost_.cwiseAbs().maxCoeff();
    feas_tol_ = 1e-9 * (1.0 + (m_ ? b_.cwiseAbs().maxCoeff() : 0.0));

    bool need_phase1 = true;
    if (!init_basis_.empty()) {
      basis_ = init_basis_;
      if (factor() && solve_basic_values() && x_B_.minCoeff() >= -feas_tol_)
        need_phase1 = false;
    }

    int total_iters = 0;
    if (need_phase1) {
      // artificial variable per row, signed to start at |b_r|
      art_sign_.resize(m_);
      basis_.resize(m_);
      for (int r = 0; r < m_; ++r) {
        art_sign_[r] = b_[r] >= 0.0 ? 1.0 : -1.0;
        basis_[r] = n_all_ + r;
      }
      have_artificials_ = true;
      if (!factor() || !solve_basic_values()) {
        out.note = "artificial basis factorization failed";
        return out;
      }
      Vec phase1_cost = Vec::Zero(n_all_ + m_);
      for (int r = 0; r < m_; ++r) phase1_cost[n_all_ + r] = -1.0;
      std::string note;
      int iters = 0;
      if (!run(phase1_cost, /*bar_artificials=*/false, note, iters)) {
        out.note = "phase 1: " + note;
        out.iterations = iters;
        return out;
      }
      total_iters += iters;
      double infeas = -objective_value(phase1_cost);
      if (infeas > 1e-7 * (1.0 + b_.cwiseAbs().maxCoeff())) {
        out.status = SolveStatus::Infeasible;
        out.y = duals(phase1_cost);
        out.farkas = out.y;
        out.note = "infeasible, residual " + format_double(infeas);
        out.iterations = total_iters;
        return out;
      }
    }

    Vec phase2_cost = Vec::Zero(n_all_ + (have_artificials_ ? m_ : 0));
    phase2_cost.head(n_all_) = cost_;
    std::string note;
    int iters = 0;
    if (!run(phase2_cost, /*bar_artificials=*/true, note, iters)) {
      out.note = note;
      out.iterations = total_iters + iters;
      return out;
    }
    total_iters += iters;

    out.status = SolveStatus::Optimal;
    out.x = Vec::Zero(n_all_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_all_) out.x[basis_[i]] = x_B_[i];
    out.y = duals(phase2_cost);
    out.value = cost_.dot(out.x);
    out.iterations = total_iters;
    return out;
  }

 private:
  bool is_unit_var(int v) const { return v >= K_; }
  UnitCol unit_of(int v) const {
    if (v < K_ + U_) return units_[v - K_];
    return UnitCol{v - n_all_, art_sign_[v - n_all_]};
  }
  VarTag tag_of(int v) const {
    if (v >= n_all_) return VarTag::Nonnegative;  // artificial
    return tags_[v];
  }

  bool factor() {
    covered_slot_.assign(m_, -1);
    dense_slots_.clear();
    tight_rows_.clear();
    for (int i = 0; i < m_; ++i) {
      int v = basis_[i];
      if (v < K_) {
        dense_slots_.push_back(i);
      } else {
        UnitCol uc = unit_of(v);
        if (covered_slot_[uc.row] != -1) return false;
        covered_slot_[uc.row] = i;
      }
    }
    for (int r = 0; r < m_; ++r)
      if (covered_slot_[r] == -1) tight_rows_.push_back(r);
    const int k = static_cast<int>(dense_slots_.size());
    if (static_cast<int>(tight_rows_.size()) != k) return false;
    core_.resize(k, k);
    for (int a = 0; a < k; ++a)
      for (int t = 0; t < k; ++t)
        core_(a, t) = dense_(tight_rows_[a], basis_[dense_slots_[t]]);
    if (k > 0) {
      lu_.compute(core_);
      luT_.compute(core_.transpose());
      double dmin = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
      double dmax = lu_.matrixLU().diagonal().cwiseAbs().maxCoeff();
      if (!(dmin > 1e-13 * (1.0 + dmax))) return false;
    }
    return true;
  }

  // z with B z = rhs, one entry per basis slot
  Vec apply_Binv(const Vec& rhs) const {
    const int k = static_cast<int>(dense_slots_.size());
    Vec z = Vec::Zero(m_);
    Vec contrib = Vec::Zero(m_);
    if (k > 0) {
      Vec rT(k);
      for (int a = 0; a < k; ++a) rT[a] = rhs[tight_rows_[a]];
      Vec zD = lu_.solve(rT);
      for (int t = 0; t < k; ++t) {
        z[dense_slots_[t]] = zD[t];
        contrib += zD[t] * dense_.col(basis_[dense_slots_[t]]);
      }
    }
    for (int r = 0; r < m_; ++r) {
      int slot = covered_slot_[r];
      if (slot == -1) continue;
      UnitCol uc = unit_of(basis_[slot]);
      z[slot] = uc.sign * (rhs[r] - contrib[r]);
    }
    return z;
  }

  bool solve_basic_values() {
    x_B_ = apply_Binv(b_);
    return x_B_.allFinite();
  }

  // y with B^T y = c_B for the given phase cost
  Vec duals(const Vec& phase_cost) const {
    const int k = static_cast<int>(dense_slots_.size());
    Vec y = Vec::Zero(m_);
    for (int r = 0; r < m_; ++r) {
      int slot = covered_slot_[r];
      if (slot == -1) continue;
      UnitCol uc = unit_of(basis_[slot]);
      y[r] = uc.sign * phase_cost[basis_[slot]];
    }
    if (k > 0) {
      Vec rhs(k);
      for (int t = 0; t < k; ++t) {
        int col = basis_[dense_slots_[t]];
        rhs[t] = phase_cost[col] - dense_.col(col).dot(y);
      }
      Vec yT = luT_.solve(rhs);
      for (int a = 0; a < k; ++a) y[tight_rows_[a]] = yT[a];
    }
    return y;
  }

  double objective_value(const Vec& phase_cost) const {
    double v = 0.0;
    for (int i = 0; i < m_; ++i) v += phase_cost[basis_[i]] * x_B_[i];
    return v;
  }

  Vec column_of(int v) const {
    if (v < K_) return dense_.col(v);
    UnitCol uc = unit_of(v);
    Vec col = Vec::Zero(m_);
    col[uc.row] = uc.sign;
    return col;
  }

  bool run(const Vec& phase_cost, bool bar_artificials, std::string& note,
           int& iters) {
    const int max_iters = 50000;
    std::vector<char> basic(n_all_ + (have_artificials_ ? m_ : 0), 0);
    for (int i = 0; i < m_; ++i) basic[basis_[i]] = 1;
    const double tol = 1e-9 * (1.0 + phase_cost.cwiseAbs().maxCoeff());

    for (iters = 0; iters < max_iters; ++iters) {
      Vec y = duals(phase_cost);

      // reduced costs; dense block in one product
      Vec d_dense = cost_like_head(phase_cost, K_) - dense_.transpose() * y;

      int enter = -1;
      double dir = 1.0;
      for (int v = 0; v < static_cast<int>(basic.size()); ++v) {
        if (basic[v]) continue;
        if (v >= n_all_ && bar_artificials) continue;
        double d = v < K_ ? d_dense[v]
                          : phase_cost[v] - unit_of(v).sign * y[unit_of(v).row];
        VarTag tag = tag_of(v);
        if (d > tol) {
          enter = v;
          dir = 1.0;
          break;
        }
        if (tag == VarTag::Free && d < -tol) {
          enter = v;
          dir = -1.0;
          break;
        }
      }
      if (enter == -1) return true;  // optimal for this phase

      Vec w = apply_Binv(column_of(enter));

      int leave_slot = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (tag_of(basis_[i]) == VarTag::Free) continue;
        double denom = dir * w[i];
        // artificials are pinned at 0: they block in both directions
        if (basis_[i] >= n_all_) denom = std::abs(denom);
        if (denom <= 1e-11) continue;
        double ratio = std::max(x_B_[i], 0.0) / denom;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 &&
             (leave_slot == -1 || basis_[i] < basis_[leave_slot]))) {
          best_ratio = ratio;
          leave_slot = i;
        }
      }
      if (leave_slot == -1) {
        note = "unbounded objective direction";
        return false;
      }

      basic[basis_[leave_slot]] = 0;
      basic[enter] = 1;
      basis_[leave_slot] = enter;
      if (!factor() || !solve_basic_values()) {
        note = "basis factorization failed";
        return false;
      }
    }
    note = "iteration limit reached";
    return false;
  }

  static Vec cost_like_head(const Vec& c, int k) { return c.head(k); }

  const Mat& dense_;
  std::vector<UnitCol> units_;
  Vec cost_;
  std::vector<VarTag> tags_;
  Vec b_;
  int m_ = 0, K_ = 0, U_ = 0, n_all_ = 0;

  std::vector<int> init_basis_;
  std::vector<int> basis_;
  std::vector<double> art_sign_;
  bool have_artificials_ = false;

  std::vector<int> covered_slot_;
  std::vector<int> dense_slots_;
  std::vector<int> tight_rows_;
  Mat core_;
  Eigen::PartialPivLU<Mat> lu_, luT_;
  Vec x_B_;
  double cost_scale_ = 1.0, feas_tol_ = 1e-9;
};

}  // namespace detail

// Certificates for a ConeProgram solution, recomputed from the raw data.
inline void fill_cone_certificates(const ConeProgram& p, ProgramSolution& s) {
  if (s.status != SolveStatus::Optimal) return;
  const Vec& x = s.primal_point;
  double pres = 0.0;
  if (p.num_halfspace_rows() > 0) {
    Vec hs = p.halfspace_normals * x - p.halfspace_offsets;
    pres = std::max(pres, hs.maxCoeff());
  }
  if (p.num_cone_rows() > 0) {
    Vec cr = p.cone_normals * x;
    pres = std::max(pres, -cr.minCoeff());
  }
  s.primal_residual = std::max(0.0, pres);

  // stationarity: sum_i y_i n_i - sum_j z_j m_j = objective
  Vec grad = -p.objective;
  double comp = 0.0;
  double dual_val = 0.0;
  for (int i = 0; i < p.num_halfspace_rows(); ++i) {
    double y = s.row_duals[i];
    grad += y * p.halfspace_normals.row(i).transpose();
    comp += y * (p.halfspace_offsets[i] - p.halfspace_normals.row(i).dot(x));
    dual_val += y * p.halfspace_offsets[i];
  }
  for (int j = 0; j < p.num_cone_rows(); ++j) {
    double z = s.cone_duals[j];
    grad -= z * p.cone_normals.row(j).transpose();
    comp += z * p.cone_normals.row(j).dot(x);
  }
  s.dual_residual = grad.cwiseAbs().maxCoeff();
  for (int i = 0; i < p.num_halfspace_rows(); ++i)
    s.dual_residual = std::max(s.dual_residual, -s.row_duals[i]);
  for (int j = 0; j < p.num_cone_rows(); ++j)
    s.dual_residual = std::max(s.dual_residual, -s.cone_duals[j]);
  s.comp_slack_residual = std::abs(comp);
  s.dual_value = dual_val;
  s.gap = std::abs(s.primal_value - s.dual_value);
}

// Direct solve of a ConeProgram. Slack/surplus columns stay implicit; no
// dense slack matrix is materialized.
inline ProgramSolution solve_cone_program(const ConeProgram& p) {
  const int n = p.dim();
  const int r = p.num_halfspace_rows();
  const int c = p.num_cone_rows();
  const int m = r + c;

  Mat dense(m, n);
  if (r > 0) dense.topRows(r) = p.halfspace_normals;
  if (c > 0) dense.bottomRows(c) = p.cone_normals;

  std::vector<detail::UnitCol> units(m);
  for (int i = 0; i < r; ++i) units[i] = {i, 1.0};    // slack
  for (int j = 0; j < c; ++j) units[r + j] = {r + j, -1.0};  // surplus

  Vec cost = Vec::Zero(n + m);
  cost.head(n) = p.objective;
  std::vector<VarTag> tags(n + m, VarTag::Nonnegative);
  for (int i = 0; i < n; ++i) tags[i] = VarTag::Free;

  Vec b = Vec::Zero(m);
  if (r > 0) b.head(r) = p.halfspace_offsets;

  detail::Simplex engine(dense, std::move(units), std::move(cost),
                         std::move(tags), b);
  std::vector<int> start(m);
  for (int i = 0; i < m; ++i) start[i] = n + i;
  engine.set_initial_basis(std::move(start));
  detail::SimplexOutcome oc = engine.solve();

  ProgramSolution s;
  s.status = oc.status;
  s.note = oc.note;
  s.iterations = oc.iterations;
  s.farkas = oc.farkas;
  if (oc.status != SolveStatus::Optimal) return s;

  s.primal_point = oc.x.head(n);
  s.primal_value = oc.value;
  s.row_duals = oc.y;
  s.cone_duals = Vec::Zero(c);
  for (int j = 0; j < c; ++j) s.cone_duals[j] = -oc.y[r + j];
  for (int i = 0; i < r; ++i)
    if (oc.y[i] > 0.0) s.dual_weights[i] = oc.y[i];
  fill_cone_certificates(p, s);
  double scale = 1.0 + (r > 0 ? p.halfspace_offsets.cwiseAbs().maxCoeff() : 0.0);
  if (s.primal_residual > 1e-6 * scale || s.dual_residual > 1e-6 * scale) {
    s.status = SolveStatus::NumericalFailure;
    s.note = "certificate check failed (primal " +
             format_double(s.primal_residual) + ", dual " +
             format_double(s.dual_residual) + ")";
  }
  return s;
}

// Lossless reduction: slack variables for halfspace rows, surplus variables
// for cone rows; original variables come first for pull-back.
inline StandardForm to_standard_form(const ConeProgram& p) {
  const int n = p.dim();
  const int r = p.num_halfspace_rows();
  const int c = p.num_cone_rows();
  StandardForm sf;
  sf.num_original_vars = n;
  sf.num_halfspace_rows = r;
  sf.num_cone_rows = c;
  const int N = n + r + c;
  const int m = r + c;
  sf.cost = Vec::Zero(N);
  sf.cost.head(n) = p.objective;
  sf.constraint_matrix = Mat::Zero(m, N);
  sf.rhs = Vec::Zero(m);
  if (r > 0) {
    sf.constraint_matrix.block(0, 0, r, n) = p.halfspace_normals;
    sf.constraint_matrix.block(0, n, r, r) = Mat::Identity(r, r);
    sf.rhs.head(r) = p.halfspace_offsets;
  }
  if (c > 0) {
    sf.constraint_matrix.block(r, 0, c, n) = p.cone_normals;
    sf.constraint_matrix.block(r, n + r, c, c) = -Mat::Identity(c, c);
  }
  sf.var_tags.assign(N, VarTag::Nonnegative);
  for (int i = 0; i < n; ++i) sf.var_tags[i] = VarTag::Free;
  return sf;
}

inline Vec pull_back(const StandardForm& sf, const ProgramSolution& s) {
  return s.primal_point.head(sf.num_original_vars);
}

// Solve a StandardForm instance directly (phase 1 + phase 2).
inline ProgramSolution solve_lp(const StandardForm& sf) {
  const int m = static_cast<int>(sf.constraint_matrix.rows());
  detail::Simplex engine(sf.constraint_matrix, {}, sf.cost, sf.var_tags,
                         sf.rhs);
  detail::SimplexOutcome oc = engine.solve();

  ProgramSolution s;
  s.status = oc.status;
  s.note = oc.note;
  s.iterations = oc.iterations;
  s.farkas = oc.farkas;
  if (oc.status != SolveStatus::Optimal) return s;

  s.primal_point = oc.x;
  s.primal_value = oc.value;
  s.row_duals = oc.y;
  s.dual_value = sf.rhs.dot(oc.y);
  s.gap = std::abs(s.primal_value - s.dual_value);

  Vec resid = sf.constraint_matrix * oc.x - sf.rhs;
  double pres = resid.cwiseAbs().maxCoeff();
  for (int j = 0; j < static_cast<int>(sf.var_tags.size()); ++j)
    if (sf.var_tags[j] == VarTag::Nonnegative)
      pres = std::max(pres, -oc.x[j]);
  s.primal_residual = std::max(0.0, pres);

  Vec d = sf.cost - sf.constraint_matrix.transpose() * oc.y;
  double dres = 0.0, comp = 0.0;
  for (int j = 0; j < static_cast<int>(sf.var_tags.size()); ++j) {
    if (sf.var_tags[j] == VarTag::Free)
      dres = std::max(dres, std::abs(d[j]));
    else {
      dres = std::max(dres, d[j]);
      comp += oc.x[j] * std::abs(d[j]);
    }
  }
  s.dual_residual = std::max(0.0, dres);
  s.comp_slack_residual = std::abs(comp);
  double scale = 1.0 + (m > 0 ? sf.rhs.cwiseAbs().maxCoeff() : 0.0);
  if (s.primal_residual > 1e-6 * scale || s.dual_residual > 1e-6 * scale) {
    s.status = SolveStatus::NumericalFailure;
    s.note = "certificate check failed (primal " +
             format_double(s.primal_residual) + ", dual " +
             format_double(s.dual_residual) + ")";
  }
  return s;
}

// Plain-text interchange dump. Grammar:
//   line 1: "standardform" <num_rows> <num_vars>
//   line 2: "cost" <num_vars doubles>
//   line 3: "tags" <num_vars letters, F=free N=nonnegative>
//   then per row: "row" <num_vars doubles> "=" <rhs double>
// Doubles printed with %.17g.
inline std::string dump_standard_form(const StandardForm& sf) {
  std::ostringstream os;
  const int m = static_cast<int>(sf.constraint_matrix.rows());
  const int N = static_cast<int>(sf.constraint_matrix.cols());
  os << "standardform " << m << ' ' << N << '\n';
  os << "cost";
  for (int j = 0; j < N; ++j) os << ' ' << format_double(sf.cost[j]);
  os << '\n' << "tags";
  for (int j = 0; j < N; ++j)
    os << ' ' << (sf.var_tags[j] == VarTag::Free ? 'F' : 'N');
  os << '\n';
  for (int i = 0; i < m; ++i) {
    os << "row";
    for (int j = 0; j < N; ++j)
      os << ' ' << format_double(sf.constraint_matrix(i, j));
    os << " = " << format_double(sf.rhs[i]) << '\n';
  }
  return os.str();
}

}  // namespace conesolver
}  // namespace flipcert
