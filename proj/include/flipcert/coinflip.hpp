#pragma once

// Coin-flipping protocols over a declared strategy set: honest-condition
// validation, the four cheating quantities, dual-based extraction of the
// cheating strategy, product bounds, and the certification report.
//
// Alice's cheating value is a finite convex program over her own declared
// set (exact, via support functions). Bob's is the discretized
// semi-infinite program over the closure of Alice's set, reported as a
// certified sandwich enclosure. The product checks run in both role
// orderings; the reverse ordering discretizes over Bob's set.

#include <flipcert/geometry.hpp>
#include <flipcert/mesh.hpp>
#include <flipcert/sip.hpp>

#include <json.hpp>

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace flipcert {
namespace coinflip {

struct Protocol {
  geometry::ConvexBody alice_set;
  geometry::ConvexBody bob_set;  // defaults to gnrh_closure(alice_set)
  std::array<Vec, 3> alice_triple;  // outcome 0, outcome 1, abort
  std::array<Vec, 3> bob_triple;
  bool bob_set_defaulted = true;
  std::string name;
};

inline Protocol make_protocol(geometry::ConvexBody alice_set,
                              std::array<Vec, 3> alice_triple,
                              std::array<Vec, 3> bob_triple,
                              std::optional<geometry::ConvexBody> bob_set = {},
                              std::string name = "") {
  Protocol p{std::move(alice_set),
             bob_set ? *bob_set : geometry::gnrh_closure(alice_set),
             std::move(alice_triple),
             std::move(bob_triple),
             !bob_set.has_value(),
             std::move(name)};
  return p;
}

struct Violation {
  std::string what;
  double residual = 0.0;
};

// Empty iff the protocol satisfies all honest conditions: triples and their
// sums inside the declared sets, diagonal pairings exactly one half.
inline std::vector<Violation> validate_protocol(const Protocol& p) {
  constexpr double kTol = 1e-9;
  std::vector<Violation> out;
  const char* labels[3] = {"0", "1", "abort"};

  auto check_member = [&](const geometry::ConvexBody& set, const Vec& v,
                          const std::string& what) {
    double gap = geometry::membership_gap(set, v);
    if (gap > kTol) out.push_back({what, gap});
  };

  Vec asum = Vec::Zero(p.alice_set.dim), bsum = Vec::Zero(p.bob_set.dim);
  for (int i = 0; i < 3; ++i) {
    check_member(p.alice_set, p.alice_triple[i],
                 std::string("A_") + labels[i] + " outside Alice's set");
    check_member(p.bob_set, p.bob_triple[i],
                 std::string("B_") + labels[i] + " outside Bob's set");
    asum += p.alice_triple[i];
    bsum += p.bob_triple[i];
  }
  check_member(p.alice_set, asum, "sum of Alice's triple outside her set");
  check_member(p.bob_set, bsum, "sum of Bob's triple outside his set");

  for (int b = 0; b < 2; ++b) {
    double v = inner(p.alice_triple[b], p.bob_triple[b]);
    if (std::abs(v - 0.5) > kTol)
      out.push_back({std::string("<A_") + labels[b] + ",B_" + labels[b] +
                         "> != 1/2",
                     std::abs(v - 0.5)});
  }
  return out;
}

// Best response of a dishonest Alice forcing outcome b: sup over her
// declared set of the pairing with honest B_b. Exact via support function
// (extreme points for polytopes, closed form for the smooth sets).
inline double cheat_alice(const Protocol& p, int b) {
  return geometry::support(p.alice_set, p.bob_triple[b]);
}

struct BobCheat {
  conesolver::ProgramSolution solution;
  sip::SandwichEnclosure enclosure;
  bool cone_exact = false;
};

inline BobCheat cheat_bob(const Protocol& p, int b, const mesh::Mesh& m) {
  sip::DiscretizedSolve ds =
      sip::solve_discretized(p.alice_triple[b], p.alice_set, m);
  if (ds.solution.status != conesolver::SolveStatus::Optimal)
    return {std::move(ds.solution), {}, ds.cone_exact};
  return {std::move(ds.solution), ds.enclosure, ds.cone_exact};
}

// Normalized convex combination of mesh points weighted by the optimal dual
// multipliers. Scaling the weights leaves the result unchanged.
inline Vec extract_alice_strategy(const conesolver::ProgramSolution& sol,
                                  const mesh::Mesh& m, double p_delta) {
  if (sol.status != conesolver::SolveStatus::Optimal)
    throw std::invalid_argument("extract_alice_strategy: solution not optimal");
  if (p_delta <= 1e-12)
    throw std::invalid_argument("extract_alice_strategy: degenerate dual");
  double total = 0.0;
  for (auto& [idx, w] : sol.dual_weights) total += w;
  if (total <= 1e-12)
    throw std::invalid_argument("extract_alice_strategy: zero dual weights");
  Vec a = Vec::Zero(m.points.cols());
  for (auto& [idx, w] : sol.dual_weights)
    a += (w / total) * m.points.row(idx).transpose();
  return a;
}

struct ProductCheck {
  std::string pair;
  double value = 0.0;
  bool pass = false;
};

// Mesh policy: exact vertex rows for polytopal sets, covering mesh at the
// requested fineness otherwise.
inline mesh::Mesh mesh_for(const geometry::ConvexBody& body, double delta) {
  using geometry::BodyKind;
  if (body.kind == BodyKind::VertexHull)
    return mesh::extreme_point_mesh(body);
  if (body.kind == BodyKind::HalfspaceIntersection)
    return mesh::extreme_point_mesh(geometry::ConvexBody::vertex_hull(
        geometry::extreme_points(body)));
  return mesh::build_mesh(body, delta);
}

inline ProductCheck product_bound_check(const Protocol& p, int b,
                                        const mesh::Mesh& m) {
  double alice = cheat_alice(p, b);
  BobCheat bob = cheat_bob(p, b, m);
  if (bob.solution.status != conesolver::SolveStatus::Optimal)
    throw std::runtime_error("product_bound_check: solve failed (" +
                             bob.solution.note + ")");
  ProductCheck out;
  out.pair = "alice" + std::to_string(b) + "*bob" + std::to_string(b);
  out.value = alice * bob.enclosure.p_delta;
  out.pass = out.value >= 0.5 - 1e-7;
  return out;
}

struct Enclosure {
  double lower = 0.0;
  double upper = 0.0;
};

struct SecurityReport {
  std::string protocol_name;
  int dimension = 0;
  std::vector<double> deltas;
  std::array<Enclosure, 2> p_alice;
  std::array<Enclosure, 2> p_bob;
  double bias_lower = 0.0;
  std::vector<ProductCheck> product_checks;
  bool theorem4_known = false;
  bool theorem4_pass = false;
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
  // mesh summary for Bob's side
  long mesh_points = 0;
  double mesh_delta = 0.0;
  double mesh_tau = 0.0;
  std::string mesh_mode;
  std::string failure;
};

// Full analysis: the four cheating quantities (Bob's via enclosures at the
// finest delta, Alice's exact), bias, the four product checks (both
// outcomes, both role orderings), and the certification verdict.
inline SecurityReport analyze(const Protocol& p,
                              const std::vector<double>& deltas) {
  SecurityReport rep;
  rep.protocol_name = p.name;
  rep.dimension = p.alice_set.dim;
  rep.deltas = deltas;

  rep.violations = validate_protocol(p);
  if (!rep.violations.empty()) return rep;
  if (deltas.empty()) {
    rep.failure = "no delta schedule";
    return rep;
  }
  if (!p.bob_set_defaulted)
    rep.warnings.push_back(
        "user-supplied bob_set: certification lower-bounds cheating within "
        "that restriction only");

  const double finest = deltas.back();
  mesh::Mesh alice_mesh = mesh_for(p.alice_set, finest);
  rep.mesh_points = alice_mesh.points.rows();
  rep.mesh_delta = alice_mesh.delta;
  rep.mesh_tau = alice_mesh.tau;
  rep.mesh_mode = alice_mesh.vertex_only ? "vertex-exact" : "covering";

  std::array<BobCheat, 2> bob;
  for (int b = 0; b < 2; ++b) {
    bob[b] = cheat_bob(p, b, alice_mesh);
    if (bob[b].solution.status != conesolver::SolveStatus::Optimal) {
      rep.failure = "bob cheating solve failed for outcome " +
                    std::to_string(b) + " (" + bob[b].solution.note + ")";
      return rep;
    }
    rep.p_bob[b] = {bob[b].enclosure.lower, bob[b].enclosure.upper};
    double alice = cheat_alice(p, b);
    rep.p_alice[b] = {alice, alice};
  }

  // Lemma-style product checks, both orderings. The reverse ordering runs
  // the discretized program over Bob's set with honest B_b as objective.
  mesh::Mesh bob_mesh = mesh_for(p.bob_set, finest);
  for (int b = 0; b < 2; ++b) {
    ProductCheck fwd;
    fwd.pair = "alice" + std::to_string(b) + "*bob" + std::to_string(b);
    fwd.value = rep.p_alice[b].upper * bob[b].enclosure.p_delta;
    fwd.pass = fwd.value >= 0.5 - 1e-7;
    rep.product_checks.push_back(fwd);
  }
  for (int b = 0; b < 2; ++b) {
    sip::DiscretizedSolve swapped =
        sip::solve_discretized(p.bob_triple[b], p.bob_set, bob_mesh);
    if (swapped.solution.status != conesolver::SolveStatus::Optimal) {
      rep.failure = "swapped cheating solve failed for outcome " +
                    std::to_string(b) + " (" + swapped.solution.note + ")";
      return rep;
    }
    double bob_exact = geometry::support(p.bob_set, p.alice_triple[b]);
    ProductCheck rev;
    rev.pair = "bob" + std::to_string(b) + "*alice" + std::to_string(b);
    rev.value = bob_exact * swapped.enclosure.p_delta;
    rev.pass = rev.value >= 0.5 - 1e-7;
    rep.product_checks.push_back(rev);
  }

  double best_certified = 0.0;
  for (int b = 0; b < 2; ++b) {
    best_certified = std::max(best_certified, rep.p_alice[b].lower);
    best_certified = std::max(best_certified, rep.p_bob[b].lower);
  }
  rep.bias_lower = best_certified - 0.5;
  rep.theorem4_known = true;
  rep.theorem4_pass = best_certified >= 1.0 / std::sqrt(2.0) - 1e-6;
  return rep;
}

inline nlohmann::ordered_json report_json(const SecurityReport& r) {
  nlohmann::ordered_json j;
  j["protocol"] = r.protocol_name;
  j["dimension"] = r.dimension;
  j["deltas"] = r.deltas;
  j["mesh"] = {{"points", r.mesh_points},
               {"delta", r.mesh_delta},
               {"tau", r.mesh_tau},
               {"mode", r.mesh_mode}};
  auto enc = [](const Enclosure& e) {
    return nlohmann::ordered_json{{"lower", e.lower}, {"upper", e.upper}};
  };
  j["p_alice"] = {{"b0", enc(r.p_alice[0])}, {"b1", enc(r.p_alice[1])}};
  j["p_bob"] = {{"b0", enc(r.p_bob[0])}, {"b1", enc(r.p_bob[1])}};
  j["bias_lower"] = r.bias_lower;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const ProductCheck& c : r.product_checks)
    checks.push_back({{"pair", c.pair}, {"value", c.value}, {"pass", c.pass}});
  j["product_checks"] = checks;
  if (r.theorem4_known)
    j["theorem4_pass"] = r.theorem4_pass;
  else
    j["theorem4_pass"] = nullptr;
  nlohmann::ordered_json viols = nlohmann::ordered_json::array();
  for (const Violation& v : r.violations)
    viols.push_back({{"what", v.what}, {"residual", v.residual}});
  j["violations"] = viols;
  j["warnings"] = r.warnings;
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

// Human-readable summary table.
inline std::string report_summary(const SecurityReport& r) {
  std::ostringstream os;
  os << "protocol: " << (r.protocol_name.empty() ? "(unnamed)" : r.protocol_name)
     << "\n";
  if (!r.violations.empty()) {
    os << "INVALID protocol:\n";
    for (const Violation& v : r.violations)
      os << "  - " << v.what << " (residual " << format_double(v.residual)
         << ")\n";
    return os.str();
  }
  if (!r.failure.empty()) {
    os << "FAILED: " << r.failure << "\n";
    return os.str();
  }
  auto line = [&](const char* who, const Enclosure& e) {
    os << "  " << who << ": [" << format_double(e.lower) << ", "
       << format_double(e.upper) << "]\n";
  };
  os << "certified cheating enclosures:\n";
  line("P*_Alice,0", r.p_alice[0]);
  line("P*_Alice,1", r.p_alice[1]);
  line("P*_Bob,0  ", r.p_bob[0]);
  line("P*_Bob,1  ", r.p_bob[1]);
  os << "  bias lower bound: " << format_double(r.bias_lower) << "\n";
  for (const ProductCheck& c : r.product_checks)
    os << "  product " << c.pair << " = " << format_double(c.value) << "  "
       << (c.pass ? "ok" : "FAIL") << "\n";
  os << "  near-perfect coin flipping excluded (max >= 1/sqrt(2)): "
     << (r.theorem4_pass ? "yes" : "NO") << "\n";
  for (const std::string& w : r.warnings) os << "  warning: " << w << "\n";
  return os.str();
}

}  // namespace coinflip
}  // namespace flipcert
