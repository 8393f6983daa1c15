#pragma once

// Concrete theories and their reference protocols: classical bit, the
// box-world square, regular polygons, and a disk exercising the covering
// mesh path. Reference protocols scale two honest states to weight 1/2 and
// pick complementary accepting functionals; every construction is
// machine-verified before it is returned.

#include <flipcert/coinflip.hpp>
#include <flipcert/geometry.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace flipcert {
namespace theories {

struct TheorySpec {
  std::string name;
  geometry::ConvexBody state_space;
  geometry::ConvexBody strategy_set;
  std::vector<coinflip::Protocol> reference_protocols;
};

namespace detail {

inline void verify_spec(const TheorySpec& t) {
  if (!geometry::membership(t.strategy_set, Vec::Zero(t.strategy_set.dim), 1e-9))
    throw std::logic_error(t.name + ": strategy set must contain the origin");
  if (geometry::chebyshev_radius(t.strategy_set) <= 1e-6)
    throw std::logic_error(t.name + ": strategy set has empty interior");
  for (const auto& p : t.reference_protocols) {
    auto viols = coinflip::validate_protocol(p);
    if (!viols.empty())
      throw std::logic_error(t.name + ": reference protocol invalid: " +
                             viols.front().what);
  }
}

// Protocol over a lifted state space from two honest states: honest
// strategies are the states scaled to weight 1/2; the accepting functionals
// are the complementary affine functionals that are 1 on one state, 0 on
// the other, and within [0,1] on the whole state space.
inline coinflip::Protocol lifted_protocol(const geometry::ConvexBody& lift,
                                          const Vec& s0, const Vec& s1,
                                          const std::string& name) {
  const int d = static_cast<int>(s0.size());
  Vec u = s0 - s1;
  double uu = u.squaredNorm();
  if (uu < 1e-12) throw std::invalid_argument("lifted_protocol: states coincide");
  Vec w = u / uu;
  double w0 = -s1.dot(u) / uu;

  auto lift_state = [&](const Vec& s, double weight) {
    Vec v(d + 1);
    v[0] = weight;
    v.tail(d) = weight * s;
    return v;
  };
  auto functional = [&](double c0, const Vec& cw) {
    Vec v(d + 1);
    v[0] = c0;
    v.tail(d) = cw;
    return v;
  };

  std::array<Vec, 3> alice = {lift_state(s0, 0.5), lift_state(s1, 0.5),
                              Vec::Zero(d + 1)};
  std::array<Vec, 3> bob = {functional(w0, w), functional(1.0 - w0, -w),
                            Vec::Zero(d + 1)};
  coinflip::Protocol p =
      coinflip::make_protocol(lift, std::move(alice), std::move(bob), {}, name);
  return p;
}

}  // namespace detail

// Classical bit in probability coordinates: states are the distributions on
// two outcomes, sub-strategies their sub-normalized cone slice.
inline TheorySpec classical_bit() {
  TheorySpec t;
  t.name = "classical_bit";
  Mat seg(2, 2);
  seg << 1, 0, 0, 1;
  t.state_space = geometry::ConvexBody::vertex_hull(seg);
  Mat tri(3, 2);
  tri << 0, 0, 1, 0, 0, 1;
  t.strategy_set = geometry::ConvexBody::vertex_hull(tri);

  std::array<Vec, 3> alice = {make_vec({0.5, 0.0}), make_vec({0.0, 0.5}),
                              Vec::Zero(2)};
  std::array<Vec, 3> bob = {make_vec({1.0, 0.0}), make_vec({0.0, 1.0}),
                            Vec::Zero(2)};
  t.reference_protocols.push_back(coinflip::make_protocol(
      t.strategy_set, std::move(alice), std::move(bob), {}, t.name));
  detail::verify_spec(t);
  return t;
}

inline TheorySpec box_world() {
  TheorySpec t;
  t.name = "box_world";
  Mat sq(4, 2);
  sq << 1, 1, 1, -1, -1, 1, -1, -1;
  t.state_space = geometry::ConvexBody::vertex_hull(sq);
  t.strategy_set = geometry::lift_of(t.state_space);
  t.reference_protocols.push_back(detail::lifted_protocol(
      t.strategy_set, make_vec({1.0, 1.0}), make_vec({-1.0, -1.0}), t.name));
  detail::verify_spec(t);
  return t;
}

// Regular n-gon inscribed in the unit circle; honest states are a vertex
// and the (nearest-to-)antipodal vertex.
inline TheorySpec polygon(int n) {
  if (n < 3) throw std::invalid_argument("polygon: need n >= 3");
  TheorySpec t;
  t.name = "polygon_" + std::to_string(n);
  Mat verts(n, 2);
  for (int j = 0; j < n; ++j) {
    double th = 2.0 * M_PI * j / n;
    verts(j, 0) = std::cos(th);
    verts(j, 1) = std::sin(th);
  }
  t.state_space = geometry::ConvexBody::vertex_hull(verts);
  t.strategy_set = geometry::lift_of(t.state_space);
  Vec s0 = verts.row(0).transpose();
  Vec s1 = verts.row(n / 2).transpose();
  coinflip::Protocol p =
      detail::lifted_protocol(t.strategy_set, s0, s1, t.name);
  t.reference_protocols.push_back(std::move(p));
  detail::verify_spec(t);
  return t;
}

// Unit disk: the smooth state space forcing the genuine covering-mesh path.
// Honest pair: antipodal pure states at weight 1/2.
inline TheorySpec disk() {
  TheorySpec t;
  t.name = "disk";
  t.state_space = geometry::ConvexBody::ball(Vec::Zero(2), 1.0);
  t.strategy_set = geometry::lift_of(t.state_space);
  t.reference_protocols.push_back(detail::lifted_protocol(
      t.strategy_set, make_vec({1.0, 0.0}), make_vec({-1.0, 0.0}), t.name));
  detail::verify_spec(t);
  return t;
}

inline std::vector<std::string> zoo_names() {
  std::vector<std::string> names = {"classical_bit", "box_world"};
  for (int n = 3; n <= 8; ++n) names.push_back("polygon_" + std::to_string(n));
  names.push_back("disk");
  return names;
}

inline TheorySpec by_name(const std::string& name) {
  if (name == "classical_bit") return classical_bit();
  if (name == "box_world") return box_world();
  if (name == "disk") return disk();
  if (name.rfind("polygon_", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(name.substr(8));
    } catch (...) {
      throw std::invalid_argument("unknown theory: " + name);
    }
    return polygon(n);
  }
  throw std::invalid_argument("unknown theory: " + name);
}

// Two distinct strategy sets for Alice whose closures coincide: the unit
// box and the box with its lower-right and upper-left reach halved. Both
// close to the triangle {w >= 0, w0 + w1 <= 1}.
inline std::pair<geometry::ConvexBody, geometry::ConvexBody>
gnrh_asymmetry_pair() {
  Mat box(4, 2);
  box << 0, 0, 1, 0, 0, 1, 1, 1;
  Mat cut(4, 2);
  cut << 0, 0, 0.5, 0, 0, 0.5, 1, 1;
  return {geometry::ConvexBody::vertex_hull(box),
          geometry::ConvexBody::vertex_hull(cut)};
}

}  // namespace theories
}  // namespace flipcert
