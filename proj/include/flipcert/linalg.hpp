#pragma once

// Shared linear-algebra aliases and small numeric helpers.

#include <Eigen/Dense>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace flipcert {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Pairing between a strategy and a functional. Errors on dimension mismatch
// so malformed protocol data fails loudly instead of silently broadcasting.
inline double inner(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("inner: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  return a.dot(b);
}

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

// Shortest-ish round-trip decimal for doubles; %.17g always round-trips.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

// Deterministic RNG for all sampling paths. The SEED environment variable
// overrides the default so covering checks can be re-randomized.
inline std::uint64_t sampling_seed() {
  if (const char* s = std::getenv("SEED")) {
    try {
      return std::stoull(s);
    } catch (...) {
      throw std::invalid_argument("SEED must be a nonnegative integer");
    }
  }
  return 0x5eedf11bc0137u;
}

using Rng = std::mt19937_64;

}  // namespace flipcert
