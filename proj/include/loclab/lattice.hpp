#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace loclab {

enum class Boundary { periodic, open };

inline const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "open";
}

/// One-dimensional chain of n_sites with a fixed particle number.
/// Site coordinates are 1-based in every formula (storage is 0-based).
struct LatticeSpec {
  int n_sites = 0;
  Boundary boundary = Boundary::periodic;
  int filling = 0;

  void validate() const {
    if (n_sites < 1) throw std::invalid_argument("LatticeSpec: n_sites must be positive");
    if (filling < 1 || filling > n_sites)
      throw std::invalid_argument("LatticeSpec: filling must satisfy 0 < M <= N (got M=" +
                                  std::to_string(filling) + ", N=" + std::to_string(n_sites) + ")");
  }
};

/// Default quasiperiodic wave number, (sqrt(5)-1)/2.
inline double golden_beta() { return 0.5 * (std::sqrt(5.0) - 1.0); }

/// 1-based site coordinate of storage index i.
inline double site_position(int i) { return static_cast<double>(i + 1); }

inline double momentum_angle(int p, int n) {
  return 2.0 * M_PI * static_cast<double>(p) / static_cast<double>(n);
}

}  // namespace loclab
