#pragma once

#include <stdexcept>
#include <vector>

namespace kz {

// Periodic Ising chain: bond i couples sites i and (i+1) mod L.
// Couplings and fields are dimensionless; the schedule's Jcal(s) multiplies
// both at evaluation time.
struct ChainSpec {
  int L = 0;
  double j_nominal = 0.0;
  std::vector<double> couplings;  // size L
  std::vector<double> fields;     // size L, zero for the fermionic solvers

  static ChainSpec uniform(int L, double J) {
    if (L < 2) throw std::invalid_argument("ChainSpec: L must be >= 2");
    ChainSpec c;
    c.L = L;
    c.j_nominal = J;
    c.couplings.assign(static_cast<std::size_t>(L), J);
    c.fields.assign(static_cast<std::size_t>(L), 0.0);
    return c;
  }

  void validate() const {
    if (L < 2) throw std::invalid_argument("ChainSpec: L must be >= 2");
    if (couplings.size() != static_cast<std::size_t>(L))
      throw std::invalid_argument("ChainSpec: couplings size must equal L");
    if (fields.size() != static_cast<std::size_t>(L))
      throw std::invalid_argument("ChainSpec: fields size must equal L");
  }

  bool has_fields() const {
    for (double h : fields)
      if (h != 0.0) return true;
    return false;
  }
};

}  // namespace kz
