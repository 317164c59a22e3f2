#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "kzchain/chain.hpp"
#include "kzchain/schedule.hpp"

namespace kz {

// Matrix product state over L sites of physical dimension 2.  Site tensor i
// has shape (chiL, 2, chiR), stored as a (chiL*2) x chiR matrix with row
// index a*2 + sigma.
struct MpsState {
  std::vector<Eigen::MatrixXcd> tensors;
  double discarded_weight = 0.0;
  std::vector<double> bond_entropy;  // entanglement entropy at each cut, updated per SVD

  int size() const { return static_cast<int>(tensors.size()); }
  int bond_dim(int cut) const { return static_cast<int>(tensors[cut].cols()); }
  int max_bond_dim() const;
  double norm() const;

  // All-spins-aligned-in-x product state, the s=0 ground state.
  static MpsState plus_product(int L);
};

struct TebdConfig {
  int D = 32;                  // bond dimension cap
  double dt_ns = 0.01;         // Trotter step
  double svd_threshold = 1e-12;  // relative singular-value cutoff
  int r_max = 0;               // correlator range; 0 -> L/2
};

// Mapping of the periodic chain onto a linear chain with next-nearest
// neighbor gates and nearest-neighbor gates at both edges.
struct LinearMapping {
  std::vector<int> lin_of_ring;                 // ring site -> linear position
  std::vector<std::pair<int, int>> bonds;       // per ring bond, sorted linear pair
  std::vector<int> sweep;                       // gate order per slice, as ring-bond ids;
                                                // the middle entry is the squared center gate
  std::vector<bool> full_dt;                    // true for the center gate
};
LinearMapping map_periodic_to_linear(int L);

// One symmetric Trotter slice at schedule point s.
void trotter_slice(MpsState& mps, const ChainSpec& chain, const Schedule& schedule, double s,
                   const TebdConfig& config, const LinearMapping& mapping);

struct TebdObservables {
  double nbar = 0.0;
  std::vector<double> two_point;  // <sigma^z sigma^z> per ring bond
  std::map<int, double> ckk;
  double discarded_weight = 0.0;
  std::vector<double> bond_entropy;
};

// Evolves |+x...+x> across the schedule and evaluates kink observables by
// exact MPS expectation values (no sampling).
std::pair<MpsState, TebdObservables> run_tebd(const ChainSpec& chain, const Schedule& schedule,
                                              double t_a_ns, const TebdConfig& config);

// Observables on an existing state (chain supplies coupling signs).
TebdObservables measure_kinks(MpsState& mps, const ChainSpec& chain, const LinearMapping& mapping,
                              int r_max);

}  // namespace kz
