#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kzchain/mc.hpp"

namespace kz {

struct ShimConfig {
  double alpha_flux = 5e-6;
  double alpha_j = 0.2;
  double alpha_offset = 0.02;
  double delta_j = 0.02;
  double delta_offset = 0.002;
  int n_lines = 4;
  // Simulator-side semantics of the hardware knobs: flux maps to a field
  // perturbation h_i <- h_i - kappa*Phi_i; offsets shift s per site, clamped.
  double kappa = 1.0;
  double offset_clamp = 0.05;
  double coupling_clamp = 0.5;  // max |J_ij - J_nominal|
  int batch_size = 100;
};

struct ShimIterationRecord {
  std::vector<double> m;          // per-site magnetization
  std::vector<double> f;          // per-bond frustration
  std::vector<double> line_frustration;
  double nbar = 0.0;
};

struct ShimState {
  std::vector<double> flux;       // per site
  std::vector<double> couplings;  // per bond, adjusted
  std::vector<double> offsets;    // per line
  std::vector<ShimIterationRecord> history;
};

struct ShimReport {
  double std_m_before = 0.0, std_m_after = 0.0;
  double std_f_before = 0.0, std_f_after = 0.0;
  double med_abs_m_before = 0.0, med_abs_m_after = 0.0;  // median over sites of |m_i|
};

// Line assignment such that bonded sites always sit on different lines:
// cyclic i mod n_lines when that divides L, parity fallback otherwise.
std::vector<int> assign_lines(int L, int n_lines);

ShimState make_shim_state(const AnnealSampler& sampler, int n_lines);

// One refinement step: draw a batch, measure (m_i, f_ij, F_l, nbar), update
// flux / couplings / line offsets with their step sizes, then damp.
void shim_iteration(AnnealSampler& sampler, ShimState& state, const ShimConfig& config,
                    const std::vector<int>& lines, std::uint64_t seed);

// Iterates the shim; per-iteration seeds derive from `seed`.  The report
// averages the first and last `window` iterations of the history.
ShimState run_shim(AnnealSampler& sampler, const ShimConfig& config, int n_iterations,
                   std::uint64_t seed);
ShimReport shim_report(const ShimState& state, int window = 20);

/// Staged protocol: stages give iteration counts; stage k enables the first k
// adjustment groups (none / flux / +couplers / +offsets).
ShimState run_shim_staged(AnnealSampler& sampler, const ShimConfig& config,
                          const std::vector<int>& stages, std::uint64_t seed);

// CSV per iteration: iteration, std_m, std_f, nbar, F_1..F_n.
void write_shim_csv(const ShimState& state, const std::string& path);

}  // namespace kz
