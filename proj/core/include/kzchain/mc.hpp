#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "kzchain/chain.hpp"
#include "kzchain/samples.hpp"
#include "kzchain/schedule.hpp"

namespace kz {

struct SamplerRequest {
  ChainSpec chain;
  int n_samples = 100;  // per batch (one batch models one annealer call)
  int n_batches = 1;
  int sweeps = 1000;  // anneal duration; s (or beta) advances linearly over sweeps
  double beta = 32.0;  // SVMC-TF inverse temperature, or SA fixed-beta mode
  double beta_hot = 0.1, beta_cold = 100.0;  // SA geometric schedule endpoints
  bool fixed_beta = false;                   // SA: equilibrate at `beta` instead of annealing
  std::uint64_t seed = 0;
  std::vector<double> field_offsets;  // additive per-site field perturbations (flux shim)
  std::vector<double> s_offsets;      // additive per-site anneal offsets (SVMC only)
};

// Simulated annealing: single-spin Metropolis on E = sum_i J_i s_i s_{i+1} +
// sum_i h_i s_i with a freshly shuffled update order each sweep and a
// geometric beta schedule from beta_hot to beta_cold.
SampleSet run_sa(const SamplerRequest& request);

// Spin-vector Monte Carlo with transverse-field-dependent proposal windows:
// rotors theta_i in [0, pi], E(theta; s) = -G(s) sum sin(theta_i)
// + Jc(s) [sum J_i cos(theta_i)cos(theta_{i+1}) + sum h_i cos(theta_i)],
// with G, Jc rescaled so their crossing sits at 1; proposals are uniform in a
// window of half-width pi*min(1, G/(Jc|J|)) folded back into [0, pi]
// (an exact pole flip when the window closes at G = 0); readout is
// sign(cos theta).
SampleSet run_svmc_tf(const SamplerRequest& request, const Schedule& schedule);

// Sampler abstraction consumed by the calibration-refinement loop.  flux is
// pre-scaled by the caller's gain and subtracts from the site fields.
class AnnealSampler {
 public:
  virtual ~AnnealSampler() = default;
  virtual int size() const = 0;
  virtual std::vector<double> nominal_couplings() const = 0;
  virtual void set_flux(const std::vector<double>& phi) = 0;
  virtual void set_couplings(const std::vector<double>& j) = 0;
  virtual void set_offsets(const std::vector<double>& per_site_s_offset) = 0;
  virtual SampleSet sample_batch(int n_samples, std::uint64_t seed) = 0;
};

// run_svmc_tf behind the AnnealSampler interface.
class SvmcSampler : public AnnealSampler {
 public:
  SvmcSampler(SamplerRequest request, Schedule schedule);
  int size() const override { return request_.chain.L; }
  std::vector<double> nominal_couplings() const override { return nominal_; }
  void set_flux(const std::vector<double>& phi) override;
  void set_couplings(const std::vector<double>& j) override;
  void set_offsets(const std::vector<double>& per_site_s_offset) override;
  SampleSet sample_batch(int n_samples, std::uint64_t seed) override;

 private:
  SamplerRequest request_;
  Schedule schedule_;
  std::vector<double> nominal_;
};

}  // namespace kz
