#include "kzchain/shim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace kz {

std::vector<int> assign_lines(int L, int n_lines) {
  if (L < 2 || L % 2 != 0) throw std::invalid_argument("assign_lines: L must be even");
  if (n_lines < 2 || n_lines % 2 != 0)
    throw std::invalid_argument("assign_lines: n_lines must be even and >= 2");
  std::vector<int> lines(L);
  if (L % n_lines == 0) {
    for (int i = 0; i < L; ++i) lines[i] = i % n_lines;
  } else {
    // Parity fallback: odd sites on the first half of the lines, even sites
    // on the second half, so bonded sites always differ.
    const int half = n_lines / 2;
    for (int i = 0; i < L; ++i)
      lines[i] = i % 2 == 0 ? (i / 2) % half : half + (i / 2) % half;
  }
  for (int i = 0; i < L; ++i)
    if (lines[i] == lines[(i + 1) % L]) throw std::logic_error("assign_lines: bonded sites share a line");
  return lines;
}

ShimState make_shim_state(const AnnealSampler& sampler, int n_lines) {
  ShimState st;
  st.flux.assign(sampler.size(), 0.0);
  st.couplings = sampler.nominal_couplings();
  st.offsets.assign(n_lines, 0.0);
  return st;
}

namespace {

double stdev(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / v.size());
}

}  // namespace

void shim_iteration(AnnealSampler& sampler, ShimState& state, const ShimConfig& config,
                    const std::vector<int>& lines, std::uint64_t seed) {
  const int L = sampler.size();
  const auto nominal = sampler.nominal_couplings();

  std::vector<double> scaled_flux(L);
  for (int i = 0; i < L; ++i) scaled_flux[i] = config.kappa * state.flux[i];
  sampler.set_flux(scaled_flux);
  sampler.set_couplings(state.couplings);
  std::vector<double> site_offsets(L);
  for (int i = 0; i < L; ++i)
    site_offsets[i] = std::clamp(state.offsets[lines[i]], -config.offset_clamp,
                                 config.offset_clamp);
  sampler.set_offsets(site_offsets);

  const SampleSet batch = sampler.sample_batch(config.batch_size, seed);

  ShimIterationRecord rec;
  rec.m.assign(L, 0.0);
  rec.f.assign(L, 0.0);
  const std::size_t n = batch.n_samples();
  for (const auto& group : batch.batches)
    for (const auto& s : group)
      for (int i = 0; i < L; ++i) {
        rec.m[i] += s[i];
        rec.f[i] += s[i] * s[(i + 1) % L];
      }
  for (int i = 0; i < L; ++i) {
    rec.m[i] /= static_cast<double>(n);
    const double c = rec.f[i] / static_cast<double>(n);
    const double sg = nominal[i] >= 0.0 ? 1.0 : -1.0;
    rec.f[i] = 0.5 * (sg * c + 1.0);
  }
  rec.nbar = 0.0;
  for (double f : rec.f) rec.nbar += f;
  rec.nbar /= L;
  const int n_lines = static_cast<int>(state.offsets.size());
  rec.line_frustration.assign(n_lines, 0.0);
  std::vector<int> count(n_lines, 0);
  for (int i = 0; i < L; ++i) {
    // Bond i couples sites i and i+1; it contributes to both incident lines.
    for (int site : {i, (i + 1) % L}) {
      rec.line_frustration[lines[site]] += rec.f[i];
      ++count[lines[site]];
    }
  }
  for (int l = 0; l < n_lines; ++l)
    if (count[l] > 0) rec.line_frustration[l] /= count[l];

  for (int i = 0; i < L; ++i) state.flux[i] -= config.alpha_flux * rec.m[i];
  for (int i = 0; i < L; ++i) {
    // Strengthen under-expressed (over-frustrated) couplers: move the
    // magnitude, which for antiferromagnetic sign is the plain additive step.
    const double sg = nominal[i] >= 0.0 ? 1.0 : -1.0;
    double j = state.couplings[i] + sg * config.alpha_j * (rec.f[i] - rec.nbar);
    j = (1.0 - config.delta_j) * j + config.delta_j * nominal[i];
    state.couplings[i] =
        std::clamp(j, nominal[i] - config.coupling_clamp, nominal[i] + config.coupling_clamp);
  }
  for (int l = 0; l < n_lines; ++l) {
    double o = state.offsets[l] + config.alpha_offset * (rec.line_frustration[l] - rec.nbar);
    o *= 1.0 - config.delta_offset;
    state.offsets[l] = std::clamp(o, -config.offset_clamp, config.offset_clamp);
  }
  state.history.push_back(std::move(rec));
}

ShimState run_shim(AnnealSampler& sampler, const ShimConfig& config, int n_iterations,
                   std::uint64_t seed) {
  const auto lines = assign_lines(sampler.size(), config.n_lines);
  ShimState state = make_shim_state(sampler, config.n_lines);
  for (int it = 0; it < n_iterations; ++it)
    shim_iteration(sampler, state, config, lines, seed + static_cast<std::uint64_t>(it));
  return state;
}

ShimState run_shim_staged(AnnealSampler& sampler, const ShimConfig& config,
                          const std::vector<int>& stages, std::uint64_t seed) {
  const auto lines = assign_lines(sampler.size(), config.n_lines);
  ShimState state = make_shim_state(sampler, config.n_lines);
  std::uint64_t it = 0;
  for (std::size_t stage = 0; stage < stages.size(); ++stage) {
    ShimConfig cfg = config;
    if (stage < 1) cfg.alpha_flux = 0.0;
    if (stage < 2) {
      cfg.alpha_j = 0.0;
      cfg.delta_j = 0.0;
    }
    if (stage < 3) {
      cfg.alpha_offset = 0.0;
      cfg.delta_offset = 0.0;
    }
    for (int k = 0; k < stages[stage]; ++k)
      shim_iteration(sampler, state, cfg, lines, seed + it++);
  }
  return state;
}

ShimReport shim_report(const ShimState& state, int window) {
  if (state.history.empty()) throw std::runtime_error("shim_report: empty history");
  window = std::clamp<int>(window, 1, static_cast<int>(state.history.size()));
  const int L = static_cast<int>(state.history.front().m.size());
  auto window_mean = [&](bool head, bool use_m) {
    // Averages the per-site statistic over the window first, so the spread of
    // systematic biases is measured above the single-batch noise floor.
    std::vector<double> mean(use_m ? L : static_cast<int>(state.history.front().f.size()), 0.0);
    const int n = static_cast<int>(state.history.size());
    const int lo = head ? 0 : n - window;
    for (int t = lo; t < lo + window; ++t) {
      const auto& v = use_m ? state.history[t].m : state.history[t].f;
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
    }
    for (auto& x : mean) x /= window;
    return mean;
  };
  auto median_abs = [](std::vector<double> v) {
    for (auto& x : v) x = std::fabs(x);
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  ShimReport rep;
  rep.std_m_before = stdev(window_mean(true, true));
  rep.std_m_after = stdev(window_mean(false, true));
  rep.std_f_before = stdev(window_mean(true, false));
  rep.std_f_after = stdev(window_mean(false, false));
  rep.med_abs_m_before = median_abs(window_mean(true, true));
  rep.med_abs_m_after = median_abs(window_mean(false, true));
  return rep;
}

void write_shim_csv(const ShimState& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_shim_csv: cannot open " + path);
  const int n_lines =
      state.history.empty() ? 0 : static_cast<int>(state.history.front().line_frustration.size());
  out << "iteration,std_m,std_f,nbar";
  for (int l = 0; l < n_lines; ++l) out << ",F_" << (l + 1);
  out << "\n";
  char buf[64];
  for (std::size_t t = 0; t < state.history.size(); ++t) {
    const auto& rec = state.history[t];
    out << t;
    std::snprintf(buf, sizeof(buf), ",%.17g", stdev(rec.m));
    out << buf;
    std::snprintf(buf, sizeof(buf), ",%.17g", stdev(rec.f));
    out << buf;
    std::snprintf(buf, sizeof(buf), ",%.17g", rec.nbar);
    out << buf;
    for (double fl : rec.line_frustration) {
      std::snprintf(buf, sizeof(buf), ",%.17g", fl);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace kz
