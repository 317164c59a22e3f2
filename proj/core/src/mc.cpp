#include "kzchain/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kzchain/parallel.hpp"
#include "kzchain/rng.hpp"

namespace kz {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct LocalChain {
  int L;
  std::vector<double> J;  // per-bond
  std::vector<double> h;  // per-site, offsets applied
};

LocalChain make_local(const SamplerRequest& req) {
  req.chain.validate();
  LocalChain lc;
  lc.L = req.chain.L;
  lc.J = req.chain.couplings;
  lc.h.assign(lc.L, 0.0);
  if (!req.chain.fields.empty())
    for (int i = 0; i < lc.L; ++i) lc.h[i] = req.chain.fields[i];
  if (!req.field_offsets.empty()) {
    if (static_cast<int>(req.field_offsets.size()) != lc.L)
      throw std::invalid_argument("sampler: field_offsets size mismatch");
    for (int i = 0; i < lc.L; ++i) lc.h[i] += req.field_offsets[i];
  }
  return lc;
}

void shuffle_order(std::vector<int>& order, CounterRng& rng) {
  for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }
}

Spins sa_anneal(const LocalChain& lc, const SamplerRequest& req, CounterRng& rng) {
  const int L = lc.L;
  Spins s(L);
  for (int i = 0; i < L; ++i) s[i] = rng.next_u64() & 1 ? 1 : -1;
  std::vector<int> order(L);
  for (int i = 0; i < L; ++i) order[i] = i;
  const double ratio = req.beta_cold / req.beta_hot;
  for (int t = 0; t < req.sweeps; ++t) {
    const double beta =
        req.fixed_beta
            ? req.beta
            : req.beta_hot * std::pow(ratio, req.sweeps > 1
                                                 ? static_cast<double>(t) / (req.sweeps - 1)
                                                 : 1.0);
    shuffle_order(order, rng);
    for (int i : order) {
      const int lm = (i + L - 1) % L, rp = (i + 1) % L;
      const double local = lc.J[lm] * s[lm] + lc.J[i] * s[rp] + lc.h[i];
      const double dE = -2.0 * s[i] * local;
      if (dE <= 0.0 || rng.next_double() < std::exp(-beta * dE)) s[i] = -s[i];
    }
  }
  return s;
}

struct SvmcContext {
  double scale = 1.0;  // Gamma(s_c), so the rescaled crossing sits at 1
  double jmag = 1.0;   // |J_nominal|
};

Spins svmc_anneal(const LocalChain& lc, const SamplerRequest& req, const Schedule& schedule,
                  const SvmcContext& ctx, CounterRng& rng) {
  const int L = lc.L;
  const double s0 = schedule.s_min(), s1 = schedule.s_max();
  std::vector<double> theta(L, 0.5 * kPi);
  std::vector<double> soff(L, 0.0);
  if (!req.s_offsets.empty()) {
    if (static_cast<int>(req.s_offsets.size()) != L)
      throw std::invalid_argument("svmc: s_offsets size mismatch");
    soff = req.s_offsets;
  }
  std::vector<int> order(L);
  for (int i = 0; i < L; ++i) order[i] = i;
  std::vector<double> gam(L), jc(L);
  for (int t = 0; t < req.sweeps; ++t) {
    const double sbase =
        s0 + (s1 - s0) * (req.sweeps > 1 ? static_cast<double>(t) / (req.sweeps - 1) : 1.0);
    for (int i = 0; i < L; ++i) {
      const double si = std::clamp(sbase + soff[i], s0, s1);
      const auto [g, j] = schedule.eval(si);
      gam[i] = g / ctx.scale;
      jc[i] = j / ctx.scale;
    }
    shuffle_order(order, rng);
    for (int i : order) {
      const int lm = (i + L - 1) % L, rp = (i + 1) % L;
      const double cl = std::cos(theta[lm]), cr = std::cos(theta[rp]);
      auto local_e = [&](double th) {
        const double c = std::cos(th);
        return -gam[i] * std::sin(th) + jc[i] * (c * (lc.J[lm] * cl + lc.J[i] * cr) + lc.h[i] * c);
      };
      const double denom = jc[i] * ctx.jmag;
      const double w = denom > 0.0 ? kPi * std::min(1.0, gam[i] / denom) : kPi;
      double prop;
      if (w <= 0.0) {
        prop = kPi - theta[i];  // closed window: exact pole flip
      } else {
        prop = theta[i] + (2.0 * rng.next_double() - 1.0) * w;
        // Fold back into [0, pi] by reflection to keep the kernel symmetric.
        while (prop < 0.0 || prop > kPi) {
          if (prop < 0.0) prop = -prop;
          if (prop > kPi) prop = 2.0 * kPi - prop;
        }
      }
      const double dE = local_e(prop) - local_e(theta[i]);
      if (dE <= 0.0 || rng.next_double() < std::exp(-req.beta * dE)) theta[i] = prop;
    }
  }
  Spins out(L);
  for (int i = 0; i < L; ++i) out[i] = std::cos(theta[i]) >= 0.0 ? 1 : -1;
  return out;
}

template <typename AnnealFn>
SampleSet collect(const SamplerRequest& req, const std::string& id, AnnealFn&& anneal) {
  if (req.n_samples < 1 || req.n_batches < 1 || req.sweeps < 1)
    throw std::invalid_argument("sampler: n_samples, n_batches and sweeps must be >= 1");
  SampleSet set;
  set.L = req.chain.L;
  set.sampler_id = id;
  set.seed = req.seed;
  set.params["sweeps"] = req.sweeps;
  set.params["beta"] = req.beta;
  set.batches.assign(req.n_batches, std::vector<Spins>(req.n_samples));
  const std::size_t total = static_cast<std::size_t>(req.n_batches) * req.n_samples;
  parallel_for(total, [&](std::size_t k) {
    const int b = static_cast<int>(k / req.n_samples);
    const int n = static_cast<int>(k % req.n_samples);
    const std::uint64_t stream = (static_cast<std::uint64_t>(b) << 32) | static_cast<std::uint64_t>(n);
    CounterRng rng(req.seed, stream);
    set.batches[b][n] = anneal(rng);
  });
  return set;
}

}  // namespace

SampleSet run_sa(const SamplerRequest& request) {
  const LocalChain lc = make_local(request);
  return collect(request, "sa", [&](CounterRng& rng) { return sa_anneal(lc, request, rng); });
}

SampleSet run_svmc_tf(const SamplerRequest& request, const Schedule& schedule) {
  const LocalChain lc = make_local(request);
  SvmcContext ctx;
  ctx.jmag = std::abs(request.chain.j_nominal);
  if (ctx.jmag == 0.0) ctx.jmag = 1.0;
  try {
    const double sc = schedule.critical_point(ctx.jmag);
    const double g = schedule.gamma(sc);
    if (g > 0.0) ctx.scale = g;
  } catch (const std::exception&) {
    ctx.scale = 1.0;  // no crossing on this schedule; use raw GHz units
  }
  return collect(request, "svmc-tf",
                 [&](CounterRng& rng) { return svmc_anneal(lc, request, schedule, ctx, rng); });
}

SvmcSampler::SvmcSampler(SamplerRequest request, Schedule schedule)
    : request_(std::move(request)), schedule_(std::move(schedule)) {
  request_.chain.validate();
  nominal_ = request_.chain.couplings;
}

void SvmcSampler::set_flux(const std::vector<double>& phi) {
  if (static_cast<int>(phi.size()) != size())
    throw std::invalid_argument("SvmcSampler: flux size mismatch");
  request_.field_offsets.assign(size(), 0.0);
  for (int i = 0; i < size(); ++i) request_.field_offsets[i] = -phi[i];
}

void SvmcSampler::set_couplings(const std::vector<double>& j) {
  if (static_cast<int>(j.size()) != size())
    throw std::invalid_argument("SvmcSampler: couplings size mismatch");
  request_.chain.couplings = j;
}

void SvmcSampler::set_offsets(const std::vector<double>& per_site_s_offset) {
  if (static_cast<int>(per_site_s_offset.size()) != size())
    throw std::invalid_argument("SvmcSampler: offsets size mismatch");
  request_.s_offsets = per_site_s_offset;
}

SampleSet SvmcSampler::sample_batch(int n_samples, std::uint64_t seed) {
  SamplerRequest req = request_;
  req.n_samples = n_samples;
  req.n_batches = 1;
  req.seed = seed;
  return run_svmc_tf(req, schedule_);
}

}  // namespace kz
