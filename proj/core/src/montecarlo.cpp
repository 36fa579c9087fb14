#include "pathprob/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pathprob/errors.hpp"

namespace pathprob {

void SamplerConfig::validate() const {
  if (batches < 8) throw UsageError("sampler: batch count must be >= 8");
  if (samples < static_cast<std::uint64_t>(batches)) throw UsageError("sampler: samples must be >= batches");
  if (kind == ProposalKind::gaussian_bridge && !(sigma > 0)) throw UsageError("sampler: sigma must be > 0");
  if (kind == ProposalKind::cauchy_bridge && gamma_prop < 0) throw UsageError("sampler: gamma_prop must be >= 0");
}

namespace {

double fill_bridge(const LatticeConfig& cfg, const SamplerConfig& sc, SplitMix64& rng,
                   std::span<double> s, std::span<double> z) {
  const int n = cfg.n;
  const double eps = cfg.eps();
  if (sc.kind == ProposalKind::cauchy_bridge) {
    const double g = sc.gamma_prop > 0 ? sc.gamma_prop : cfg.gamma;
    double logp = std::log(static_cast<double>(n)) - (n - 1) * std::log(eps);
    for (int j = 0; j < n - 1; ++j) {
      s[j] = rng.cauchy(g);
      logp += std::log(lorentzian(s[j], g) / two_pi);
    }
    path_from_velocity_changes(cfg, s, z);
    return logp;
  }
  // Brownian bridge around the straight line
  const double var = sc.sigma * sc.sigma * eps;
  const double sd = std::sqrt(var);
  double b = 0;
  z[0] = 0;
  for (int j = 1; j <= n; ++j) {
    b += sd * rng.normal();
    z[j] = b;
  }
  const double bn = z[n];
  double quad = 0, prev = 0;
  for (int j = 1; j <= n; ++j) {
    double w = z[j] - bn * j / n;
    quad += (w - prev) * (w - prev);
    prev = w;
    z[j] = w;
  }
  for (int j = 0; j <= n; ++j) z[j] += cfg.za + (cfg.zb - cfg.za) * j / n;
  z[0] = cfg.za;
  z[n] = cfg.zb;
  for (int j = 1; j < n; ++j) s[j - 1] = (z[j + 1] - 2 * z[j] + z[j - 1]) / eps;
  return -quad / (2 * var) - 0.5 * (n - 1) * std::log(two_pi * var) + 0.5 * std::log(static_cast<double>(n));
}

} // namespace

BridgeSample sample_bridge_path(const LatticeConfig& cfg, const SamplerConfig& sc, SplitMix64& rng) {
  cfg.validate();
  BridgeSample out;
  out.path.z.resize(cfg.n + 1);
  std::vector<double> s(cfg.n - 1);
  out.log_density = fill_bridge(cfg, sc, rng, s, out.path.z);
  return out;
}

std::vector<double> sample_ratios(const BandLimitedPotential& p, const LatticeConfig& cfg,
                                  const SamplerConfig& sc, std::vector<double>* max_abs_s) {
  cfg.validate();
  sc.validate();
  const std::int64_t N = static_cast<std::int64_t>(sc.samples);
  std::vector<double> ratio(N);
  if (max_abs_s) max_abs_s->assign(N, 0.0);
  std::string failure;

#pragma omp parallel
  {
    std::vector<double> s(cfg.n - 1), z(cfg.n + 1);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < N; ++i) {
      try {
        SplitMix64 rng = SplitMix64::stream(sc.seed, static_cast<std::uint64_t>(i));
        double logp = fill_bridge(cfg, sc, rng, s, z);
        SignedLog w = path_log_weight(p, z, cfg, sc.form);
        ratio[i] = w.sign == 0 ? 0.0 : w.sign * std::exp(w.log_abs - logp);
        if (max_abs_s) {
          double m = 0;
          for (double v : s) m = std::max(m, std::abs(v));
          (*max_abs_s)[i] = m;
        }
      } catch (const Error& e) {
#pragma omp critical(pathprob_mc_failure)
        failure = e.what();
      }
    }
  }
  if (!failure.empty()) throw NumericError("monte carlo: " + failure);
  return ratio;
}

double effective_sample_size(std::span<const double> w) {
  if (w.empty()) throw UsageError("effective_sample_size: empty sample");
  double sum = 0, sq = 0;
  for (double x : w) {
    sum += x;
    sq += x * x;
  }
  return sq == 0 ? 0.0 : sum * sum / sq;
}

MonteCarloEstimate estimate_transition_mc(const BandLimitedPotential& p, const LatticeConfig& cfg,
                                          const SamplerConfig& sc) {
  std::vector<double> r = sample_ratios(p, cfg, sc);
  const std::size_t N = r.size();
  const int B = sc.batches;
  const double norm = 1.0 / (two_pi * cfg.duration());

  std::vector<double> batch_mean(B);
  for (int b = 0; b < B; ++b) {
    std::size_t lo = N * b / B, hi = N * (b + 1) / B;
    batch_mean[b] = pairwise_sum(std::span<const double>(r).subspan(lo, hi - lo)) / static_cast<double>(hi - lo);
  }
  const double mean = pairwise_sum(r) / static_cast<double>(N);
  double var_b = 0;
  for (double m : batch_mean) var_b += (m - mean) * (m - mean);
  var_b /= (B - 1);

  MonteCarloEstimate out;
  out.seed = sc.seed;
  out.estimate.method = sc.kind == ProposalKind::cauchy_bridge ? "mc-cauchy" : "mc-gaussian";
  out.estimate.n = cfg.n;
  out.estimate.eps = cfg.eps();
  out.estimate.gamma = cfg.gamma;
  out.estimate.value = norm * mean;
  out.estimate.std_error = norm * std::sqrt(var_b / B);

  std::vector<double> absr(N), neg(N), c2(N), c4(N);
  for (std::size_t i = 0; i < N; ++i) {
    absr[i] = std::abs(r[i]);
    neg[i] = r[i] < 0 ? -r[i] : 0.0;
    double d = r[i] - mean;
    c2[i] = d * d;
    c4[i] = d * d * d * d;
  }
  double total_abs = pairwise_sum(absr);
  out.negative_mass_fraction = total_abs > 0 ? pairwise_sum(neg) / total_abs : 0.0;
  double m2 = pairwise_sum(c2) / static_cast<double>(N);
  double m4 = pairwise_sum(c4) / static_cast<double>(N);
  out.excess_kurtosis = m2 > 0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  out.ess = effective_sample_size(r);
  if (out.ess < 10)
    throw NumericError("monte carlo: effective sample size " + std::to_string(out.ess) +
                       " < 10; retune the proposal (gamma_prop or sigma)");
  return out;
}

} // namespace pathprob
