#pragma once

#include <cstdint>
#include <span>

#include "pathprob/estimates.hpp"
#include "pathprob/lattice.hpp"
#include "pathprob/numerics.hpp"
#include "pathprob/potentials.hpp"
#include "pathprob/weights.hpp"

namespace pathprob {

enum class ProposalKind { gaussian_bridge, cauchy_bridge };

struct SamplerConfig {
  ProposalKind kind = ProposalKind::cauchy_bridge;
  double sigma = 1.0;        // gaussian bridge: per-step variance sigma^2 eps
  double gamma_prop = 0.0;   // cauchy bridge scale; 0 means use the lattice gamma
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  int batches = 32;
  StepForm form = StepForm::linear;

  void validate() const;
};

struct BridgeSample {
  Path path;
  double log_density = 0;   // density of (z_1..z_{n-1})
};

BridgeSample sample_bridge_path(const LatticeConfig& cfg, const SamplerConfig& sc, SplitMix64& rng);

struct MonteCarloEstimate {
  TransitionEstimate estimate;
  double ess = 0;
  double negative_mass_fraction = 0;
  double excess_kurtosis = 0;   // of the weight/density ratio
  std::uint64_t seed = 0;
};

MonteCarloEstimate estimate_transition_mc(const BandLimitedPotential& p, const LatticeConfig& cfg,
                                          const SamplerConfig& sc);

// Ratios W/density per sample, in sample order. Reused by the analysis scans.
std::vector<double> sample_ratios(const BandLimitedPotential& p, const LatticeConfig& cfg,
                                  const SamplerConfig& sc,
                                  std::vector<double>* max_abs_s = nullptr);

double effective_sample_size(std::span<const double> w);

} // namespace pathprob
