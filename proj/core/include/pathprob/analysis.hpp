#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathprob/lattice.hpp"
#include "pathprob/montecarlo.hpp"
#include "pathprob/potentials.hpp"
#include "pathprob/quadrature.hpp"

namespace pathprob {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
};

// configs, seeds and version; the timestamp is the only nondeterministic field
nlohmann::json provenance(const std::string& scan, const nlohmann::json& inputs);

struct ConcentrationRow {
  double gamma = 0;
  double fraction = 0;
  double std_error = 0;
};

// Free particle; weighted fraction of path mass with max_j |s_j| > delta.
std::vector<ConcentrationRow> classical_concentration_scan(const LatticeConfig& cfg,
                                                           const std::vector<double>& gammas,
                                                           double delta, const SamplerConfig& sc);

enum class SweepMethod { quadrature, mc };

struct SweepOptions {
  SweepMethod method = SweepMethod::quadrature;
  int points_per_dim = 65;
  SamplerConfig sampler{};
};

struct SweepCell {
  int n = 0;
  double gamma = 0;
  double value = 0;
  double std_error = 0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  // per gamma: value at 1/n -> 0 from a linear fit in 1/n
  std::vector<std::pair<double, double>> n_extrapolated;
  GammaExtrapolation gamma_extrapolated;

  Table table() const;
};

SweepResult convergence_sweep(const BandLimitedPotential& p, const LatticeConfig& base,
                              const std::vector<int>& ns, const std::vector<double>& gammas,
                              const SweepOptions& opt = {});

struct LinearizationRow {
  double z = 0;
  double s = 0;
  std::vector<double> eps;
  std::vector<double> normalized;   // 2 pi eps e^{gamma|z|} |Q_exp - Q_lin|
  std::vector<double> raw;          // |Q_exp - Q_lin|
  double slope = 0;                 // log-log slope of normalized
  double slope_raw = 0;
};

std::vector<LinearizationRow> linearization_order_scan(const BandLimitedPotential& p,
                                                       const std::vector<std::pair<double, double>>& points,
                                                       double gamma, const std::vector<double>& eps);

Table linearization_table(const std::vector<LinearizationRow>& rows);
Table concentration_table(const std::vector<ConcentrationRow>& rows);

} // namespace pathprob
