#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "pathprob/analysis.hpp"
#include "pathprob/lattice.hpp"
#include "pathprob/montecarlo.hpp"
#include "pathprob/oracle.hpp"
#include "pathprob/potentials.hpp"
#include "pathprob/weights.hpp"

namespace pathprob {

BandLimitedPotential potential_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BandLimitedPotential& p);

LatticeConfig lattice_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LatticeConfig& cfg);

SamplerConfig sampler_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SamplerConfig& sc);

OracleSettings oracle_from_json(const nlohmann::json& j);
nlohmann::json to_json(const OracleSettings& s);

nlohmann::json to_json(const WeightEvaluation& w);
nlohmann::json to_json(const PositivityThreshold& t);
nlohmann::json to_json(const TransitionEstimate& e);
nlohmann::json to_json(const MonteCarloEstimate& e);
nlohmann::json to_json(const KernelEstimate& k);
nlohmann::json to_json(const OracleKernel& k);
nlohmann::json to_json(const CkResult& r);

nlohmann::json read_json_file(const std::string& path);

// +inf and NaN are not JSON numbers; they go out as strings
nlohmann::json number(double v);

} // namespace pathprob
