#include "pathprob/io.hpp"

#include <cmath>
#include <fstream>

#include "pathprob/errors.hpp"

namespace pathprob {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("field '") + key + "': " + e.what());
  }
}

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) throw UsageError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

} // namespace

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

BandLimitedPotential potential_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("potential must be a JSON object");
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    SpectralGrid grid;
    grid.qmax = get_or<double>(g, "qmax", 0.0);
    if (!g.contains("values") || !g.at("values").is_array()) throw UsageError("grid.values must be an array");
    for (const auto& v : g.at("values")) {
      if (!v.is_array() || v.size() != 2) throw UsageError("grid.values entries must be [re, im]");
      grid.values.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    return BandLimitedPotential::from_grid(std::move(grid), optional_number(j, "K"));
  }
  std::vector<SpectralLine> lines;
  if (j.contains("lines")) {
    if (!j.at("lines").is_array()) throw UsageError("lines must be an array");
    for (const auto& l : j.at("lines")) {
      if (!l.contains("q") || !l.contains("a")) throw UsageError("each line needs q and a");
      lines.push_back({l.at("q").get<double>(), l.at("a").get<double>(), get_or<double>(l, "phi", 0.0)});
    }
  }
  return BandLimitedPotential::from_lines(std::move(lines), optional_number(j, "R"), optional_number(j, "K"));
}

json to_json(const BandLimitedPotential& p) {
  json j;
  if (p.is_grid()) {
    json values = json::array();
    for (auto v : p.grid()->values) values.push_back({v.real(), v.imag()});
    j["grid"] = {{"qmax", p.grid()->qmax}, {"values", values}};
  } else {
    j["lines"] = json::array();
    for (const auto& l : p.lines()) j["lines"].push_back({{"q", l.q}, {"a", l.a}, {"phi", l.phi}});
  }
  j["R"] = p.R();
  j["K"] = p.K();
  return j;
}

LatticeConfig lattice_from_json(const json& j) {
  LatticeConfig c;
  c.ta = get_or<double>(j, "ta", c.ta);
  c.tb = get_or<double>(j, "tb", c.tb);
  c.n = get_or<int>(j, "n", c.n);
  c.gamma = get_or<double>(j, "gamma", c.gamma);
  c.za = get_or<double>(j, "za", c.za);
  c.zb = get_or<double>(j, "zb", c.zb);
  return c;
}

json to_json(const LatticeConfig& c) {
  return {{"ta", c.ta}, {"tb", c.tb}, {"n", c.n}, {"gamma", c.gamma}, {"za", c.za}, {"zb", c.zb}, {"eps", c.eps()}};
}

SamplerConfig sampler_from_json(const json& j) {
  SamplerConfig s;
  std::string kind = get_or<std::string>(j, "proposal", "cauchy");
  if (kind == "cauchy" || kind == "cauchy-increment-bridge")
    s.kind = ProposalKind::cauchy_bridge;
  else if (kind == "gaussian" || kind == "gaussian-bridge")
    s.kind = ProposalKind::gaussian_bridge;
  else
    throw UsageError("sampler.proposal must be 'cauchy' or 'gaussian', got '" + kind + "'");
  s.sigma = get_or<double>(j, "sigma", s.sigma);
  s.gamma_prop = get_or<double>(j, "gamma_prop", s.gamma_prop);
  s.samples = get_or<std::uint64_t>(j, "samples", s.samples);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  s.batches = get_or<int>(j, "batches", s.batches);
  std::string form = get_or<std::string>(j, "form", "linear");
  if (form == "linear")
    s.form = StepForm::linear;
  else if (form == "exponential")
    s.form = StepForm::exponential;
  else
    throw UsageError("sampler.form must be 'linear' or 'exponential'");
  return s;
}

json to_json(const SamplerConfig& s) {
  return {{"proposal", s.kind == ProposalKind::cauchy_bridge ? "cauchy" : "gaussian"},
          {"sigma", s.sigma},
          {"gamma_prop", s.gamma_prop},
          {"samples", s.samples},
          {"seed", s.seed},
          {"batches", s.batches},
          {"form", s.form == StepForm::linear ? "linear" : "exponential"}};
}

OracleSettings oracle_from_json(const json& j) {
  OracleSettings s;
  s.X = get_or<double>(j, "X", s.X);
  s.L = get_or<std::size_t>(j, "L", s.L);
  s.dt = get_or<double>(j, "dt", s.dt);
  return s;
}

json to_json(const OracleSettings& s) { return {{"X", s.X}, {"L", s.L}, {"dt", s.dt}}; }

json to_json(const PositivityThreshold& t) {
  return {{"lambda_paper", number(t.lambda_paper)},
          {"lambda_strict", number(t.lambda_strict)},
          {"unconstrained", t.unconstrained},
          {"certified", t.certified}};
}

json to_json(const WeightEvaluation& w) {
  json steps = json::array();
  for (std::size_t j = 0; j < w.steps.s.size(); ++j)
    steps.push_back({{"j", j + 1}, {"s", w.steps.s[j]}, {"M", w.steps.M[j]}, {"Q", w.steps.Q[j]}});
  return {{"W", number(w.W)},
          {"sign", w.sign},
          {"logabsW", number(w.log_abs_W)},
          {"lambda_paper", number(w.lambda.lambda_paper)},
          {"lambda_strict", number(w.lambda.lambda_strict)},
          {"positive", w.positive},
          {"per_step", steps}};
}

json to_json(const TransitionEstimate& e) {
  json j = {{"value", e.value}, {"std_error", e.std_error}, {"method", e.method},
            {"n", e.n},         {"eps", e.eps},             {"gamma", e.gamma}};
  if (!e.refinement.empty()) {
    j["refinement"] = json::array();
    for (const auto& r : e.refinement)
      j["refinement"].push_back({{"points_per_dim", r.points_per_dim}, {"value", r.value}, {"delta", r.delta}});
    j["boundary_mass"] = e.boundary_mass;
  }
  return j;
}

json to_json(const MonteCarloEstimate& e) {
  return {{"value", e.estimate.value},
          {"std_error", e.estimate.std_error},
          {"ess", e.ess},
          {"negative_mass_fraction", e.negative_mass_fraction},
          {"excess_kurtosis", e.excess_kurtosis},
          {"n", e.estimate.n},
          {"gamma", e.estimate.gamma},
          {"seed", e.seed},
          {"method", e.estimate.method}};
}

json to_json(const KernelEstimate& k) {
  return {{"re", k.amplitude.real()},
          {"im", k.amplitude.imag()},
          {"modulus_squared", k.modulus_squared},
          {"error_estimate", k.error_estimate}};
}

json to_json(const OracleKernel& k) {
  json j = to_json(k.kernel);
  j["residual"] = k.residual;
  j["monotone"] = k.monotone;
  j["sigma0"] = k.sigmas;
  json c = json::array();
  for (auto v : k.corrected) c.push_back({v.real(), v.imag()});
  j["corrected"] = c;
  return j;
}

json to_json(const CkResult& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"residual", r.residual},
          {"truncation", r.truncation},
          {"converged", r.converged}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("'" + path + "': " + e.what());
  }
}

} // namespace pathprob
