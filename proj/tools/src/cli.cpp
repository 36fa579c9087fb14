#include "cli.hpp"

#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <omp.h>

#include <pathprob/pathprob.hpp>

namespace pathprob::cli {

namespace {

using nlohmann::json;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
  int threads = 0;
};

struct LatticeFlags {
  std::optional<int> n;
  std::optional<double> gamma, ta, tb, za, zb;

  void add(CLI::App* app, bool with_n = true) {
    if (with_n) app->add_option("-n", n, "number of time steps");
    app->add_option("--gamma", gamma, "regularization parameter");
    app->add_option("--ta", ta, "initial time");
    app->add_option("--tb", tb, "final time");
    app->add_option("--za", za, "initial position");
    app->add_option("--zb", zb, "final position");
  }

  void apply(json& cfg) const {
    json& l = cfg["lattice"];
    if (l.is_null()) l = json::object();
    if (n) l["n"] = *n;
    if (gamma) l["gamma"] = *gamma;
    if (ta) l["ta"] = *ta;
    if (tb) l["tb"] = *tb;
    if (za) l["za"] = *za;
    if (zb) l["zb"] = *zb;
  }
};

struct SamplerFlags {
  std::optional<std::uint64_t> samples;
  std::optional<std::string> proposal;

  void add(CLI::App* app) {
    app->add_option("--samples", samples, "Monte Carlo sample count");
    app->add_option("--proposal", proposal, "cauchy or gaussian")->check(CLI::IsMember({"cauchy", "gaussian"}));
  }

  void apply(json& cfg, const Common& c) const {
    json& s = cfg["sampler"];
    if (s.is_null()) s = json::object();
    if (samples) s["samples"] = *samples;
    if (proposal) s["proposal"] = *proposal;
    if (c.seed) s["seed"] = *c.seed;
  }
};

json section(const json& cfg, const char* key) {
  if (cfg.contains(key) && !cfg.at(key).is_null()) return cfg.at(key);
  return json::object();
}

BandLimitedPotential potential_of(const json& cfg) { return potential_from_json(section(cfg, "potential")); }

LatticeConfig lattice_of(const json& cfg) {
  LatticeConfig c = lattice_from_json(section(cfg, "lattice"));
  c.validate();
  return c;
}

class Output {
public:
  explicit Output(const Common& c, std::ostream& fallback) : path_(c.out), os_(&fallback) {
    if (!path_.empty()) {
      file_.open(path_, std::ios::binary);
      if (!file_) throw UsageError("cannot write '" + path_ + "'");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }
  const std::string& path() const { return path_; }

private:
  std::string path_;
  std::ofstream file_;
  std::ostream* os_;
};

void emit_json(const Common& c, std::ostream& out, const json& j) {
  Output o(c, out);
  o.stream() << j.dump(2) << '\n';
}

void emit_table(const Common& c, std::ostream& out, const Table& t, const json& extra) {
  Output o(c, out);
  if (c.format == "csv") {
    t.write_csv(o.stream());
    return;
  }
  json j = extra;
  j["rows"] = t.to_json();
  o.stream() << j.dump(2) << '\n';
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot parse '" + item + "' as a number");
    }
  }
  if (v.empty()) throw UsageError("empty number list");
  return v;
}

// uniform interior points in [-5, 5], every fifth one a Cauchy outlier
void random_interior(std::vector<double>& z, SplitMix64& rng) {
  for (std::size_t j = 1; j + 1 < z.size(); ++j)
    z[j] = (rng.next() % 5 == 0) ? rng.cauchy(20.0) : -5.0 + 10.0 * rng.uniform();
}

int cmd_weight(const Common& c, json cfg, const std::string& path_file, const std::string& form,
               std::ostream& out) {
  auto p = potential_of(cfg);
  auto lat = lattice_of(cfg);
  Path path;
  if (path_file.empty()) {
    path = straight_path(lat);
  } else {
    std::ifstream in(path_file);
    if (!in) throw UsageError("cannot open '" + path_file + "'");
    path = read_path_csv(in);
    if (static_cast<int>(path.z.size()) != lat.n + 1)
      throw UsageError("path has " + std::to_string(path.z.size()) + " points, lattice expects " +
                       std::to_string(lat.n + 1));
    if (path.z.front() != lat.za || path.z.back() != lat.zb)
      throw UsageError("path endpoints differ from the lattice za/zb");
  }
  auto w = path_weight(p, path, lat, form == "exponential" ? StepForm::exponential : StepForm::linear);

  if (c.format == "csv") {
    Table t{{"j", "s", "M", "Q"}, {}};
    for (std::size_t j = 0; j < w.steps.s.size(); ++j)
      t.rows.push_back({static_cast<double>(j + 1), w.steps.s[j], w.steps.M[j], w.steps.Q[j]});
    emit_table(c, out, t, {});
  } else {
    json j = to_json(w);
    j["lattice"] = to_json(lat);
    emit_json(c, out, j);
  }
  bool guaranteed = form != "exponential" && lat.eps() <= w.lambda.lambda_strict;
  if (guaranteed && (w.W < 0 || std::any_of(w.steps.Q.begin(), w.steps.Q.end(), [](double q) { return q < 0; })))
    throw InvariantError("negative weight at eps <= lambda_strict");
  return 0;
}

int cmd_positivity(const Common& c, json cfg, long trials, int n, std::ostream& out) {
  auto p = potential_of(cfg);
  auto lat = lattice_from_json(section(cfg, "lattice"));
  if (!(lat.gamma > 0)) throw UsageError("gamma must be > 0");
  if (n < 2) throw UsageError("path length n must be >= 2");
  if (trials < 0) throw UsageError("trials must be >= 0");
  const std::uint64_t seed = c.seed.value_or(sampler_from_json(section(cfg, "sampler")).seed);

  auto t = positivity_threshold(p, lat.gamma);
  double eps = t.unconstrained ? lat.eps() : t.lambda_strict;
  LatticeConfig test{0, n * eps, n, lat.gamma, lat.za, lat.zb};
  long negative_paths = 0, negative_steps = 0;
#pragma omp parallel reduction(+ : negative_paths, negative_steps)
  {
    std::vector<double> z(n + 1);
    z.front() = test.za;
    z.back() = test.zb;
#pragma omp for schedule(static)
    for (long i = 0; i < trials; ++i) {
      SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
      random_interior(z, rng);
      bool bad = false;
      for (int j = 1; j < n; ++j) {
        double s = (z[j + 1] - 2 * z[j] + z[j - 1]) / eps;
        if (step_q_linear(p, z[j], s, eps, lat.gamma) < 0) {
          ++negative_steps;
          bad = true;
        }
      }
      negative_paths += bad;
    }
  }

  json j = to_json(t);
  j["gamma"] = lat.gamma;
  j["m_bound"] = m_bound(p, lat.gamma);
  j["m_sup"] = m_sup_certified(p, lat.gamma).value;
  j["property_test"] = {{"eps", eps},       {"n", n},
                        {"trials", trials}, {"seed", seed},
                        {"negative_paths", negative_paths}, {"negative_steps", negative_steps}};
  if (!t.unconstrained) {
    auto w = find_negative_step(p, lat.gamma, 2 * t.lambda_strict);
    j["witness"] = {{"eps", 2 * t.lambda_strict}, {"z", w.z}, {"s", w.s},
                    {"M", w.M},                  {"Q", w.Q}, {"negative", w.negative}};
  }
  if (c.format == "csv") {
    Table tab{{"gamma", "lambda_paper", "lambda_strict", "m_bound", "m_sup", "trials", "negative_paths"}, {}};
    tab.rows.push_back({lat.gamma, t.lambda_paper, t.lambda_strict, j["m_bound"].get<double>(),
                        j["m_sup"].get<double>(), static_cast<double>(trials), static_cast<double>(negative_paths)});
    emit_table(c, out, tab, {});
  } else {
    emit_json(c, out, j);
  }
  if (negative_paths > 0)
    throw InvariantError(std::to_string(negative_paths) + " paths with a negative step at eps = lambda_strict");
  return 0;
}

int cmd_transition(const Common& c, json cfg, const std::string& method, int ppd, std::ostream& out) {
  auto p = potential_of(cfg);
  auto lat = lattice_of(cfg);
  if (method == "mc") {
    auto sc = sampler_from_json(section(cfg, "sampler"));
    auto e = estimate_transition_mc(p, lat, sc);
    if (c.format == "csv") {
      Table t{{"n", "gamma", "value", "std_error", "ess", "negative_mass_fraction", "seed"}, {}};
      t.rows.push_back({static_cast<double>(lat.n), lat.gamma, e.estimate.value, e.estimate.std_error, e.ess,
                        e.negative_mass_fraction, static_cast<double>(e.seed)});
      emit_table(c, out, t, {});
    } else {
      emit_json(c, out, to_json(e));
    }
    return 0;
  }
  auto e = transition_probability_quadrature(p, lat, default_window(lat), ppd);
  if (c.format == "csv") {
    Table t{{"n", "gamma", "points_per_dim", "value", "refinement_delta"}, {}};
    for (const auto& r : e.refinement)
      t.rows.push_back({static_cast<double>(lat.n), lat.gamma, static_cast<double>(r.points_per_dim), r.value, r.delta});
    emit_table(c, out, t, {});
  } else {
    emit_json(c, out, to_json(e));
  }
  return 0;
}

int cmd_oracle(const Common& c, json cfg, const std::string& sigmas, const std::string& snapshot,
               std::ostream& out) {
  auto p = potential_of(cfg);
  auto lat = lattice_of(cfg);
  auto s = oracle_from_json(section(cfg, "oracle"));
  auto sig = parse_list(sigmas);
  const double T = lat.duration();
  auto k = kernel_estimate(p, lat.za, lat.zb, T, sig, s);
  json j = to_json(k);
  j["za"] = lat.za;
  j["zb"] = lat.zb;
  j["T"] = T;
  j["free_modulus_squared"] = free_kernel_exact(lat.za, lat.zb, T).modulus_squared;
  j["oracle"] = to_json(s);

  if (!snapshot.empty()) {
    double smallest = *std::min_element(sig.begin(), sig.end());
    auto g0 = gaussian_state(s.X, s.L, lat.za, smallest);
    auto g = propagate(g0, p, T, s.dt > 0 ? s.dt : max_stable_dt(g0, p));
    bool binary = snapshot.size() > 4 && snapshot.substr(snapshot.size() - 4) == ".bin";
    std::ofstream f(snapshot, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + snapshot + "'");
    if (binary)
      write_wavefunction_binary(f, g);
    else
      write_wavefunction_csv(f, g);
  }

  if (c.format == "csv") {
    Table t{{"za", "zb", "T", "re", "im", "modulus_squared", "residual"}, {}};
    t.rows.push_back({lat.za, lat.zb, T, k.kernel.amplitude.real(), k.kernel.amplitude.imag(),
                      k.kernel.modulus_squared, k.residual});
    emit_table(c, out, t, {});
  } else {
    emit_json(c, out, j);
  }
  return 0;
}

int cmd_ck(const Common& c, json cfg, const std::string& source, std::optional<double> tc,
           std::optional<double> window, int ppd, std::ostream& out) {
  auto p = potential_of(cfg);
  auto lat = lattice_of(cfg);
  CkOptions opt;
  opt.oracle = oracle_from_json(section(cfg, "oracle"));
  opt.gamma = lat.gamma;
  opt.n_per_leg = std::max(1, lat.n / 2);
  opt.points_per_dim = ppd;
  if (window) {
    if (source == "amplitude")
      opt.amplitude_window_half_width = *window;
    else
      opt.window_half_width = *window;
  }
  const double t_mid = tc.value_or(0.5 * (lat.ta + lat.tb));
  CkSource src = source == "oracle" ? CkSource::oracle : source == "pathweight" ? CkSource::pathweight : CkSource::amplitude;
  auto r = ck_check(p, lat.za, lat.ta, t_mid, lat.zb, lat.tb, src, opt);
  if (c.format == "csv") {
    Table t{{"lhs", "rhs", "residual", "truncation", "converged"}, {}};
    t.rows.push_back({r.lhs, r.rhs, r.residual, r.truncation, r.converged ? 1.0 : 0.0});
    emit_table(c, out, t, {});
  } else {
    json j = to_json(r);
    j["source"] = source;
    j["times"] = {lat.ta, t_mid, lat.tb};
    emit_json(c, out, j);
  }
  return 0;
}

struct ScanFlags {
  std::string kind;
  std::string gammas;
  std::string ns = "2,3,4";
  std::string eps = "0.04,0.02,0.01,0.005";
  std::string points = "0.3,0.7";
  double delta = 1.0;
  std::string method = "quadrature";
  int ppd = 65;
};

int cmd_scan(const Common& c, json cfg, const ScanFlags& f, std::ostream& out) {
  auto p = potential_of(cfg);
  json inputs = cfg;
  inputs["scan"] = {{"kind", f.kind}, {"format", c.format}};
  Table table;
  json extra;

  if (f.kind == "concentration") {
    auto lat = lattice_of(cfg);
    auto sc = sampler_from_json(section(cfg, "sampler"));
    auto gammas = parse_list(f.gammas.empty() ? "0.5,0.2,0.1,0.05" : f.gammas);
    inputs["scan"]["gammas"] = gammas;
    inputs["scan"]["delta"] = f.delta;
    table = concentration_table(classical_concentration_scan(lat, gammas, f.delta, sc));
  } else if (f.kind == "sweep") {
    auto lat = lattice_from_json(section(cfg, "lattice"));
    auto gammas = parse_list(f.gammas.empty() ? "0.2,0.1,0.05" : f.gammas);
    std::vector<int> ns;
    for (double v : parse_list(f.ns)) {
      if (v != std::floor(v) || v < 2) throw UsageError("n values must be integers >= 2");
      ns.push_back(static_cast<int>(v));
    }
    SweepOptions opt;
    opt.method = f.method == "mc" ? SweepMethod::mc : SweepMethod::quadrature;
    opt.points_per_dim = f.ppd;
    opt.sampler = sampler_from_json(section(cfg, "sampler"));
    inputs["scan"]["gammas"] = gammas;
    inputs["scan"]["ns"] = ns;
    inputs["scan"]["method"] = f.method;
    inputs["scan"]["points_per_dim"] = f.ppd;
    auto r = convergence_sweep(p, lat, ns, gammas, opt);
    table = r.table();
    json ne = json::array();
    for (auto [g, v] : r.n_extrapolated) ne.push_back({{"gamma", g}, {"value", v}});
    extra["n_extrapolated"] = ne;
    extra["gamma_extrapolated"] = {{"value", r.gamma_extrapolated.value},
                                   {"slope", r.gamma_extrapolated.slope},
                                   {"residual", r.gamma_extrapolated.residual},
                                   {"intercept_se", r.gamma_extrapolated.intercept_se}};
  } else {
    auto lat = lattice_from_json(section(cfg, "lattice"));
    auto flat = parse_list(f.points);
    if (flat.size() % 2) throw UsageError("--points takes z,s pairs");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < flat.size(); i += 2) pts.emplace_back(flat[i], flat[i + 1]);
    auto eps = parse_list(f.eps);
    inputs["scan"]["points"] = flat;
    inputs["scan"]["eps"] = eps;
    table = linearization_table(linearization_order_scan(p, pts, lat.gamma, eps));
  }

  json prov = provenance(f.kind, inputs);
  if (c.format == "csv") {
    emit_table(c, out, table, {});
    if (!c.out.empty()) {
      std::ofstream side(c.out + ".provenance.json");
      if (!side) throw UsageError("cannot write provenance sidecar");
      side << prov.dump(2) << '\n';
    }
  } else {
    extra["provenance"] = prov;
    emit_table(c, out, table, extra);
  }
  return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Path-weight transition probabilities for band-limited potentials", "pathprob"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config, "JSON config (potential, lattice, sampler, oracle)");
    sub->add_option("--seed", common.seed, "random seed");
    sub->add_option("--out", common.out, "output file (default stdout)");
    sub->add_option("--format", common.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--threads", common.threads, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
  };

  LatticeFlags lattice;
  SamplerFlags sampler;
  std::function<int(json)> action;

  auto* weight = app.add_subcommand("weight", "weight report for one path");
  add_common(weight);
  lattice.add(weight);
  std::string path_file, form = "linear";
  weight->add_option("--path", path_file, "path CSV (j,t,z); default the straight path");
  weight->add_option("--form", form, "linear or exponential step factor")
      ->check(CLI::IsMember({"linear", "exponential"}));
  weight->callback([&] { action = [&](json cfg) { return cmd_weight(common, std::move(cfg), path_file, form, out); }; });

  auto* positivity = app.add_subcommand("positivity", "positivity thresholds and random-path check");
  add_common(positivity);
  lattice.add(positivity, false);
  long trials = 10000;
  int path_n = 8;
  positivity->add_option("--trials", trials, "random paths at eps = lambda_strict");
  positivity->add_option("--steps", path_n, "time steps per random path");
  positivity->callback([&] { action = [&](json cfg) { return cmd_positivity(common, std::move(cfg), trials, path_n, out); }; });

  auto* transition = app.add_subcommand("transition", "transition probability by quadrature or Monte Carlo");
  add_common(transition);
  lattice.add(transition);
  sampler.add(transition);
  std::string method = "quadrature";
  int ppd = 65;
  transition->add_option("--method", method, "quadrature or mc")->check(CLI::IsMember({"quadrature", "mc"}));
  transition->add_option("--ppd", ppd, "quadrature points per dimension (odd)");
  transition->callback([&] { action = [&](json cfg) { return cmd_transition(common, std::move(cfg), method, ppd, out); }; });

  auto* oracle = app.add_subcommand("oracle", "Schroedinger-equation kernel estimate");
  add_common(oracle);
  lattice.add(oracle, false);
  std::string sigmas = "0.3,0.2,0.15", snapshot;
  std::optional<double> X, dt;
  std::optional<std::size_t> L;
  oracle->add_option("--sigmas", sigmas, "initial Gaussian widths, comma separated");
  oracle->add_option("--snapshot", snapshot, "write psi(T) for the narrowest width (.bin for binary)");
  oracle->add_option("--X", X, "domain half-width");
  oracle->add_option("--L", L, "grid points");
  oracle->add_option("--dt", dt, "time step (0: largest stable)");
  oracle->callback([&] {
    action = [&](json cfg) {
      json& o = cfg["oracle"];
      if (o.is_null()) o = json::object();
      if (X) o["X"] = *X;
      if (L) o["L"] = *L;
      if (dt) o["dt"] = *dt;
      return cmd_oracle(common, std::move(cfg), sigmas, snapshot, out);
    };
  });

  auto* ck = app.add_subcommand("ck", "Chapman-Kolmogorov composition residual");
  add_common(ck);
  lattice.add(ck);
  std::string source = "oracle";
  std::optional<double> tc, window;
  int ck_ppd = 129;
  ck->add_option("--source", source, "oracle, pathweight or amplitude")
      ->check(CLI::IsMember({"oracle", "pathweight", "amplitude"}));
  ck->add_option("--tc", tc, "intermediate time (default midpoint)");
  ck->add_option("--window", window, "half-width of the intermediate-position window");
  ck->add_option("--ppd", ck_ppd, "quadrature points per dimension for the pathweight source");
  ck->callback([&] { action = [&](json cfg) { return cmd_ck(common, std::move(cfg), source, tc, window, ck_ppd, out); }; });

  auto* scan = app.add_subcommand("scan", "analysis scans with provenance");
  add_common(scan);
  lattice.add(scan);
  sampler.add(scan);
  ScanFlags sf;
  scan->add_option("kind", sf.kind, "concentration, sweep or linearization")
      ->required()
      ->check(CLI::IsMember({"concentration", "sweep", "linearization"}));
  scan->add_option("--gammas", sf.gammas, "comma-separated gamma values");
  scan->add_option("--ns", sf.ns, "comma-separated n values (sweep)");
  scan->add_option("--eps", sf.eps, "comma-separated step sizes (linearization)");
  scan->add_option("--points", sf.points, "z,s pairs, flattened (linearization)");
  scan->add_option("--delta", sf.delta, "velocity-change threshold (concentration)");
  scan->add_option("--method", sf.method, "quadrature or mc (sweep)")->check(CLI::IsMember({"quadrature", "mc"}));
  scan->add_option("--ppd", sf.ppd, "quadrature points per dimension (sweep)");
  scan->callback([&] { action = [&](json cfg) { return cmd_scan(common, std::move(cfg), sf, out); }; });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    if (code != 0) {
      err << app.help();
      return 1;
    }
    return 0;
  }

  try {
    json cfg = common.config.empty() ? json::object() : read_json_file(common.config);
    if (!cfg.is_object()) throw UsageError("config must be a JSON object");
    lattice.apply(cfg);
    sampler.apply(cfg, common);
    if (common.threads > 0) omp_set_num_threads(common.threads);
    return action(std::move(cfg));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace pathprob::cli
