#include "pathprob/analysis.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string_view>

#include "pathprob/errors.hpp"
#include "pathprob/numerics.hpp"
#include "pathprob/version.hpp"
#include "pathprob/weights.hpp"

namespace pathprob {

void Table::write_csv(std::ostream& os) const {
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      auto r = std::to_chars(buf, buf + sizeof buf, row[c]);
      os << (c ? "," : "") << std::string_view(buf, r.ptr - buf);
    }
    os << '\n';
  }
}

nlohmann::json Table::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    for (std::size_t c = 0; c < columns.size() && c < row.size(); ++c) r[columns[c]] = row[c];
    rows_json.push_back(r);
  }
  return rows_json;
}

nlohmann::json provenance(const std::string& scan, const nlohmann::json& inputs) {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return {{"scan", scan}, {"inputs", inputs}, {"version", version}, {"timestamp", ts.str()}};
}

std::vector<ConcentrationRow> classical_concentration_scan(const LatticeConfig& cfg,
                                                           const std::vector<double>& gammas,
                                                           double delta, const SamplerConfig& sc) {
  if (!(delta >= 0)) throw UsageError("classical_concentration_scan: delta must be >= 0");
  const BandLimitedPotential free_particle;
  std::vector<ConcentrationRow> rows;
  for (double g : gammas) {
    LatticeConfig c = cfg;
    c.gamma = g;
    SamplerConfig s = sc;
    s.kind = ProposalKind::cauchy_bridge;
    s.gamma_prop = 0;
    std::vector<double> max_s;
    std::vector<double> r = sample_ratios(free_particle, c, s, &max_s);
    const std::size_t N = r.size();
    std::vector<double> hit(N);
    for (std::size_t i = 0; i < N; ++i) hit[i] = max_s[i] > delta ? r[i] : 0.0;

    const int B = s.batches;
    std::vector<double> frac(B);
    for (int b = 0; b < B; ++b) {
      std::size_t lo = N * b / B, hi = N * (b + 1) / B;
      double num = pairwise_sum(std::span<const double>(hit).subspan(lo, hi - lo));
      double den = pairwise_sum(std::span<const double>(r).subspan(lo, hi - lo));
      frac[b] = den != 0 ? num / den : 0.0;
    }
    ConcentrationRow row;
    row.gamma = g;
    double den = pairwise_sum(r);
    row.fraction = den != 0 ? pairwise_sum(hit) / den : 0.0;
    double var = 0;
    for (double f : frac) var += (f - row.fraction) * (f - row.fraction);
    row.std_error = std::sqrt(var / (B - 1) / B);
    rows.push_back(row);
  }
  return rows;
}

Table SweepResult::table() const {
  Table t;
  t.columns = {"n", "gamma", "value", "std_error"};
  for (const auto& c : cells) t.rows.push_back({static_cast<double>(c.n), c.gamma, c.value, c.std_error});
  return t;
}

SweepResult convergence_sweep(const BandLimitedPotential& p, const LatticeConfig& base,
                              const std::vector<int>& ns, const std::vector<double>& gammas,
                              const SweepOptions& opt) {
  if (ns.empty() || gammas.empty()) throw UsageError("convergence_sweep: empty n or gamma list");
  SweepResult out;
  std::vector<double> gx, gy;
  for (double g : gammas) {
    std::vector<double> inv_n, val;
    for (int n : ns) {
      LatticeConfig c = base;
      c.n = n;
      c.gamma = g;
      SweepCell cell{n, g, 0, 0};
      if (opt.method == SweepMethod::quadrature) {
        auto e = transition_probability_quadrature(p, c, default_window(c), opt.points_per_dim);
        cell.value = e.value;
      } else {
        auto e = estimate_transition_mc(p, c, opt.sampler);
        cell.value = e.estimate.value;
        cell.std_error = e.estimate.std_error;
      }
      out.cells.push_back(cell);
      inv_n.push_back(1.0 / n);
      val.push_back(cell.value);
    }
    double extrap = ns.size() >= 2 ? fit_line(inv_n, val).intercept : val.front();
    out.n_extrapolated.emplace_back(g, extrap);
    gx.push_back(g);
    gy.push_back(extrap);
  }
  if (gammas.size() >= 2) {
    out.gamma_extrapolated = extrapolate_gamma(gx, gy);
  } else {
    out.gamma_extrapolated.value = gy.front();
  }
  return out;
}

std::vector<LinearizationRow> linearization_order_scan(const BandLimitedPotential& p,
                                                       const std::vector<std::pair<double, double>>& points,
                                                       double gamma, const std::vector<double>& eps) {
  if (eps.size() < 2) throw UsageError("linearization_order_scan: need >= 2 step sizes");
  std::vector<LinearizationRow> rows;
  for (auto [z, s] : points) {
    LinearizationRow row;
    row.z = z;
    row.s = s;
    std::vector<double> lx, ly, lr;
    for (double e : eps) {
      double ql = step_q_linear(p, z, s, e, gamma);
      double qe = step_q_exponential(p, z, s, e, gamma);
      double raw = std::abs(qe - ql);
      double normalized = two_pi * e * std::exp(gamma * std::abs(z)) * raw;
      row.eps.push_back(e);
      row.raw.push_back(raw);
      row.normalized.push_back(normalized);
      if (raw > 0) {
        lx.push_back(std::log(e));
        ly.push_back(std::log(normalized));
        lr.push_back(std::log(raw));
      }
    }
    if (lx.size() >= 2) {
      row.slope = fit_line(lx, ly).slope;
      row.slope_raw = fit_line(lx, lr).slope;
    } else {
      row.slope = row.slope_raw = std::nan("");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Table linearization_table(const std::vector<LinearizationRow>& rows) {
  Table t;
  t.columns = {"z", "s", "eps", "normalized_diff", "raw_diff", "slope", "slope_raw"};
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.eps.size(); ++i)
      t.rows.push_back({r.z, r.s, r.eps[i], r.normalized[i], r.raw[i], r.slope, r.slope_raw});
  return t;
}

Table concentration_table(const std::vector<ConcentrationRow>& rows) {
  Table t;
  t.columns = {"gamma", "fraction", "std_error"};
  for (const auto& r : rows) t.rows.push_back({r.gamma, r.fraction, r.std_error});
  return t;
}

} // namespace pathprob
