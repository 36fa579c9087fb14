#include "pathprob/lattice.hpp"

#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "pathprob/errors.hpp"

namespace pathprob {

void LatticeConfig::validate() const {
  if (n < 2) throw UsageError("lattice: n must be >= 2, got " + std::to_string(n));
  if (!(tb > ta)) throw UsageError("lattice: need tb > ta");
  if (!(gamma > 0) || !std::isfinite(gamma)) throw UsageError("lattice: gamma must be > 0");
  if (!std::isfinite(za) || !std::isfinite(zb)) throw UsageError("lattice: non-finite endpoint");
}

std::vector<double> second_differences(const Path& path, const LatticeConfig& cfg) {
  if (path.z.size() != static_cast<std::size_t>(cfg.n) + 1)
    throw UsageError("second_differences: path has " + std::to_string(path.z.size()) +
                     " points, lattice needs " + std::to_string(cfg.n + 1));
  const double eps = cfg.eps();
  std::vector<double> s(cfg.n - 1);
  for (int j = 1; j < cfg.n; ++j) s[j - 1] = (path.z[j + 1] - 2 * path.z[j] + path.z[j - 1]) / eps;
  return s;
}

Path straight_path(const LatticeConfig& cfg) {
  Path p;
  p.z.resize(cfg.n + 1);
  for (int j = 0; j <= cfg.n; ++j) p.z[j] = cfg.za + (cfg.zb - cfg.za) * j / cfg.n;
  p.z[cfg.n] = cfg.zb;
  return p;
}

void path_from_velocity_changes(const LatticeConfig& cfg, std::span<const double> s,
                                std::span<double> z) {
  const int n = cfg.n;
  const double eps = cfg.eps();
  // d_j = z_j - z_{j-1} = d_1 + eps sum_{k<j} s_k, and sum_j d_j = zb - za
  double moment = 0;
  for (int k = 1; k < n; ++k) moment += (n - k) * s[k - 1];
  double d = (cfg.zb - cfg.za - eps * moment) / n;
  z[0] = cfg.za;
  for (int j = 1; j < n; ++j) {
    z[j] = z[j - 1] + d;
    d += eps * s[j - 1];
  }
  z[n] = cfg.zb;
}

Path path_from_velocity_changes(const LatticeConfig& cfg, std::span<const double> s) {
  if (s.size() != static_cast<std::size_t>(cfg.n) - 1)
    throw UsageError("path_from_velocity_changes: need n-1 velocity changes");
  Path p;
  p.z.resize(cfg.n + 1);
  path_from_velocity_changes(cfg, s, p.z);
  return p;
}

double velocity_change_jacobian(const LatticeConfig& cfg) {
  return cfg.n / std::pow(cfg.eps(), cfg.n - 1);
}

void write_path_csv(std::ostream& os, const Path& path, const LatticeConfig& cfg) {
  os << "j,t,z\n";
  os.precision(17);
  for (std::size_t j = 0; j < path.z.size(); ++j)
    os << j << ',' << cfg.time(static_cast<int>(j)) << ',' << path.z[j] << '\n';
}

Path read_path_csv(std::istream& is) {
  Path p;
  std::string line;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::stringstream ss(line);
    std::string f[3];
    for (auto& x : f)
      if (!std::getline(ss, x, ',')) throw UsageError("path csv: expected j,t,z in row " + std::to_string(row));
    try {
      std::size_t j = std::stoul(f[0]);
      if (j != row) throw UsageError("path csv: rows must be ordered j = 0..n");
      p.z.push_back(std::stod(f[2]));
    } catch (const std::logic_error&) {
      throw UsageError("path csv: malformed row " + std::to_string(row));
    }
    ++row;
  }
  if (p.z.size() < 3) throw UsageError("path csv: need at least 3 points");
  return p;
}

} // namespace pathprob
