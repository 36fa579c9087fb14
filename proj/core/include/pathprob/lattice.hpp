#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace pathprob {

struct LatticeConfig {
  double ta = 0;
  double tb = 1;
  int n = 2;
  double gamma = 0.1;
  double za = 0;
  double zb = 0;

  double duration() const { return tb - ta; }
  double eps() const { return (tb - ta) / n; }
  double time(int j) const { return ta + j * eps(); }
  void validate() const;
};

struct Path {
  std::vector<double> z;   // z_0 .. z_n
};

struct StepQuantities {
  std::vector<double> s;
  std::vector<double> M;
  std::vector<double> Q;
};

// s_j = (z_{j+1} - 2 z_j + z_{j-1}) / eps, j = 1..n-1
std::vector<double> second_differences(const Path& path, const LatticeConfig& cfg);

Path straight_path(const LatticeConfig& cfg);

// Inverse of second_differences under the bridge constraint; s has n-1 entries.
Path path_from_velocity_changes(const LatticeConfig& cfg, std::span<const double> s);
void path_from_velocity_changes(const LatticeConfig& cfg, std::span<const double> s,
                                std::span<double> z);

// |det ds/dz| of the map (z_1..z_{n-1}) -> (s_1..s_{n-1})
double velocity_change_jacobian(const LatticeConfig& cfg);

void write_path_csv(std::ostream& os, const Path& path, const LatticeConfig& cfg);
Path read_path_csv(std::istream& is);

} // namespace pathprob
