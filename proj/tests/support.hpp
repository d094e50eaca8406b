#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mlbm/mlbm.hpp"

namespace mlbm::testing {

// Positive populations near a random equilibrium, reproducible per seed.
inline DistributionField random_field(const DomainSpec& spec, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rho(0.9, 1.1), vel(-0.05, 0.05), noise(-0.01, 0.01);
  DistributionField field(spec);
  for (std::size_t k = 0; k < field.cells(); ++k) {
    const Populations eq = equilibrium(rho(rng), {vel(rng), vel(rng), vel(rng)});
    double* f = field.cell(k);
    for (int i = 0; i < D3Q19::q; ++i) f[i] = eq[i] * (1.0 + noise(rng));
  }
  return field;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

inline double max_abs_diff(const DistributionField& a, const DistributionField& b) {
  return max_abs_diff(a.data(), b.data());
}

inline DistributionField oracle_after(DistributionField field, const KernelParams& params, int steps) {
  TwoCopyOracle oracle;
  for (int t = 0; t < steps; ++t) oracle.step(field, params);
  return field;
}

// Problems with a prism order: cells missing or repeated, or a cell visited
// before one of its backward swap partners, or before the lagged cell
// (x-1,y-1,z-1) and the forward neighbors that cell depends on. Empty if fine.
inline std::vector<std::string> traversal_problems(const PrismCursor& cursor) {
  const DomainSpec& s = cursor.spec();
  const Range xs = cursor.x_range();
  const auto order = cursor.enumerate();
  std::vector<std::string> out;
  auto where = [](CellCoord c) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + "," + std::to_string(c.z) + ")";
  };
  std::vector<long> pos(s.cells(), -1);
  for (std::size_t n = 0; n < order.size(); ++n) {
    const CellCoord c = order[n];
    if (!s.contains(c.x, c.y, c.z) || c.x < xs.first || c.x > xs.last) {
      out.push_back("out of range " + where(c));
      continue;
    }
    long& p = pos[cell_index(s, c.x, c.y, c.z)];
    if (p >= 0) out.push_back("repeated " + where(c));
    p = static_cast<long>(n);
  }
  auto in_set = [&](int x, int y, int z) { return s.contains(x, y, z) && x >= xs.first && x <= xs.last; };
  auto at = [&](int x, int y, int z) { return pos[cell_index(s, x, y, z)]; };
  for (int x = xs.first; x <= xs.last; ++x)
    for (int y = 1; y <= s.ly; ++y)
      for (int z = 1; z <= s.lz; ++z) {
        const long here = at(x, y, z);
        if (here < 0) {
          out.push_back("missing " + where({x, y, z}));
          continue;
        }
        for (int i = 1; i <= D3Q19::half; ++i) {
          const int nx = x + D3Q19::c[i][0], ny = y + D3Q19::c[i][1], nz = z + D3Q19::c[i][2];
          if (in_set(nx, ny, nz) && at(nx, ny, nz) > here) out.push_back("partner after " + where({x, y, z}));
        }
        if (!in_set(x - 1, y - 1, z - 1)) continue;
        if (at(x - 1, y - 1, z - 1) > here) out.push_back("lagged cell after " + where({x, y, z}));
        for (int i = 1; i < D3Q19::q; ++i) {
          const int nx = x - 1 + D3Q19::c[i][0], ny = y - 1 + D3Q19::c[i][1], nz = z - 1 + D3Q19::c[i][2];
          if (in_set(nx, ny, nz) && at(nx, ny, nz) > here)
            out.push_back("lagged neighborhood after " + where({x, y, z}));
        }
      }
  return out;
}

inline KernelParams lid(double omega, double v) { return {omega, {0.0, 0.0, v}, 1.0}; }

}  // namespace mlbm::testing
