#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>

#include "mlbm/lattice.hpp"
#include "mlbm/probe.hpp"

namespace mlbm {

struct KernelParams {
  double omega = 1.0;
  Vec3 u_lid{0.0, 0.0, 0.0};  // lid is layer iX = lx
  double rho_wall = 1.0;

  void validate() const {
    if (!(omega > 0.0 && omega < 2.0))
      throw std::invalid_argument("omega must lie in the open interval (0, 2)");
    const double speed = std::sqrt(u_lid[0] * u_lid[0] + u_lid[1] * u_lid[1] + u_lid[2] * u_lid[2]);
    if (!(speed <= 0.3)) throw std::invalid_argument("lid speed must not exceed 0.3");
    if (!(rho_wall > 0.0)) throw std::invalid_argument("wall density must be positive");
  }
};

namespace detail {

// c_i . u with the zero components folded away at compile time.
template <int I>
inline double project(double ux, double uy, double uz) noexcept {
  constexpr int cx = D3Q19::c[I][0], cy = D3Q19::c[I][1], cz = D3Q19::c[I][2];
  constexpr auto term = [](int c, double v) { return c > 0 ? v : -v; };
  if constexpr (cx != 0 && cy != 0) return term(cx, ux) + term(cy, uy);
  else if constexpr (cx != 0 && cz != 0) return term(cx, ux) + term(cz, uz);
  else if constexpr (cy != 0 && cz != 0) return term(cy, uy) + term(cz, uz);
  else if constexpr (cx != 0) return term(cx, ux);
  else if constexpr (cy != 0) return term(cy, uy);
  else if constexpr (cz != 0) return term(cz, uz);
  else return 0.0;
}

// Opposite directions share the even part of the equilibrium, so each of the
// nine pairs is evaluated once.
template <bool Revert, int... P>
inline void relax(double* f, double omega, std::integer_sequence<int, P...>) {
  constexpr int h = D3Q19::half;
  const double rho = f[0] + ((f[P + 1] + f[P + 1 + h]) + ...);
  if (rho == 0.0) throw DegenerateMoments();
  const double jx = (f[10] + f[13] + f[14] + f[15] + f[16]) - (f[1] + f[4] + f[5] + f[6] + f[7]);
  const double jy = (f[11] + f[13] + f[17] + f[18] + f[5]) - (f[2] + f[4] + f[8] + f[9] + f[14]);
  const double jz = (f[12] + f[15] + f[17] + f[7] + f[9]) - (f[3] + f[6] + f[8] + f[16] + f[18]);
  const double inv = 1.0 / rho;
  const double ux = jx * inv, uy = jy * inv, uz = jz * inv;
  const double base = rho * (1.0 - 1.5 * (ux * ux + uy * uy + uz * uz));
  const double keep = 1.0 - omega;
  const double f0 = keep * f[0] + omega * (D3Q19::w[0] * base);
  double lo[h], hi[h];
  ((void)[&] {
     constexpr int i = P + 1;
     const double cu = project<i>(ux, uy, uz);
     const double even = D3Q19::w[i] * (base + 4.5 * rho * cu * cu);
     const double odd = D3Q19::w[i] * 3.0 * rho * cu;
     lo[P] = keep * f[i] + omega * (even + odd);
     hi[P] = keep * f[i + h] + omega * (even - odd);
   }(),
   ...);
  f[0] = f0;
  if constexpr (Revert) {
    ((f[P + 1] = hi[P], f[P + 1 + h] = lo[P]), ...);
  } else {
    ((f[P + 1] = lo[P], f[P + 1 + h] = hi[P]), ...);
  }
}

}  // namespace detail

/// BGK relaxation in place. Throws DegenerateMoments if the cell has no mass.
inline void collide(std::span<double, D3Q19::q> f, double omega) {
  detail::relax<false>(f.data(), omega, std::make_integer_sequence<int, D3Q19::half>{});
}

/// collide followed by revert, in one pass.
inline void collide_reverted(std::span<double, D3Q19::q> f, double omega) {
  detail::relax<true>(f.data(), omega, std::make_integer_sequence<int, D3Q19::half>{});
}

inline Populations collide(Populations f, const KernelParams& params) {
  collide(std::span<double, D3Q19::q>(f), params.omega);
  return f;
}

/// Exchanges each population with its opposite slot.
inline void revert(std::span<double, D3Q19::q> f) noexcept {
  for (int i = 1; i <= D3Q19::half; ++i) std::swap(f[i], f[i + D3Q19::half]);
}

inline bool leaves_through_lid(int i) noexcept { return D3Q19::c[i][0] == 1; }

// Momentum handed to a population bounced off the moving lid along c_i.
inline double lid_momentum(int i, const KernelParams& params) noexcept {
  const double cu = D3Q19::c[i][0] * params.u_lid[0] + D3Q19::c[i][1] * params.u_lid[1] +
                    D3Q19::c[i][2] * params.u_lid[2];
  return 6.0 * D3Q19::w[i] * params.rho_wall * cu;
}

/// Moving-wall bounce-back term for a reverted lid cell: the population that
/// left through the lid along c_i sits in slot opp(i) and is never swapped.
inline void apply_lid_correction(std::span<double, D3Q19::q> f, const KernelParams& params) noexcept {
  for (int i = 0; i < D3Q19::q; ++i)
    if (leaves_through_lid(i)) f[D3Q19::opp(i)] -= lid_momentum(i, params);
}

// Field-level kernels over 1-based cell coordinates. Streaming only ever
// touches slot i+9 of the cell and slot i of its neighbor at +c_i (i=1..9),
// which are the two ends of one link.
template <class Probe = NullProbe>
class CellOps {
 public:
  CellOps(DistributionField& field, const KernelParams& params, Probe& probe)
      : field_(field), spec_(field.spec()), omega_(params.omega), probe_(probe) {
    const auto plane = static_cast<std::ptrdiff_t>(spec_.ly) * spec_.lz;
    for (int i = 0; i < D3Q19::q; ++i) {
      cell_step_[i] = D3Q19::c[i][0] * plane + D3Q19::c[i][1] * spec_.lz + D3Q19::c[i][2];
      slot_step_[i] = cell_step_[i] * D3Q19::q;
      lid_[i] = 0.0;
    }
    for (int i = 0; i < D3Q19::q; ++i)
      if (leaves_through_lid(i)) lid_[D3Q19::opp(i)] = lid_momentum(i, params);
  }

  const DomainSpec& spec() const noexcept { return spec_; }
  Probe& probe() noexcept { return probe_; }

  bool on_boundary(int x, int y, int z) const noexcept { return spec_.on_boundary(x, y, z); }

  /// collide, revert, and the lid term for cells on layer lx.
  void collide_revert(int x, int y, int z) {
    const std::size_t k = cell_index(spec_, x, y, z);
    auto f = field_.populations(k);
    collide_reverted(f, omega_);
    if (x == spec_.lx)
      for (int i = 1; i <= D3Q19::half; ++i) f[i] -= lid_[i];
    if constexpr (Probe::enabled) probe_.collided(k);
  }

  /// Bulk-only: all nine partners at +c_i must lie inside the box.
  void swap_stream(int x, int y, int z) {
    assert(!on_boundary(x, y, z));
    const std::size_t k = cell_index(spec_, x, y, z);
    double* f = field_.cell(k);
    for (int i = 1; i <= D3Q19::half; ++i) {
      std::swap(f[i + D3Q19::half], f[slot_step_[i] + i]);
      if constexpr (Probe::enabled) probe_.swapped(k, i, k + cell_step_[i]);
    }
  }

  /// As swap_stream, skipping links that leave the box.
  void boundary_swap_stream(int x, int y, int z) {
    const std::size_t k = cell_index(spec_, x, y, z);
    double* f = field_.cell(k);
    for (int i = 1; i <= D3Q19::half; ++i) {
      if (!spec_.contains(x + D3Q19::c[i][0], y + D3Q19::c[i][1], z + D3Q19::c[i][2])) continue;
      std::swap(f[i + D3Q19::half], f[slot_step_[i] + i]);
      if constexpr (Probe::enabled) probe_.swapped(k, i, k + cell_step_[i]);
    }
  }

  void boundary_cell_comp(int x, int y, int z) {
    collide_revert(x, y, z);
    boundary_swap_stream(x, y, z);
  }

  void adaptive_collide_stream(int x, int y, int z) {
    if (on_boundary(x, y, z)) {
      boundary_cell_comp(x, y, z);
    } else {
      collide_revert(x, y, z);
      swap_stream(x, y, z);
    }
  }

  /// Stream-only counterpart for cells that were already collided.
  void adaptive_stream(int x, int y, int z) {
    if (on_boundary(x, y, z))
      boundary_swap_stream(x, y, z);
    else
      swap_stream(x, y, z);
  }

  /// Second-step computation of the lagged cells that the one-cell diagonal
  /// lag never reaches: the last column (iZ = lz) and last row (iY = ly).
  void boundary_neighbor_handler(int x, int y, int z) {
    for_each_neighbor_target(x, y, z, [&](int tx, int ty, int tz) { boundary_cell_comp(tx, ty, tz); });
  }

  /// Same triggers as boundary_neighbor_handler, but the targets only collide
  /// and revert; their stream is run later.
  void boundary_neighbor_collide_revert(int x, int y, int z) {
    for_each_neighbor_target(x, y, z, [&](int tx, int ty, int tz) { collide_revert(tx, ty, tz); });
  }

  /// Second-step targets owed after visiting (x, y, z), in execution order.
  /// A last-row cell (x-1, ly, z') swaps along (0,-1,+1) with (x-1, ly-1, z'+1),
  /// which is only second-collided as the lagged cell of (x, ly, z'+2); so the
  /// last row trails the visit by two cells and is flushed at the row end.
  template <class F>
  void for_each_neighbor_target(int x, int y, int z, F&& target) const {
    if (x <= 1) return;
    const int ly = spec_.ly, lz = spec_.lz;
    if (z == lz && y > 1) target(x - 1, y - 1, lz);
    if (y == ly && z > 2) target(x - 1, ly, z - 2);
    if (y == ly && z == lz) {
      target(x - 1, ly, lz - 1);
      target(x - 1, ly, lz);
    }
  }

 private:
  DistributionField& field_;
  DomainSpec spec_;
  double omega_;
  Probe& probe_;
  std::array<std::ptrdiff_t, D3Q19::q> cell_step_{};
  std::array<std::ptrdiff_t, D3Q19::q> slot_step_{};
  std::array<double, D3Q19::q> lid_{};
};

}  // namespace mlbm
