#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlbm/kernels.hpp"
#include "mlbm/lattice.hpp"
#include "mlbm/parallel.hpp"
#include "mlbm/probe.hpp"
#include "mlbm/throughput.hpp"
#include "mlbm/traversal.hpp"

namespace mlbm {

enum class SolverKind { oracle, fuse, fuse_prism, two_step, two_step_prism, two_step_prism_par };

inline constexpr std::array<SolverKind, 6> kAllSolvers = {
    SolverKind::oracle,   SolverKind::fuse,           SolverKind::fuse_prism,
    SolverKind::two_step, SolverKind::two_step_prism, SolverKind::two_step_prism_par};

constexpr std::string_view name(SolverKind kind) noexcept {
  switch (kind) {
    case SolverKind::oracle: return "oracle";
    case SolverKind::fuse: return "fuse";
    case SolverKind::fuse_prism: return "fuse-prism";
    case SolverKind::two_step: return "two-step";
    case SolverKind::two_step_prism: return "two-step-prism";
    case SolverKind::two_step_prism_par: return "two-step-prism-par";
  }
  return "?";
}

inline std::optional<SolverKind> parse_solver_kind(std::string_view text) {
  for (SolverKind k : kAllSolvers) {
    if (name(k) == text) return k;
    std::string alt(name(k));
    for (char& ch : alt)
      if (ch == '-') ch = '_';
    if (alt == text) return k;
  }
  return std::nullopt;
}

constexpr bool is_two_step(SolverKind kind) noexcept {
  return kind == SolverKind::two_step || kind == SolverKind::two_step_prism ||
         kind == SolverKind::two_step_prism_par;
}

struct RunParams {
  int steps = 0;
  int tile = 16;
  int workers = 1;
  KernelParams kernel{};
};

/// Tile actually used by a solver kind; `two_step` is the single-prism case.
inline int effective_tile(SolverKind kind, const DomainSpec& spec, int tile) noexcept {
  return kind == SolverKind::two_step ? spec.lx + spec.ly + spec.lz : tile;
}

/// Rejects parameter sets the solver cannot run. Throws std::invalid_argument.
inline void validate(SolverKind kind, const DomainSpec& spec, const RunParams& params) {
  params.kernel.validate();
  if (params.steps < 0) throw std::invalid_argument("step count must be non-negative");
  require_dims(spec, kind == SolverKind::oracle ? 1 : 3);
  if (is_two_step(kind) && params.steps % 2 != 0)
    throw std::invalid_argument("two-step solvers advance two time steps per cycle; steps must be even, got " +
                                std::to_string(params.steps));
  if (kind == SolverKind::fuse_prism || kind == SolverKind::two_step_prism ||
      kind == SolverKind::two_step_prism_par) {
    if (params.tile < 1) throw std::invalid_argument("tile must be >= 1");
  }
  if (kind == SolverKind::two_step_prism_par) validate_partition(spec, params.workers);
}

// ---------------------------------------------------------------------------
// Two-copy reference: collide everywhere, then push every population into a
// second buffer. Walls reflect into opp(i) of the same cell, minus the lid
// momentum for populations leaving through layer lx.
// ---------------------------------------------------------------------------
class TwoCopyOracle {
 public:
  void step(DistributionField& field, const KernelParams& params) {
    const DomainSpec& s = field.spec();
    next_.assign(field.data().size(), 0.0);
    for (std::size_t k = 0; k < field.cells(); ++k) collide(field.populations(k), params.omega);
    for (int x = 1; x <= s.lx; ++x)
      for (int y = 1; y <= s.ly; ++y)
        for (int z = 1; z <= s.lz; ++z) {
          const std::size_t k = cell_index(s, x, y, z);
          const double* f = field.cell(k);
          for (int i = 0; i < D3Q19::q; ++i) {
            const int nx = x + D3Q19::c[i][0], ny = y + D3Q19::c[i][1], nz = z + D3Q19::c[i][2];
            if (s.contains(nx, ny, nz)) {
              next_[cell_index(s, nx, ny, nz) * D3Q19::q + i] = f[i];
            } else {
              const double lid = (x == s.lx && leaves_through_lid(i)) ? lid_momentum(i, params) : 0.0;
              next_[k * D3Q19::q + D3Q19::opp(i)] = f[i] - lid;
            }
          }
        }
    field.data().swap(next_);
  }

 private:
  std::vector<double> next_;
};

inline void oracle_step(DistributionField& field, const KernelParams& params) {
  TwoCopyOracle().step(field, params);
}

namespace detail {

// Bounding-box cells in ascending (X,Y,Z) order.
template <class F>
void for_each_boundary_cell(const DomainSpec& s, F&& visit) {
  for (int x = 1; x <= s.lx; ++x) {
    const bool face = x == 1 || x == s.lx;
    for (int y = 1; y <= s.ly; ++y) {
      if (face || y == 1 || y == s.ly) {
        for (int z = 1; z <= s.lz; ++z) visit(x, y, z);
      } else {
        visit(x, y, 1);
        visit(x, y, s.lz);
      }
    }
  }
}

template <class Probe, class Traverse>
void fuse_swap_staged(DistributionField& field, const KernelParams& params, Probe& probe,
                      Traverse&& bulk) {
  CellOps<Probe> ops(field, params, probe);
  const DomainSpec& s = field.spec();
  detail::for_each_boundary_cell(s, [&](int x, int y, int z) { ops.collide_revert(x, y, z); });
  bulk([&](int x, int y, int z) {
    ops.collide_revert(x, y, z);
    ops.swap_stream(x, y, z);
  });
  detail::for_each_boundary_cell(s, [&](int x, int y, int z) { ops.boundary_swap_stream(x, y, z); });
}

}  // namespace detail

/// One time step of the single-copy fused swap scheme:
/// collide+revert the bounding box, collide+swap the bulk in ascending order,
/// then stream the bounding box.
template <class Probe>
void fuse_swap_step(DistributionField& field, const KernelParams& params, Probe& probe) {
  const DomainSpec& s = field.spec();
  require_dims(s, 3);
  detail::fuse_swap_staged(field, params, probe, [&](auto&& visit) {
    for (int x = 2; x < s.lx; ++x)
      for (int y = 2; y < s.ly; ++y)
        for (int z = 2; z < s.lz; ++z) visit(x, y, z);
  });
}

inline void fuse_swap_step(DistributionField& field, const KernelParams& params) {
  NullProbe probe;
  fuse_swap_step(field, params, probe);
}

/// fuse_swap_step with the bulk visited in prism order.
template <class Probe>
void fuse_swap_prism_step(DistributionField& field, const KernelParams& params, int tile,
                          Probe& probe) {
  const DomainSpec& s = field.spec();
  require_dims(s, 3);
  const PrismCursor bulk(s, tile, {2, s.lx - 1}, {2, s.ly - 1}, {2, s.lz - 1});
  detail::fuse_swap_staged(field, params, probe,
                           [&](auto&& visit) { bulk.for_each(visit); });
}

inline void fuse_swap_prism_step(DistributionField& field, const KernelParams& params, int tile) {
  NullProbe probe;
  fuse_swap_prism_step(field, params, tile, probe);
}

/// Advances two time steps. The second step trails the first by one cell
/// along the (-1,-1,-1) diagonal; the last row and column of each layer are
/// picked up by the neighbor handler and the top layer by a final pass.
template <class Probe>
void two_step_prism_cycle(DistributionField& field, const KernelParams& params, int tile,
                          Probe& probe) {
  const DomainSpec& s = field.spec();
  require_dims(s, 3);
  CellOps<Probe> ops(field, params, probe);
  const PrismCursor cursor(s, tile, {1, s.lx});
  cursor.for_each([&](int x, int y, int z) {
    ops.adaptive_collide_stream(x, y, z);
    if (x > 1 && y > 1 && z > 1) ops.adaptive_collide_stream(x - 1, y - 1, z - 1);
    ops.boundary_neighbor_handler(x, y, z);
  });
  for (int y = 1; y <= s.ly; ++y)
    for (int z = 1; z <= s.lz; ++z) ops.boundary_cell_comp(s.lx, y, z);
}

inline void two_step_prism_cycle(DistributionField& field, const KernelParams& params, int tile) {
  NullProbe probe;
  two_step_prism_cycle(field, params, tile, probe);
}

struct RunReport {
  SolverKind kind = SolverKind::oracle;
  std::size_t cells = 0;
  int steps = 0;
  double seconds = 0.0;
  double mflups = 0.0;
  double mass_before = 0.0;
  double mass_after = 0.0;

  double relative_mass_drift() const noexcept {
    return mass_before == 0.0 ? 0.0 : std::abs(mass_after - mass_before) / std::abs(mass_before);
  }
};

/// Advances `params.steps` time steps with the chosen solver. Only the
/// stepping loop is timed.
template <class Probe>
RunReport run(SolverKind kind, DistributionField& field, const RunParams& params, Probe& probe) {
  const DomainSpec& s = field.spec();
  validate(kind, s, params);
  RunReport report;
  report.kind = kind;
  report.cells = s.cells();
  report.steps = params.steps;
  report.mass_before = total_mass(field);

  const int tile = effective_tile(kind, s, params.tile);
  const int cycles = params.steps / 2;
  TwoCopyOracle oracle;

  const auto start = std::chrono::steady_clock::now();
  switch (kind) {
    case SolverKind::oracle:
      for (int t = 0; t < params.steps; ++t) oracle.step(field, params.kernel);
      break;
    case SolverKind::fuse:
      for (int t = 0; t < params.steps; ++t) fuse_swap_step(field, params.kernel, probe);
      break;
    case SolverKind::fuse_prism:
      for (int t = 0; t < params.steps; ++t) fuse_swap_prism_step(field, params.kernel, tile, probe);
      break;
    case SolverKind::two_step:
    case SolverKind::two_step_prism:
      for (int c = 0; c < cycles; ++c) two_step_prism_cycle(field, params.kernel, tile, probe);
      break;
    case SolverKind::two_step_prism_par:
      if (cycles > 0)
        parallel_two_step_prism(field, params.kernel, tile, params.workers, cycles, probe);
      break;
  }
  const auto stop = std::chrono::steady_clock::now();

  report.seconds = std::chrono::duration<double>(stop - start).count();
  report.mflups = params.steps == 0 || report.seconds <= 0.0
                      ? 0.0
                      : mlbm::mflups(report.cells, static_cast<std::uint64_t>(params.steps),
                                     report.seconds);
  report.mass_after = total_mass(field);
  return report;
}

inline RunReport run(SolverKind kind, DistributionField& field, const RunParams& params) {
  NullProbe probe;
  return run(kind, field, params, probe);
}

}  // namespace mlbm
