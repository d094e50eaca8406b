#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlbm {

using Vec3 = std::array<double, 3>;

// ---------------------------------------------------------------------------
// D3Q19 descriptor
//
// Directions 1..9 are lexicographically negative on (X,Y,Z): the cell at
// x + c_i has already been visited when cells are traversed in ascending
// (X,Y,Z) order. Direction i+9 is the opposite of i.
// ---------------------------------------------------------------------------
struct D3Q19 {
  static constexpr int q = 19;
  static constexpr int half = 9;

  static constexpr std::array<std::array<int, 3>, q> c = {{
      {0, 0, 0},
      {-1, 0, 0}, {0, -1, 0}, {0, 0, -1},
      {-1, -1, 0}, {-1, 1, 0}, {-1, 0, -1}, {-1, 0, 1}, {0, -1, -1}, {0, -1, 1},
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
      {1, 1, 0}, {1, -1, 0}, {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1},
  }};

  // Weights as multiples of 1/36.
  static constexpr std::array<int, q> w36 = {12, 2, 2, 2, 1, 1, 1, 1, 1, 1,
                                             2, 2, 2, 1, 1, 1, 1, 1, 1};

  static constexpr std::array<double, q> w = [] {
    std::array<double, q> out{};
    for (int i = 0; i < q; ++i) out[i] = w36[i] / 36.0;
    return out;
  }();

  static constexpr int opp(int i) noexcept {
    assert(i >= 0 && i < q);
    return i == 0 ? 0 : (i <= half ? i + half : i - half);
  }
};

using Populations = std::array<double, D3Q19::q>;

// Box extents. 1-based logical indices, iX in [1,lx] etc.
struct DomainSpec {
  int lx = 0;  // layers along X (height)
  int ly = 0;  // rows along Y (width)
  int lz = 0;  // cells along Z (length)

  constexpr std::size_t cells() const noexcept {
    return static_cast<std::size_t>(lx) * ly * lz;
  }
  constexpr bool contains(int x, int y, int z) const noexcept {
    return x >= 1 && x <= lx && y >= 1 && y <= ly && z >= 1 && z <= lz;
  }
  constexpr bool on_boundary(int x, int y, int z) const noexcept {
    return x == 1 || x == lx || y == 1 || y == ly || z == 1 || z == lz;
  }
  friend constexpr bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

inline void require_dims(const DomainSpec& spec, int min_extent) {
  if (spec.lx < min_extent || spec.ly < min_extent || spec.lz < min_extent) {
    throw std::invalid_argument("domain " + std::to_string(spec.lx) + "x" +
                                std::to_string(spec.ly) + "x" + std::to_string(spec.lz) +
                                " needs every extent >= " + std::to_string(min_extent));
  }
}

constexpr std::size_t cell_index(const DomainSpec& spec, int x, int y, int z) noexcept {
  assert(spec.contains(x, y, z));
  return (static_cast<std::size_t>(x - 1) * spec.ly + static_cast<std::size_t>(y - 1)) *
             spec.lz +
         static_cast<std::size_t>(z - 1);
}

struct CellCoord {
  int x, y, z;
  friend constexpr bool operator==(const CellCoord&, const CellCoord&) = default;
  friend constexpr auto operator<=>(const CellCoord&, const CellCoord&) = default;
};

constexpr CellCoord cell_coord(const DomainSpec& spec, std::size_t index) noexcept {
  const auto lz = static_cast<std::size_t>(spec.lz);
  const auto ly = static_cast<std::size_t>(spec.ly);
  return {static_cast<int>(index / (ly * lz)) + 1, static_cast<int>((index / lz) % ly) + 1,
          static_cast<int>(index % lz) + 1};
}

// Single-copy population storage: 19 consecutive slots per cell, cells in
// Z-fastest, then Y, then X order.
class DistributionField {
 public:
  DistributionField() = default;
  explicit DistributionField(DomainSpec spec)
      : spec_(spec), data_(spec.cells() * D3Q19::q, 0.0) {}

  const DomainSpec& spec() const noexcept { return spec_; }
  std::size_t cells() const noexcept { return spec_.cells(); }

  double* cell(std::size_t index) noexcept { return data_.data() + index * D3Q19::q; }
  const double* cell(std::size_t index) const noexcept {
    return data_.data() + index * D3Q19::q;
  }
  double* cell(int x, int y, int z) noexcept { return cell(cell_index(spec_, x, y, z)); }
  const double* cell(int x, int y, int z) const noexcept {
    return cell(cell_index(spec_, x, y, z));
  }

  std::span<double, D3Q19::q> populations(std::size_t index) noexcept {
    return std::span<double, D3Q19::q>(cell(index), D3Q19::q);
  }
  std::span<const double, D3Q19::q> populations(std::size_t index) const noexcept {
    return std::span<const double, D3Q19::q>(cell(index), D3Q19::q);
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const DistributionField&, const DistributionField&) = default;

 private:
  DomainSpec spec_{};
  std::vector<double> data_;
};

class DegenerateMoments : public std::domain_error {
 public:
  DegenerateMoments() : std::domain_error("degenerate moments: density is zero") {}
};

struct Moments {
  double rho = 0.0;
  Vec3 u{};
};

inline Moments compute_moments(std::span<const double, D3Q19::q> f) {
  double rho = f[0];
  Vec3 j{};
  // opposite pairs first, so a symmetric cell has exactly zero momentum
  for (int i = 1; i <= D3Q19::half; ++i) {
    const double diff = f[i] - f[i + D3Q19::half];
    rho += f[i] + f[i + D3Q19::half];
    j[0] += D3Q19::c[i][0] * diff;
    j[1] += D3Q19::c[i][1] * diff;
    j[2] += D3Q19::c[i][2] * diff;
  }
  if (rho == 0.0) throw DegenerateMoments();
  const double inv = 1.0 / rho;
  return {rho, {j[0] * inv, j[1] * inv, j[2] * inv}};
}

inline double equilibrium_component(int i, double rho, const Vec3& u, double usq) noexcept {
  const double cu = D3Q19::c[i][0] * u[0] + D3Q19::c[i][1] * u[1] + D3Q19::c[i][2] * u[2];
  return D3Q19::w[i] * rho * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * usq);
}

inline Populations equilibrium(double rho, const Vec3& u) {
  assert(rho > 0.0);
  const double usq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
  Populations f{};
  for (int i = 0; i < D3Q19::q; ++i) f[i] = equilibrium_component(i, rho, u, usq);
  return f;
}

inline void fill_uniform(DistributionField& field, const Populations& f) {
  for (std::size_t k = 0; k < field.cells(); ++k) {
    double* cell = field.cell(k);
    for (int i = 0; i < D3Q19::q; ++i) cell[i] = f[i];
  }
}

/// Per-cell |u| in memory order.
inline std::vector<double> velocity_norm_field(const DistributionField& field) {
  std::vector<double> norms(field.cells());
  for (std::size_t k = 0; k < field.cells(); ++k) {
    const auto m = compute_moments(field.populations(k));
    norms[k] = std::sqrt(m.u[0] * m.u[0] + m.u[1] * m.u[1] + m.u[2] * m.u[2]);
  }
  return norms;
}

/// Sum of all populations, with Neumaier compensation.
inline double total_mass(const DistributionField& field) noexcept {
  double sum = 0.0, carry = 0.0;
  for (double v : field.data()) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + carry;
}

}  // namespace mlbm
