#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlbm/lattice.hpp"

namespace mlbm {

/// Inclusive index interval.
struct Range {
  int first = 1;
  int last = 0;
  friend constexpr bool operator==(const Range&, const Range&) = default;
};

struct PrismBlock {
  int x, y, z;  // outerX, outerY, outerZ
  friend constexpr bool operator==(const PrismBlock&, const PrismBlock&) = default;
};

// Prism traversal order.
//
// Blocks of `tile` layers are visited X-outermost. Inside a block, layer
// dx = innerX - outerX has its Y window shifted forward by dx, and row dy of
// that window has its Z window shifted left by dx + dy. A cell visited this
// way has every backward swap partner (directions 1..9) visited earlier, and
// so does the cell one step down the (-1,-1,-1) diagonal, which is what lets
// a second time step trail the first one by a single cell.
//
// Y and Z default to the full extent; the fused baseline narrows them to the
// bulk. The shifts are taken relative to the lower bound of each range.
class PrismCursor {
 public:
  PrismCursor(DomainSpec spec, int tile, Range xs)
      : PrismCursor(spec, tile, xs, {1, spec.ly}, {1, spec.lz}) {}

  PrismCursor(DomainSpec spec, int tile, Range xs, Range ys, Range zs)
      : spec_(spec), tile_(tile), xs_(xs), ys_(ys), zs_(zs) {
    if (tile < 1) throw std::invalid_argument("prism tile must be >= 1");
    check(xs_, spec.lx, "X");
    check(ys_, spec.ly, "Y");
    check(zs_, spec.lz, "Z");
  }

  const DomainSpec& spec() const noexcept { return spec_; }
  int tile() const noexcept { return tile_; }
  Range x_range() const noexcept { return xs_; }

  template <class F>
  void for_each_block(F&& visit) const {
    const int y_end = ys_.last + tile_ - 1;
    const int z_end = zs_.last + 2 * (tile_ - 1);
    for (int ox = xs_.first; ox <= xs_.last; ox += tile_)
      for (int oy = ys_.first; oy <= y_end; oy += tile_)
        for (int oz = zs_.first; oz <= z_end; oz += tile_) visit(PrismBlock{ox, oy, oz});
  }

  template <class F>
  void for_each_cell(const PrismBlock& block, F&& visit) const {
    const int x_hi = std::min(block.x + tile_ - 1, xs_.last);
    for (int x = block.x, dx = 0; x <= x_hi; ++x, ++dx) {
      const int min_y = block.y - dx;
      const int y_lo = std::max(min_y, ys_.first);
      const int y_hi = std::min(min_y + tile_ - 1, ys_.last);
      for (int y = y_lo, dy = 0; y <= y_hi; ++y, ++dy) {
        const int min_z = block.z - dx - dy;
        const int z_lo = std::max(min_z, zs_.first);
        const int z_hi = std::min(min_z + tile_ - 1, zs_.last);
        for (int z = z_lo; z <= z_hi; ++z) visit(x, y, z);
      }
    }
  }

  /// Visits every cell of the cursor's box once, in prism order.
  template <class F>
  void for_each(F&& visit) const {
    for_each_block([&](const PrismBlock& b) { for_each_cell(b, visit); });
  }

  std::vector<PrismBlock> blocks() const {
    std::vector<PrismBlock> out;
    for_each_block([&](const PrismBlock& b) { out.push_back(b); });
    return out;
  }

  std::vector<CellCoord> cells(const PrismBlock& block) const {
    std::vector<CellCoord> out;
    for_each_cell(block, [&](int x, int y, int z) { out.push_back({x, y, z}); });
    return out;
  }

  std::vector<CellCoord> enumerate() const {
    std::vector<CellCoord> out;
    out.reserve(static_cast<std::size_t>(xs_.last - xs_.first + 1) * (ys_.last - ys_.first + 1) *
                (zs_.last - zs_.first + 1));
    for_each([&](int x, int y, int z) { out.push_back({x, y, z}); });
    return out;
  }

 private:
  static void check(Range r, int extent, const char* axis) {
    if (r.first < 1 || r.last > extent || r.first > r.last)
      throw std::invalid_argument(std::string("prism ") + axis + " range [" +
                                  std::to_string(r.first) + "," + std::to_string(r.last) +
                                  "] outside [1," + std::to_string(extent) + "]");
  }

  DomainSpec spec_;
  int tile_;
  Range xs_, ys_, zs_;
};

}  // namespace mlbm
