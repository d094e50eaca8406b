#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "mlbm/lattice.hpp"

namespace mlbm {

// Probes observe the kernels. Every kernel hook is guarded by
// `if constexpr (Probe::enabled)`, so NullProbe compiles to nothing.
struct NullProbe {
  static constexpr bool enabled = false;
  void enter_worker(int) noexcept {}
  void collided(std::size_t) noexcept {}
  void swapped(std::size_t, int, std::size_t) noexcept {}
  void barrier() noexcept {}
};

// Tracks the logical time of every cell and link, and flags any operation
// whose inputs are not in the state the swap scheme requires:
//  - a collide of cell x (its k-th) needs every in-domain link touching x
//    swapped exactly k-1 times;
//  - a swap of link (x, x+c_i) needs both ends collided once more than the
//    link has been swapped.
// It also records, per population slot, which worker last wrote it in the
// current barrier epoch, and reports slots touched by two workers between
// consecutive barriers.
class ScheduleProbe {
 public:
  static constexpr bool enabled = true;

  struct CrossSlabWrite {
    std::uint64_t epoch;
    int worker;
    int layer;
    int slot;
  };

  struct Snapshot {
    std::vector<std::uint32_t> collisions;
    // minimum swap count over the in-domain links a cell owns (directions 1..9)
    std::vector<std::uint32_t> owned_swaps;
  };

  explicit ScheduleProbe(DomainSpec spec)
      : spec_(spec),
        collisions_(std::make_unique<std::atomic<std::uint32_t>[]>(spec.cells())),
        swaps_(std::make_unique<std::atomic<std::uint32_t>[]>(spec.cells() * D3Q19::half)),
        writers_(std::make_unique<std::atomic<std::uint64_t>[]>(spec.cells() * D3Q19::q)) {
    for (std::size_t k = 0; k < spec.cells(); ++k) collisions_[k] = 0;
    for (std::size_t k = 0; k < spec.cells() * D3Q19::half; ++k) swaps_[k] = 0;
    for (std::size_t k = 0; k < spec.cells() * D3Q19::q; ++k) writers_[k] = 0;
  }

  /// Assigns X-slabs [first, last] to workers 0..n-1 for cross-slab accounting.
  void set_slabs(std::vector<std::pair<int, int>> slabs) { slabs_ = std::move(slabs); }

  void enter_worker(int w) noexcept { current_worker() = w; }

  void collided(std::size_t cell) {
    const auto here = cell_coord(spec_, cell);
    const std::uint32_t done = collisions_[cell].load(std::memory_order_relaxed);
    for (int i = 1; i <= D3Q19::half; ++i) {
      const int nx = here.x + D3Q19::c[i][0], ny = here.y + D3Q19::c[i][1],
                nz = here.z + D3Q19::c[i][2];
      if (spec_.contains(nx, ny, nz) && link(cell, i) != done)
        fail("collide before outgoing link streamed", here, i);
      const int px = here.x - D3Q19::c[i][0], py = here.y - D3Q19::c[i][1],
                pz = here.z - D3Q19::c[i][2];
      if (spec_.contains(px, py, pz) && link(cell_index(spec_, px, py, pz), i) != done)
        fail("collide before incoming link streamed", here, i);
    }
    collisions_[cell].store(done + 1, std::memory_order_relaxed);
    for (int s = 0; s < D3Q19::q; ++s) touch(cell, s);
  }

  void swapped(std::size_t cell, int dir, std::size_t neighbor) {
    const auto here = cell_coord(spec_, cell);
    const auto there = cell_coord(spec_, neighbor);
    if (there.x != here.x + D3Q19::c[dir][0] || there.y != here.y + D3Q19::c[dir][1] ||
        there.z != here.z + D3Q19::c[dir][2])
      fail("swap partner is not x + c_i", here, dir);
    const std::uint32_t count = link(cell, dir);
    const std::uint32_t a = collisions_[cell].load(std::memory_order_relaxed);
    const std::uint32_t b = collisions_[neighbor].load(std::memory_order_relaxed);
    if (a != count + 1) fail("swap with unprepared owner", here, dir);
    if (b != count + 1) fail("swap with unprepared neighbor", here, dir);
    swaps_[cell * D3Q19::half + (dir - 1)].store(count + 1, std::memory_order_relaxed);
    touch(cell, dir + D3Q19::half);
    touch(neighbor, dir);
  }

  void barrier() {
    Snapshot snap;
    snap.collisions.resize(spec_.cells());
    snap.owned_swaps.resize(spec_.cells());
    for (std::size_t k = 0; k < spec_.cells(); ++k) {
      snap.collisions[k] = collisions_[k].load(std::memory_order_relaxed);
      snap.owned_swaps[k] = min_owned_swaps(k);
    }
    snapshots_.push_back(std::move(snap));
    epoch_.fetch_add(1, std::memory_order_relaxed);
  }

  std::uint32_t collisions(std::size_t cell) const {
    return collisions_[cell].load(std::memory_order_relaxed);
  }
  std::uint32_t link(std::size_t cell, int dir) const {
    return swaps_[cell * D3Q19::half + (dir - 1)].load(std::memory_order_relaxed);
  }
  std::uint32_t min_owned_swaps(std::size_t cell) const {
    const auto here = cell_coord(spec_, cell);
    std::uint32_t lo = UINT32_MAX;
    for (int i = 1; i <= D3Q19::half; ++i) {
      if (spec_.contains(here.x + D3Q19::c[i][0], here.y + D3Q19::c[i][1],
                         here.z + D3Q19::c[i][2]))
        lo = std::min(lo, link(cell, i));
    }
    return lo;
  }

  std::uint64_t barriers() const { return epoch_.load(std::memory_order_relaxed); }
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  std::vector<std::string> violations() const {
    std::lock_guard lock(mutex_);
    return violations_;
  }
  std::vector<CrossSlabWrite> cross_slab_writes() const {
    std::lock_guard lock(mutex_);
    return cross_;
  }

  /// Violations of the end-of-run state after `steps` completed time steps:
  /// every cell collided `steps` times, every in-domain link swapped `steps`
  /// times. Wall links have no partner and are never counted.
  std::vector<std::string> check_complete(std::uint32_t steps) const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < spec_.cells(); ++k) {
      const auto here = cell_coord(spec_, k);
      if (collisions(k) != steps) out.push_back("collision count at " + describe(here, 0));
      for (int i = 1; i <= D3Q19::half; ++i) {
        const bool interior = spec_.contains(here.x + D3Q19::c[i][0], here.y + D3Q19::c[i][1],
                                             here.z + D3Q19::c[i][2]);
        const std::uint32_t want = interior ? steps : 0;
        if (link(k, i) != want) out.push_back("link count at " + describe(here, i));
      }
    }
    return out;
  }

 private:
  static int& current_worker() noexcept {
    static thread_local int worker = 0;
    return worker;
  }

  static std::string describe(CellCoord c, int dir) {
    return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + "," + std::to_string(c.z) +
           ") dir " + std::to_string(dir);
  }

  void fail(const char* what, CellCoord c, int dir) {
    std::lock_guard lock(mutex_);
    if (violations_.size() < 64) violations_.push_back(std::string(what) + " at " + describe(c, dir));
  }

  void touch(std::size_t cell, int slot) {
    const int worker = current_worker();
    const std::uint64_t epoch = epoch_.load(std::memory_order_relaxed);
    const std::uint64_t tag = (epoch << 16) | static_cast<std::uint64_t>(worker + 1);
    const std::uint64_t prev =
        writers_[cell * D3Q19::q + slot].exchange(tag, std::memory_order_relaxed);
    if ((prev >> 16) == epoch && prev != 0 && prev != tag)
      fail("slot touched by two workers in one stage", cell_coord(spec_, cell), slot);
    if (!slabs_.empty()) {
      const int layer = cell_coord(spec_, cell).x;
      const auto [first, last] = slabs_[static_cast<std::size_t>(worker)];
      if (layer < first || layer > last) {
        std::lock_guard lock(mutex_);
        cross_.push_back({epoch, worker, layer, slot});
      }
    }
  }

  DomainSpec spec_;
  std::unique_ptr<std::atomic<std::uint32_t>[]> collisions_;
  std::unique_ptr<std::atomic<std::uint32_t>[]> swaps_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> writers_;
  std::atomic<std::uint64_t> epoch_{0};
  std::vector<std::pair<int, int>> slabs_;
  std::vector<Snapshot> snapshots_;
  mutable std::mutex mutex_;
  std::vector<std::string> violations_;
  std::vector<CrossSlabWrite> cross_;
};

}  // namespace mlbm
