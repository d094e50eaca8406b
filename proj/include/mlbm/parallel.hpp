#pragma once

#include <atomic>
#include <barrier>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mlbm/kernels.hpp"
#include "mlbm/lattice.hpp"
#include "mlbm/probe.hpp"
#include "mlbm/traversal.hpp"

namespace mlbm {

/// Equal X-slabs; lx must divide evenly and every slab needs three layers so
/// that its first, second and last layers are distinct.
inline void validate_partition(const DomainSpec& spec, int workers) {
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
  if (spec.lx % workers != 0)
    throw std::invalid_argument("lx = " + std::to_string(spec.lx) + " is not divisible by " +
                                std::to_string(workers) + " workers");
  if (spec.lx / workers < 3)
    throw std::invalid_argument("each worker needs at least 3 layers (lx / workers = " +
                                std::to_string(spec.lx / workers) + ")");
}

inline Range worker_slab(const DomainSpec& spec, int workers, int id) noexcept {
  const int height = spec.lx / workers;
  return {1 + id * height, (id + 1) * height};
}

inline constexpr int kBarriersPerCycle = 4;  // three stage barriers plus the cycle-end join

namespace detail {

// One worker's share of a two-step cycle on slab [start, end]. The slab's top
// layer `end` is the intersection with the next worker.
template <class Probe>
class SlabWorker {
 public:
  SlabWorker(DistributionField& field, const KernelParams& params, Probe& probe, int tile, Range slab)
      : ops_(field, params, probe), cursor_(field.spec(), tile, slab), start_(slab.first),
        end_(slab.last) {}

  // Stage I: first collide+revert of the intersection layer, no stream yet.
  void preprocess() { for_layer(end_, [&](int x, int y, int z) { ops_.collide_revert(x, y, z); }); }

  // Stage II
  void sweep() {
    cursor_.for_each([&](int x, int y, int z) {
      if (x != end_ && (x == 1 || y == 1 || z == 1)) {
        ops_.boundary_cell_comp(x, y, z);
      } else if (x == start_) {
        ops_.adaptive_collide_stream(x, y, z);
      } else if (x == start_ + 1) {
        // The slab's first layer streams its second step only in stage III,
        // after the worker below has finished its intersection layer.
        ops_.adaptive_collide_stream(x, y, z);
        ops_.collide_revert(x - 1, y - 1, z - 1);
        ops_.boundary_neighbor_collide_revert(x, y, z);
      } else if (x == end_) {
        ops_.adaptive_stream(x, y, z);
        if (y > 1 && z > 1) ops_.adaptive_collide_stream(x - 1, y - 1, z - 1);
        ops_.boundary_neighbor_handler(x, y, z);
      } else {
        ops_.adaptive_collide_stream(x, y, z);
        ops_.adaptive_collide_stream(x - 1, y - 1, z - 1);
        ops_.boundary_neighbor_handler(x, y, z);
      }
    });
  }

  // Stage III, part 1
  void finish_intersection() {
    for_layer(end_, [&](int x, int y, int z) { ops_.adaptive_collide_stream(x, y, z); });
  }

  // Stage III, part 2: reaches down into the previous worker's intersection.
  void finish_first_layer() {
    for_layer(start_, [&](int x, int y, int z) { ops_.adaptive_stream(x, y, z); });
  }

 private:
  template <class F>
  void for_layer(int x, F&& visit) {
    const DomainSpec& s = ops_.spec();
    for (int y = 1; y <= s.ly; ++y)
      for (int z = 1; z <= s.lz; ++z) visit(x, y, z);
  }

  CellOps<Probe> ops_;
  PrismCursor cursor_;
  int start_;
  int end_;
};

}  // namespace detail

/// Runs `cycles` two-step cycles on `workers` threads (the calling thread is
/// worker 0). Each cycle is three barrier-separated stages and a closing
/// join. Returns the number of completed barrier phases.
template <class Probe>
std::uint64_t parallel_two_step_prism(DistributionField& field, const KernelParams& params, int tile,
                                      int workers, int cycles, Probe& probe) {
  const DomainSpec& s = field.spec();
  require_dims(s, 3);
  validate_partition(s, workers);
  if (tile < 1) throw std::invalid_argument("tile must be >= 1");

  std::atomic<std::uint64_t> phases{0};
  auto on_phase = [&]() noexcept {
    if constexpr (Probe::enabled) probe.barrier();
    phases.fetch_add(1, std::memory_order_relaxed);
  };
  std::barrier sync(workers, on_phase);

  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto body = [&](int id) {
    if constexpr (Probe::enabled) probe.enter_worker(id);
    detail::SlabWorker<Probe> worker(field, params, probe, tile, worker_slab(s, workers, id));
    // A failing worker keeps arriving at the barriers so the others can drain.
    auto stage = [&](auto&& work) {
      if (!failed.load(std::memory_order_relaxed)) {
        try {
          work();
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
      sync.arrive_and_wait();
    };
    for (int c = 0; c < cycles; ++c) {
      stage([&] { worker.preprocess(); });
      stage([&] { worker.sweep(); });
      stage([&] { worker.finish_intersection(); });
      stage([&] { worker.finish_first_layer(); });
    }
  };

  {
    std::vector<std::jthread> team;
    team.reserve(static_cast<std::size_t>(workers - 1));
    for (int id = 1; id < workers; ++id) team.emplace_back(body, id);
    body(0);
  }
  if constexpr (Probe::enabled) probe.enter_worker(0);
  if (error) std::rethrow_exception(error);
  return phases.load();
}

template <class Probe>
void parallel_two_step_prism_cycle(DistributionField& field, const KernelParams& params, int tile,
                                   int workers, Probe& probe) {
  parallel_two_step_prism(field, params, tile, workers, 1, probe);
}

inline void parallel_two_step_prism_cycle(DistributionField& field, const KernelParams& params,
                                          int tile, int workers) {
  NullProbe probe;
  parallel_two_step_prism(field, params, tile, workers, 1, probe);
}

}  // namespace mlbm
