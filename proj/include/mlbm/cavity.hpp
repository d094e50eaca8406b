#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlbm/lattice.hpp"
#include "mlbm/solvers.hpp"
#include "mlbm/throughput.hpp"

namespace mlbm {

struct CavityConfig {
  DomainSpec spec{};
  double omega = 1.0;
  double v = 0.05;  // lid speed along +Z
  int steps = 0;
  int tile = 16;
  int workers = 1;
  SolverKind solver = SolverKind::two_step_prism;
  std::filesystem::path dump_path;
  std::filesystem::path norm_path;

  KernelParams kernel() const { return {omega, {0.0, 0.0, v}, 1.0}; }
  RunParams run_params() const { return {steps, tile, workers, kernel()}; }

  void validate() const {
    if (v < 0.0) throw std::invalid_argument("lid speed must be non-negative");
    mlbm::validate(solver, spec, run_params());
  }
};

/// Fluid at rest with unit density. Walls are implicit in the kernels.
inline DistributionField build_cavity(const DomainSpec& spec) {
  DistributionField field(spec);
  fill_uniform(field, equilibrium(1.0, {0.0, 0.0, 0.0}));
  return field;
}

inline DistributionField build_cavity(const CavityConfig& config) {
  config.validate();
  return build_cavity(config.spec);
}

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

namespace detail {

template <class T>
void put_le(std::vector<char>& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.insert(out.end(), bytes.begin(), bytes.end());
}

template <class T>
T get_le(const char* in) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), in, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace detail

inline constexpr std::uint64_t kDumpHeaderBytes = 24;

inline std::uint64_t field_dump_size(const DomainSpec& spec) noexcept {
  return kDumpHeaderBytes + static_cast<std::uint64_t>(spec.cells()) * D3Q19::q * 8;
}

// Binary layout: u64 lx, ly, lz, then every slot as f64, all little-endian,
// in memory order.
inline void write_field_dump(const DistributionField& field, const std::filesystem::path& path) {
  std::vector<char> bytes;
  bytes.reserve(field_dump_size(field.spec()));
  detail::put_le<std::uint64_t>(bytes, static_cast<std::uint64_t>(field.spec().lx));
  detail::put_le<std::uint64_t>(bytes, static_cast<std::uint64_t>(field.spec().ly));
  detail::put_le<std::uint64_t>(bytes, static_cast<std::uint64_t>(field.spec().lz));
  for (double v : field.data()) detail::put_le<double>(bytes, v);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline DistributionField read_field_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kDumpHeaderBytes)
    throw FormatError("truncated header (" + std::to_string(bytes.size()) + " of 24 bytes)", bytes.size());
  std::array<std::uint64_t, 3> dims{};
  for (std::size_t a = 0; a < 3; ++a) {
    dims[a] = detail::get_le<std::uint64_t>(bytes.data() + 8 * a);
    if (dims[a] == 0 || dims[a] > (1u << 20))
      throw FormatError("implausible extent " + std::to_string(dims[a]), 8 * a);
  }
  const DomainSpec spec{static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2])};
  const std::uint64_t expected = field_dump_size(spec);
  if (bytes.size() < expected)
    throw FormatError("truncated payload, expected " + std::to_string(expected) + " bytes", bytes.size());
  if (bytes.size() > expected) throw FormatError("trailing bytes after payload", expected);
  DistributionField field(spec);
  const char* p = bytes.data() + kDumpHeaderBytes;
  for (double& v : field.data()) {
    v = detail::get_le<double>(p);
    p += 8;
  }
  return field;
}

/// One line per cell, "iX iY iZ norm", memory order, 15 significant digits.
inline void write_norm_log(const DistributionField& field, const std::filesystem::path& path) {
  const auto norms = velocity_norm_field(field);
  std::FILE* out = std::fopen(path.string().c_str(), "w");
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t k = 0; k < norms.size(); ++k) {
    const auto c = cell_coord(field.spec(), k);
    std::fprintf(out, "%d %d %d %.15g\n", c.x, c.y, c.z, norms[k]);
  }
  if (std::fclose(out) != 0) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Benchmark records
// ---------------------------------------------------------------------------

inline constexpr const char* kBenchCsvHeader = "solver,lx,ly,lz,tile,workers,steps,seconds,mflups,rep";

struct BenchRecord {
  std::string solver;
  DomainSpec spec{};
  int tile = 0;
  int workers = 1;
  int steps = 0;
  double seconds = 0.0;
  double mflups = 0.0;
  std::string rep;  // repeat index, or "mean" for an aggregate row

  std::string csv_row() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%d,%d,%d,%.9g,%.9g,%s", solver.c_str(), spec.lx,
                  spec.ly, spec.lz, tile, workers, steps, seconds, mflups, rep.c_str());
    return buf;
  }
};

/// Appends records to a CSV file, writing the header only into an empty or
/// new file. Each row is flushed as it is written.
class BenchCsv {
 public:
  explicit BenchCsv(const std::filesystem::path& path) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    out_.open(path, std::ios::app);
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for appending");
    if (fresh) out_ << kBenchCsvHeader << '\n' << std::flush;
  }

  void append(const BenchRecord& record) {
    out_ << record.csv_row() << '\n' << std::flush;
    if (!out_) throw std::runtime_error("CSV write failed");
  }

 private:
  std::ofstream out_;
};

}  // namespace mlbm
