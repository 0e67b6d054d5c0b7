#pragma once

#include <cstdint>

namespace vislide {

// Seeded, streamed generator (PCG32). Same (seed, stream_id) reproduces the
// identical sample sequence on every platform; distinct stream_ids give
// statistically independent streams. Standard-library distributions are
// avoided on purpose: their output is implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01();
  double uniform(double lo, double hi);

  // Standard normal via the Marsaglia polar method (second draw cached).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

// splitmix64 finalizer; used to derive per-cell stream ids.
std::uint64_t mix_u64(std::uint64_t x);

// Stream id for an experiment cell: hash of (n, seed).
std::uint64_t cell_stream_id(std::uint64_t n, std::uint64_t seed);

}  // namespace vislide
