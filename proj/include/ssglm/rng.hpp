#pragma once

#include <cstdint>
#include <vector>

namespace ssglm::rng {

// splitmix64 output function over a Weyl-sequence state. One stream per
// (master seed, stream id) so Monte Carlo iterations and nodewise rows draw
// from disjoint deterministic streams no matter how work is scheduled.
std::uint64_t mix(std::uint64_t a, std::uint64_t b);

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}
  Stream(std::uint64_t master, std::uint64_t stream_id) : state_(mix(master, stream_id)) {}

  std::uint64_t next_u64();
  double next_uniform();  // [0, 1)
  double next_normal();   // Marsaglia polar method
  // index in [0, bound)
  std::uint64_t next_below(std::uint64_t bound);
  // Fisher-Yates permutation of 0..n-1
  std::vector<int> permutation(int n);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ssglm::rng
