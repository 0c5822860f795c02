#pragma once

#include <cstdint>
#include <numeric>
#include <thread>
#include <vector>

namespace dicode {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Key derivation for counter-based substreams: every (root, stream) pair maps
// to an independent generator state, so work split across any number of
// threads reproduces bit-identically as long as stream ids are stable.
inline std::uint64_t mix_key(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t x = root;
  std::uint64_t h = splitmix64(x);
  x = h ^ (stream + 0x9E3779B97F4A7C15ull);
  return splitmix64(x);
}

// xoshiro256++ seeded through splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = splitmix64(x);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  static Rng substream(std::uint64_t root, std::uint64_t stream) {
    return Rng(mix_key(root, stream));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform in [0,1) with 53 random bits
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, bound)
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
  std::uint64_t state_[4];
};

namespace detail {

// Runs chunk_fn(begin, end) over an even partition of [0, total) and sums the
// returned counts. chunk_fn must be safe to call concurrently.
template <class ChunkFn>
std::uint64_t sum_chunked(std::uint64_t total, int threads, ChunkFn&& chunk_fn) {
  int nthreads = threads < 1 ? 1 : threads;
  if (nthreads > 1 && static_cast<std::uint64_t>(nthreads) > total)
    nthreads = static_cast<int>(total == 0 ? 1 : total);
  if (nthreads <= 1) return chunk_fn(std::uint64_t{0}, total);

  std::vector<std::uint64_t> partial(static_cast<std::size_t>(nthreads), 0);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  const std::uint64_t base = total / nthreads;
  const std::uint64_t rem = total % nthreads;
  std::uint64_t begin = 0;
  for (int t = 0; t < nthreads; ++t) {
    const std::uint64_t len = base + (static_cast<std::uint64_t>(t) < rem ? 1 : 0);
    pool.emplace_back([&chunk_fn, &partial, t, begin, len] {
      partial[static_cast<std::size_t>(t)] = chunk_fn(begin, begin + len);
    });
    begin += len;
  }
  for (auto& th : pool) th.join();
  return std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
}

}  // namespace detail
}  // namespace dicode
