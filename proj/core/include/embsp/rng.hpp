#pragma once

#include <cstdint>
#include <random>

namespace embsp {

/// SplitMix64 finalizer. Used to derive well-separated seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of stream `stream` under master seed `seed`:
///   splitmix64(seed ^ splitmix64(stream + 0x9e3779b97f4a7c15)).
/// Chain c of a run uses stream c; replicate r of experiment e uses
/// stream (e << 32) | r. Streams never share a generator state.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Random stream used by every sampler in the library.
///
/// Wraps a 64-bit Mersenne Twister seeded from (seed, stream). Given the same
/// pair and the same sequence of calls, the output is bit-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Independent child stream; does not advance this generator.
  Rng derive(std::uint64_t stream) const { return Rng(seed_, stream_ * 0x100000001b3ULL + stream + 1); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate);
  /// Inverse gamma with density proportional to x^{-shape-1} exp(-scale / x).
  double inverse_gamma(double shape, double scale);
  double chi_square(double df);
  double exponential(double rate);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace embsp
