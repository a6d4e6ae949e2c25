#include "embsp/rng.hpp"

#include <cmath>

#include "embsp/errors.hpp"

namespace embsp {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(seed ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(derive_stream_seed(seed, stream)) {}

double Rng::uniform() {
  // 53 random bits, shifted off zero.
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double Rng::normal() { return normal_(engine_); }

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw DomainError("gamma: shape and rate must be positive and finite");
  }
  // Marsaglia-Tsang; shape < 1 is boosted by U^{1/shape}.
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::exp(std::log(uniform()) / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * boost / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * boost / rate;
  }
}

double Rng::inverse_gamma(double shape, double scale) { return 1.0 / gamma(shape, scale); }

double Rng::chi_square(double df) { return gamma(0.5 * df, 0.5); }

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

}  // namespace embsp
