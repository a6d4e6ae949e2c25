#pragma once

#include <cmath>
#include <cstdint>

#include "embsp/errors.hpp"
#include "embsp/rng.hpp"

namespace embsp {

struct SliceDiagnostics {
  std::uint64_t calls = 0;
  std::uint64_t evaluations = 0;
  std::uint64_t expansions = 0;
  std::uint64_t shrinks = 0;
  /// Steps where the stepping-out budget ran out before leaving the slice.
  std::uint64_t capped = 0;

  SliceDiagnostics& operator+=(const SliceDiagnostics& o) {
    calls += o.calls;
    evaluations += o.evaluations;
    expansions += o.expansions;
    shrinks += o.shrinks;
    capped += o.capped;
    return *this;
  }
};

struct SliceSettings {
  double width = 1.0;
  int max_expansions = 50;
};

/// One univariate slice-sampling update (stepping out, then shrinkage) from x0
/// for an unnormalized log density. The budget of expansions is split at
/// random between the two sides.
template <typename LogDensity>
double slice_sample_step(double x0, LogDensity&& log_density, Rng& rng, const SliceSettings& settings = {},
                         SliceDiagnostics* diag = nullptr) {
  SliceDiagnostics local;
  SliceDiagnostics& d = diag ? *diag : local;
  ++d.calls;
  auto eval = [&](double x) {
    ++d.evaluations;
    return log_density(x);
  };
  const double f0 = eval(x0);
  if (!std::isfinite(f0)) throw NumericalError("slice_sample_step: log density is not finite at the current point");
  const double level = f0 + std::log(rng.uniform());

  double left = x0 - settings.width * rng.uniform();
  double right = left + settings.width;
  int j = static_cast<int>(std::floor(settings.max_expansions * rng.uniform()));
  int k = settings.max_expansions - 1 - j;
  while (j > 0 && eval(left) > level) {
    left -= settings.width;
    --j;
    ++d.expansions;
  }
  if (j == 0 && eval(left) > level) ++d.capped;
  while (k > 0 && eval(right) > level) {
    right += settings.width;
    --k;
    ++d.expansions;
  }
  if (k == 0 && eval(right) > level) ++d.capped;

  for (int guard = 0; guard < 10000; ++guard) {
    const double x = left + rng.uniform() * (right - left);
    if (eval(x) > level) return x;
    ++d.shrinks;
    if (x < x0) {
      left = x;
    } else {
      right = x;
    }
  }
  throw NumericalError("slice_sample_step: shrinkage did not terminate");
}

}  // namespace embsp
