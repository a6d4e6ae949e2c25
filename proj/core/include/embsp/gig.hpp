#pragma once

namespace embsp {

class Rng;

/// Draw from the generalized inverse Gaussian GIG(lambda, psi, chi) with density
/// proportional to x^{lambda-1} exp(-(psi x + chi / x) / 2) on x > 0.
///
/// psi, chi >= 0. chi == 0 requires lambda > 0 (Gamma limit); psi == 0 requires
/// lambda < 0 (inverse Gamma limit). Otherwise throws DomainError.
///
/// Uses the ratio-of-uniforms generators of Hormann and Leydold (2014): without
/// mode shift for moderate parameters, with mode shift when lambda > 2 or
/// omega = sqrt(psi chi) > 3, and a three-piece rejection envelope for tiny omega.
double sample_gig(double lambda, double psi, double chi, Rng& rng);

/// Mode of the GIG density with psi = chi = omega (before rescaling).
double gig_standard_mode(double lambda, double omega);

}  // namespace embsp
