// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace hmb {

struct FresnelValue {
  double c = 0.0; ///< C(x) = int_0^x cos(pi t^2 / 2) dt
  double s = 0.0; ///< S(x) = int_0^x sin(pi t^2 / 2) dt
};

/// Fresnel integrals, absolute error below 1e-10 for finite x.
FresnelValue fresnel(double x);

/// |C(z) + j S(z)| / z, the normalized projection between two codewords whose
/// quadratic phase profiles differ by z; equals 1 in the limit z -> 0.
double fresnel_envelope(double z);

/// Smallest zeta whose envelope is at most `delta` and stays there over the
/// following 5 units (the envelope oscillates while decaying). Bisection to 1e-8.
/// Throws std::domain_error outside (0.05, 0.99).
double zeta_for_threshold(double delta);

} // namespace hmb
