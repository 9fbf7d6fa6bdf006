// SPDX-License-Identifier: Apache-2.0

#include "hmb/fresnel.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hmb {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 2000;
constexpr double kSeriesLimit = 1.5;
constexpr double kTiny = 1e-300;

} // namespace

FresnelValue fresnel(double x) {
  constexpr double pi = std::numbers::pi;
  const double ax = std::abs(x);
  FresnelValue out;
  if (ax < std::sqrt(kTiny)) {
    out = {ax, 0.0};
  } else if (ax <= kSeriesLimit) {
    // Alternating power series; even terms feed C, odd terms feed S.
    double sum = 0.0, sums = 0.0, sumc = ax, sign = 1.0;
    const double fact = pi / 2.0 * ax * ax;
    bool odd = true;
    double term = ax;
    int n = 3;
    for (int k = 1; k <= kMaxIter; ++k) {
      term *= fact / k;
      sum += sign * term / n;
      const double test = std::abs(sum) * kEps;
      if (odd) {
        sign = -sign;
        sums = sum;
        sum = sumc;
      } else {
        sumc = sum;
        sum = sums;
      }
      if (term < test) break;
      odd = !odd;
      n += 2;
    }
    out = {sumc, sums};
  } else {
    // Continued fraction for erfc in the complex plane, modified Lentz.
    using C = std::complex<double>;
    const double pix2 = pi * ax * ax;
    C b(1.0, -pix2);
    C cc(1.0 / kTiny, 0.0);
    C d = 1.0 / b;
    C h = d;
    int n = -1;
    for (int k = 2; k <= kMaxIter; ++k) {
      n += 2;
      const double a = -static_cast<double>(n) * (n + 1);
      b += 4.0;
      d = 1.0 / (a * d + b);
      cc = b + a / cc;
      const C del = cc * d;
      h *= del;
      if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) break;
    }
    h *= C(ax, -ax);
    const C cs = C(0.5, 0.5) * (1.0 - C(std::cos(0.5 * pix2), std::sin(0.5 * pix2)) * h);
    out = {cs.real(), cs.imag()};
  }
  if (x < 0) {
    out.c = -out.c;
    out.s = -out.s;
  }
  return out;
}

double fresnel_envelope(double z) {
  if (z == 0.0) return 1.0;
  const FresnelValue f = fresnel(z);
  return std::hypot(f.c, f.s) / std::abs(z);
}

double zeta_for_threshold(double delta) {
  if (!(delta > 0.05 && delta < 0.99)) throw std::domain_error("threshold must lie in (0.05, 0.99)");
  constexpr double step = 1e-3;
  constexpr double window = 5.0;
  constexpr double limit = 1e4;

  // Walk forward until the envelope dips below delta and stays there over the window.
  double z = step;
  double candidate = -1.0;
  while (z < limit) {
    if (fresnel_envelope(z) <= delta) {
      if (candidate < 0) candidate = z;
      if (z - candidate >= window) break;
    } else {
      candidate = -1.0;
    }
    z += step;
  }
  if (candidate < 0) throw std::domain_error("no threshold crossing found");

  double lo = candidate - step, hi = candidate;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (fresnel_envelope(mid) <= delta) hi = mid;
    else lo = mid;
  }
  return hi;
}

} // namespace hmb
