// SPDX-License-Identifier: Apache-2.0
//
// Uniform planar array geometry, spherical-wave steering vectors and the
// downlink received-signal model.
//
// Conventions used throughout the library:
//  * antenna offsets are symmetric half-integers, m = i - (M-1)/2 along z and
//    n = i - (N-1)/2 along x;
//  * vectors of length M*N are flattened n-major, i.e. element (n_i, m_i) lives
//    at n_i * M + m_i, so that a separable vector equals kron(v_x, v_z);
//  * a polar point (r, theta, phi) places the array centre relative to the
//    observation point, and r = kFarField selects the plane-wave limit.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace hmb {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using Rng = std::mt19937_64;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kFarField = std::numeric_limits<double>::infinity();

inline bool is_far_field(double r) { return std::isinf(r) && r > 0; }

struct ArrayConfig {
  int M = 4;  ///< elements along z
  int N = 32; ///< elements along x
  double d_x = 0.0;
  double d_z = 0.0;
  double wavelength = 0.0;
  double frequency = 0.0;

  /// Array with lambda/2 spacing on both axes at carrier f_c.
  static ArrayConfig half_wavelength(int M, int N, double f_c);

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;

  std::size_t size() const { return static_cast<std::size_t>(M) * static_cast<std::size_t>(N); }
  double z_offset(int i) const { return i - (M - 1) / 2.0; }
  double x_offset(int i) const { return i - (N - 1) / 2.0; }
  std::size_t flat_index(int n_i, int m_i) const {
    return static_cast<std::size_t>(n_i) * static_cast<std::size_t>(M) + static_cast<std::size_t>(m_i);
  }

  /// Diagonal of the N*d_x by M*d_z aperture.
  double aperture_diagonal() const;
  /// Inner edge of the radiating near field, 0.62 sqrt(D^3 / lambda).
  double fresnel_boundary() const;
  /// Rayleigh distance 2 D^2 / lambda.
  double rayleigh_distance() const;
};

struct PolarPoint {
  double r = 1.0;
  double theta = kPi / 2;
  double phi = kPi / 2;
};

struct ApPlacement {
  double r = 1.0;
  double theta = kPi / 2;
  double phi = kPi / 2;
  int index = 0;

  void validate() const;
  PolarPoint polar() const { return {r, theta, phi}; }
};

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

enum class SteeringMode { exact, taylor };

/// One propagation path of the multipath model.
struct PathParams {
  cplx beta{0.0, 0.0}; ///< complex path gain
  double psi = 0.0;    ///< phase shift (radians)
  PolarPoint point;
};

struct ChannelRealization {
  CVec h;
  int ap = 0;
  PolarPoint user;
  double los_gain = 0.0; ///< |beta_1|, the LoS amplitude sqrt(rho_0)/r
};

/// Coordinates of element (m, n); m and n are half-integer offsets.
Vec3 element_position(const ArrayConfig& cfg, const ApPlacement& ap, double m, double n);

/// Euclidean distance from the origin to element (m, n) of an array placed at p.
double exact_distance(const ArrayConfig& cfg, const PolarPoint& p, double m, double n);

/// Second-order expansion of exact_distance in the element offsets.
double taylor_distance(const ArrayConfig& cfg, const PolarPoint& p, double m, double n);

/// Unit-norm steering vector, entries exp(-j 2pi/lambda (D(m,n) - r)) / sqrt(MN).
CVec steering_vector(const ArrayConfig& cfg, const PolarPoint& p, SteeringMode mode = SteeringMode::exact);

/// Separable factors of the Taylor steering vector, each unit-norm, so that
/// steering_vector(taylor) == kron(steering_x, steering_z).
CVec steering_x(const ArrayConfig& cfg, const PolarPoint& p);
CVec steering_z(const ArrayConfig& cfg, const PolarPoint& p);

CVec kron(std::span<const cplx> a, std::span<const cplx> b);

/// h^H w
cplx inner(std::span<const cplx> h, std::span<const cplx> w);
double norm(std::span<const cplx> v);

/// Pure LoS channel sqrt(MN) * sqrt(rho0)/r * exp(-j 2pi r / lambda) * g.
ChannelRealization los_channel(const ArrayConfig& cfg, const PolarPoint& user, double rho0, int ap_index = 0);

/// Coherent multipath sum sqrt(MN) * sum_l beta_l exp(-j psi_l) g_l.
ChannelRealization multipath_channel(const ArrayConfig& cfg, std::span<const PathParams> paths, int ap_index = 0);

struct NlosRanges {
  double max_gain_ratio = 0.3; ///< |beta_l| / |beta_1| drawn in (0, max_gain_ratio)
  double r_min = 1.0;
  double r_max = 10.0;
};

/// LoS path followed by `extra_paths` NLoS paths drawn uniformly from `ranges`.
std::vector<PathParams> draw_paths(const ArrayConfig& cfg, const PolarPoint& user, double rho0, int extra_paths,
                                   const NlosRanges& ranges, Rng& rng);

/// Circularly-symmetric complex Gaussian sample with the given variance.
cplx complex_gaussian(Rng& rng, double variance);

/// y = sum_k h_k^H w_k x + n with n ~ CN(0, noise_power).
cplx received_signal(std::span<const ChannelRealization> channels, std::span<const CVec> weights, cplx x,
                     double noise_power, Rng& rng);

} // namespace hmb
