// SPDX-License-Identifier: Apache-2.0

#include "hmb/array_model.hpp"

#include <stdexcept>
#include <string>

namespace hmb {

namespace {

// Half-integer offsets must land on an element: offset + (count-1)/2 in [0, count).
void check_offset(double offset, int count, const char* axis) {
  const double idx = offset + (count - 1) / 2.0;
  const double rounded = std::round(idx);
  if (std::abs(idx - rounded) > 1e-9 || rounded < 0 || rounded > count - 1) {
    throw std::domain_error(std::string("antenna offset out of range on ") + axis + ": " + std::to_string(offset));
  }
}

// exp(-j 2pi/lambda * path) with the path length reduced modulo lambda first.
cplx phase_term(double path, double wavelength) {
  const double cycles = path / wavelength;
  const double frac = cycles - std::floor(cycles);
  return std::polar(1.0, -2.0 * kPi * frac);
}

double taylor_excess_x(const ArrayConfig& cfg, const PolarPoint& p, double n) {
  const double u = std::cos(p.theta) * std::sin(p.phi);
  double v = n * cfg.d_x * u;
  if (!is_far_field(p.r)) v += n * n * cfg.d_x * cfg.d_x * (1.0 - u * u) / (2.0 * p.r);
  return v;
}

double taylor_excess_z(const ArrayConfig& cfg, const PolarPoint& p, double m) {
  const double s = std::sin(p.phi);
  double v = m * cfg.d_z * std::cos(p.phi);
  if (!is_far_field(p.r)) v += m * m * cfg.d_z * cfg.d_z * s * s / (2.0 * p.r);
  return v;
}

} // namespace

ArrayConfig ArrayConfig::half_wavelength(int M, int N, double f_c) {
  ArrayConfig cfg;
  cfg.M = M;
  cfg.N = N;
  cfg.frequency = f_c;
  cfg.wavelength = kSpeedOfLight / f_c;
  cfg.d_x = cfg.wavelength / 2.0;
  cfg.d_z = cfg.wavelength / 2.0;
  return cfg;
}

void ArrayConfig::validate() const {
  if (M < 1 || N < 1) throw std::invalid_argument("array dimensions must be >= 1");
  if (!(d_x > 0) || !(d_z > 0)) throw std::invalid_argument("antenna spacing must be positive");
  if (!(wavelength > 0) || !(frequency > 0)) throw std::invalid_argument("carrier must be positive");
  if (std::abs(wavelength * frequency / kSpeedOfLight - 1.0) > 1e-6)
    throw std::invalid_argument("wavelength and carrier frequency disagree");
}

double ArrayConfig::aperture_diagonal() const { return std::hypot(N * d_x, M * d_z); }

double ArrayConfig::fresnel_boundary() const {
  const double D = aperture_diagonal();
  return 0.62 * std::sqrt(D * D * D / wavelength);
}

double ArrayConfig::rayleigh_distance() const {
  const double D = aperture_diagonal();
  return 2.0 * D * D / wavelength;
}

void ApPlacement::validate() const {
  if (!(r > 0)) throw std::invalid_argument("AP distance must be positive");
  if (!(phi > 0 && phi < kPi)) throw std::invalid_argument("AP elevation must lie in (0, pi)");
  if (!(theta >= 0 && theta < 2 * kPi)) throw std::invalid_argument("AP azimuth must lie in [0, 2pi)");
}

Vec3 element_position(const ArrayConfig& cfg, const ApPlacement& ap, double m, double n) {
  check_offset(m, cfg.M, "z");
  check_offset(n, cfg.N, "x");
  const double sp = std::sin(ap.phi);
  return {ap.r * std::cos(ap.theta) * sp + n * cfg.d_x, ap.r * std::sin(ap.theta) * sp,
          ap.r * std::cos(ap.phi) + m * cfg.d_z};
}

double exact_distance(const ArrayConfig& cfg, const PolarPoint& p, double m, double n) {
  check_offset(m, cfg.M, "z");
  check_offset(n, cfg.N, "x");
  const double sp = std::sin(p.phi);
  const double x = p.r * std::cos(p.theta) * sp + n * cfg.d_x;
  const double y = p.r * std::sin(p.theta) * sp;
  const double z = p.r * std::cos(p.phi) + m * cfg.d_z;
  return std::sqrt(x * x + y * y + z * z);
}

double taylor_distance(const ArrayConfig& cfg, const PolarPoint& p, double m, double n) {
  if (!(p.r > 0)) throw std::domain_error("taylor_distance requires r > 0");
  check_offset(m, cfg.M, "z");
  check_offset(n, cfg.N, "x");
  return p.r + taylor_excess_x(cfg, p, n) + taylor_excess_z(cfg, p, m);
}

CVec steering_vector(const ArrayConfig& cfg, const PolarPoint& p, SteeringMode mode) {
  if (mode == SteeringMode::taylor) return kron(steering_x(cfg, p), steering_z(cfg, p));
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.size()));
  const double u = std::cos(p.theta) * std::sin(p.phi);
  const double w = std::cos(p.phi);
  const bool far = is_far_field(p.r);
  CVec g(cfg.size());
  for (int ni = 0; ni < cfg.N; ++ni) {
    const double xn = cfg.x_offset(ni) * cfg.d_x;
    for (int mi = 0; mi < cfg.M; ++mi) {
      const double zm = cfg.z_offset(mi) * cfg.d_z;
      const double lin = xn * u + zm * w;
      double excess = lin;
      if (!far) {
        // D(m,n) - r without cancellation.
        const double quad = xn * xn + zm * zm;
        const double num = quad + 2.0 * p.r * lin;
        excess = num / (std::sqrt(p.r * p.r + num) + p.r);
      }
      g[cfg.flat_index(ni, mi)] = scale * phase_term(excess, cfg.wavelength);
    }
  }
  return g;
}

CVec steering_x(const ArrayConfig& cfg, const PolarPoint& p) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.N));
  CVec v(static_cast<std::size_t>(cfg.N));
  for (int ni = 0; ni < cfg.N; ++ni) v[ni] = scale * phase_term(taylor_excess_x(cfg, p, cfg.x_offset(ni)), cfg.wavelength);
  return v;
}

CVec steering_z(const ArrayConfig& cfg, const PolarPoint& p) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.M));
  CVec v(static_cast<std::size_t>(cfg.M));
  for (int mi = 0; mi < cfg.M; ++mi) v[mi] = scale * phase_term(taylor_excess_z(cfg, p, cfg.z_offset(mi)), cfg.wavelength);
  return v;
}

CVec kron(std::span<const cplx> a, std::span<const cplx> b) {
  CVec out;
  out.reserve(a.size() * b.size());
  for (const cplx& x : a)
    for (const cplx& y : b) out.push_back(x * y);
  return out;
}

cplx inner(std::span<const cplx> h, std::span<const cplx> w) {
  if (h.size() != w.size()) throw std::domain_error("inner product of vectors with different lengths");
  double re = 0, im = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    // conj(h) * w
    re += h[i].real() * w[i].real() + h[i].imag() * w[i].imag();
    im += h[i].real() * w[i].imag() - h[i].imag() * w[i].real();
  }
  return {re, im};
}

double norm(std::span<const cplx> v) {
  double s = 0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

ChannelRealization los_channel(const ArrayConfig& cfg, const PolarPoint& user, double rho0, int ap_index) {
  if (!(user.r > 0) || is_far_field(user.r)) throw std::domain_error("LoS channel needs a finite positive distance");
  if (!(rho0 > 0)) throw std::domain_error("reference gain must be positive");
  const double beta = std::sqrt(rho0) / user.r;
  const cplx coeff = std::sqrt(static_cast<double>(cfg.size())) * beta * phase_term(user.r, cfg.wavelength);
  ChannelRealization ch;
  ch.h = steering_vector(cfg, user, SteeringMode::exact);
  for (cplx& x : ch.h) x *= coeff;
  ch.ap = ap_index;
  ch.user = user;
  ch.los_gain = beta;
  return ch;
}

ChannelRealization multipath_channel(const ArrayConfig& cfg, std::span<const PathParams> paths, int ap_index) {
  if (paths.empty()) throw std::domain_error("multipath channel needs at least one path");
  const double root = std::sqrt(static_cast<double>(cfg.size()));
  ChannelRealization ch;
  ch.h.assign(cfg.size(), cplx{0, 0});
  for (const PathParams& path : paths) {
    const CVec g = steering_vector(cfg, path.point, SteeringMode::exact);
    const cplx coeff = root * path.beta * std::polar(1.0, -path.psi);
    for (std::size_t i = 0; i < g.size(); ++i) ch.h[i] += coeff * g[i];
  }
  ch.ap = ap_index;
  ch.user = paths.front().point;
  ch.los_gain = std::abs(paths.front().beta);
  return ch;
}

std::vector<PathParams> draw_paths(const ArrayConfig& cfg, const PolarPoint& user, double rho0, int extra_paths,
                                   const NlosRanges& ranges, Rng& rng) {
  std::vector<PathParams> paths;
  const double beta1 = std::sqrt(rho0) / user.r;
  const double cycles = user.r / cfg.wavelength;
  paths.push_back({cplx{beta1, 0.0}, 2.0 * kPi * (cycles - std::floor(cycles)), user});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int l = 0; l < extra_paths; ++l) {
    PathParams p;
    const double mag = beta1 * ranges.max_gain_ratio * unit(rng);
    p.beta = std::polar(mag, 2.0 * kPi * unit(rng));
    p.psi = 2.0 * kPi * unit(rng);
    p.point.r = ranges.r_min + (ranges.r_max - ranges.r_min) * unit(rng);
    p.point.theta = kPi * unit(rng);
    p.point.phi = std::acos(1.0 - 2.0 * unit(rng));
    paths.push_back(p);
  }
  return paths;
}

cplx complex_gaussian(Rng& rng, double variance) {
  if (variance <= 0) return {0.0, 0.0};
  std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

cplx received_signal(std::span<const ChannelRealization> channels, std::span<const CVec> weights, cplx x,
                     double noise_power, Rng& rng) {
  if (channels.size() != weights.size()) throw std::domain_error("one weight vector per AP is required");
  cplx y{0.0, 0.0};
  for (std::size_t k = 0; k < channels.size(); ++k) y += inner(channels[k].h, weights[k]) * x;
  return y + complex_gaussian(rng, noise_power);
}

} // namespace hmb
