// SPDX-License-Identifier: Apache-2.0

#include "hmb/polar_codebook.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hmb/fresnel.hpp"
#include "hmb/text_io.hpp"

namespace hmb {

namespace {

constexpr double kVisibilitySlack = 1e-12;

double grid_value(int index, int count) { return (2.0 * (index + 1) - count - 1) / count; }

} // namespace

std::vector<AnglePair> angular_grid(const ArrayConfig& cfg) {
  std::vector<AnglePair> grid;
  for (int s = 0; s < cfg.M; ++s) {
    const double w = grid_value(s, cfg.M);
    const double sin_phi = std::sqrt(std::max(0.0, 1.0 - w * w));
    for (int t = 0; t < cfg.N; ++t) {
      const double u = grid_value(t, cfg.N);
      if (std::abs(u) > sin_phi + kVisibilitySlack) continue;
      grid.push_back({w, u, s, t});
    }
  }
  return grid;
}

RingSpacing ring_spacing(const AnglePair& angle, double zeta, const ArrayConfig& cfg, RingAxis axis) {
  const double zz = 2.0 * cfg.wavelength * zeta * zeta;
  const double ax = cfg.N * cfg.d_x;
  const double az = cfg.M * cfg.d_z;
  const RingSpacing x{zz / (ax * ax), std::max(0.0, 1.0 - angle.u * angle.u), RingAxis::x};
  const RingSpacing z{zz / (az * az), std::max(0.0, 1.0 - angle.cos_phi * angle.cos_phi), RingAxis::z};
  switch (axis) {
  case RingAxis::x: return x;
  case RingAxis::z: return z;
  case RingAxis::automatic: break;
  }
  // More rings means a larger curvature-to-step ratio.
  return z.curvature * x.step > x.curvature * z.step ? z : x;
}

std::vector<Ring> distance_rings(const AnglePair& angle, double zeta, const ArrayConfig& cfg, double r_min, double r_max,
                                 RingAxis axis) {
  if (!(r_min > 0)) throw std::domain_error("ring sampling needs r_min > 0");
  std::vector<Ring> rings{{0, kFarField}};
  const RingSpacing sp = ring_spacing(angle, zeta, cfg, axis);
  if (!(sp.step > 0) || sp.curvature < 1e-12) return rings;
  for (int j = 1;; ++j) {
    const double r = sp.curvature / (j * sp.step);
    if (r < r_min) break;
    if (r <= r_max) rings.push_back({j, r});
  }
  return rings;
}

SamplingPoint make_point(const AnglePair& angle, const Ring& ring, const RingSpacing& spacing) {
  SamplingPoint p;
  p.cos_phi = angle.cos_phi;
  p.u = angle.u;
  p.phi = std::acos(std::clamp(angle.cos_phi, -1.0, 1.0));
  const double sin_phi = std::sin(p.phi);
  p.theta = sin_phi > 0 ? std::acos(std::clamp(angle.u / sin_phi, -1.0, 1.0)) : kPi / 2;
  p.r = ring.r;
  p.phi_index = angle.phi_index;
  p.u_index = angle.u_index;
  p.ring_index = ring.index;
  p.spacing = spacing;
  return p;
}

SingleBeamCodebook build_codebook(const ArrayConfig& cfg, const CodebookOptions& options) {
  cfg.validate();
  SingleBeamCodebook cb;
  cb.cfg = cfg;
  cb.delta = options.delta;
  cb.zeta = zeta_for_threshold(options.delta);
  cb.r_min = std::isnan(options.r_min) ? cfg.fresnel_boundary() : options.r_min;
  cb.r_max = std::isnan(options.r_max) ? cfg.rayleigh_distance() : options.r_max;
  if (!(cb.r_min > 0) || !(cb.r_max >= cb.r_min)) throw std::invalid_argument("invalid codebook distance range");

  for (const AnglePair& angle : angular_grid(cfg)) {
    const RingSpacing sp = ring_spacing(angle, cb.zeta, cfg, options.axis);
    std::vector<Ring> rings = distance_rings(angle, cb.zeta, cfg, cb.r_min, cb.r_max, options.axis);
    if (options.far_field_only) rings.resize(1);
    for (const Ring& ring : rings) {
      SamplingPoint p = make_point(angle, ring, sp);
      cb.rows.push_back(steering_vector(cfg, p.polar(), SteeringMode::exact));
      cb.points.push_back(p);
    }
  }
  return cb;
}

SingleBeamCodebook dft_codebook(const ArrayConfig& cfg) {
  cfg.validate();
  SingleBeamCodebook cb;
  cb.cfg = cfg;
  for (const AnglePair& angle : angular_grid(cfg)) {
    SamplingPoint p = make_point(angle, Ring{0, kFarField}, RingSpacing{});
    cb.rows.push_back(steering_vector(cfg, p.polar(), SteeringMode::exact));
    cb.points.push_back(p);
  }
  return cb;
}

double projection(const SingleBeamCodebook& cb, std::size_t p, std::size_t q) {
  if (p >= cb.size() || q >= cb.size()) throw std::out_of_range("codeword index out of range");
  return std::abs(inner(cb.rows[p], cb.rows[q]));
}

double coherence(const SingleBeamCodebook& cb) {
  double eta = 0.0;
  for (std::size_t p = 0; p < cb.size(); ++p)
    for (std::size_t q = p + 1; q < cb.size(); ++q) eta = std::max(eta, projection(cb, p, q));
  return eta;
}

double same_direction_coherence(const SingleBeamCodebook& cb) {
  double eta = 0.0;
  for (std::size_t p = 0; p < cb.size(); ++p)
    for (std::size_t q = p + 1; q < cb.size() && cb.points[q].same_direction(cb.points[p]); ++q)
      eta = std::max(eta, projection(cb, p, q));
  return eta;
}

std::size_t best_codeword(const SingleBeamCodebook& cb, const CVec& h) {
  std::size_t best = 0;
  double best_power = -1.0;
  for (std::size_t s = 0; s < cb.size(); ++s) {
    const double pw = std::norm(inner(h, cb.rows[s]));
    if (pw > best_power) {
      best_power = pw;
      best = s;
    }
  }
  return best;
}

void write_codebook(std::ostream& os, const SingleBeamCodebook& cb) {
  const ArrayConfig& c = cb.cfg;
  os << c.M << ' ' << c.N << ' ' << format_real(c.d_x) << ' ' << format_real(c.d_z) << ' ' << format_real(c.wavelength)
     << ' ' << format_real(cb.delta) << ' ' << cb.size() << '\n';
  for (std::size_t s = 0; s < cb.size(); ++s) {
    const SamplingPoint& p = cb.points[s];
    os << p.phi_index << ' ' << p.u_index << ' ' << p.ring_index << ' ' << format_real(p.r);
    for (const cplx& v : cb.rows[s]) os << ' ' << format_real(v.real()) << ' ' << format_real(v.imag());
    os << '\n';
  }
  if (!os) throw std::runtime_error("failed to write codebook");
}

SingleBeamCodebook read_codebook(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("codebook: missing header");
  const auto head = split(line, " \t");
  if (head.size() != 7) throw std::runtime_error("codebook: header needs 7 fields");

  SingleBeamCodebook cb;
  ArrayConfig& c = cb.cfg;
  c.M = static_cast<int>(parse_integer(head[0]));
  c.N = static_cast<int>(parse_integer(head[1]));
  c.d_x = parse_real(head[2]);
  c.d_z = parse_real(head[3]);
  c.wavelength = parse_real(head[4]);
  c.frequency = kSpeedOfLight / c.wavelength;
  c.validate();
  cb.delta = parse_real(head[5]);
  cb.zeta = cb.delta > 0 ? zeta_for_threshold(cb.delta) : 0.0;
  cb.r_min = c.fresnel_boundary();
  cb.r_max = c.rayleigh_distance();
  const auto count = static_cast<std::size_t>(parse_integer(head[6]));
  const std::size_t width = 4 + 2 * c.size();

  for (std::size_t s = 0; s < count; ++s) {
    if (!std::getline(is, line)) throw std::runtime_error("codebook: truncated after " + std::to_string(s) + " rows");
    const auto f = split(line, " \t");
    if (f.size() != width) throw std::runtime_error("codebook: row " + std::to_string(s) + " has wrong width");
    AnglePair angle;
    angle.phi_index = static_cast<int>(parse_integer(f[0]));
    angle.u_index = static_cast<int>(parse_integer(f[1]));
    angle.cos_phi = (2.0 * (angle.phi_index + 1) - c.M - 1) / c.M;
    angle.u = (2.0 * (angle.u_index + 1) - c.N - 1) / c.N;
    const Ring ring{static_cast<int>(parse_integer(f[2])), parse_real(f[3])};
    cb.points.push_back(make_point(angle, ring, ring_spacing(angle, cb.zeta, c)));
    CVec row(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) row[i] = {parse_real(f[4 + 2 * i]), parse_real(f[5 + 2 * i])};
    cb.rows.push_back(std::move(row));
  }
  return cb;
}

} // namespace hmb
