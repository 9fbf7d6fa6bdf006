// SPDX-License-Identifier: Apache-2.0
//
// Polar-domain single-beam codebook: angles sampled on the Dirichlet-zero grid
// of each axis, distances sampled on rings of constant curvature step so that
// codewords sharing a direction have projection close to the threshold delta.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "hmb/array_model.hpp"

namespace hmb {

/// A sampled direction: cos(phi) on the z grid and u = cos(theta) sin(phi) on the x grid.
struct AnglePair {
  double cos_phi = 0.0;
  double u = 0.0;
  int phi_index = 0; ///< s - 1 with cos(phi) = (2s - M - 1) / M
  int u_index = 0;   ///< t - 1 with u = (2t - N - 1) / N
};

/// Visible grid directions (|u| <= sin(phi)), phi-major.
std::vector<AnglePair> angular_grid(const ArrayConfig& cfg);

enum class RingAxis { automatic, x, z };

/// Rings sit at curvature / r = j * step.
struct RingSpacing {
  double step = 0.0;
  double curvature = 0.0;
  RingAxis axis = RingAxis::x;
};

/// Curvature step of the x axis is 2 lambda zeta^2 / (N d_x)^2 with curvature 1 - u^2;
/// the z axis uses (M d_z)^2 and sin^2(phi). `automatic` keeps the axis that
/// yields more rings.
RingSpacing ring_spacing(const AnglePair& angle, double zeta, const ArrayConfig& cfg, RingAxis axis = RingAxis::automatic);

struct Ring {
  int index = 0;
  double r = kFarField;
};

/// Ring 0 is always the far-field ring; rings closer than r_min (> 0, else std::domain_error) are dropped and so
/// are rings beyond r_max. A vanishing curvature leaves only ring 0.
std::vector<Ring> distance_rings(const AnglePair& angle, double zeta, const ArrayConfig& cfg, double r_min, double r_max,
                                 RingAxis axis = RingAxis::automatic);

struct SamplingPoint {
  double theta = 0.0;
  double phi = 0.0;
  double r = kFarField;
  double cos_phi = 0.0;
  double u = 0.0;
  int phi_index = 0;
  int u_index = 0;
  int ring_index = 0;
  RingSpacing spacing;

  PolarPoint polar() const { return {r, theta, phi}; }
  bool same_direction(const SamplingPoint& o) const { return phi_index == o.phi_index && u_index == o.u_index; }
};

struct CodebookOptions {
  double delta = 0.5;
  double r_min = std::numeric_limits<double>::quiet_NaN(); ///< NaN: Fresnel boundary of the array
  double r_max = std::numeric_limits<double>::quiet_NaN(); ///< NaN: Rayleigh distance of the array
  RingAxis axis = RingAxis::automatic;
  bool far_field_only = false; ///< keep ring 0 only
};

struct SingleBeamCodebook {
  ArrayConfig cfg;
  std::vector<CVec> rows;
  std::vector<SamplingPoint> points;
  double delta = 0.0; ///< 0 for codebooks without distance sampling
  double zeta = 0.0;
  double r_min = 0.0;
  double r_max = kFarField;

  std::size_t size() const { return rows.size(); }
};

SamplingPoint make_point(const AnglePair& angle, const Ring& ring, const RingSpacing& spacing);

/// Rows in angle-major, ring-minor order.
SingleBeamCodebook build_codebook(const ArrayConfig& cfg, const CodebookOptions& options = {});

/// Far-field codewords on the angular grid (plane-wave phases only).
SingleBeamCodebook dft_codebook(const ArrayConfig& cfg);

/// |row_p^H row_q|
double projection(const SingleBeamCodebook& cb, std::size_t p, std::size_t q);

/// Largest projection over distinct rows.
double coherence(const SingleBeamCodebook& cb);

/// Largest projection between distinct rings of the same direction (0 when no direction has two rings).
double same_direction_coherence(const SingleBeamCodebook& cb);

/// Index of the row with the largest |h^H c_s|^2 (smallest index on ties).
std::size_t best_codeword(const SingleBeamCodebook& cb, const CVec& h);

/// Text export: a header line "M N d_x d_z lambda delta S" followed by one line
/// per codeword "phi_index u_index ring_index r_s re0 im0 re1 im1 ...".
void write_codebook(std::ostream& os, const SingleBeamCodebook& cb);
SingleBeamCodebook read_codebook(std::istream& is);

} // namespace hmb
