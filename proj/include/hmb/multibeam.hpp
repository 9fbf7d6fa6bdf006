// SPDX-License-Identifier: Apache-2.0
//
// Multi-arm beams: superpositions of single-beam codewords with per-arm
// digital phases, their radiation patterns and main-lobe deviation.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hmb/array_model.hpp"
#include "hmb/hash_family.hpp"
#include "hmb/polar_codebook.hpp"

namespace hmb {

struct MultiArmCodeword {
  CVec weights;                    ///< F_RF f_BB flattened, length M*N
  std::vector<std::size_t> bucket; ///< constituent codeword indices
  std::vector<double> phases;      ///< one per constituent, radians

  std::size_t arms() const { return bucket.size(); }
};

struct MultiArmCodebook {
  std::vector<MultiArmCodeword> rows; ///< row b belongs to bucket b
  BucketPartition partition;

  std::size_t size() const { return rows.size(); }
};

/// weights = sum_i exp(j phases_i) / sqrt(V) * codeword(bucket_i).
MultiArmCodeword synthesize(std::span<const std::size_t> bucket, const SingleBeamCodebook& cb,
                            std::span<const double> phases);

/// W'(point, s) = |g(point)^H c_s|.
double pattern_single(const PolarPoint& point, std::size_t s, const SingleBeamCodebook& cb);

/// W(point) = |(1/V) sum_i exp(j phases_i) g(point)^H c_{bucket_i}|.
double pattern_multi(const PolarPoint& point, std::span<const double> phases, std::span<const std::size_t> bucket,
                     const SingleBeamCodebook& cb);

/// Noiseless received power P_0 |h^H w|^2 of one AP.
double received_power(const ChannelRealization& ch, std::span<const cplx> weights, double p0);

/// For a LoS channel this equals received_power exactly: P_0 MN beta^2 V W^2.
double pattern_power(double p0, double los_gain, std::size_t elements, std::size_t arms, double w);

/// The cross-term-free approximation P_0 MN beta^2 W, reported as a diagnostic.
double approximate_power(double p0, double los_gain, std::size_t elements, double w);

/// Main lobe of one codeword in (cos phi, u, r).
struct LobeRegion {
  double cos_phi_lo = 0, cos_phi_hi = 0;
  double u_lo = 0, u_hi = 0;
  double r_lo = 0, r_hi = kFarField;
};

/// Angular half-widths 1/M and 1/N; the distance interval follows the ring
/// spacing of the codeword and is clipped to (r_min, inf).
LobeRegion main_lobe(std::size_t s, const SingleBeamCodebook& cb);

/// Midpoint-rule sample points of a lobe, uniform in cos phi, u and 1/r.
/// Invisible directions are dropped.
std::vector<PolarPoint> lobe_samples(const LobeRegion& lobe, int resolution);

inline constexpr double kPatternFloor = 1e-6;
inline constexpr int kDefaultLobeResolution = 8;

/// Precomputed single-beam responses over the main lobes of one bucket, so
/// deviation evaluates in O(V * points) for any phase vector.
class DeviationModel {
public:
  DeviationModel(std::span<const std::size_t> bucket, const SingleBeamCodebook& cb,
                 int resolution = kDefaultLobeResolution);

  std::size_t arms() const { return bucket_.size(); }
  std::span<const std::size_t> bucket() const { return bucket_; }

  /// Average over constituents of the mean relative gap |W - W'| / W' in each lobe.
  double deviation(std::span<const double> phases) const;

  /// Deviation after replacing phase `arm` by each candidate in turn, given the
  /// other phases; avoids recomputing the untouched terms.
  std::vector<double> sweep_arm(std::span<const double> phases, std::size_t arm,
                                std::span<const double> candidates) const;

private:
  struct Lobe {
    std::size_t points = 0;
    std::vector<cplx> response; ///< [member j][point p] = g_p^H c_j, row-major
    std::vector<double> single; ///< max(W'_i(p), floor)
    std::vector<double> exact;  ///< W'_i(p)
  };
  std::vector<std::size_t> bucket_;
  std::vector<Lobe> lobes_;
};

double deviation(std::span<const double> phases, std::span<const std::size_t> bucket, const SingleBeamCodebook& cb,
                 int resolution = kDefaultLobeResolution);

struct PhaseSearch {
  int grid = 16;
  int sweeps = 2;
  int restarts = 4;
  std::size_t budget = 1u << 20; ///< maximum number of deviation evaluations
};

struct PhaseResult {
  std::vector<double> phases;
  double deviation = 0.0;
  double zero_deviation = 0.0;           ///< deviation with all phases zero
  std::vector<double> sweep_history;     ///< deviation after every sweep of every restart
  std::size_t evaluations = 0;
};

/// Coordinate descent on a phase grid with the first phase pinned to zero.
/// Restart 0 starts from all zeros; later restarts use seeds derived from the
/// bucket contents. Never returns a result worse than all-zero phases.
PhaseResult optimize_phases(const DeviationModel& model, const PhaseSearch& search = {});
PhaseResult optimize_phases(std::span<const std::size_t> bucket, const SingleBeamCodebook& cb,
                            const PhaseSearch& search = {}, int resolution = kDefaultLobeResolution);

struct MultiArmOptions {
  bool optimize = true;
  PhaseSearch search;
  int resolution = kDefaultLobeResolution;
};

MultiArmCodebook build_multiarm_codebook(const BucketPartition& partition, const SingleBeamCodebook& cb,
                                         const MultiArmOptions& options = {});

/// Header "M N d_x d_z lambda delta B", then per row
/// "bucket_index re0 im0 ... V member... phase...".
void write_multiarm(std::ostream& os, const MultiArmCodebook& mc, const SingleBeamCodebook& cb);

} // namespace hmb
