// SPDX-License-Identifier: Apache-2.0

#include "hmb/multibeam.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "hmb/seeding.hpp"
#include "hmb/text_io.hpp"

namespace hmb {

namespace {

void check_bucket(std::span<const std::size_t> bucket, const SingleBeamCodebook& cb) {
  if (bucket.empty()) throw std::domain_error("multi-arm beam needs a nonempty bucket");
  for (std::size_t s : bucket)
    if (s >= cb.size()) throw std::out_of_range("bucket member outside the codebook");
}

double lobe_floor_distance(const SingleBeamCodebook& cb) {
  return cb.r_min > 0 ? cb.r_min : cb.cfg.fresnel_boundary();
}

} // namespace

MultiArmCodeword synthesize(std::span<const std::size_t> bucket, const SingleBeamCodebook& cb,
                            std::span<const double> phases) {
  check_bucket(bucket, cb);
  if (phases.size() != bucket.size()) throw std::domain_error("one phase per bucket member is required");
  MultiArmCodeword w;
  w.bucket.assign(bucket.begin(), bucket.end());
  w.phases.assign(phases.begin(), phases.end());
  w.weights.assign(cb.cfg.size(), cplx{0, 0});
  const double scale = 1.0 / std::sqrt(static_cast<double>(bucket.size()));
  for (std::size_t i = 0; i < bucket.size(); ++i) {
    const cplx f = std::polar(scale, phases[i]);
    const CVec& row = cb.rows[bucket[i]];
    for (std::size_t e = 0; e < row.size(); ++e) w.weights[e] += f * row[e];
  }
  return w;
}

double pattern_single(const PolarPoint& point, std::size_t s, const SingleBeamCodebook& cb) {
  if (s >= cb.size()) throw std::out_of_range("codeword index out of range");
  return std::abs(inner(steering_vector(cb.cfg, point), cb.rows[s]));
}

double pattern_multi(const PolarPoint& point, std::span<const double> phases, std::span<const std::size_t> bucket,
                     const SingleBeamCodebook& cb) {
  check_bucket(bucket, cb);
  if (phases.size() != bucket.size()) throw std::domain_error("one phase per bucket member is required");
  const CVec g = steering_vector(cb.cfg, point);
  cplx sum{0, 0};
  for (std::size_t i = 0; i < bucket.size(); ++i) sum += std::polar(1.0, phases[i]) * inner(g, cb.rows[bucket[i]]);
  return std::abs(sum) / static_cast<double>(bucket.size());
}

double received_power(const ChannelRealization& ch, std::span<const cplx> weights, double p0) {
  return p0 * std::norm(inner(ch.h, weights));
}

double pattern_power(double p0, double los_gain, std::size_t elements, std::size_t arms, double w) {
  return p0 * static_cast<double>(elements) * los_gain * los_gain * static_cast<double>(arms) * w * w;
}

double approximate_power(double p0, double los_gain, std::size_t elements, double w) {
  return p0 * static_cast<double>(elements) * los_gain * los_gain * w;
}

LobeRegion main_lobe(std::size_t s, const SingleBeamCodebook& cb) {
  if (s >= cb.size()) throw std::out_of_range("codeword index out of range");
  const SamplingPoint& p = cb.points[s];
  LobeRegion lobe;
  lobe.cos_phi_lo = std::max(-1.0, p.cos_phi - 1.0 / cb.cfg.M);
  lobe.cos_phi_hi = std::min(1.0, p.cos_phi + 1.0 / cb.cfg.M);
  lobe.u_lo = std::max(-1.0, p.u - 1.0 / cb.cfg.N);
  lobe.u_hi = std::min(1.0, p.u + 1.0 / cb.cfg.N);

  const double floor_r = lobe_floor_distance(cb);
  const RingSpacing& sp = p.spacing;
  if (!(sp.step > 0) || sp.curvature < 1e-12) {
    lobe.r_lo = floor_r;
    lobe.r_hi = kFarField;
    return lobe;
  }
  const double c = sp.step / (2.0 * sp.curvature);
  if (is_far_field(p.r)) {
    lobe.r_lo = 1.0 / c;
    lobe.r_hi = kFarField;
  } else {
    const double inv = 1.0 / p.r;
    lobe.r_lo = (1.0 + p.r * c) / (inv + 2.0 * c);
    const double den = inv - 2.0 * c;
    lobe.r_hi = den <= 1e-12 * inv ? kFarField : (1.0 - p.r * c) / den;
  }
  lobe.r_lo = std::max(lobe.r_lo, floor_r);
  lobe.r_hi = std::max(lobe.r_hi, lobe.r_lo);
  return lobe;
}

std::vector<PolarPoint> lobe_samples(const LobeRegion& lobe, int resolution) {
  if (resolution < 4) throw std::domain_error("lobe resolution must be at least 4");
  std::vector<PolarPoint> pts;
  const double inv_lo = is_far_field(lobe.r_hi) ? 0.0 : 1.0 / lobe.r_hi;
  const double inv_hi = 1.0 / lobe.r_lo;
  const double res = resolution;
  for (int a = 0; a < resolution; ++a) {
    const double w = lobe.cos_phi_lo + (a + 0.5) * (lobe.cos_phi_hi - lobe.cos_phi_lo) / res;
    const double sin_phi = std::sqrt(std::max(0.0, 1.0 - w * w));
    if (sin_phi <= 0) continue;
    const double phi = std::acos(std::clamp(w, -1.0, 1.0));
    for (int b = 0; b < resolution; ++b) {
      const double u = lobe.u_lo + (b + 0.5) * (lobe.u_hi - lobe.u_lo) / res;
      if (std::abs(u) > sin_phi) continue;
      const double theta = std::acos(std::clamp(u / sin_phi, -1.0, 1.0));
      for (int c = 0; c < resolution; ++c) {
        const double inv = inv_lo + (c + 0.5) * (inv_hi - inv_lo) / res;
        pts.push_back({inv > 0 ? 1.0 / inv : kFarField, theta, phi});
      }
    }
  }
  return pts;
}

DeviationModel::DeviationModel(std::span<const std::size_t> bucket, const SingleBeamCodebook& cb, int resolution)
    : bucket_(bucket.begin(), bucket.end()) {
  check_bucket(bucket, cb);
  const std::size_t V = bucket_.size();
  lobes_.resize(V);
  if (V == 1) return; // W and W' coincide
  for (std::size_t i = 0; i < V; ++i) {
    const std::vector<PolarPoint> pts = lobe_samples(main_lobe(bucket_[i], cb), resolution);
    Lobe& lobe = lobes_[i];
    lobe.points = pts.size();
    lobe.response.resize(V * pts.size());
    lobe.single.resize(pts.size());
    lobe.exact.resize(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const CVec g = steering_vector(cb.cfg, pts[p]);
      for (std::size_t j = 0; j < V; ++j) lobe.response[j * pts.size() + p] = inner(g, cb.rows[bucket_[j]]);
      lobe.exact[p] = std::abs(lobe.response[i * pts.size() + p]);
      lobe.single[p] = std::max(lobe.exact[p], kPatternFloor);
    }
  }
}

double DeviationModel::deviation(std::span<const double> phases) const {
  const std::size_t V = bucket_.size();
  if (phases.size() != V) throw std::domain_error("one phase per bucket member is required");
  if (V == 1) return 0.0;
  std::vector<cplx> rot(V);
  for (std::size_t j = 0; j < V; ++j) rot[j] = std::polar(1.0 / V, phases[j]);
  double total = 0.0;
  for (const Lobe& lobe : lobes_) {
    if (lobe.points == 0) continue;
    double acc = 0.0;
    for (std::size_t p = 0; p < lobe.points; ++p) {
      cplx s{0, 0};
      for (std::size_t j = 0; j < V; ++j) s += rot[j] * lobe.response[j * lobe.points + p];
      acc += std::abs(std::sqrt(std::norm(s)) - lobe.exact[p]) / lobe.single[p];
    }
    total += acc / static_cast<double>(lobe.points);
  }
  return total / static_cast<double>(V);
}

std::vector<double> DeviationModel::sweep_arm(std::span<const double> phases, std::size_t arm,
                                              std::span<const double> candidates) const {
  const std::size_t V = bucket_.size();
  if (phases.size() != V || arm >= V) throw std::domain_error("invalid arm for phase sweep");
  std::vector<double> out(candidates.size(), 0.0);
  if (V == 1) return out;
  std::vector<cplx> rot(V);
  for (std::size_t j = 0; j < V; ++j) rot[j] = std::polar(1.0 / V, phases[j]);
  std::vector<cplx> cand(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) cand[c] = std::polar(1.0 / V, candidates[c]);

  std::vector<cplx> rest;
  for (const Lobe& lobe : lobes_) {
    if (lobe.points == 0) continue;
    const std::size_t P = lobe.points;
    rest.assign(P, cplx{0, 0});
    for (std::size_t j = 0; j < V; ++j) {
      if (j == arm) continue;
      const cplx* r = &lobe.response[j * P];
      for (std::size_t p = 0; p < P; ++p) rest[p] += rot[j] * r[p];
    }
    const cplx* own = &lobe.response[arm * P];
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      double acc = 0.0;
      for (std::size_t p = 0; p < P; ++p)
        acc += std::abs(std::sqrt(std::norm(rest[p] + cand[c] * own[p])) - lobe.exact[p]) / lobe.single[p];
      out[c] += acc / static_cast<double>(P);
    }
  }
  for (double& v : out) v /= static_cast<double>(V);
  return out;
}

double deviation(std::span<const double> phases, std::span<const std::size_t> bucket, const SingleBeamCodebook& cb,
                 int resolution) {
  return DeviationModel(bucket, cb, resolution).deviation(phases);
}

PhaseResult optimize_phases(const DeviationModel& model, const PhaseSearch& search) {
  if (search.budget < 1) throw std::domain_error("phase search budget must be at least one evaluation");
  if (search.grid < 1 || search.sweeps < 0 || search.restarts < 1) throw std::domain_error("invalid phase search");
  const std::size_t V = model.arms();
  PhaseResult best;
  best.phases.assign(V, 0.0);
  best.zero_deviation = model.deviation(best.phases);
  best.deviation = best.zero_deviation;
  best.evaluations = 1;
  if (V == 1) return best;

  std::vector<double> grid(static_cast<std::size_t>(search.grid));
  for (int g = 0; g < search.grid; ++g) grid[g] = 2.0 * kPi * g / search.grid;

  std::uint64_t key = V;
  for (std::size_t s : model.bucket()) key = splitmix64(key ^ s);

  for (int r = 0; r < search.restarts; ++r) {
    std::vector<double> cur(V, 0.0);
    double cur_dev = best.zero_deviation;
    if (r > 0) {
      if (best.evaluations >= search.budget) break;
      Rng rng = make_rng(key, kStreamPhases, {static_cast<std::uint64_t>(r)});
      std::uniform_int_distribution<int> pick(0, search.grid - 1);
      for (std::size_t j = 1; j < V; ++j) cur[j] = grid[pick(rng)];
      cur_dev = model.deviation(cur);
      ++best.evaluations;
    }
    for (int sweep = 0; sweep < search.sweeps; ++sweep) {
      for (std::size_t arm = 1; arm < V; ++arm) {
        if (best.evaluations + grid.size() > search.budget) break;
        const std::vector<double> vals = model.sweep_arm(cur, arm, grid);
        best.evaluations += grid.size();
        for (std::size_t g = 0; g < grid.size(); ++g) {
          if (vals[g] < cur_dev) {
            cur_dev = vals[g];
            cur[arm] = grid[g];
          }
        }
      }
      best.sweep_history.push_back(cur_dev);
    }
    if (cur_dev < best.deviation) {
      best.deviation = cur_dev;
      best.phases = cur;
    }
  }
  return best;
}

PhaseResult optimize_phases(std::span<const std::size_t> bucket, const SingleBeamCodebook& cb, const PhaseSearch& search,
                            int resolution) {
  return optimize_phases(DeviationModel(bucket, cb, resolution), search);
}

MultiArmCodebook build_multiarm_codebook(const BucketPartition& partition, const SingleBeamCodebook& cb,
                                         const MultiArmOptions& options) {
  if (partition.universe() != cb.size()) throw std::domain_error("partition and codebook sizes differ");
  MultiArmCodebook mc;
  mc.partition = partition;
  for (const auto& bucket : partition.buckets) {
    std::vector<double> phases(bucket.size(), 0.0);
    if (options.optimize && bucket.size() > 1)
      phases = optimize_phases(bucket, cb, options.search, options.resolution).phases;
    mc.rows.push_back(synthesize(bucket, cb, phases));
  }
  return mc;
}

void write_multiarm(std::ostream& os, const MultiArmCodebook& mc, const SingleBeamCodebook& cb) {
  const ArrayConfig& c = cb.cfg;
  os << c.M << ' ' << c.N << ' ' << format_real(c.d_x) << ' ' << format_real(c.d_z) << ' ' << format_real(c.wavelength)
     << ' ' << format_real(cb.delta) << ' ' << mc.size() << '\n';
  for (std::size_t b = 0; b < mc.size(); ++b) {
    const MultiArmCodeword& w = mc.rows[b];
    os << b;
    for (const cplx& v : w.weights) os << ' ' << format_real(v.real()) << ' ' << format_real(v.imag());
    os << ' ' << w.arms();
    for (std::size_t s : w.bucket) os << ' ' << s;
    for (double ph : w.phases) os << ' ' << format_real(ph);
    os << '\n';
  }
  if (!os) throw std::runtime_error("failed to write multi-arm codebook");
}

} // namespace hmb
