// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration, Monte Carlo sweeps and result tables.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "hmb/array_model.hpp"
#include "hmb/polar_codebook.hpp"
#include "hmb/protocol.hpp"

namespace hmb {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Placement { random, on_grid };

struct ScenarioConfig {
  int K = 2;
  double p0_dbm = 15.0;
  double rho0_db = -72.0;
  double user_r_min = kNaN; ///< NaN: codebook r_min
  double user_r_max = kNaN; ///< NaN: codebook r_max
  Placement placement = Placement::random;
  int nlos_paths = 0;
  NlosRanges nlos;
};

struct ProtocolConfig {
  std::uint32_t B = 16;
  int L = 6;
  int hash_order = 2;
  DemuxMode demux = DemuxMode::plain;
  double alpha = 0.5;
  bool optimize_phases = true;
  int lobe_resolution = kDefaultLobeResolution;
  std::vector<std::string> methods{"exhaustive", "exhaustive_dft", "hmb", "hmb_hard", "eimb"};
};

struct SweepAxes {
  std::vector<double> snr_db{-10, -5, 0, 5, 10, 15, 20, 25, 30};
  std::vector<std::uint32_t> B; ///< empty: protocol B only
  std::vector<int> L;           ///< empty: protocol L only
  double distance_snr_db = 10.0;
  int distance_bins = 6;
  std::vector<int> overhead_N{8, 16, 32, 64, 128};
};

struct ExperimentConfig {
  std::string profile = "desk";
  int M = 4;
  int N = 32;
  double f_c = 28e9;
  double d_x = kNaN; ///< NaN: half wavelength
  double d_z = kNaN;
  ScenarioConfig scenario;
  CodebookOptions codebook;
  ProtocolConfig protocol;
  SweepAxes sweep;
  std::size_t trials = 500;
  std::uint64_t seed = 20240601;
  std::size_t schedule_block = 100; ///< trials sharing one hash schedule

  /// Named defaults: "desk" or "paper".
  static ExperimentConfig named(const std::string& profile);

  ArrayConfig array() const;
  double p0() const;   ///< watts
  double rho0() const; ///< linear
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Parses a JSON document over the profile it names (default "desk"); absent
/// fields keep the profile value, null selects the derived default.
ExperimentConfig load_config(std::istream& is);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// HMB_SEED, when set, replaces the configured master seed.
void apply_seed_environment(ExperimentConfig& cfg);

/// gamma = P_0 M N rho_0 / (r_0^2 sigma^2)
double reference_snr(double p0, std::size_t elements, double rho0, double r0, double noise_power);
double to_db(double linear);
double from_db(double db);
/// Noise power giving the requested reference SNR.
double noise_for_snr(double p0, std::size_t elements, double rho0, double r0, double snr_linear);

/// log2(1 + gamma |w^H g|^2) with g unit-norm.
double achievable_rate(std::span<const cplx> weights, std::span<const cplx> g, double gamma);

/// Slots consumed: exhaustive methods N_C K, EIMB B L K, HMB variants B L.
std::size_t overhead(const std::string& method, std::size_t codebook_size, int K, std::uint32_t B, int L);

bool known_method(const std::string& method);

struct ResultRow {
  std::string method;
  double snr_db = 0;
  std::uint32_t B = 0;
  int L = 0;
  std::size_t trials = 0;
  double accuracy = 0;
  double rate_bps_hz = 0;
  std::size_t overhead_slots = 0;
  std::uint64_t seed = 0;

  bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  bool operator==(const ResultTable&) const = default;
};

struct DistanceRow {
  std::string method;
  double snr_db = 0;
  double r_lo = 0;
  double r_hi = 0;
  std::size_t count = 0;
  double accuracy = 0;
  double rate_bps_hz = 0;
};

struct OverheadRow {
  std::string method;
  int M = 0;
  int N = 0;
  std::size_t codebook_size = 0;
  int K = 0;
  std::uint32_t B = 0;
  int L = 0;
  std::size_t overhead_slots = 0;
};

struct SweepDiagnostics {
  std::size_t codebook_size = 0;
  std::size_t resampled_placements = 0;
  /// Mean of |approx - exact| / exact for the cross-term-free power model over
  /// the aligned multi-arm beam of every (trial, AP).
  double power_approx_rel_error = 0;
  std::size_t schedules = 0;
};

struct SweepOutput {
  ResultTable table;
  std::vector<DistanceRow> distance;
  std::vector<OverheadRow> overhead;
  SweepDiagnostics diagnostics;
};

/// A single user placement relative to every AP.
struct TrialPlacement {
  std::vector<PolarPoint> users; ///< one per AP
  std::size_t resampled = 0;
};

TrialPlacement draw_placement(const ExperimentConfig& cfg, const SingleBeamCodebook& cb, Rng& rng);

SweepOutput run_sweep(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader = "method,snr_db,B,L,trials,accuracy,rate_bps_hz,overhead_slots,seed";

void write_csv(std::ostream& os, const ResultTable& table);
ResultTable read_csv(std::istream& is);
std::string table_to_json(const SweepOutput& out);
void write_distance_csv(std::ostream& os, const std::vector<DistanceRow>& rows);
std::vector<DistanceRow> read_distance_csv(std::istream& is);
void write_overhead_csv(std::ostream& os, const std::vector<OverheadRow>& rows);
std::vector<OverheadRow> read_overhead_csv(std::istream& is);

/// Writes <stem>.csv, <stem>.json, <stem>_distance.csv and <stem>_overhead.csv.
/// Throws std::runtime_error naming the path when a file cannot be written.
void emit(const SweepOutput& out, const std::string& stem);

/// File names of the rendered figures, in a fixed order.
std::vector<std::string> plot_names();

/// Renders the five SVG figures into `dir` using only the given tables.
std::vector<std::string> write_plots(const ResultTable& table, const std::vector<DistanceRow>& distance,
                                     const std::vector<OverheadRow>& overhead, const std::string& dir);

} // namespace hmb
