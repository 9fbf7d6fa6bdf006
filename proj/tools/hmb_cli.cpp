// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: codebook, multibeam, train, sweep, plot, bound.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hmb/harness.hpp"
#include "hmb/multibeam.hpp"
#include "hmb/polar_codebook.hpp"
#include "hmb/protocol.hpp"
#include "hmb/seeding.hpp"
#include "hmb/text_io.hpp"

namespace {

using namespace hmb;

struct ArrayFlags {
  int M = 4;
  int N = 32;
  double f_c = 28e9;
  double delta = 0.5;
  std::string axis = "automatic";
  bool far_field_only = false;

  void attach(CLI::App* app) {
    app->add_option("--M", M, "elements along z")->check(CLI::PositiveNumber);
    app->add_option("--N", N, "elements along x")->check(CLI::PositiveNumber);
    app->add_option("--fc", f_c, "carrier frequency in Hz")->check(CLI::PositiveNumber);
    app->add_option("--delta", delta, "projection threshold")->check(CLI::Range(0.05, 0.99));
    app->add_option("--axis", axis, "ring axis")->check(CLI::IsMember({"automatic", "x", "z"}));
    app->add_flag("--far-field-only", far_field_only, "keep only the far-field ring");
  }

  SingleBeamCodebook build() const {
    CodebookOptions o;
    o.delta = delta;
    o.axis = axis == "x" ? RingAxis::x : axis == "z" ? RingAxis::z : RingAxis::automatic;
    o.far_field_only = far_field_only;
    return build_codebook(ArrayConfig::half_wavelength(M, N, f_c), o);
  }
};

std::ostream& output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

ExperimentConfig resolve_config(const std::string& path, const std::string& profile, std::optional<std::uint64_t> seed,
                                std::optional<std::size_t> trials) {
  ExperimentConfig cfg = path.empty() ? ExperimentConfig::named(profile) : load_config_file(path);
  apply_seed_environment(cfg);
  if (seed) cfg.seed = *seed;
  if (trials) cfg.trials = *trials;
  cfg.validate();
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hashing multi-arm beam training simulator"};
  app.require_subcommand(1);

  ArrayFlags cb_flags;
  std::string cb_out;
  bool cb_dft = false;
  bool cb_stats = false;
  auto* cmd_cb = app.add_subcommand("codebook", "build a polar-domain codebook and write it as text");
  cb_flags.attach(cmd_cb);
  cmd_cb->add_option("-o,--out", cb_out, "output file (default stdout)");
  cmd_cb->add_flag("--dft", cb_dft, "far-field grid codebook instead");
  cmd_cb->add_flag("--stats", cb_stats, "print size and coherence to stderr");

  ArrayFlags mb_flags;
  std::uint32_t mb_B = 16;
  int mb_L = 1;
  int mb_k = 2;
  std::uint64_t mb_seed = 1;
  bool mb_optimize = true;
  std::string mb_dir = ".";
  auto* cmd_mb = app.add_subcommand("multibeam", "hash a codebook into multi-arm beams, one file per round");
  mb_flags.attach(cmd_mb);
  cmd_mb->add_option("-B,--buckets", mb_B, "bucket count")->check(CLI::Range(2u, 1u << 20));
  cmd_mb->add_option("-L,--rounds", mb_L, "hash rounds")->check(CLI::PositiveNumber);
  cmd_mb->add_option("-k,--order", mb_k, "hash independence order")->check(CLI::Range(2, kMaxHashOrder));
  cmd_mb->add_option("--seed", mb_seed, "seed");
  cmd_mb->add_flag("--optimize,!--no-optimize", mb_optimize, "optimize sub-beam phases");
  cmd_mb->add_option("-d,--out-dir", mb_dir, "output directory");

  std::string tr_config, tr_profile = "desk", tr_trace;
  std::optional<std::uint64_t> tr_seed;
  double tr_snr = 10.0;
  std::size_t tr_trial = 0;
  auto* cmd_tr = app.add_subcommand("train", "run one seeded training trial and print the result");
  cmd_tr->add_option("-c,--config", tr_config, "JSON config");
  cmd_tr->add_option("--profile", tr_profile, "named profile")->check(CLI::IsMember({"desk", "paper"}));
  cmd_tr->add_option("--seed", tr_seed, "master seed");
  cmd_tr->add_option("--snr", tr_snr, "reference SNR in dB");
  cmd_tr->add_option("--trial", tr_trial, "trial index");
  cmd_tr->add_option("--trace", tr_trace, "write a slot trace to this file");

  std::string sw_config, sw_profile = "desk", sw_out = "results", sw_plots;
  std::optional<std::uint64_t> sw_seed;
  std::optional<std::size_t> sw_trials;
  auto* cmd_sw = app.add_subcommand("sweep", "run the Monte Carlo sweep and write the result tables");
  cmd_sw->add_option("-c,--config", sw_config, "JSON config");
  cmd_sw->add_option("--profile", sw_profile, "named profile")->check(CLI::IsMember({"desk", "paper"}));
  cmd_sw->add_option("--seed", sw_seed, "master seed (overrides config and HMB_SEED)");
  cmd_sw->add_option("--trials", sw_trials, "trial count")->check(CLI::PositiveNumber);
  cmd_sw->add_option("-o,--out", sw_out, "output stem");
  cmd_sw->add_option("--plots", sw_plots, "also render figures into this directory");

  std::string pl_table = "results", pl_dir = ".";
  auto* cmd_pl = app.add_subcommand("plot", "render SVG figures from written tables");
  cmd_pl->add_option("-t,--table", pl_table, "table stem written by sweep");
  cmd_pl->add_option("-d,--out-dir", pl_dir, "output directory");

  RoundBoundInputs bd;
  bd.candidates = 100;
  bd.p_max_s = 1.2;
  bd.p_min_s = 0.8;
  bd.p_max_ns = 0.15;
  bd.p_min_ns = 0.05;
  bd.t0 = 0.55;
  bd.t_s = 1.0;
  bd.t_ns = 0.1;
  auto* cmd_bd = app.add_subcommand("bound", "hash rounds needed for error probability below 1/M_s");
  cmd_bd->add_option("--ms", bd.candidates, "candidate count M_s");
  cmd_bd->add_option("--ps-max", bd.p_max_s, "signal power upper bound");
  cmd_bd->add_option("--ps-min", bd.p_min_s, "signal power lower bound");
  cmd_bd->add_option("--pns-max", bd.p_max_ns, "noise power upper bound");
  cmd_bd->add_option("--pns-min", bd.p_min_ns, "noise power lower bound");
  cmd_bd->add_option("--t0", bd.t0, "common threshold");
  cmd_bd->add_option("--ts", bd.t_s, "mean signal power");
  cmd_bd->add_option("--tns", bd.t_ns, "mean noise power");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*cmd_cb) {
      const SingleBeamCodebook cb =
          cb_dft ? dft_codebook(ArrayConfig::half_wavelength(cb_flags.M, cb_flags.N, cb_flags.f_c)) : cb_flags.build();
      std::ofstream file;
      write_codebook(output(cb_out, file), cb);
      if (cb_stats)
        std::cerr << "codewords " << cb.size() << " coherence " << coherence(cb) << " same-direction "
                  << same_direction_coherence(cb) << '\n';
    } else if (*cmd_mb) {
      const SingleBeamCodebook cb = mb_flags.build();
      if (mb_B > cb.size()) throw std::invalid_argument("B exceeds the codebook size " + std::to_string(cb.size()));
      std::filesystem::create_directories(mb_dir);
      Rng rng = make_rng(mb_seed, kStreamHash);
      ScheduleOptions opts;
      opts.hash_order = mb_k;
      opts.beams.optimize = mb_optimize;
      const ScanSchedule s = build_schedule(1, mb_L, mb_B, cb, rng, opts);
      for (int l = 0; l < mb_L; ++l) {
        const MultiArmCodebook& mc = s.aps[0].rounds[static_cast<std::size_t>(l)];
        const std::string base = mb_dir + "/round_" + std::to_string(l);
        std::ofstream beams(base + ".txt");
        std::ofstream parts(base + "_partition.txt");
        if (!beams || !parts) throw std::runtime_error("cannot write into " + mb_dir);
        write_multiarm(beams, mc, cb);
        write_partition(parts, mc.partition);
        double mean_dev = 0;
        for (const auto& row : mc.rows) mean_dev += deviation(row.phases, row.bucket, cb);
        std::cout << "round " << l << " buckets " << mc.size() << " mean_deviation "
                  << format_real(mean_dev / static_cast<double>(mc.size())) << '\n';
      }
    } else if (*cmd_tr) {
      ExperimentConfig cfg = resolve_config(tr_config, tr_profile, tr_seed, std::nullopt);
      const ArrayConfig arr = cfg.array();
      const SingleBeamCodebook cb = build_codebook(arr, cfg.codebook);
      Rng srng = make_rng(cfg.seed, kStreamSchedule, {cfg.protocol.B, static_cast<std::uint64_t>(cfg.protocol.L), 0});
      ScheduleOptions opts;
      opts.hash_order = cfg.protocol.hash_order;
      opts.beams.optimize = cfg.protocol.optimize_phases;
      opts.beams.resolution = cfg.protocol.lobe_resolution;
      const ScanSchedule s = build_schedule(cfg.scenario.K, cfg.protocol.L, cfg.protocol.B, cb, srng, opts);
      Rng prng = make_rng(cfg.seed, kStreamPlacement, {tr_trial});
      const TrialPlacement place = draw_placement(cfg, cb, prng);
      std::vector<ChannelRealization> channels;
      double r0 = kFarField;
      for (int k = 0; k < cfg.scenario.K; ++k) {
        channels.push_back(los_channel(arr, place.users[static_cast<std::size_t>(k)], cfg.rho0(), k));
        r0 = std::min(r0, place.users[static_cast<std::size_t>(k)].r);
      }
      const double noise = noise_for_snr(cfg.p0(), arr.size(), cfg.rho0(), r0, from_db(tr_snr));
      Rng nrng = make_rng(cfg.seed, kStreamNoise, {tr_trial, 1});
      const PowerMeasurements P = scan(s, channels, cfg.p0(), noise, nrng);
      const TrainingResult res = decide_soft(s, P, channels, cfg.protocol.demux);
      for (std::size_t k = 0; k < channels.size(); ++k)
        std::cout << "ap " << k << " r " << format_real(place.users[k].r) << " gamma " << res.gamma[k] << " best "
                  << best_codeword(cb, channels[k].h) << '\n';
      std::cout << "overhead " << res.overhead << '\n';
      if (!tr_trace.empty()) {
        std::ofstream os(tr_trace);
        if (!os) throw std::runtime_error("cannot write " + tr_trace);
        write_trace(os, P, res);
      }
    } else if (*cmd_sw) {
      ExperimentConfig cfg = resolve_config(sw_config, sw_profile, sw_seed, sw_trials);
      const SweepOutput out = run_sweep(cfg);
      if (const auto parent = std::filesystem::path(sw_out).parent_path(); !parent.empty())
        std::filesystem::create_directories(parent);
      emit(out, sw_out);
      std::cout << "wrote " << sw_out << ".csv (" << out.table.rows.size() << " rows, codebook "
                << out.diagnostics.codebook_size << ", approx power error "
                << format_real(out.diagnostics.power_approx_rel_error) << ")\n";
      if (!sw_plots.empty()) {
        std::filesystem::create_directories(sw_plots);
        write_plots(out.table, out.distance, out.overhead, sw_plots);
      }
    } else if (*cmd_pl) {
      std::ifstream t(pl_table + ".csv"), d(pl_table + "_distance.csv"), o(pl_table + "_overhead.csv");
      if (!t) throw std::runtime_error("cannot read " + pl_table + ".csv");
      const ResultTable table = read_csv(t);
      const std::vector<DistanceRow> dist = d ? read_distance_csv(d) : std::vector<DistanceRow>{};
      const std::vector<OverheadRow> ovh = o ? read_overhead_csv(o) : std::vector<OverheadRow>{};
      std::filesystem::create_directories(pl_dir);
      for (const auto& p : write_plots(table, dist, ovh, pl_dir)) std::cout << p << '\n';
    } else if (*cmd_bd) {
      const RoundBound r = required_rounds(bd);
      std::cout << "L_signal " << format_real(r.l_signal) << "\nL_noise " << format_real(r.l_noise) << "\nL "
                << r.rounds << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
