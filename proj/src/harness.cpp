// SPDX-License-Identifier: Apache-2.0

#include "hmb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hmb/seeding.hpp"
#include "hmb/text_io.hpp"

namespace hmb {

namespace {

using nlohmann::json;

const std::vector<std::string> kMethods{"exhaustive", "exhaustive_dft", "hmb", "hmb_hard", "eimb"};

double real_or_nan(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_null()) return kNaN;
  return v.get<double>();
}

json nan_to_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

RingAxis parse_axis(const std::string& s) {
  if (s == "automatic") return RingAxis::automatic;
  if (s == "x") return RingAxis::x;
  if (s == "z") return RingAxis::z;
  throw std::invalid_argument("unknown ring axis '" + s + "'");
}

const char* axis_name(RingAxis a) {
  switch (a) {
  case RingAxis::x: return "x";
  case RingAxis::z: return "z";
  case RingAxis::automatic: break;
  }
  return "automatic";
}

DemuxMode parse_demux(const std::string& s) {
  if (s == "plain") return DemuxMode::plain;
  if (s == "round_constrained") return DemuxMode::round_constrained;
  throw std::invalid_argument("unknown demux mode '" + s + "'");
}

Placement parse_placement(const std::string& s) {
  if (s == "random") return Placement::random;
  if (s == "on_grid") return Placement::on_grid;
  throw std::invalid_argument("unknown placement '" + s + "'");
}

bool uses(const ExperimentConfig& cfg, const char* method) {
  const auto& m = cfg.protocol.methods;
  return std::find(m.begin(), m.end(), method) != m.end();
}

double user_r_lo(const ExperimentConfig& cfg, const SingleBeamCodebook& cb) {
  return std::isnan(cfg.scenario.user_r_min) ? cb.r_min : cfg.scenario.user_r_min;
}

double user_r_hi(const ExperimentConfig& cfg, const SingleBeamCodebook& cb) {
  return std::isnan(cfg.scenario.user_r_max) ? cb.r_max : cfg.scenario.user_r_max;
}

struct Tally {
  double successes = 0;
  double rate = 0;
  std::size_t count = 0;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

void check_written(std::ostream& os, const std::string& path) {
  if (!os) throw std::runtime_error("failed while writing " + path);
}

std::vector<std::string> csv_fields(const std::string& line, std::size_t expected, std::size_t lineno) {
  std::vector<std::string> f;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      f.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  f.push_back(cur);
  if (f.size() != expected) throw std::runtime_error("csv line " + std::to_string(lineno) + ": wrong field count");
  return f;
}

} // namespace

ExperimentConfig ExperimentConfig::named(const std::string& profile) {
  ExperimentConfig c;
  if (profile == "desk") return c;
  if (profile == "paper") {
    c.profile = "paper";
    c.N = 128;
    c.scenario.K = 5;
    c.protocol.B = 32;
    c.protocol.L = 6;
    c.sweep.B = {16, 32, 64};
    return c;
  }
  throw std::invalid_argument("unknown profile '" + profile + "'");
}

ArrayConfig ExperimentConfig::array() const {
  ArrayConfig a = ArrayConfig::half_wavelength(M, N, f_c);
  if (!std::isnan(d_x)) a.d_x = d_x;
  if (!std::isnan(d_z)) a.d_z = d_z;
  return a;
}

double ExperimentConfig::p0() const { return from_db(scenario.p0_dbm - 30.0); }
double ExperimentConfig::rho0() const { return from_db(scenario.rho0_db); }

void ExperimentConfig::validate() const {
  array().validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (sweep.snr_db.empty()) throw std::invalid_argument("SNR list must not be empty");
  if (scenario.K < 1) throw std::invalid_argument("K must be at least 1");
  if (protocol.L < 1 || protocol.B < 2) throw std::invalid_argument("protocol needs L >= 1 and B >= 2");
  if (!(protocol.alpha > 0 && protocol.alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (protocol.methods.empty()) throw std::invalid_argument("method list must not be empty");
  for (const auto& m : protocol.methods)
    if (!known_method(m)) throw std::invalid_argument("unknown method '" + m + "'");
  for (std::uint32_t b : sweep.B)
    if (b < 2) throw std::invalid_argument("sweep B values must be at least 2");
  for (int l : sweep.L)
    if (l < 1) throw std::invalid_argument("sweep L values must be at least 1");
  if (schedule_block < 1) throw std::invalid_argument("schedule_block must be at least 1");
  if (sweep.distance_bins < 1) throw std::invalid_argument("distance_bins must be at least 1");
  if (!std::isnan(scenario.user_r_min) && !std::isnan(scenario.user_r_max) &&
      !(scenario.user_r_min > 0 && scenario.user_r_max >= scenario.user_r_min))
    throw std::invalid_argument("invalid user distance range");
}

ExperimentConfig load_config(std::istream& is) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  try {
    ExperimentConfig c = ExperimentConfig::named(j.value("profile", std::string("desk")));
    if (j.contains("array")) {
      const json& a = j.at("array");
      c.M = a.value("M", c.M);
      c.N = a.value("N", c.N);
      c.f_c = a.value("f_c", c.f_c);
      c.d_x = real_or_nan(a, "d_x", c.d_x);
      c.d_z = real_or_nan(a, "d_z", c.d_z);
    }
    if (j.contains("scenario")) {
      const json& s = j.at("scenario");
      c.scenario.K = s.value("K", c.scenario.K);
      c.scenario.p0_dbm = s.value("p0_dbm", c.scenario.p0_dbm);
      c.scenario.rho0_db = s.value("rho0_db", c.scenario.rho0_db);
      c.scenario.user_r_min = real_or_nan(s, "user_r_min", c.scenario.user_r_min);
      c.scenario.user_r_max = real_or_nan(s, "user_r_max", c.scenario.user_r_max);
      if (s.contains("placement")) c.scenario.placement = parse_placement(s.at("placement").get<std::string>());
      c.scenario.nlos_paths = s.value("nlos_paths", c.scenario.nlos_paths);
    }
    if (j.contains("codebook")) {
      const json& b = j.at("codebook");
      c.codebook.delta = b.value("delta", c.codebook.delta);
      c.codebook.r_min = real_or_nan(b, "r_min", c.codebook.r_min);
      c.codebook.r_max = real_or_nan(b, "r_max", c.codebook.r_max);
      if (b.contains("axis")) c.codebook.axis = parse_axis(b.at("axis").get<std::string>());
      c.codebook.far_field_only = b.value("far_field_only", c.codebook.far_field_only);
    }
    if (j.contains("protocol")) {
      const json& p = j.at("protocol");
      c.protocol.B = p.value("B", c.protocol.B);
      c.protocol.L = p.value("L", c.protocol.L);
      c.protocol.hash_order = p.value("hash_order", c.protocol.hash_order);
      if (p.contains("demux")) c.protocol.demux = parse_demux(p.at("demux").get<std::string>());
      c.protocol.alpha = p.value("alpha", c.protocol.alpha);
      c.protocol.optimize_phases = p.value("optimize_phases", c.protocol.optimize_phases);
      c.protocol.lobe_resolution = p.value("lobe_resolution", c.protocol.lobe_resolution);
      if (p.contains("methods")) c.protocol.methods = p.at("methods").get<std::vector<std::string>>();
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      if (s.contains("snr_db")) c.sweep.snr_db = s.at("snr_db").get<std::vector<double>>();
      if (s.contains("B")) c.sweep.B = s.at("B").get<std::vector<std::uint32_t>>();
      if (s.contains("L")) c.sweep.L = s.at("L").get<std::vector<int>>();
      c.sweep.distance_snr_db = s.value("distance_snr_db", c.sweep.distance_snr_db);
      c.sweep.distance_bins = s.value("distance_bins", c.sweep.distance_bins);
      if (s.contains("overhead_N")) c.sweep.overhead_N = s.at("overhead_N").get<std::vector<int>>();
    }
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.schedule_block = j.value("schedule_block", c.schedule_block);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config field has the wrong type: ") + e.what());
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config " + path);
  return load_config(is);
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["profile"] = c.profile;
  j["array"] = {{"M", c.M}, {"N", c.N}, {"f_c", c.f_c}, {"d_x", nan_to_null(c.d_x)}, {"d_z", nan_to_null(c.d_z)}};
  j["scenario"] = {{"K", c.scenario.K},
                   {"p0_dbm", c.scenario.p0_dbm},
                   {"rho0_db", c.scenario.rho0_db},
                   {"user_r_min", nan_to_null(c.scenario.user_r_min)},
                   {"user_r_max", nan_to_null(c.scenario.user_r_max)},
                   {"placement", c.scenario.placement == Placement::on_grid ? "on_grid" : "random"},
                   {"nlos_paths", c.scenario.nlos_paths}};
  j["codebook"] = {{"delta", c.codebook.delta},
                   {"r_min", nan_to_null(c.codebook.r_min)},
                   {"r_max", nan_to_null(c.codebook.r_max)},
                   {"axis", axis_name(c.codebook.axis)},
                   {"far_field_only", c.codebook.far_field_only}};
  j["protocol"] = {{"B", c.protocol.B},
                   {"L", c.protocol.L},
                   {"hash_order", c.protocol.hash_order},
                   {"demux", c.protocol.demux == DemuxMode::plain ? "plain" : "round_constrained"},
                   {"alpha", c.protocol.alpha},
                   {"optimize_phases", c.protocol.optimize_phases},
                   {"lobe_resolution", c.protocol.lobe_resolution},
                   {"methods", c.protocol.methods}};
  j["sweep"] = {{"snr_db", c.sweep.snr_db},
                {"B", c.sweep.B},
                {"L", c.sweep.L},
                {"distance_snr_db", c.sweep.distance_snr_db},
                {"distance_bins", c.sweep.distance_bins},
                {"overhead_N", c.sweep.overhead_N}};
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["schedule_block"] = c.schedule_block;
  return j.dump(2);
}

void apply_seed_environment(ExperimentConfig& cfg) {
  const char* env = std::getenv("HMB_SEED");
  if (!env || !*env) return;
  const long long v = parse_integer(env);
  if (v < 0) throw std::invalid_argument("HMB_SEED must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(v);
}

double reference_snr(double p0, std::size_t elements, double rho0, double r0, double noise_power) {
  if (!(p0 > 0) || !(rho0 > 0) || !(r0 > 0) || !(noise_power > 0) || elements == 0)
    throw std::domain_error("reference SNR needs positive inputs");
  return p0 * static_cast<double>(elements) * rho0 / (r0 * r0 * noise_power);
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

double noise_for_snr(double p0, std::size_t elements, double rho0, double r0, double snr_linear) {
  if (!(snr_linear > 0)) throw std::domain_error("SNR must be positive");
  return p0 * static_cast<double>(elements) * rho0 / (r0 * r0 * snr_linear);
}

double achievable_rate(std::span<const cplx> weights, std::span<const cplx> g, double gamma) {
  return std::log2(1.0 + gamma * std::norm(inner(g, weights)));
}

bool known_method(const std::string& method) {
  return std::find(kMethods.begin(), kMethods.end(), method) != kMethods.end();
}

std::size_t overhead(const std::string& method, std::size_t codebook_size, int K, std::uint32_t B, int L) {
  const auto k = static_cast<std::size_t>(K);
  const std::size_t q = static_cast<std::size_t>(B) * static_cast<std::size_t>(L);
  if (method == "exhaustive" || method == "exhaustive_dft") return codebook_size * k;
  if (method == "eimb") return q * k;
  if (method == "hmb" || method == "hmb_hard") return q;
  throw std::domain_error("unknown method '" + method + "'");
}

TrialPlacement draw_placement(const ExperimentConfig& cfg, const SingleBeamCodebook& cb, Rng& rng) {
  TrialPlacement out;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double lo = user_r_lo(cfg, cb);
  const double hi = user_r_hi(cfg, cb);
  if (!(lo > 0) || !(hi >= lo) || std::isinf(hi)) throw std::invalid_argument("user distance range is not finite");
  std::uniform_real_distribution<double> logr(std::log(lo), std::log(hi));
  std::uniform_int_distribution<std::size_t> pick(0, cb.size() - 1);
  for (int k = 0; k < cfg.scenario.K; ++k) {
    if (cfg.scenario.placement == Placement::on_grid) {
      PolarPoint p = cb.points[pick(rng)].polar();
      // Far-field rows get a user far beyond the Rayleigh distance.
      if (is_far_field(p.r)) p.r = 1e3 * cb.cfg.rayleigh_distance();
      out.users.push_back(p);
      continue;
    }
    for (;;) {
      const double u = unit(rng);
      const double w = unit(rng);
      const double r = std::exp(logr(rng));
      if (u * u + w * w >= 1.0) continue;
      if (r < cb.r_min) {
        ++out.resampled;
        continue;
      }
      const double phi = std::acos(w);
      const double theta = std::acos(std::clamp(u / std::sin(phi), -1.0, 1.0));
      out.users.push_back({r, theta, phi});
      break;
    }
  }
  return out;
}

SweepOutput run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const ArrayConfig arr = cfg.array();
  const std::size_t MN = arr.size();
  const double p0 = cfg.p0();
  const double rho0 = cfg.rho0();
  const int K = cfg.scenario.K;
  const auto& methods = cfg.protocol.methods;
  const std::size_t S = cfg.sweep.snr_db.size();

  SweepOutput out;
  const SingleBeamCodebook cb = build_codebook(arr, cfg.codebook);
  out.diagnostics.codebook_size = cb.size();
  const bool want_dft = uses(cfg, "exhaustive_dft");
  const bool want_hmb = uses(cfg, "hmb") || uses(cfg, "hmb_hard");
  const bool want_eimb = uses(cfg, "eimb");
  const SingleBeamCodebook dft = want_dft ? dft_codebook(arr) : SingleBeamCodebook{};

  std::size_t dist_snr = 0;
  for (std::size_t i = 1; i < S; ++i)
    if (std::abs(cfg.sweep.snr_db[i] - cfg.sweep.distance_snr_db) <
        std::abs(cfg.sweep.snr_db[dist_snr] - cfg.sweep.distance_snr_db))
      dist_snr = i;
  const double d_lo = std::log(user_r_lo(cfg, cb));
  const double d_hi = std::log(user_r_hi(cfg, cb));
  const int bins = cfg.sweep.distance_bins;

  const std::vector<std::uint32_t> Bs = cfg.sweep.B.empty() ? std::vector<std::uint32_t>{cfg.protocol.B} : cfg.sweep.B;
  const std::vector<int> Ls = cfg.sweep.L.empty() ? std::vector<int>{cfg.protocol.L} : cfg.sweep.L;

  ScheduleOptions sched_opts;
  sched_opts.hash_order = cfg.protocol.hash_order;
  sched_opts.beams.optimize = cfg.protocol.optimize_phases;
  sched_opts.beams.resolution = cfg.protocol.lobe_resolution;

  double approx_err = 0;
  std::size_t approx_n = 0;
  bool first_point = true;

  for (std::uint32_t B : Bs) {
    for (int L : Ls) {
      if (B > cb.size()) throw std::invalid_argument("B exceeds the codebook size");
      const std::optional<EimbPlan> eimb = want_eimb ? std::optional<EimbPlan>(build_eimb_plan(cb, B, L)) : std::nullopt;
      std::vector<std::vector<Tally>> tally(methods.size(), std::vector<Tally>(S));
      std::vector<std::vector<Tally>> dist(methods.size(), std::vector<Tally>(static_cast<std::size_t>(bins)));
      std::optional<ScanSchedule> schedule;
      std::size_t schedule_id = static_cast<std::size_t>(-1);

      for (std::size_t t = 0; t < cfg.trials; ++t) {
        if (want_hmb && t / cfg.schedule_block != schedule_id) {
          schedule_id = t / cfg.schedule_block;
          Rng srng = make_rng(cfg.seed, kStreamSchedule, {B, static_cast<std::uint64_t>(L), schedule_id});
          schedule = build_schedule(K, L, B, cb, srng, sched_opts);
          ++out.diagnostics.schedules;
        }
        Rng prng = make_rng(cfg.seed, kStreamPlacement, {t});
        const TrialPlacement place = draw_placement(cfg, cb, prng);
        if (first_point) out.diagnostics.resampled_placements += place.resampled;

        std::vector<ChannelRealization> channels;
        for (int k = 0; k < K; ++k) {
          const PolarPoint& user = place.users[static_cast<std::size_t>(k)];
          if (cfg.scenario.nlos_paths > 0) {
            const auto paths = draw_paths(arr, user, rho0, cfg.scenario.nlos_paths, cfg.scenario.nlos, prng);
            channels.push_back(multipath_channel(arr, paths, k));
          } else {
            channels.push_back(los_channel(arr, user, rho0, k));
          }
        }
        double r0 = kFarField;
        for (const auto& u : place.users) r0 = std::min(r0, u.r);

        std::vector<std::size_t> best_polar, best_dft;
        std::vector<double> hnorm2;
        for (const auto& ch : channels) {
          best_polar.push_back(best_codeword(cb, ch.h));
          if (want_dft) best_dft.push_back(best_codeword(dft, ch.h));
          const double n = norm(ch.h);
          hnorm2.push_back(n * n);
        }

        if (want_hmb && first_point) {
          for (std::size_t k = 0; k < channels.size(); ++k) {
            const MultiArmCodebook& mc = schedule->aps[k].rounds.front();
            const std::uint32_t b = mc.partition.lookup()[best_polar[k]];
            const MultiArmCodeword& w = mc.rows[b];
            const double exact = received_power(channels[k], w.weights, p0);
            const double beta2 = hnorm2[k] / static_cast<double>(MN);
            const double W = std::sqrt(exact / (p0 * hnorm2[k] * static_cast<double>(w.arms())));
            const double approx = approximate_power(p0, std::sqrt(beta2), MN, W);
            if (exact > 0) {
              approx_err += std::abs(approx - exact) / exact;
              ++approx_n;
            }
          }
        }

        for (std::size_t i = 0; i < S; ++i) {
          const double snr = from_db(cfg.sweep.snr_db[i]);
          const double noise = noise_for_snr(p0, MN, rho0, r0, snr);
          std::vector<double> gamma_k;
          for (const auto& u : place.users) gamma_k.push_back(reference_snr(p0, MN, rho0, u.r, noise));

          std::optional<TrainingResult> soft, hard;
          if (want_hmb) {
            Rng nrng = make_rng(cfg.seed, kStreamNoise, {t, 1});
            const PowerMeasurements P = scan(*schedule, channels, p0, noise, nrng);
            soft = decide_soft(*schedule, P, channels, cfg.protocol.demux);
            hard = decide_hard(*schedule, P, channels, cfg.protocol.alpha);
          }

          for (std::size_t m = 0; m < methods.size(); ++m) {
            const std::string& name = methods[m];
            TrainingResult res;
            const SingleBeamCodebook* book = &cb;
            const std::vector<std::size_t>* best = &best_polar;
            if (name == "exhaustive") {
              Rng nrng = make_rng(cfg.seed, kStreamNoise, {t, 0});
              res = exhaustive_train(cb, channels, p0, noise, nrng);
            } else if (name == "exhaustive_dft") {
              Rng nrng = make_rng(cfg.seed, kStreamNoise, {t, 0});
              res = exhaustive_train(dft, channels, p0, noise, nrng);
              book = &dft;
              best = &best_dft;
            } else if (name == "hmb") {
              res = *soft;
            } else if (name == "hmb_hard") {
              res = *hard;
            } else {
              Rng nrng = make_rng(cfg.seed, kStreamNoise, {t, 2});
              res = eimb_train(*eimb, channels, p0, noise, nrng, cfg.protocol.alpha);
            }
            for (std::size_t k = 0; k < channels.size(); ++k) {
              const bool ok = res.gamma[k] == (*best)[k];
              const double gain = std::norm(inner(channels[k].h, book->rows[res.gamma[k]])) / hnorm2[k];
              const double rate = std::log2(1.0 + gamma_k[k] * gain);
              Tally& tl = tally[m][i];
              tl.successes += ok;
              tl.rate += rate;
              ++tl.count;
              if (i == dist_snr) {
                const double x = (std::log(place.users[k].r) - d_lo) / (d_hi - d_lo);
                const int bin = std::clamp(static_cast<int>(std::floor(x * bins)), 0, bins - 1);
                Tally& td = dist[m][static_cast<std::size_t>(bin)];
                td.successes += ok;
                td.rate += rate;
                ++td.count;
              }
            }
          }
        }
      }

      for (std::size_t m = 0; m < methods.size(); ++m) {
        const std::size_t size = methods[m] == "exhaustive_dft" ? dft.size() : cb.size();
        for (std::size_t i = 0; i < S; ++i) {
          const Tally& tl = tally[m][i];
          out.table.rows.push_back({methods[m], cfg.sweep.snr_db[i], B, L, cfg.trials, tl.successes / tl.count,
                                    tl.rate / tl.count, overhead(methods[m], size, K, B, L), cfg.seed});
        }
        if (first_point) {
          for (int b = 0; b < bins; ++b) {
            const Tally& td = dist[m][static_cast<std::size_t>(b)];
            DistanceRow row;
            row.method = methods[m];
            row.snr_db = cfg.sweep.snr_db[dist_snr];
            row.r_lo = std::exp(d_lo + (d_hi - d_lo) * b / bins);
            row.r_hi = std::exp(d_lo + (d_hi - d_lo) * (b + 1) / bins);
            row.count = td.count;
            row.accuracy = td.count ? td.successes / td.count : 0.0;
            row.rate_bps_hz = td.count ? td.rate / td.count : 0.0;
            out.distance.push_back(row);
          }
        }
      }
      first_point = false;
    }
  }
  out.diagnostics.power_approx_rel_error = approx_n ? approx_err / approx_n : 0.0;

  for (int n : cfg.sweep.overhead_N) {
    ExperimentConfig sub = cfg;
    sub.N = n;
    const ArrayConfig a = sub.array();
    const std::size_t polar = build_codebook(a, cfg.codebook).size();
    const std::size_t grid = angular_grid(a).size();
    for (const auto& m : methods) {
      const std::size_t size = m == "exhaustive_dft" ? grid : polar;
      out.overhead.push_back({m, a.M, n, size, K, cfg.protocol.B, cfg.protocol.L,
                              overhead(m, size, K, cfg.protocol.B, cfg.protocol.L)});
    }
  }
  return out;
}

void write_csv(std::ostream& os, const ResultTable& table) {
  os << kCsvHeader << '\n';
  for (const ResultRow& r : table.rows)
    os << r.method << ',' << format_real(r.snr_db) << ',' << r.B << ',' << r.L << ',' << r.trials << ','
       << format_real(r.accuracy) << ',' << format_real(r.rate_bps_hz) << ',' << r.overhead_slots << ',' << r.seed
       << '\n';
}

ResultTable read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw std::runtime_error("csv: unexpected header");
  ResultTable t;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv_fields(line, 9, lineno);
    ResultRow r;
    r.method = f[0];
    r.snr_db = parse_real(f[1]);
    r.B = static_cast<std::uint32_t>(parse_integer(f[2]));
    r.L = static_cast<int>(parse_integer(f[3]));
    r.trials = static_cast<std::size_t>(parse_integer(f[4]));
    r.accuracy = parse_real(f[5]);
    r.rate_bps_hz = parse_real(f[6]);
    r.overhead_slots = static_cast<std::size_t>(parse_integer(f[7]));
    r.seed = std::stoull(f[8]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

void write_distance_csv(std::ostream& os, const std::vector<DistanceRow>& rows) {
  os << "method,snr_db,r_lo,r_hi,count,accuracy,rate_bps_hz\n";
  for (const DistanceRow& r : rows)
    os << r.method << ',' << format_real(r.snr_db) << ',' << format_real(r.r_lo) << ',' << format_real(r.r_hi) << ','
       << r.count << ',' << format_real(r.accuracy) << ',' << format_real(r.rate_bps_hz) << '\n';
}

std::vector<DistanceRow> read_distance_csv(std::istream& is) {
  std::string line;
  std::getline(is, line);
  std::vector<DistanceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv_fields(line, 7, lineno);
    rows.push_back({f[0], parse_real(f[1]), parse_real(f[2]), parse_real(f[3]),
                    static_cast<std::size_t>(parse_integer(f[4])), parse_real(f[5]), parse_real(f[6])});
  }
  return rows;
}

void write_overhead_csv(std::ostream& os, const std::vector<OverheadRow>& rows) {
  os << "method,M,N,codebook_size,K,B,L,overhead_slots\n";
  for (const OverheadRow& r : rows)
    os << r.method << ',' << r.M << ',' << r.N << ',' << r.codebook_size << ',' << r.K << ',' << r.B << ',' << r.L
       << ',' << r.overhead_slots << '\n';
}

std::vector<OverheadRow> read_overhead_csv(std::istream& is) {
  std::string line;
  std::getline(is, line);
  std::vector<OverheadRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv_fields(line, 8, lineno);
    rows.push_back({f[0], static_cast<int>(parse_integer(f[1])), static_cast<int>(parse_integer(f[2])),
                    static_cast<std::size_t>(parse_integer(f[3])), static_cast<int>(parse_integer(f[4])),
                    static_cast<std::uint32_t>(parse_integer(f[5])), static_cast<int>(parse_integer(f[6])),
                    static_cast<std::size_t>(parse_integer(f[7]))});
  }
  return rows;
}

std::string table_to_json(const SweepOutput& out) {
  json j;
  j["header"] = kCsvHeader;
  json rows = json::array();
  for (const ResultRow& r : out.table.rows)
    rows.push_back({{"method", r.method},
                    {"snr_db", r.snr_db},
                    {"B", r.B},
                    {"L", r.L},
                    {"trials", r.trials},
                    {"accuracy", r.accuracy},
                    {"rate_bps_hz", r.rate_bps_hz},
                    {"overhead_slots", r.overhead_slots},
                    {"seed", r.seed}});
  j["rows"] = rows;
  json dist = json::array();
  for (const DistanceRow& r : out.distance)
    dist.push_back({{"method", r.method},
                    {"snr_db", r.snr_db},
                    {"r_lo", r.r_lo},
                    {"r_hi", r.r_hi},
                    {"count", r.count},
                    {"accuracy", r.accuracy},
                    {"rate_bps_hz", r.rate_bps_hz}});
  j["distance"] = dist;
  json ovh = json::array();
  for (const OverheadRow& r : out.overhead)
    ovh.push_back({{"method", r.method},
                   {"M", r.M},
                   {"N", r.N},
                   {"codebook_size", r.codebook_size},
                   {"K", r.K},
                   {"B", r.B},
                   {"L", r.L},
                   {"overhead_slots", r.overhead_slots}});
  j["overhead"] = ovh;
  j["diagnostics"] = {{"codebook_size", out.diagnostics.codebook_size},
                      {"resampled_placements", out.diagnostics.resampled_placements},
                      {"power_approx_rel_error", out.diagnostics.power_approx_rel_error},
                      {"schedules", out.diagnostics.schedules},
                      {"eimb", "reconstructed baseline: interleave i mod B in every round, zero phases"}};
  return j.dump(2);
}

void emit(const SweepOutput& out, const std::string& stem) {
  if (out.table.rows.empty()) throw std::invalid_argument("refusing to emit an empty table");
  const std::string csv = stem + ".csv";
  const std::string js = stem + ".json";
  const std::string dist = stem + "_distance.csv";
  const std::string ovh = stem + "_overhead.csv";
  {
    std::ofstream os = open_out(csv);
    write_csv(os, out.table);
    check_written(os, csv);
  }
  {
    std::ofstream os = open_out(js);
    os << table_to_json(out) << '\n';
    check_written(os, js);
  }
  {
    std::ofstream os = open_out(dist);
    write_distance_csv(os, out.distance);
    check_written(os, dist);
  }
  {
    std::ofstream os = open_out(ovh);
    write_overhead_csv(os, out.overhead);
    check_written(os, ovh);
  }
}

} // namespace hmb
