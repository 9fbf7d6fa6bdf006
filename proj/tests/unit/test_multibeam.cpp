// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <iterator>
#include <sstream>

#include "hmb/multibeam.hpp"

using namespace hmb;

namespace {

const ArrayConfig& desk() {
  static const ArrayConfig c = ArrayConfig::half_wavelength(4, 32, 28e9);
  return c;
}

const SingleBeamCodebook& desk_cb() {
  static const SingleBeamCodebook cb = build_codebook(desk(), {});
  return cb;
}

std::vector<std::size_t> random_bucket(Rng& rng, std::size_t V, std::size_t n) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(V);
  return all;
}

std::vector<double> random_phases(Rng& rng, std::size_t V) {
  std::uniform_real_distribution<double> U(0, 2 * kPi);
  std::vector<double> ph(V);
  for (double& p : ph) p = U(rng);
  return ph;
}

} // namespace

TEST_CASE("single-arm beams reduce to the codeword") {
  const SingleBeamCodebook& cb = desk_cb();
  const std::vector<std::size_t> bucket{17};
  const std::vector<double> phases{0.0};
  const MultiArmCodeword w = synthesize(bucket, cb, phases);
  for (std::size_t e = 0; e < w.weights.size(); ++e) CHECK(std::abs(w.weights[e] - cb.rows[17][e]) < 1e-15);
  const PolarPoint pt{1.1, 1.2, 1.4};
  CHECK(pattern_multi(pt, phases, bucket, cb) == doctest::Approx(pattern_single(pt, 17, cb)));
  CHECK(deviation(phases, bucket, cb) == 0.0);
  const PhaseResult r = optimize_phases(bucket, cb);
  CHECK(r.phases == phases);
  CHECK(r.deviation == 0.0);
}

TEST_CASE("synthesized weights follow the arm sum") {
  const SingleBeamCodebook& cb = desk_cb();
  Rng rng(4);
  const auto bucket = random_bucket(rng, 5, cb.size());
  const auto phases = random_phases(rng, 5);
  const MultiArmCodeword w = synthesize(bucket, cb, phases);
  CHECK(w.arms() == 5);
  for (std::size_t e = 0; e < w.weights.size(); e += 9) {
    cplx want{0, 0};
    for (std::size_t i = 0; i < 5; ++i) want += std::exp(cplx{0, phases[i]}) * cb.rows[bucket[i]][e];
    CHECK(std::abs(w.weights[e] - want / std::sqrt(5.0)) < 1e-14);
  }
  CHECK_THROWS(synthesize(bucket, cb, std::vector<double>(4, 0.0)));
  CHECK_THROWS(synthesize(std::vector<std::size_t>{}, cb, std::vector<double>{}));
  CHECK_THROWS(synthesize(std::vector<std::size_t>{cb.size()}, cb, std::vector<double>{0.0}));
}

TEST_CASE("orthogonal arms keep unit norm") {
  const SingleBeamCodebook dft = dft_codebook(desk());
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto bucket = random_bucket(rng, 2 + t % 7, dft.size());
    const MultiArmCodeword w = synthesize(bucket, dft, random_phases(rng, bucket.size()));
    CHECK(norm(w.weights) == doctest::Approx(1.0).epsilon(1e-10));
  }
  // Grid zeros: a DFT codeword sees nothing at the direction of another one.
  const PolarPoint far = dft.points[3].polar();
  CHECK(pattern_single(far, 40, dft) < 1e-10);
  CHECK(pattern_single(far, 3, dft) == doctest::Approx(1.0));
}

TEST_CASE("received power equals the exact pattern identity") {
  const SingleBeamCodebook& cb = desk_cb();
  Rng rng(12);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 40; ++t) {
    const auto bucket = random_bucket(rng, 1 + t % 11, cb.size());
    const auto phases = random_phases(rng, bucket.size());
    const MultiArmCodeword w = synthesize(bucket, cb, phases);
    const PolarPoint user{0.5 + 5 * U(rng), kPi * U(rng), 0.3 + 2.5 * U(rng)};
    const ChannelRealization ch = los_channel(desk(), user, 1e-7);
    const double p = received_power(ch, w.weights, 0.03);
    const double W = pattern_multi(user, phases, bucket, cb);
    CHECK(p == doctest::Approx(pattern_power(0.03, ch.los_gain, 128, bucket.size(), W)).epsilon(1e-9));
    // triangle inequality and the normalized-pattern bound
    double mean_single = 0;
    for (std::size_t s : bucket) mean_single += pattern_single(user, s, cb);
    CHECK(W <= mean_single / bucket.size() + 1e-12);
    CHECK(W <= 1.0 + 1e-12);
  }
  CHECK(approximate_power(2.0, 0.5, 128, 0.25) == doctest::Approx(2.0 * 128 * 0.25 * 0.25));
}

TEST_CASE("pattern and deviation are invariant to a common phase") {
  const SingleBeamCodebook& cb = desk_cb();
  Rng rng(21);
  const auto bucket = random_bucket(rng, 6, cb.size());
  auto phases = random_phases(rng, 6);
  const DeviationModel model(bucket, cb);
  const double d0 = model.deviation(phases);
  const PolarPoint pt{2.0, 1.0, 1.2};
  const double w0 = pattern_multi(pt, phases, bucket, cb);
  for (double& p : phases) p += 1.234;
  CHECK(model.deviation(phases) == doctest::Approx(d0).epsilon(1e-12));
  CHECK(pattern_multi(pt, phases, bucket, cb) == doctest::Approx(w0).epsilon(1e-12));
  CHECK(deviation(phases, bucket, cb) == doctest::Approx(d0).epsilon(1e-12));
}

TEST_CASE("arm sweeps agree with full evaluation") {
  const SingleBeamCodebook& cb = desk_cb();
  Rng rng(31);
  const auto bucket = random_bucket(rng, 7, cb.size());
  const DeviationModel model(bucket, cb);
  const auto phases = random_phases(rng, 7);
  const std::vector<double> cand{0.0, 0.7, 2.0, 4.5};
  const auto vals = model.sweep_arm(phases, 3, cand);
  for (std::size_t c = 0; c < cand.size(); ++c) {
    auto p = phases;
    p[3] = cand[c];
    CHECK(vals[c] == doctest::Approx(model.deviation(p)).epsilon(1e-12));
  }
  CHECK_THROWS(model.sweep_arm(phases, 7, cand));
  CHECK_THROWS(model.deviation(std::vector<double>(3, 0.0)));
}

TEST_CASE("two-arm search reaches the best grid phase") {
  const SingleBeamCodebook& cb = desk_cb();
  Rng rng(41);
  for (int t = 0; t < 5; ++t) {
    const auto bucket = random_bucket(rng, 2, cb.size());
    const DeviationModel model(bucket, cb);
    const PhaseResult r = optimize_phases(model);
    double grid_best = model.deviation(std::vector<double>{0.0, 0.0});
    double dense_best = grid_best;
    for (int g = 0; g < 16; ++g) grid_best = std::min(grid_best, model.deviation(std::vector<double>{0.0, 2 * kPi * g / 16}));
    for (int g = 0; g < 360; ++g) dense_best = std::min(dense_best, model.deviation(std::vector<double>{0.0, 2 * kPi * g / 360}));
    CHECK(r.deviation == doctest::Approx(grid_best).epsilon(1e-12));
    CHECK(r.deviation >= dense_best - 1e-12);
    CHECK(r.phases[0] == 0.0);
  }
}

TEST_CASE("coordinate descent never gets worse") {
  const SingleBeamCodebook& cb = desk_cb();
  Rng rng(51);
  const auto bucket = random_bucket(rng, 9, cb.size());
  const DeviationModel model(bucket, cb);
  const PhaseSearch search{16, 3, 3};
  const PhaseResult r = optimize_phases(model, search);
  CHECK(r.deviation <= r.zero_deviation);
  CHECK(r.deviation == doctest::Approx(model.deviation(r.phases)).epsilon(1e-12));
  REQUIRE(r.sweep_history.size() == 9);
  for (int rs = 0; rs < 3; ++rs)
    for (int s = 1; s < 3; ++s) CHECK(r.sweep_history[rs * 3 + s] <= r.sweep_history[rs * 3 + s - 1] + 1e-15);
  CHECK(r.sweep_history[2] <= r.zero_deviation);
  // deterministic in the bucket
  const PhaseResult again = optimize_phases(bucket, cb, search);
  CHECK(again.phases == r.phases);
  // budget caps the work
  PhaseSearch tight = search;
  tight.budget = 40;
  CHECK(optimize_phases(model, tight).evaluations <= 40);
  CHECK_THROWS(optimize_phases(model, PhaseSearch{0, 1, 1}));
}

TEST_CASE("main lobes tile the distance axis") {
  // a closer inner edge gives several rings per direction
  CodebookOptions deep;
  deep.r_min = 0.05;
  const SingleBeamCodebook cb = build_codebook(desk(), deep);
  int checked = 0;
  for (std::size_t s = 0; s < cb.size(); ++s) {
    const SamplingPoint& p = cb.points[s];
    const LobeRegion lobe = main_lobe(s, cb);
    CHECK(lobe.cos_phi_hi - lobe.cos_phi_lo <= 2.0 / 4 + 1e-12);
    CHECK(lobe.u_lo <= p.u);
    CHECK(lobe.u_hi >= p.u);
    CHECK(lobe.r_lo >= cb.r_min - 1e-12);
    if (!is_far_field(p.r)) {
      CHECK(lobe.r_lo <= p.r);
      CHECK(lobe.r_hi >= p.r);
    }
    // ring j+1 sits right after ring j, and the boundary is the midpoint in r
    if (s + 1 < cb.size() && cb.points[s + 1].same_direction(p) && p.ring_index >= 2) {
      const LobeRegion next = main_lobe(s + 1, cb);
      if (next.r_lo > cb.r_min) {
        CHECK(next.r_hi == doctest::Approx(lobe.r_lo).epsilon(1e-12));
      }
      CHECK(lobe.r_lo == doctest::Approx((p.r + cb.points[s + 1].r) / 2).epsilon(1e-12));
      ++checked;
    }
  }
  CHECK(checked > 0);
  CHECK_THROWS_AS(main_lobe(cb.size(), cb), std::out_of_range);
}

TEST_CASE("lobe samples stay inside the lobe") {
  LobeRegion lobe{0.0, 0.25, -0.1, 0.1, 1.0, 4.0};
  const auto pts = lobe_samples(lobe, 6);
  CHECK(pts.size() == 216);
  for (const PolarPoint& p : pts) {
    CHECK(p.r > 1.0);
    CHECK(p.r < 4.0);
    const double w = std::cos(p.phi), u = std::cos(p.theta) * std::sin(p.phi);
    CHECK(w > 0.0);
    CHECK(w < 0.25);
    CHECK(std::abs(u) < 0.1);
  }
  LobeRegion far{0.0, 0.25, -0.1, 0.1, 2.0, kFarField};
  const auto fp = lobe_samples(far, 4);
  for (const PolarPoint& p : fp) CHECK(p.r > 2.0);
  // invisible corners are dropped
  LobeRegion edge{0.9, 1.0, 0.5, 0.9, 1.0, 2.0};
  CHECK(lobe_samples(edge, 4).empty());
  CHECK_THROWS_AS(lobe_samples(lobe, 3), std::domain_error);
}

TEST_CASE("multi-arm codebook follows the partition") {
  const SingleBeamCodebook& cb = desk_cb();
  Rng rng(61);
  const BucketPartition part = partition(sample_hash(rng, 2, cb.size(), 16));
  MultiArmOptions opts;
  opts.optimize = false;
  const MultiArmCodebook mc = build_multiarm_codebook(part, cb, opts);
  REQUIRE(mc.size() == 16);
  for (std::size_t b = 0; b < 16; ++b) {
    CHECK(mc.rows[b].bucket == part.buckets[b]);
    for (double ph : mc.rows[b].phases) CHECK(ph == 0.0);
  }
  std::stringstream ss;
  write_multiarm(ss, mc, cb);
  std::string header;
  std::getline(ss, header);
  CHECK(header.rfind("4 32 ", 0) == 0);
  CHECK(header.substr(header.size() - 3) == " 16");
  std::string row;
  std::getline(ss, row);
  std::istringstream rs(row);
  std::vector<std::string> f{std::istream_iterator<std::string>(rs), {}};
  CHECK(f.size() == 1 + 256 + 1 + 2 * part.buckets[0].size());
  BucketPartition small;
  small.buckets = {{0, 1}};
  CHECK_THROWS(build_multiarm_codebook(small, cb, opts));
}
