// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hmb/protocol.hpp"

using namespace hmb;

namespace {

const ArrayConfig& desk() {
  static const ArrayConfig c = ArrayConfig::half_wavelength(4, 32, 28e9);
  return c;
}

const SingleBeamCodebook& dft() {
  static const SingleBeamCodebook cb = dft_codebook(desk());
  return cb;
}

PowerMeasurements make_power(int L, std::uint32_t B, std::vector<double> p) {
  PowerMeasurements P;
  P.L = L;
  P.B = B;
  P.power = std::move(p);
  return P;
}

ScheduleOptions fixed_beams() {
  ScheduleOptions o;
  o.beams.optimize = false;
  return o;
}

// A far-field user exactly on DFT codeword s.
ChannelRealization on_codeword(std::size_t s, int ap = 0) {
  PolarPoint p = dft().points[s].polar();
  p.r = 1e6;
  return los_channel(desk(), p, 1e-7, ap);
}

BucketPartition manual(std::vector<std::vector<std::size_t>> b) {
  BucketPartition p;
  p.buckets = std::move(b);
  return p;
}

} // namespace

TEST_CASE("slot indexing") {
  ScanSchedule s;
  s.L = 3;
  s.B = 8;
  CHECK(s.slots() == 24);
  CHECK(s.slot(2, 5) == 21);
  CHECK(s.round_of(21) == 2);
  CHECK(s.bucket_of(21) == 5);
}

TEST_CASE("plain demultiplexing ranks slots by power") {
  const auto P = make_power(2, 3, {5, 1, 3, 2, 6, 4});
  const auto r = soft_demux(P, 2);
  CHECK(r[0] == std::vector<std::size_t>{0, 4});
  CHECK(r[1] == std::vector<std::size_t>{2, 5});
  // ties go to the lower slot
  const auto T = make_power(1, 3, {1, 1, 1});
  CHECK(soft_demux(T, 1)[0] == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(soft_demux(P, 4), std::domain_error);
}

TEST_CASE("round-constrained demultiplexing takes one slot per round") {
  const auto P = make_power(2, 3, {9, 8, 1, 2, 3, 1});
  CHECK(soft_demux(P, 2, DemuxMode::plain)[0] == std::vector<std::size_t>{0, 1});
  const auto r = soft_demux(P, 2, DemuxMode::round_constrained);
  CHECK(r[0] == std::vector<std::size_t>{0, 4});
  CHECK(r[1] == std::vector<std::size_t>{1, 3});
  const auto Q = make_power(2, 2, {1, 2, 3, 4});
  CHECK_THROWS_AS(soft_demux(Q, 3, DemuxMode::round_constrained), std::domain_error);
}

TEST_CASE("vote worked example") {
  // 12 keys, 3 buckets, 3 rounds; key 9 is the only key in all chosen buckets.
  const std::vector<BucketPartition> parts{
      manual({{0, 3, 6, 9}, {1, 4, 7, 10}, {2, 5, 8, 11}}),
      manual({{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}}),
      manual({{1, 5, 9, 11}, {0, 2, 4, 6}, {3, 7, 8, 10}}),
  };
  const std::vector<std::size_t> slots{0, 5, 6};
  const VoteResult v = vote(parts, slots);
  CHECK(v.gamma == 9);
  CHECK(v.tallies[9] == 3);
  CHECK(v.tallies[11] == 2);
  CHECK(v.tallies[0] == 1);
  CHECK(v.tallies[4] == 0);
  // no clear winner: smallest index
  CHECK(vote(parts, std::vector<std::size_t>{0}).gamma == 0);
  CHECK_THROWS(vote(parts, std::vector<std::size_t>{}));
  CHECK_THROWS(vote(parts, std::vector<std::size_t>{9}));
}

TEST_CASE("vote equals the intersection of the chosen buckets") {
  Rng rng(5);
  const std::size_t n = 168;
  for (int t = 0; t < 200; ++t) {
    const int L = 1 + t % 6;
    std::vector<BucketPartition> parts;
    for (int l = 0; l < L; ++l) parts.push_back(partition(sample_hash(rng, 2, n, 16)));
    const std::size_t g = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    std::vector<std::size_t> slots;
    std::set<std::size_t> inter;
    for (std::size_t x = 0; x < n; ++x) inter.insert(x);
    for (int l = 0; l < L; ++l) {
      const auto where = parts[l].lookup();
      slots.push_back(static_cast<std::size_t>(l) * 16 + where[g]);
      std::set<std::size_t> keep;
      for (std::size_t x : parts[l].buckets[where[g]])
        if (inter.count(x)) keep.insert(x);
      inter = keep;
    }
    const VoteResult v = vote(parts, slots);
    CHECK(v.gamma == *inter.begin());
    CHECK(v.tallies[g] == static_cast<std::uint32_t>(L));
    for (std::size_t x = 0; x < n; ++x) CHECK((v.tallies[x] == static_cast<std::uint32_t>(L)) == (inter.count(x) == 1));
  }
}

TEST_CASE("threshold keeps slots near the round maximum") {
  const auto P = make_power(2, 4, {1.0, 0.5, 0.49, 0.2, 0.1, 0.3, 0.6, 0.0});
  CHECK(threshold_slots(P, 0.5) == std::vector<std::size_t>{0, 1, 5, 6});
  CHECK_THROWS(threshold_slots(P, 1.0));
  CHECK_THROWS(threshold_slots(P, 0.0));
}

TEST_CASE("gain order sorts APs by channel norm") {
  std::vector<ChannelRealization> ch{los_channel(desk(), {3.0, 1, 1}, 1e-7, 0), los_channel(desk(), {1.0, 1, 1}, 1e-7, 1),
                                     los_channel(desk(), {2.0, 1, 1}, 1e-7, 2)};
  CHECK(gain_order(ch) == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("schedules hold distinct hashes per AP") {
  Rng rng(9);
  const ScanSchedule s = build_schedule(3, 4, 8, dft(), rng, fixed_beams());
  CHECK(s.K == 3);
  CHECK(s.universe == 104);
  REQUIRE(s.aps.size() == 3);
  for (const ApSchedule& ap : s.aps) {
    CHECK(ap.rounds.size() == 4);
    for (std::size_t i = 0; i < ap.hashes.size(); ++i)
      for (std::size_t j = i + 1; j < ap.hashes.size(); ++j) CHECK_FALSE(ap.hashes[i] == ap.hashes[j]);
    for (const MultiArmCodebook& mc : ap.rounds) CHECK_NOTHROW(check_partition(mc.partition, 104));
  }
  CHECK_THROWS(build_schedule(1, 2, 1, dft(), rng));
  CHECK_THROWS(build_schedule(1, 2, 105, dft(), rng));
}

TEST_CASE("noiseless scans add the AP amplitudes") {
  Rng rng(13);
  const ScanSchedule s = build_schedule(2, 3, 8, dft(), rng, fixed_beams());
  const std::vector<ChannelRealization> ch{on_codeword(10, 0), on_codeword(70, 1)};
  const PowerMeasurements P = scan(s, ch, 0.03, 0.0, rng);
  const auto a0 = slot_amplitudes(s.aps[0].rounds, ch[0], 0.03);
  const auto a1 = slot_amplitudes(s.aps[1].rounds, ch[1], 0.03);
  for (std::size_t q = 0; q < s.slots(); ++q) CHECK(P.power[q] == doctest::Approx(std::norm(a0[q] + a1[q])));
  CHECK_THROWS(scan(s, std::span(ch).first(1), 0.03, 0.0, rng));
  CHECK_THROWS(measure(a0, 2, 8, 0.0, rng));
}

TEST_CASE("noiseless single-AP training finds the codeword bucket intersection") {
  Rng rng(17);
  for (std::size_t g : {0u, 33u, 77u, 103u}) {
    const ScanSchedule s = build_schedule(1, 4, 8, dft(), rng, fixed_beams());
    const std::vector<ChannelRealization> ch{on_codeword(g)};
    const TrainingResult soft = hmb_train(s, ch, 0.03, 0.0, rng);
    const TrainingResult hard = hmb_hard_train(s, ch, 0.03, 0.0, rng);
    CHECK(soft.tallies[0][g] == 4);
    CHECK(soft.tallies[0][soft.gamma[0]] == 4);
    CHECK(soft.gamma[0] <= g);
    CHECK(hard.gamma[0] == soft.gamma[0]);
    CHECK(soft.overhead == 32);
    // the active slots are exactly the buckets holding g
    for (std::size_t q : hard.slots[0]) {
      const auto& part = s.aps[0].rounds[q / 8].partition;
      const auto& b = part.buckets[q % 8];
      CHECK(std::find(b.begin(), b.end(), g) != b.end());
    }
  }
}

TEST_CASE("soft decisions go to APs by gain") {
  const ScanSchedule s = [] {
    Rng rng(23);
    return build_schedule(2, 2, 8, dft(), rng, fixed_beams());
  }();
  const std::vector<ChannelRealization> ch{on_codeword(5, 0), on_codeword(60, 1)};
  // strongest slots first: AP 1 is made stronger by hand.
  std::vector<double> p(16, 0.0);
  const auto w0 = s.aps[0].rounds[0].partition.lookup(), w0b = s.aps[0].rounds[1].partition.lookup();
  const auto w1 = s.aps[1].rounds[0].partition.lookup(), w1b = s.aps[1].rounds[1].partition.lookup();
  p[w1[60]] = 10;
  p[8 + w1b[60]] = 9;
  p[w0[5]] += 2;
  p[8 + w0b[5]] += 1;
  const std::vector<ChannelRealization> order_ch{los_channel(desk(), {2.0, 1, 1}, 1e-7, 0),
                                                 los_channel(desk(), {1.0, 1, 1}, 1e-7, 1)};
  if (w0[5] != w1[60] && w0b[5] != w1b[60]) {
    const TrainingResult r = decide_soft(s, make_power(2, 8, p), order_ch);
    CHECK(r.tallies[1][60] == 2);
    CHECK(r.tallies[0][5] == 2);
  }
}

TEST_CASE("exhaustive search picks the strongest codeword") {
  Rng rng(29);
  const SingleBeamCodebook cb = build_codebook(desk(), {});
  std::vector<ChannelRealization> ch{los_channel(desk(), {1.3, 1.0, 1.2}, 1e-7, 0), los_channel(desk(), {3.1, 2.0, 1.7}, 1e-7, 1)};
  const TrainingResult r = exhaustive_train(cb, ch, 0.03, 0.0, rng);
  CHECK(r.overhead == 2 * cb.size());
  CHECK(r.gamma[0] == best_codeword(cb, ch[0].h));
  CHECK(r.gamma[1] == best_codeword(cb, ch[1].h));
}

TEST_CASE("equal-interval beams") {
  const BucketPartition p = interleaved_partition(10, 4);
  CHECK(p.buckets[0] == std::vector<std::size_t>{0, 4, 8});
  CHECK(p.buckets[3] == std::vector<std::size_t>{3, 7});
  CHECK_THROWS(interleaved_partition(3, 4));
  const EimbPlan plan = build_eimb_plan(dft(), 8, 3);
  CHECK(plan.rounds.size() == 3);
  for (const auto& r : plan.rounds)
    for (const auto& w : r.rows)
      for (double ph : w.phases) CHECK(ph == 0.0);
  Rng rng(31);
  const std::vector<ChannelRealization> ch{on_codeword(45, 0), on_codeword(12, 1)};
  const TrainingResult r = eimb_train(plan, ch, 0.03, 0.0, rng);
  CHECK(r.overhead == 8 * 3 * 2);
  CHECK(r.gamma[0] == 45 % 8);
  CHECK(r.gamma[1] == 12 % 8);
  CHECK(r.tallies[0][45] == 3);
}

TEST_CASE("required rounds") {
  RoundBoundInputs in{100, 1.2, 0.8, 0.15, 0.05, 0.55, 1.0, 0.1};
  const RoundBound b = required_rounds(in);
  CHECK(b.l_signal == doctest::Approx(std::log(100.0) * 0.16 / (2 * 0.45 * 0.45)));
  CHECK(b.l_signal == doctest::Approx(1.8193).epsilon(1e-4));
  CHECK(b.l_noise == doctest::Approx(0.1137).epsilon(1e-3));
  CHECK(b.rounds == 2);
  // grows with ln M_s and with the power spread
  RoundBoundInputs more = in;
  more.candidates = 10000;
  CHECK(required_rounds(more).l_signal == doctest::Approx(2 * b.l_signal));
  more = in;
  more.p_min_s = 0.4;
  CHECK(required_rounds(more).l_signal == doctest::Approx(4 * b.l_signal));
  in.candidates = 1;
  CHECK(required_rounds(in).rounds == 0);
  RoundBoundInputs bad{100, 1.2, 0.8, 0.15, 0.05, 1.5, 1.0, 0.1};
  CHECK_THROWS_AS(required_rounds(bad), std::domain_error);
  bad = {100, 0.8, 1.2, 0.15, 0.05, 0.55, 1.0, 0.1};
  CHECK_THROWS_AS(required_rounds(bad), std::domain_error);
}

TEST_CASE("bound error rate matches the single-round probability") {
  Rng rng(37);
  const RoundBoundInputs in{100, 1.2, 0.4, 0.15, 0.05, 0.55, 1.0, 0.1};
  const std::size_t n = 200000;
  const double e1 = bound_error_rate(in, 1, n, rng);
  const double want = 0.15 / 0.8;
  CHECK(std::abs(e1 - want) < 4 * std::sqrt(want * (1 - want) / n));
  const double e4 = bound_error_rate(in, 4, n, rng);
  CHECK(e4 < e1);
  const RoundBoundInputs easy{100, 1.2, 0.8, 0.15, 0.05, 0.55, 1.0, 0.1};
  CHECK(bound_error_rate(easy, 1, 1000, rng) == 0.0);
  CHECK_THROWS(bound_error_rate(in, 0, 10, rng));
}

TEST_CASE("trace lists powers and decisions") {
  const auto P = make_power(1, 2, {0.25, 1.0});
  TrainingResult r;
  r.gamma = {1};
  r.slots = {{1}};
  r.tallies = {{0, 1}};
  r.overhead = 2;
  std::ostringstream os;
  write_trace(os, P, r);
  const std::string s = os.str();
  CHECK(s.find("power 1 0 1 1") != std::string::npos);
  CHECK(s.find("ap 0 gamma 1 slots 1") != std::string::npos);
  CHECK(s.find("tally 0 1 1") != std::string::npos);
  CHECK(s.find("overhead 2") != std::string::npos);
}
