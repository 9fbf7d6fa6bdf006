// SPDX-License-Identifier: Apache-2.0

#include "hmb/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "hmb/text_io.hpp"

namespace hmb {

namespace {

std::size_t argmax_votes(const std::vector<std::uint32_t>& tallies) {
  return static_cast<std::size_t>(std::max_element(tallies.begin(), tallies.end()) - tallies.begin());
}

void check_channels(const ScanSchedule& schedule, std::span<const ChannelRealization> channels) {
  if (channels.size() != schedule.aps.size()) throw std::domain_error("one channel per scheduled AP is required");
}

// Slot indices ordered by power, ties by index.
std::vector<std::size_t> ranked_slots(const PowerMeasurements& P) {
  std::vector<std::size_t> order(P.power.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return P.power[a] > P.power[b]; });
  return order;
}

VoteResult vote_hard(std::span<const BucketPartition> partitions, const std::vector<std::size_t>& active) {
  if (active.empty()) {
    VoteResult r;
    r.tallies.assign(partitions.empty() ? 0 : partitions.front().universe(), 0);
    return r;
  }
  return vote(partitions, active);
}

} // namespace

ScanSchedule build_schedule(int K, int L, std::uint32_t B, const SingleBeamCodebook& cb, Rng& rng,
                            const ScheduleOptions& options) {
  if (K < 0 || L < 1) throw std::domain_error("schedule needs K >= 0 and L >= 1");
  if (B < 2 || B > cb.size()) throw std::domain_error("bucket count must lie in [2, N_C]");
  ScanSchedule s;
  s.K = K;
  s.L = L;
  s.B = B;
  s.universe = cb.size();
  for (int k = 0; k < K; ++k) {
    ApSchedule ap;
    while (static_cast<int>(ap.hashes.size()) < L) {
      HashFunction h = sample_hash(rng, options.hash_order, cb.size(), B);
      if (std::find(ap.hashes.begin(), ap.hashes.end(), h) == ap.hashes.end()) ap.hashes.push_back(std::move(h));
    }
    for (const HashFunction& h : ap.hashes)
      ap.rounds.push_back(build_multiarm_codebook(partition(h, options.mode), cb, options.beams));
    s.aps.push_back(std::move(ap));
  }
  return s;
}

std::vector<cplx> slot_amplitudes(std::span<const MultiArmCodebook> rounds, const ChannelRealization& ch, double p0) {
  const double root = std::sqrt(p0);
  std::vector<cplx> amp;
  for (const MultiArmCodebook& mc : rounds)
    for (const MultiArmCodeword& w : mc.rows) amp.push_back(root * inner(ch.h, w.weights));
  return amp;
}

PowerMeasurements measure(std::span<const cplx> amplitudes, int L, std::uint32_t B, double noise_power, Rng& rng) {
  if (amplitudes.size() != static_cast<std::size_t>(L) * B) throw std::domain_error("amplitude count must equal B*L");
  PowerMeasurements P;
  P.L = L;
  P.B = B;
  P.power.reserve(amplitudes.size());
  for (const cplx& a : amplitudes) P.power.push_back(std::norm(a + complex_gaussian(rng, noise_power)));
  return P;
}

PowerMeasurements scan(const ScanSchedule& schedule, std::span<const ChannelRealization> channels, double p0,
                       double noise_power, Rng& rng) {
  check_channels(schedule, channels);
  std::vector<cplx> total(schedule.slots(), cplx{0, 0});
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const std::vector<cplx> amp = slot_amplitudes(schedule.aps[k].rounds, channels[k], p0);
    for (std::size_t q = 0; q < total.size(); ++q) total[q] += amp[q];
  }
  return measure(total, schedule.L, schedule.B, noise_power, rng);
}

std::vector<std::vector<std::size_t>> soft_demux(const PowerMeasurements& P, int K, DemuxMode mode) {
  const std::size_t L = static_cast<std::size_t>(P.L);
  if (K < 0 || static_cast<std::size_t>(K) * L > P.power.size()) throw std::domain_error("K*L exceeds the slot count");
  if (mode == DemuxMode::round_constrained && static_cast<std::uint32_t>(K) > P.B)
    throw std::domain_error("round-constrained demultiplexing needs B >= K");
  const std::vector<std::size_t> order = ranked_slots(P);
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(K));
  if (mode == DemuxMode::plain) {
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k].assign(order.begin() + static_cast<std::ptrdiff_t>(k * L),
                    order.begin() + static_cast<std::ptrdiff_t>((k + 1) * L));
  } else {
    std::vector<char> taken(P.power.size(), 0);
    for (auto& mine : out) {
      std::vector<char> round_used(L, 0);
      for (std::size_t q : order) {
        if (mine.size() == L) break;
        const std::size_t l = q / P.B;
        if (taken[q] || round_used[l]) continue;
        taken[q] = 1;
        round_used[l] = 1;
        mine.push_back(q);
      }
    }
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

VoteResult vote(std::span<const BucketPartition> partitions, std::span<const std::size_t> slots) {
  if (slots.empty()) throw std::domain_error("vote needs at least one slot");
  if (partitions.empty()) throw std::domain_error("vote needs the round partitions");
  const std::size_t B = partitions.front().bucket_count();
  VoteResult r;
  r.tallies.assign(partitions.front().universe(), 0);
  for (std::size_t q : slots) {
    const std::size_t l = q / B;
    if (l >= partitions.size()) throw std::out_of_range("slot beyond the last round");
    for (std::size_t key : partitions[l].buckets[q % B]) ++r.tallies.at(key);
  }
  r.gamma = argmax_votes(r.tallies);
  return r;
}

std::vector<std::size_t> threshold_slots(const PowerMeasurements& P, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw std::domain_error("threshold must lie in (0, 1)");
  std::vector<std::size_t> active;
  for (int l = 0; l < P.L; ++l) {
    double top = 0.0;
    for (std::uint32_t b = 0; b < P.B; ++b) top = std::max(top, P.at(l, b));
    for (std::uint32_t b = 0; b < P.B; ++b)
      if (P.at(l, b) >= alpha * top) active.push_back(static_cast<std::size_t>(l) * P.B + b);
  }
  return active;
}

std::vector<std::size_t> gain_order(std::span<const ChannelRealization> channels) {
  std::vector<double> gain;
  for (const auto& ch : channels) gain.push_back(norm(ch.h));
  std::vector<std::size_t> order(channels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gain[a] > gain[b]; });
  return order;
}

std::vector<BucketPartition> partitions_of(const ApSchedule& ap) {
  std::vector<BucketPartition> out;
  for (const MultiArmCodebook& mc : ap.rounds) out.push_back(mc.partition);
  return out;
}

TrainingResult decide_soft(const ScanSchedule& schedule, const PowerMeasurements& P,
                           std::span<const ChannelRealization> channels, DemuxMode mode) {
  check_channels(schedule, channels);
  const auto ranks = soft_demux(P, schedule.K, mode);
  const auto order = gain_order(channels);
  TrainingResult res;
  res.gamma.assign(channels.size(), 0);
  res.slots.resize(channels.size());
  res.tallies.resize(channels.size());
  res.overhead = schedule.slots();
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t k = order[rank];
    const auto parts = partitions_of(schedule.aps[k]);
    VoteResult v = vote(parts, ranks[rank]);
    res.gamma[k] = v.gamma;
    res.slots[k] = ranks[rank];
    res.tallies[k] = std::move(v.tallies);
  }
  return res;
}

TrainingResult decide_hard(const ScanSchedule& schedule, const PowerMeasurements& P,
                           std::span<const ChannelRealization> channels, double alpha) {
  check_channels(schedule, channels);
  const std::vector<std::size_t> active = threshold_slots(P, alpha);
  TrainingResult res;
  res.overhead = schedule.slots();
  for (std::size_t k = 0; k < channels.size(); ++k) {
    VoteResult v = vote_hard(partitions_of(schedule.aps[k]), active);
    res.gamma.push_back(v.gamma);
    res.slots.push_back(active);
    res.tallies.push_back(std::move(v.tallies));
  }
  return res;
}

TrainingResult hmb_train(const ScanSchedule& schedule, std::span<const ChannelRealization> channels, double p0,
                         double noise_power, Rng& rng, DemuxMode mode) {
  return decide_soft(schedule, scan(schedule, channels, p0, noise_power, rng), channels, mode);
}

TrainingResult hmb_hard_train(const ScanSchedule& schedule, std::span<const ChannelRealization> channels, double p0,
                              double noise_power, Rng& rng, double alpha) {
  return decide_hard(schedule, scan(schedule, channels, p0, noise_power, rng), channels, alpha);
}

TrainingResult exhaustive_train(const SingleBeamCodebook& cb, std::span<const ChannelRealization> channels, double p0,
                                double noise_power, Rng& rng) {
  TrainingResult res;
  res.overhead = cb.size() * channels.size();
  const double root = std::sqrt(p0);
  for (const ChannelRealization& ch : channels) {
    std::vector<cplx> amp;
    for (const CVec& row : cb.rows) amp.push_back(root * inner(ch.h, row));
    const PowerMeasurements P = measure(amp, 1, static_cast<std::uint32_t>(cb.size()), noise_power, rng);
    const std::size_t best =
        static_cast<std::size_t>(std::max_element(P.power.begin(), P.power.end()) - P.power.begin());
    res.gamma.push_back(best);
    res.slots.push_back({best});
    res.tallies.emplace_back();
  }
  return res;
}

BucketPartition interleaved_partition(std::size_t universe, std::uint32_t B) {
  if (B < 1 || B > universe) throw std::domain_error("bucket count must lie in [1, N_C]");
  BucketPartition p;
  p.mode = PartitionMode::raw;
  p.buckets.assign(B, {});
  for (std::size_t i = 0; i < universe; ++i) p.buckets[i % B].push_back(i);
  return p;
}

EimbPlan build_eimb_plan(const SingleBeamCodebook& cb, std::uint32_t B, int L) {
  if (L < 1) throw std::domain_error("EIMB needs at least one round");
  EimbPlan plan;
  plan.L = L;
  plan.B = B;
  MultiArmOptions fixed;
  fixed.optimize = false;
  const BucketPartition part = interleaved_partition(cb.size(), B);
  const MultiArmCodebook beams = build_multiarm_codebook(part, cb, fixed);
  plan.partitions.assign(static_cast<std::size_t>(L), part);
  plan.rounds.assign(static_cast<std::size_t>(L), beams);
  return plan;
}

TrainingResult eimb_train(const EimbPlan& plan, std::span<const ChannelRealization> channels, double p0,
                          double noise_power, Rng& rng, double alpha) {
  TrainingResult res;
  res.overhead = static_cast<std::size_t>(plan.B) * plan.L * channels.size();
  for (const ChannelRealization& ch : channels) {
    const PowerMeasurements P = measure(slot_amplitudes(plan.rounds, ch, p0), plan.L, plan.B, noise_power, rng);
    const std::vector<std::size_t> active = threshold_slots(P, alpha);
    VoteResult v = vote_hard(plan.partitions, active);
    res.gamma.push_back(v.gamma);
    res.slots.push_back(active);
    res.tallies.push_back(std::move(v.tallies));
  }
  return res;
}

RoundBound required_rounds(const RoundBoundInputs& in) {
  if (!(in.candidates >= 1)) throw std::domain_error("candidate count must be at least 1");
  if (!(in.p_min_s <= in.p_max_s) || !(in.p_min_ns <= in.p_max_ns)) throw std::domain_error("power bounds out of order");
  if (!(in.t_ns < in.t0 && in.t0 < in.t_s)) throw std::domain_error("thresholds must satisfy T_ns < T_0 < T_s");
  const double lnm = std::log(in.candidates);
  RoundBound r;
  const double ds = in.p_max_s - in.p_min_s;
  const double dn = in.p_max_ns - in.p_min_ns;
  r.l_signal = lnm * ds * ds / (2.0 * (in.t0 - in.t_s) * (in.t0 - in.t_s));
  r.l_noise = lnm * dn * dn / (2.0 * (in.t0 - in.t_ns) * (in.t0 - in.t_ns));
  r.rounds = static_cast<int>(std::ceil(r.l_signal + r.l_noise));
  return r;
}

double bound_error_rate(const RoundBoundInputs& in, int L, std::size_t trials, Rng& rng) {
  if (L < 1 || trials < 1) throw std::domain_error("need L >= 1 and at least one trial");
  std::uniform_real_distribution<double> sig(in.p_min_s, in.p_max_s);
  std::uniform_real_distribution<double> noi(in.p_min_ns, in.p_max_ns);
  std::size_t errors = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    double s = 0, n = 0;
    for (int l = 0; l < L; ++l) {
      s += sig(rng);
      n += noi(rng);
    }
    errors += (s / L <= in.t0) || (n / L >= in.t0);
  }
  return static_cast<double>(errors) / static_cast<double>(trials);
}

void write_trace(std::ostream& os, const PowerMeasurements& P, const TrainingResult& result) {
  os << "slots " << P.power.size() << '\n';
  for (std::size_t q = 0; q < P.power.size(); ++q)
    os << "power " << q << ' ' << q / P.B << ' ' << q % P.B << ' ' << format_real(P.power[q]) << '\n';
  for (std::size_t k = 0; k < result.gamma.size(); ++k) {
    os << "ap " << k << " gamma " << result.gamma[k] << " slots";
    for (std::size_t q : result.slots[k]) os << ' ' << q;
    os << '\n';
    if (k < result.tallies.size())
      for (std::size_t i = 0; i < result.tallies[k].size(); ++i)
        if (result.tallies[k][i]) os << "tally " << k << ' ' << i << ' ' << result.tallies[k][i] << '\n';
  }
  os << "overhead " << result.overhead << '\n';
}

} // namespace hmb
