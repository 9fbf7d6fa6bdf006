// SPDX-License-Identifier: Apache-2.0
//
// Multi-AP beam training: scan schedules, superimposed power measurements,
// soft-decision demultiplexing and voting, plus the exhaustive, hard-decision
// and equal-interval baselines and the round-count bound.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hmb/array_model.hpp"
#include "hmb/hash_family.hpp"
#include "hmb/multibeam.hpp"
#include "hmb/polar_codebook.hpp"

namespace hmb {

/// The L hash rounds of one AP.
struct ApSchedule {
  std::vector<HashFunction> hashes;
  std::vector<MultiArmCodebook> rounds;
};

/// Slot q = l * B + b for round l and bucket b (both zero-based).
struct ScanSchedule {
  int K = 0;
  int L = 0;
  std::uint32_t B = 0;
  std::size_t universe = 0;
  std::vector<ApSchedule> aps;

  std::size_t slots() const { return static_cast<std::size_t>(B) * static_cast<std::size_t>(L); }
  std::size_t slot(int l, std::uint32_t b) const { return static_cast<std::size_t>(l) * B + b; }
  int round_of(std::size_t q) const { return static_cast<int>(q / B); }
  std::uint32_t bucket_of(std::size_t q) const { return static_cast<std::uint32_t>(q % B); }
};

struct ScheduleOptions {
  int hash_order = 2;
  PartitionMode mode = PartitionMode::balanced;
  MultiArmOptions beams;
};

/// Each AP draws L pairwise distinct hash functions (duplicates are redrawn).
ScanSchedule build_schedule(int K, int L, std::uint32_t B, const SingleBeamCodebook& cb, Rng& rng,
                            const ScheduleOptions& options = {});

struct PowerMeasurements {
  int L = 0;
  std::uint32_t B = 0;
  std::vector<double> power; ///< index l * B + b

  double at(int l, std::uint32_t b) const { return power.at(static_cast<std::size_t>(l) * B + b); }
};

/// Noiseless slot amplitudes sqrt(P_0) h^H w of one AP over a sequence of rounds.
std::vector<cplx> slot_amplitudes(std::span<const MultiArmCodebook> rounds, const ChannelRealization& ch, double p0);

/// |amplitude + n|^2 with independent CN(0, noise_power) per slot.
PowerMeasurements measure(std::span<const cplx> amplitudes, int L, std::uint32_t B, double noise_power, Rng& rng);

/// All APs transmit simultaneously: P(l,b) = |sum_k sqrt(P_0) h_k^H w_k(l,b) + n|^2.
PowerMeasurements scan(const ScanSchedule& schedule, std::span<const ChannelRealization> channels, double p0,
                       double noise_power, Rng& rng);

enum class DemuxMode { plain, round_constrained };

/// Slot sets per AP rank (rank 0 is the strongest AP), each ascending in slot index.
/// plain: rank k takes the slots ranked kL..kL+L-1 by descending power.
/// round_constrained: ranks pick greedily in order, at most one slot per round.
/// Power ties go to the smaller slot index.
std::vector<std::vector<std::size_t>> soft_demux(const PowerMeasurements& P, int K, DemuxMode mode = DemuxMode::plain);

struct VoteResult {
  std::size_t gamma = 0;
  std::vector<std::uint32_t> tallies;
};

/// Every member of the bucket behind each slot gets a vote; ties go to the smallest index.
VoteResult vote(std::span<const BucketPartition> partitions, std::span<const std::size_t> slots);

/// Slots whose power reaches alpha times the round maximum.
std::vector<std::size_t> threshold_slots(const PowerMeasurements& P, double alpha);

/// Channel indices sorted by decreasing ||h|| (ties by index): the known AP labelling.
std::vector<std::size_t> gain_order(std::span<const ChannelRealization> channels);

/// Results are indexed by channel (AP), not by rank.
struct TrainingResult {
  std::vector<std::size_t> gamma;
  std::vector<std::vector<std::size_t>> slots;
  std::vector<std::vector<std::uint32_t>> tallies;
  std::size_t overhead = 0;
};

std::vector<BucketPartition> partitions_of(const ApSchedule& ap);

/// Soft decision from given measurements.
TrainingResult decide_soft(const ScanSchedule& schedule, const PowerMeasurements& P,
                           std::span<const ChannelRealization> channels, DemuxMode mode = DemuxMode::plain);

/// Hard decision from the same measurements: per round every slot at or above
/// alpha times the round maximum is active, and each AP votes over its own partitions.
TrainingResult decide_hard(const ScanSchedule& schedule, const PowerMeasurements& P,
                           std::span<const ChannelRealization> channels, double alpha = 0.5);

TrainingResult hmb_train(const ScanSchedule& schedule, std::span<const ChannelRealization> channels, double p0,
                         double noise_power, Rng& rng, DemuxMode mode = DemuxMode::plain);

TrainingResult hmb_hard_train(const ScanSchedule& schedule, std::span<const ChannelRealization> channels, double p0,
                              double noise_power, Rng& rng, double alpha = 0.5);

/// Each AP sweeps all N_C codewords in its own slots; argmax power.
TrainingResult exhaustive_train(const SingleBeamCodebook& cb, std::span<const ChannelRealization> channels, double p0,
                                double noise_power, Rng& rng);

/// Equal-interval multi-arm beams: bucket b = {i : i mod B = b} in every round,
/// phases zero. Repeated rounds only add votes; a bucket is never split, so the
/// smallest index of the winning bucket is returned.
struct EimbPlan {
  int L = 0;
  std::uint32_t B = 0;
  std::vector<BucketPartition> partitions;
  std::vector<MultiArmCodebook> rounds;
};

BucketPartition interleaved_partition(std::size_t universe, std::uint32_t B);
EimbPlan build_eimb_plan(const SingleBeamCodebook& cb, std::uint32_t B, int L);

/// APs sweep one after another, B*L slots each, with hard threshold decisions.
TrainingResult eimb_train(const EimbPlan& plan, std::span<const ChannelRealization> channels, double p0,
                          double noise_power, Rng& rng, double alpha = 0.5);

struct RoundBoundInputs {
  double candidates = 1.0; ///< M_s
  double p_max_s = 0, p_min_s = 0;
  double p_max_ns = 0, p_min_ns = 0;
  double t0 = 0;
  double t_s = 0;
  double t_ns = 0;
};

struct RoundBound {
  double l_signal = 0;
  double l_noise = 0;
  int rounds = 0; ///< ceil(l_signal + l_noise)
};

/// L^ns = ln(M_s) (P_max^ns - P_min^ns)^2 / (2 (T_0 - T^ns)^2), L^s alike.
/// Throws std::domain_error unless T^ns < T_0 < T^s and the power bounds are ordered.
RoundBound required_rounds(const RoundBoundInputs& in);

/// Two-level model: signal powers uniform in [p_min_s, p_max_s], noise uniform in
/// [p_min_ns, p_max_ns]. A trial fails when the L-round signal mean falls to T_0 or
/// the L-round noise mean rises to T_0.
double bound_error_rate(const RoundBoundInputs& in, int L, std::size_t trials, Rng& rng);

/// Text trace: slot powers, per-AP slots, gamma and nonzero tallies.
void write_trace(std::ostream& os, const PowerMeasurements& P, const TrainingResult& result);

} // namespace hmb
