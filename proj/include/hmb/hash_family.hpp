// SPDX-License-Identifier: Apache-2.0
//
// k-wise independent polynomial hashing of codeword indices into B buckets.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hmb/array_model.hpp"

namespace hmb {

inline constexpr int kMaxHashOrder = 8;

/// h(x) = (a_0 + a_1 x + ... + a_{k-1} x^{k-1} mod p) mod B over keys [0, universe).
struct HashFunction {
  std::vector<std::uint64_t> coefficients;
  std::uint64_t prime = 2;
  std::uint32_t buckets = 1;
  std::size_t universe = 0;

  int order() const { return static_cast<int>(coefficients.size()); }
  bool operator==(const HashFunction&) const = default;
};

bool is_prime(std::uint64_t n);
/// Smallest prime >= n.
std::uint64_t next_prime(std::uint64_t n);

/// Number of polynomials of order k over GF(p) whose non-constant coefficients are not all zero.
std::uint64_t family_size(std::uint64_t p, int k);

/// Uniform draw from the family over the smallest prime >= universe.
HashFunction sample_hash(Rng& rng, int k, std::size_t universe, std::uint32_t buckets);

/// Polynomial value modulo p, before range reduction.
std::uint64_t evaluate_field(const HashFunction& h, std::uint64_t x);

/// Bucket index in [0, B). Throws std::domain_error when x is outside the universe.
std::uint32_t evaluate(const HashFunction& h, std::size_t x);

enum class PartitionMode { raw, balanced };

struct BucketPartition {
  std::vector<std::vector<std::size_t>> buckets; ///< ascending keys per bucket
  PartitionMode mode = PartitionMode::balanced;
  std::optional<HashFunction> source;
  std::size_t reassigned = 0; ///< keys moved away from their hashed bucket

  std::size_t bucket_count() const { return buckets.size(); }
  std::size_t universe() const;
  /// bucket containing each key
  std::vector<std::uint32_t> lookup() const;
};

/// raw: bucket b = {x : h(x) = b}. balanced: keys beyond ceil(N/B) in a bucket are
/// moved, in ascending key order, to the currently least-full bucket.
BucketPartition partition(const HashFunction& h, PartitionMode mode = PartitionMode::balanced);

/// Checks disjointness and coverage of [0, universe); throws std::logic_error otherwise.
void check_partition(const BucketPartition& p, std::size_t universe);

struct CollisionStats {
  std::size_t trials = 0;
  double pairwise = 0.0;        ///< Pr[h(x1) = h(x2)], x1 != x2
  double joint = 0.0;           ///< Pr[h_l(x1) = h_l(x2) for all l = 1..L]
  double cross_ap = 0.0;        ///< Pr[h_i(g_i) = h_j(g_j)] for independent APs
  double cross_ap_bucket = 0.0; ///< Pr[h_i(g_i) = h_j(g_j) = 0]
};

/// Monte Carlo estimates over independent hash draws; needs at least 1e4 trials.
CollisionStats collision_stats(int k, std::size_t universe, std::uint32_t buckets, int rounds, std::size_t trials,
                               Rng& rng);

/// Lines "bucket_index: key,key,...".
void write_partition(std::ostream& os, const BucketPartition& p);
BucketPartition read_partition(std::istream& is);

} // namespace hmb
