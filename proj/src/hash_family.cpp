// SPDX-License-Identifier: Apache-2.0

#include "hmb/hash_family.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hmb/text_io.hpp"

namespace hmb {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  while (!is_prime(n)) ++n;
  return n;
}

std::uint64_t family_size(std::uint64_t p, int k) {
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) total *= p;
  return total - p;
}

HashFunction sample_hash(Rng& rng, int k, std::size_t universe, std::uint32_t buckets) {
  if (k < 2 || k > kMaxHashOrder) throw std::domain_error("hash order must lie in [2, 8]");
  if (universe < 2) throw std::domain_error("hash universe needs at least two keys");
  if (buckets < 1 || buckets > universe) throw std::domain_error("bucket count must lie in [1, universe]");
  HashFunction h;
  h.prime = next_prime(universe);
  h.buckets = buckets;
  h.universe = universe;
  h.coefficients.resize(static_cast<std::size_t>(k));
  std::uniform_int_distribution<std::uint64_t> coeff(0, h.prime - 1);
  for (;;) {
    for (auto& a : h.coefficients) a = coeff(rng);
    if (std::any_of(h.coefficients.begin() + 1, h.coefficients.end(), [](std::uint64_t a) { return a != 0; })) break;
  }
  return h;
}

std::uint64_t evaluate_field(const HashFunction& h, std::uint64_t x) {
  using u128 = unsigned __int128;
  std::uint64_t acc = 0;
  const std::uint64_t xr = x % h.prime;
  for (auto it = h.coefficients.rbegin(); it != h.coefficients.rend(); ++it)
    acc = static_cast<std::uint64_t>((static_cast<u128>(acc) * xr + *it) % h.prime);
  return acc;
}

std::uint32_t evaluate(const HashFunction& h, std::size_t x) {
  if (x >= h.universe) throw std::domain_error("hash key " + std::to_string(x) + " outside the universe");
  return static_cast<std::uint32_t>(evaluate_field(h, x) % h.buckets);
}

std::size_t BucketPartition::universe() const {
  std::size_t n = 0;
  for (const auto& b : buckets) n += b.size();
  return n;
}

std::vector<std::uint32_t> BucketPartition::lookup() const {
  std::vector<std::uint32_t> where(universe(), 0);
  for (std::size_t b = 0; b < buckets.size(); ++b)
    for (std::size_t key : buckets[b]) where.at(key) = static_cast<std::uint32_t>(b);
  return where;
}

BucketPartition partition(const HashFunction& h, PartitionMode mode) {
  BucketPartition out;
  out.mode = mode;
  out.source = h;
  out.buckets.assign(h.buckets, {});
  const std::size_t cap = (h.universe + h.buckets - 1) / h.buckets;
  std::vector<std::size_t> overflow;
  for (std::size_t x = 0; x < h.universe; ++x) {
    auto& bucket = out.buckets[evaluate(h, x)];
    if (mode == PartitionMode::balanced && bucket.size() >= cap) overflow.push_back(x);
    else bucket.push_back(x);
  }
  for (std::size_t x : overflow) {
    auto least = std::min_element(out.buckets.begin(), out.buckets.end(),
                                  [](const auto& a, const auto& b) { return a.size() < b.size(); });
    least->push_back(x);
  }
  out.reassigned = overflow.size();
  for (auto& b : out.buckets) std::sort(b.begin(), b.end());
  return out;
}

void check_partition(const BucketPartition& p, std::size_t universe) {
  std::vector<int> seen(universe, 0);
  for (const auto& b : p.buckets)
    for (std::size_t key : b) {
      if (key >= universe) throw std::logic_error("partition key outside the universe");
      if (seen[key]++) throw std::logic_error("partition key " + std::to_string(key) + " appears twice");
    }
  for (std::size_t x = 0; x < universe; ++x)
    if (!seen[x]) throw std::logic_error("partition misses key " + std::to_string(x));
}

CollisionStats collision_stats(int k, std::size_t universe, std::uint32_t buckets, int rounds, std::size_t trials,
                               Rng& rng) {
  if (trials < 10000) throw std::domain_error("collision statistics need at least 1e4 trials");
  if (rounds < 1) throw std::domain_error("need at least one round");
  std::uniform_int_distribution<std::size_t> key(0, universe - 1);
  std::size_t pair_hits = 0, joint_hits = 0, cross_hits = 0, cross_zero = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t x1 = key(rng);
    std::size_t x2 = key(rng);
    while (x2 == x1) x2 = key(rng);

    const HashFunction h = sample_hash(rng, k, universe, buckets);
    pair_hits += evaluate(h, x1) == evaluate(h, x2);

    bool all = true;
    for (int l = 0; l < rounds; ++l) {
      const HashFunction hl = sample_hash(rng, k, universe, buckets);
      all = all && evaluate(hl, x1) == evaluate(hl, x2);
    }
    joint_hits += all;

    const HashFunction hi = sample_hash(rng, k, universe, buckets);
    const HashFunction hj = sample_hash(rng, k, universe, buckets);
    const std::uint32_t bi = evaluate(hi, key(rng));
    const std::uint32_t bj = evaluate(hj, key(rng));
    cross_hits += bi == bj;
    cross_zero += bi == 0 && bj == 0;
  }
  const double n = static_cast<double>(trials);
  return {trials, pair_hits / n, joint_hits / n, cross_hits / n, cross_zero / n};
}

void write_partition(std::ostream& os, const BucketPartition& p) {
  for (std::size_t b = 0; b < p.buckets.size(); ++b) {
    os << b << ':';
    for (std::size_t i = 0; i < p.buckets[b].size(); ++i) os << (i ? "," : " ") << p.buckets[b][i];
    os << '\n';
  }
}

BucketPartition read_partition(std::istream& is) {
  BucketPartition p;
  p.source.reset();
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw std::runtime_error("partition line without ':'");
    const auto index = static_cast<std::size_t>(parse_integer(line.substr(0, colon)));
    if (index != p.buckets.size()) throw std::runtime_error("partition buckets out of order");
    std::vector<std::size_t> keys;
    for (const auto& tok : split(std::string_view(line).substr(colon + 1), ", "))
      keys.push_back(static_cast<std::size_t>(parse_integer(tok)));
    p.buckets.push_back(std::move(keys));
  }
  return p;
}

} // namespace hmb
