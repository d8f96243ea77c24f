#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hvr {

/**
 * Seeded pseudo-random stream.
 *
 * The generator is xoshiro256** (Blackman & Vigna) with its 256-bit state
 * filled from the seed by four rounds of splitmix64. Every derived draw
 * (uniform reals, bounded integers, normals) is computed here with explicit
 * arithmetic rather than through <random> distributions, whose output is
 * implementation-defined, so equal seeds give equal sequences on every
 * platform and standard library.
 */
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, bound). Unbiased (Lemire's multiply-and-reject).
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached and returned by the next call.
  double normal();

  /// True with probability p. Throws InvalidArgument for p outside [0, 1].
  bool bernoulli(double p);

  /// Number of 64-bit words consumed so far.
  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t draws_ = 0;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

/// Uniformly random size-b subset of {0, ..., n-1} (Floyd's algorithm),
/// returned in increasing order. Throws InvalidArgument unless 1 <= b <= n.
std::vector<std::size_t> sample_batch_without_replacement(std::size_t n, std::size_t b,
                                                          RngStream& rng);

/**
 * Categorical distribution over component indices.
 *
 * Weights must be nonnegative and sum to one within 1e-12. Zero-weight
 * entries are allowed and are never drawn.
 */
class SamplingDistribution {
 public:
  SamplingDistribution() = default;
  explicit SamplingDistribution(std::vector<double> weights);

  static SamplingDistribution uniform(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  bool is_uniform() const { return uniform_; }

  std::size_t sample(RngStream& rng) const;

 private:
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  bool uniform_ = false;
};

inline std::size_t sample_categorical(const SamplingDistribution& q, RngStream& rng) {
  return q.sample(rng);
}

}  // namespace hvr
