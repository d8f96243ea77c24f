#include "halpern_vr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_set>

#include "halpern_vr/errors.hpp"

namespace hvr {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_) word = splitmix64(sm);
}

std::uint64_t RngStream::next_u64() {
  ++draws_;
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_index: bound must be positive");
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

bool RngStream::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("bernoulli: probability " + std::to_string(p) + " outside [0, 1]");
  }
  return uniform() < p;
}

std::vector<std::size_t> sample_batch_without_replacement(std::size_t n, std::size_t b,
                                                          RngStream& rng) {
  if (b < 1 || b > n) {
    throw InvalidArgument("sample_batch_without_replacement: need 1 <= b <= n, got b=" +
                          std::to_string(b) + ", n=" + std::to_string(n));
  }
  std::vector<std::size_t> batch;
  batch.reserve(b);
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(2 * b);
  for (std::size_t j = n - b; j < n; ++j) {
    const auto t = static_cast<std::size_t>(rng.uniform_index(j + 1));
    const std::size_t pick = chosen.contains(t) ? j : t;
    chosen.insert(pick);
    batch.push_back(pick);
  }
  std::sort(batch.begin(), batch.end());
  return batch;
}

SamplingDistribution::SamplingDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidArgument("SamplingDistribution: no weights");
  cumulative_.resize(weights_.size());
  // Neumaier-compensated total so that large n does not fail the 1e-12 check
  // through rounding alone.
  double total = 0.0;
  double compensation = 0.0;
  double running = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("SamplingDistribution: weight " + std::to_string(i) +
                            " is negative or nonfinite");
    }
    const double t = total + w;
    compensation += std::abs(total) >= w ? (total - t) + w : (w - t) + total;
    total = t;
    running += w;
    cumulative_[i] = running;
  }
  total += compensation;
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("SamplingDistribution: weights sum to " + std::to_string(total) +
                          ", expected 1");
  }
  const double first = weights_.front();
  uniform_ = std::all_of(weights_.begin(), weights_.end(),
                         [first](double w) { return w == first; });
}

SamplingDistribution SamplingDistribution::uniform(std::size_t n) {
  if (n == 0) throw InvalidArgument("SamplingDistribution::uniform: n must be positive");
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  return SamplingDistribution(std::move(w));
}

std::size_t SamplingDistribution::sample(RngStream& rng) const {
  if (uniform_) return static_cast<std::size_t>(rng.uniform_index(weights_.size()));
  const double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  if (idx >= weights_.size()) idx = weights_.size() - 1;
  // upper_bound skips zero-weight entries, except at the tail.
  while (weights_[idx] == 0.0 && idx > 0) --idx;
  return idx;
}

}  // namespace hvr
