#include "hmsbench/scenario/random_streams.hpp"

#include "hmsbench/common/hash.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hmsbench::scenario {

std::mt19937_64 make_stream(std::uint64_t seed, std::string_view scenario_id,
                            std::string_view label) {
  const std::string digest = sha256_hex(std::to_string(seed) + "|" + std::string(scenario_id) +
                                        "|" + std::string(label));
  std::vector<std::uint32_t> words;
  for (std::size_t i = 0; i + 8 <= digest.size(); i += 8) {
    words.push_back(static_cast<std::uint32_t>(std::stoul(digest.substr(i, 8), nullptr, 16)));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

std::int64_t uniform_int(std::mt19937_64& gen, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) {
    throw std::invalid_argument("uniform_int: empty interval");
  }
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (span == 0) {
    return static_cast<std::int64_t>(gen());
  }
  // Reject the low residue so every value is equally likely.
  const std::uint64_t threshold = (0 - span) % span;
  for (;;) {
    const std::uint64_t x = gen();
    if (x >= threshold) {
      return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % span);
    }
  }
}

std::int64_t exponential_int(std::mt19937_64& gen, double mean) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return std::max<std::int64_t>(1, std::llround(-mean * std::log1p(-u)));
}

RandomStreams::RandomStreams(const Scenario& scenario, std::uint64_t seed) {
  for (const auto& [name, d] : scenario.distributions) {
    streams_.emplace(name, Stream{d, make_stream(seed, scenario.id, d.stream)});
  }
}

std::int64_t RandomStreams::sample(const std::string& name) {
  auto it = streams_.find(name);
  if (it == streams_.end()) {
    throw std::out_of_range("unknown distribution " + name);
  }
  Stream& s = it->second;
  switch (s.distribution.kind) {
  case DistributionKind::Constant:
    return s.distribution.value;
  case DistributionKind::UniformInt:
    return uniform_int(s.gen, s.distribution.min, s.distribution.max);
  case DistributionKind::ExponentialInt:
    return exponential_int(s.gen, s.distribution.mean);
  }
  return 0;
}

} // namespace hmsbench::scenario
