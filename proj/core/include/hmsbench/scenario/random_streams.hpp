#pragma once

#include "hmsbench/scenario/scenario.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>

namespace hmsbench::scenario {

/// Generator for one (run seed, scenario id, stream label) triple. Streams
/// never share state, so adding a distribution leaves the others intact.
std::mt19937_64 make_stream(std::uint64_t seed, std::string_view scenario_id,
                            std::string_view label);

/// Unbiased draw from [lo, hi].
std::int64_t uniform_int(std::mt19937_64& gen, std::int64_t lo, std::int64_t hi);

/// Exponential draw rounded to a whole tick, at least 1.
std::int64_t exponential_int(std::mt19937_64& gen, double mean);

/// Named distributions of one scenario, each with its own stream.
class RandomStreams {
public:
  RandomStreams(const Scenario& scenario, std::uint64_t seed);

  /// Throws std::out_of_range for an undeclared name.
  std::int64_t sample(const std::string& name);

private:
  struct Stream {
    Distribution distribution;
    std::mt19937_64 gen;
  };
  std::map<std::string, Stream> streams_;
};

} // namespace hmsbench::scenario
