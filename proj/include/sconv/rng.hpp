#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace sconv {

/// Purposes under which independent streams are derived for one path index.
enum class StreamPurpose : std::uint64_t {
    jumps = 1,
    initial_condition = 2,
    scenario = 3,
    audit = 4,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Random stream for one Monte-Carlo path.
///
/// Only std::mt19937_64 (whose output sequence is fixed by the standard) is
/// used as a bit source; all variate transforms are written out here so that
/// a given seed produces identical samples with any standard library.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on the open interval (0, 1).
    double uniform_open();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Integer uniform on [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    double exponential(double rate);
    double normal();
    /// Index j with probability weights[j] / sum(weights).
    std::size_t categorical(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
};

/// Stream for (master seed, path index, purpose); depends on nothing else.
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t index,
                        StreamPurpose purpose = StreamPurpose::jumps);

}  // namespace sconv
