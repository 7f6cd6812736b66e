#include "sconv/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sconv {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double RngStream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open()
{
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi)
{
    if (hi < lo)
        throw std::invalid_argument("uniform_int: empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0)
        return static_cast<std::int64_t>(engine_());
    // rejection keeps the draw exactly uniform
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % span);
}

double RngStream::exponential(double rate)
{
    if (!(rate > 0.0))
        throw std::invalid_argument("exponential rate must be positive");
    return -std::log(uniform_open()) / rate;
}

double RngStream::normal()
{
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t RngStream::categorical(std::span<const double> weights)
{
    if (weights.empty())
        throw std::invalid_argument("categorical: no weights");
    double total = 0.0;
    for (double w : weights)
        total += w;
    const double target = uniform() * total;
    double acc = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        acc += weights[j];
        if (target < acc)
            return j;
    }
    return weights.size() - 1;
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t index, StreamPurpose purpose)
{
    std::uint64_t s = splitmix64(master_seed);
    s = splitmix64(s ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    s = splitmix64(s ^ static_cast<std::uint64_t>(purpose));
    return RngStream(s);
}

}  // namespace sconv
