#include "mabsa/rng.hpp"

#include "mabsa/errors.hpp"

#include <cmath>
#include <numbers>

namespace mabsa {

Rng Rng::derived(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finaliser over the pair
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + stream + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return Rng(z ^ (z >> 31));
}

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi)
{
    if (hi < lo) {
        throw ContractError("Rng::integer with empty range");
    }
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {
        return static_cast<std::int64_t>(engine_());
    }
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = (~std::uint64_t{0} / span) * span;
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return lo + static_cast<std::int64_t>(x % span);
}

double Rng::normal()
{
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace mabsa
