#pragma once

#include <array>
#include <cstdint>

namespace impatience {

// Philox4x32-10 (Salmon et al., SC'11). Stateless: the output is a pure
// function of (counter, key), which is what lets a mark sequence be read at
// arbitrary indices in any order.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Child stream id for replica r of a parent stream.
constexpr std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t replica) noexcept {
    return splitmix64(parent ^ splitmix64(replica + 0x51ED270B27AD1F3Bull));
}

// Two independent uniforms in [0, 1) with 53-bit resolution per
// (seed, stream, index, block).
class CounterUniforms {
public:
    CounterUniforms(std::uint64_t seed, std::uint64_t stream) noexcept {
        const std::uint64_t k = splitmix64(seed ^ splitmix64(stream));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    std::array<double, 2> at(std::int64_t index, std::uint32_t block) const noexcept {
        const auto u = static_cast<std::uint64_t>(index);
        const auto out = Philox4x32::apply(
            {static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(u >> 32), block, 0x1F2E3D4Cu}, key_);
        const std::uint64_t a = (std::uint64_t{out[0]} << 32) | out[1];
        const std::uint64_t b = (std::uint64_t{out[2]} << 32) | out[3];
        return {to_unit(a), to_unit(b)};
    }

private:
    static constexpr double to_unit(std::uint64_t bits) noexcept {
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    Philox4x32::Key key_{};
};

}  // namespace impatience
