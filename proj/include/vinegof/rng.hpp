#pragma once

// Counter-based random number generation (Philox4x32-10). Every consumer of
// randomness addresses an explicit (seed, stream, index) triple, so draws are
// reproducible bit-for-bit no matter how work is scheduled across threads.

#include <array>
#include <cstdint>

namespace vinegof::rng {

struct Philox4x32 {
    static constexpr std::uint32_t mul_a = 0xD2511F53u;
    static constexpr std::uint32_t mul_b = 0xCD9E8D57u;
    static constexpr std::uint32_t weyl_a = 0x9E3779B9u;
    static constexpr std::uint32_t weyl_b = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += weyl_a;
                key[1] += weyl_b;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(mul_a) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(mul_b) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

// Substream identifiers: the study and bootstrap engines address their draws
// as (purpose, model, replication). Layout keeps all ids disjoint.
enum class Purpose : std::uint64_t { simulate = 0, ecp_surrogate = 1, bootstrap = 2 };

inline std::uint64_t substream(Purpose purpose, std::uint64_t model_index, std::uint64_t replication) {
    return (static_cast<std::uint64_t>(purpose) << 56) | ((model_index & 0xFFFFu) << 40) |
           (replication & 0xFFFFFFFFFFull);
}

// Stateless uniform stream: draw i of substream s under seed k is
// U(k, s, i), strictly inside (0,1).
class UniformStream {
public:
    UniformStream(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    double at(std::uint64_t index) const {
        const std::uint64_t blk = index >> 1;
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        const auto out = Philox4x32::block(ctr, key_);
        const int slot = static_cast<int>(index & 1u) * 2;
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(out[static_cast<std::size_t>(slot)]) << 32) | out[static_cast<std::size_t>(slot + 1)];
        // 53 significant bits, shifted half a step off the lattice ends
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    double next() { return at(index_++); }

    void reset(std::uint64_t index = 0) { index_ = index; }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_ = 0;
    std::uint64_t index_ = 0;
};

} // namespace vinegof::rng
