#pragma once

#include <array>
#include <cstdint>

namespace rankone {

/// Philox4x32-10 (Salmon et al., SC'11): a keyed bijection of 128-bit
/// counters. Every (stage, sample, draw) triple maps to its own counter, so
/// Monte Carlo streams are reproducible regardless of evaluation order.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Block operator()(Block ctr) const {
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

    /// Uniform double in [0, 1) with 53 random bits from the block at `ctr`.
    double uniform(const Block& ctr) const {
        const Block b = (*this)(ctr);
        const std::uint64_t bits = (static_cast<std::uint64_t>(b[0]) << 32 | b[1]) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
    std::array<std::uint32_t, 2> key_;
};

}  // namespace rankone
