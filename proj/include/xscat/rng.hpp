#pragma once
#include <array>
#include <cstdint>

namespace xscat {

// Counter-based RNG (Philox4x32-10, Salmon et al. SC'11). Each photon history
// owns an independent substream keyed by (angle, bin, photon); the generated
// sequence depends only on (seed, angle, bin, photon, draw index), never on
// thread scheduling, which is what makes multi-worker runs bit-reproducible.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint32_t angle, std::uint32_t bin, std::uint32_t photon)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          base_{0u, photon, bin, angle}
    {
    }

    explicit CounterRng(std::uint64_t seed) : CounterRng(seed, 0, 0, 0) {}

    std::uint32_t next_u32()
    {
        if (pos_ == 4)
            refill();
        return buf_[pos_++];
    }

    // Uniform double in the open interval (0,1); safe as argument of log().
    double uniform()
    {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        const std::uint64_t bits = ((hi << 32) | lo) >> 11; // 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1p-53;
    }

private:
    static void mul_hilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi)
    {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        lo = static_cast<std::uint32_t>(p);
        hi = static_cast<std::uint32_t>(p >> 32);
    }

    void refill()
    {
        std::array<std::uint32_t, 4> ctr = {block_, base_[1], base_[2], base_[3]};
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t lo0, hi0, lo1, hi1;
            mul_hilo(0xD2511F53u, ctr[0], lo0, hi0);
            mul_hilo(0xCD9E8D57u, ctr[2], lo1, hi1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        buf_ = ctr;
        pos_ = 0;
        ++block_;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> base_;
    std::array<std::uint32_t, 4> buf_{};
    std::uint32_t block_ = 0;
    int pos_ = 4;
};

} // namespace xscat
