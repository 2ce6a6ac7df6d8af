#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rsgame {

// Counter-based random bits: Philox-4x32 with 10 rounds (Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3").  A 64-bit key and a 128-bit
// counter map to 128 output bits through a fixed bijection, so any (seed,
// path, block) triple yields the same bits on every platform and under any
// execution order.
class Philox4x32 {
  public:
    explicit Philox4x32(std::uint64_t key)
        : key0_(static_cast<std::uint32_t>(key)), key1_(static_cast<std::uint32_t>(key >> 32)) {}

    std::array<std::uint32_t, 4> operator()(std::array<std::uint32_t, 4> ctr) const {
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
                   static_cast<std::uint32_t>(p0)};
            k0 += 0x9E3779B9u;  // Weyl key schedule
            k1 += 0xBB67AE85u;
        }
        return ctr;
    }

  private:
    std::uint32_t key0_, key1_;
};

// Stream of standard normal draws for one simulated path.  Counter layout:
// words 0-1 hold the running block index, words 2-3 the path index; the key
// is the 64-bit seed.  Each 128-bit block yields two normals by the polar-free
// Box-Muller map: u = (top 53 bits + 1/2) * 2^-53 strictly inside (0, 1),
// z0 = sqrt(-2 log u1) cos(2 pi u2), z1 = the sine companion.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint64_t path_index)
        : gen_(seed),
          ctr_{0u, 0u, static_cast<std::uint32_t>(path_index),
               static_cast<std::uint32_t>(path_index >> 32)} {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const auto block = gen_(ctr_);
        if (++ctr_[0] == 0u) ++ctr_[1];
        const double u1 = to_unit(block[0], block[1]);
        const double u2 = to_unit(block[2], block[3]);
        const double rho = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        spare_ = rho * std::sin(ang);
        have_spare_ = true;
        return rho * std::cos(ang);
    }

  private:
    static double to_unit(std::uint32_t lo, std::uint32_t hi) {
        const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    Philox4x32 gen_;
    std::array<std::uint32_t, 4> ctr_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rsgame
