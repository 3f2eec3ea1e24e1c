#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace lecam {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair selects an
/// independent sequence, so Monte-Carlo runs are reproducible per stream
/// regardless of how work is split. Satisfies UniformRandomBitGenerator.
class Philox {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    [[nodiscard]] std::uint64_t seed() const { return key_[0] | (std::uint64_t{key_[1]} << 32); }
    [[nodiscard]] std::uint64_t stream() const { return ctr_[2] | (std::uint64_t{ctr_[3]} << 32); }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (idx_ == 4) {
            buf_ = bijection(ctr_, key_);
            increment();
            idx_ = 0;
        }
        return buf_[idx_++];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        const std::uint64_t hi = (*this)() >> 5;
        const std::uint64_t lo = (*this)() >> 6;
        return (static_cast<double>(hi) * 67108864.0 + static_cast<double>(lo)) *
               (1.0 / 9007199254740992.0);
    }

    /// Uniform double in the open interval (0, 1).
    double uniform_open() {
        double u;
        do u = uniform();
        while (u == 0.0);
        return u;
    }

    /// The raw 10-round bijection, exposed for known-answer tests.
    static Block bijection(Block ctr, Key key) {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    void increment() {
        if (++ctr_[0] == 0) ++ctr_[1];
    }

    Key key_;
    Block ctr_;
    Block buf_{};
    int idx_ = 4;
};

}  // namespace lecam
